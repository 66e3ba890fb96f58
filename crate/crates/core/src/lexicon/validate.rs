use std::collections::BTreeMap;
use std::fmt;

use super::{DeclRef, Lexicon, LoadError, LoadErrorKind, SourceMap};

/// The lexicon invariants checked by [`validate_lexicon`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Invariant {
    RestrictionIdSyntax,
    UniverseIdSyntax,
    NamespaceClash,
    SurfaceSyntax,
    UnknownUniverse,
    UnknownRestriction,
    ArityCap,
    SignatureRange,
    NullarySignature,
    EmptyHeadRule,
    HeadRuleConflict,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::RestrictionIdSyntax => "restriction-id-syntax",
            Invariant::UniverseIdSyntax => "universe-id-syntax",
            Invariant::NamespaceClash => "namespace-clash",
            Invariant::SurfaceSyntax => "surface-syntax",
            Invariant::UnknownUniverse => "unknown-universe",
            Invariant::UnknownRestriction => "unknown-restriction",
            Invariant::ArityCap => "arity-cap",
            Invariant::SignatureRange => "signature-range",
            Invariant::NullarySignature => "nullary-signature",
            Invariant::EmptyHeadRule => "empty-head-rule",
            Invariant::HeadRuleConflict => "head-rule-conflict",
        }
    }

    fn load_kind(self) -> LoadErrorKind {
        match self {
            Invariant::UnknownUniverse | Invariant::UnknownRestriction => {
                LoadErrorKind::DanglingReference
            }
            Invariant::SignatureRange | Invariant::NullarySignature => {
                LoadErrorKind::ArityInconsistency
            }
            Invariant::ArityCap => LoadErrorKind::ArityCap,
            Invariant::HeadRuleConflict | Invariant::NamespaceClash => LoadErrorKind::Duplicate,
            _ => LoadErrorKind::Invalid,
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: Invariant,
    pub decl: DeclRef,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, invariant: Invariant, decl: DeclRef, message: String) {
        self.violations.push(Violation {
            invariant,
            decl,
            message,
        });
    }

    /// Attaches source lines. Violations whose declaration has no recorded
    /// line are reported at line 0.
    pub fn locate(&self, map: &SourceMap) -> Vec<LoadError> {
        let mut errors: Vec<LoadError> = self
            .violations
            .iter()
            .map(|v| LoadError {
                line: map.line_of(&v.decl).unwrap_or(0),
                column: 1,
                kind: v.invariant.load_kind(),
                message: format!("{}: {}", v.decl, v.message),
            })
            .collect();
        errors.sort_by_key(|e| e.line);
        errors
    }
}

fn is_restriction_id(id: &str) -> bool {
    let mut chars = id.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_universe_id(id: &str) -> bool {
    let mut chars = id.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Checks every lexicon invariant. An empty report means the lexicon is
/// exactly what [`super::load_lexicon`] would accept.
pub fn validate_lexicon(lex: &Lexicon) -> ValidationReport {
    let mut report = ValidationReport::default();

    for id in lex.restrictions().keys() {
        if !is_restriction_id(id) {
            report.push(
                Invariant::RestrictionIdSyntax,
                DeclRef::Restriction(id.clone()),
                format!("`{id}` is not a valid restriction id"),
            );
        }
    }
    for id in lex.universes().keys() {
        if !is_universe_id(id) {
            report.push(
                Invariant::UniverseIdSyntax,
                DeclRef::Universe(id.clone()),
                format!("`{id}` is not a valid universe id"),
            );
        }
        if lex.has_restriction(id) {
            report.push(
                Invariant::NamespaceClash,
                DeclRef::Universe(id.clone()),
                format!("`{id}` is declared both as a universe and as a restriction"),
            );
        }
    }

    for (u, set) in lex.universe_satisfies() {
        let decl = DeclRef::UniverseSatisfies(u.clone());
        if !lex.has_universe(u) {
            report.push(
                Invariant::UnknownUniverse,
                decl.clone(),
                format!("undeclared universe `{u}`"),
            );
        }
        for r in set {
            if !lex.has_restriction(r) {
                report.push(
                    Invariant::UnknownRestriction,
                    decl.clone(),
                    format!("undeclared restriction `{r}`"),
                );
            }
        }
    }

    for e in lex.entries().values() {
        let decl = DeclRef::Entry(e.surface.clone());
        if e.surface.is_empty()
            || e.surface
                .chars()
                .any(|c| c.is_whitespace() || c == '(' || c == ')')
        {
            report.push(
                Invariant::SurfaceSyntax,
                decl.clone(),
                "surface form must be nonempty and free of whitespace and brackets".to_string(),
            );
        }
        if !lex.has_universe(&e.universe) {
            report.push(
                Invariant::UnknownUniverse,
                decl.clone(),
                format!("undeclared universe `{}`", e.universe),
            );
        }
        if e.arity > lex.max_arity() {
            report.push(
                Invariant::ArityCap,
                decl.clone(),
                format!("arity {} exceeds max_arity {}", e.arity, lex.max_arity()),
            );
        }
        if e.arity == 0 && !e.signature.is_empty() {
            report.push(
                Invariant::NullarySignature,
                decl.clone(),
                "an entry of arity 0 cannot restrict argument positions".to_string(),
            );
        } else {
            for &pos in e.signature.keys() {
                if pos == 0 || pos > e.arity {
                    report.push(
                        Invariant::SignatureRange,
                        decl.clone(),
                        format!("signature position {pos} outside 1..{}", e.arity),
                    );
                }
            }
        }
        for r in e.signature.values().chain(&e.satisfies) {
            if !lex.has_restriction(r) {
                report.push(
                    Invariant::UnknownRestriction,
                    decl.clone(),
                    format!("undeclared restriction `{r}`"),
                );
            }
        }
    }

    let mut seen: BTreeMap<(&str, &[String]), &super::HeadRule> = BTreeMap::new();
    for rule in lex.head_rules() {
        let decl = DeclRef::HeadRule(rule.clone());
        if rule.arg_universes.is_empty() {
            report.push(
                Invariant::EmptyHeadRule,
                decl.clone(),
                "a head rule needs at least one argument universe".to_string(),
            );
        }
        let mut referenced: Vec<&String> = vec![&rule.head_universe];
        referenced.extend(&rule.arg_universes);
        referenced.push(&rule.external_universe);
        referenced.sort();
        referenced.dedup();
        for u in referenced {
            if !lex.has_universe(u) {
                report.push(
                    Invariant::UnknownUniverse,
                    decl.clone(),
                    format!("undeclared universe `{u}`"),
                );
            }
        }
        let key = (rule.head_universe.as_str(), rule.arg_universes.as_slice());
        match seen.get(&key) {
            Some(first) => report.push(
                Invariant::HeadRuleConflict,
                decl,
                format!("conflicts with `{first}`: one rule per head and argument universes"),
            ),
            None => {
                seen.insert(key, rule);
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{load_lexicon, HeadRule};
    use crate::term::{ElementaryUniverse, LexEntry, Restriction};

    fn base() -> Lexicon {
        let mut lex = Lexicon::new();
        lex.add_restriction(Restriction::new("Phy", "physical entity"));
        lex.add_universe(ElementaryUniverse::new("A", "adjective"));
        lex.add_universe(ElementaryUniverse::new("X", "core argument"));
        lex
    }

    fn invariants(lex: &Lexicon) -> Vec<Invariant> {
        validate_lexicon(lex)
            .violations
            .iter()
            .map(|v| v.invariant)
            .collect()
    }

    #[test]
    fn seed_is_valid() {
        let lex = load_lexicon(include_str!("../../../../seed.zlex")).unwrap();
        assert!(validate_lexicon(&lex).is_empty());
    }

    #[test]
    fn nullary_entry_with_signature_is_one_violation() {
        let mut lex = base();
        lex.add_entry(LexEntry::new("car", "X", 0).restrict(1, "Phy"));
        assert_eq!(invariants(&lex), [Invariant::NullarySignature]);
    }

    #[test]
    fn arity_above_cap_is_one_violation() {
        let mut lex = base();
        lex.add_entry(LexEntry::new("big", "A", 15));
        assert_eq!(invariants(&lex), [Invariant::ArityCap]);
        lex.set_max_arity(15);
        assert!(invariants(&lex).is_empty());
    }

    #[test]
    fn signature_position_out_of_range() {
        let mut lex = base();
        lex.add_entry(LexEntry::new("red", "A", 1).restrict(2, "Phy"));
        assert_eq!(invariants(&lex), [Invariant::SignatureRange]);
    }

    #[test]
    fn dangling_references() {
        let mut lex = base();
        lex.add_entry(
            LexEntry::new("red", "Q", 1)
                .restrict(1, "Qux")
                .satisfying(["Zed"]),
        );
        lex.add_head_rule(HeadRule::new(1, "A", ["Y"], "X"));
        lex.set_universe_satisfies("W", ["Phy"]);
        assert_eq!(
            invariants(&lex),
            [
                Invariant::UnknownUniverse,
                Invariant::UnknownUniverse,
                Invariant::UnknownRestriction,
                Invariant::UnknownRestriction,
                Invariant::UnknownUniverse,
            ]
        );
    }

    #[test]
    fn namespace_and_id_syntax() {
        let mut lex = base();
        lex.add_universe(ElementaryUniverse::new("Phy", "clash"));
        lex.add_restriction(Restriction::new("bad-id", "hyphen not allowed"));
        lex.add_universe(ElementaryUniverse::new("9x", "digit first"));
        assert_eq!(
            invariants(&lex),
            [
                Invariant::RestrictionIdSyntax,
                Invariant::UniverseIdSyntax,
                Invariant::NamespaceClash,
            ]
        );
    }

    #[test]
    fn surface_syntax() {
        let mut lex = base();
        lex.add_entry(LexEntry::new("", "X", 0));
        lex.add_entry(LexEntry::new("two words", "X", 0));
        assert_eq!(
            invariants(&lex),
            [Invariant::SurfaceSyntax, Invariant::SurfaceSyntax]
        );
    }

    #[test]
    fn conflicting_head_rules() {
        let mut lex = base();
        lex.add_head_rule(HeadRule::new(1, "A", ["X"], "X"));
        lex.add_head_rule(HeadRule::new(2, "A", ["X"], "X"));
        assert_eq!(invariants(&lex), [Invariant::HeadRuleConflict]);
        let mut lex = base();
        lex.add_head_rule(HeadRule::new(1, "A", Vec::<String>::new(), "X"));
        assert_eq!(invariants(&lex), [Invariant::EmptyHeadRule]);
    }

    #[test]
    fn conflicting_head_rules_located_at_later_line() {
        let text = "universe A : \"a\"\nuniverse X : \"x\"\nheadrule 1 : A(X) => X\nheadrule 2 : A(X) => X\n";
        let errs = load_lexicon(text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 4);
    }

    #[test]
    fn arity_cap_error_from_text() {
        let text = "universe V : \"verb\"\noption max_arity 2\nentry \"v\" : V / arity 3\n";
        let errs = load_lexicon(text).unwrap_err();
        assert_eq!(errs[0].line, 3);
        assert_eq!(errs[0].kind, LoadErrorKind::ArityCap);
    }
}
