//! Typing derivations by the rules MAP, n-Form, EU-Form, CU-Form and
//! CU-Elim, restriction enforcement, and the projection theorem verifier.
//!
//! Restriction memberships `b : r` are justified by an auxiliary rule,
//! [`Rule::Sat`]: an atom witnesses the restrictions in its `satisfies` set;
//! an application witnesses the restrictions declared for its external
//! universe (`universe_satisfies`) when such a declaration exists, and
//! otherwise inherits them from its first argument.

mod fragment;
mod replay;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lexicon::{id_set, Lexicon};
use crate::term::{order_of, LexEntry, MTerm, TermKind};

pub use fragment::{
    audit_questions, enumerate_fragment, verify_projection_theorem, verify_projection_theorem_with,
    Audit, Counterexample, Direction, TermVerdict, TheoremReport,
};
pub use replay::{replay, ReplayError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Judgment {
    /// `t : M_n`, or `t : M` when the order is left unannotated.
    Order { term: MTerm, order: Option<usize> },
    /// `T : M` for an elementary universe.
    Universe(String),
    /// `A(B,...) : M`.
    Complex { head: String, args: Vec<String> },
    /// `b : r`.
    Member { term: MTerm, restriction: String },
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::Order {
                term,
                order: Some(n),
            } => write!(f, "{term} : M_{n}"),
            Judgment::Order { term, order: None } => write!(f, "{term} : M"),
            Judgment::Universe(u) => write!(f, "{u} : M"),
            Judgment::Complex { head, args } => write!(f, "{head}({}) : M", args.join(",")),
            Judgment::Member { term, restriction } => write!(f, "{term} : {restriction}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Map,
    NForm,
    EuForm,
    CuForm,
    CuElim,
    Sat,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Map => "MAP",
            Rule::NForm => "n-Form",
            Rule::EuForm => "EU-Form",
            Rule::CuForm => "CU-Form",
            Rule::CuElim => "CU-Elim",
            Rule::Sat => "Sat",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Judgment,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: Rule, conclusion: Judgment) -> Self {
        Derivation {
            conclusion,
            rule,
            premises: Vec::new(),
        }
    }

    /// Visits nodes premises-first; the callback receives the nesting depth.
    pub fn walk_post_order<F: FnMut(&Derivation, usize)>(&self, f: &mut F) {
        self.walk_inner(0, f);
    }

    fn walk_inner<F: FnMut(&Derivation, usize)>(&self, depth: usize, f: &mut F) {
        for p in &self.premises {
            p.walk_inner(depth + 1, f);
        }
        f(self, depth);
    }

    /// All nodes (premises first) using the given rule.
    pub fn nodes_with_rule(&self, rule: Rule) -> Vec<&Derivation> {
        let mut out = Vec::new();
        self.collect(rule, &mut out);
        out
    }

    fn collect<'a>(&'a self, rule: Rule, out: &mut Vec<&'a Derivation>) {
        for p in &self.premises {
            p.collect(rule, out);
        }
        if self.rule == rule {
            out.push(self);
        }
    }

    /// One line per node, premises above their conclusion, indented by depth.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.walk_post_order(&mut |d, depth| {
            out.push_str(&"  ".repeat(depth));
            out.push_str(&format!("{} {}\n", d.rule, d.conclusion));
        });
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureKind {
    UnknownMorpheme,
    NoRule,
    ArityMismatch,
    UniverseMismatch,
    RestrictionViolation,
}

impl FailureKind {
    pub fn name(self) -> &'static str {
        match self {
            FailureKind::UnknownMorpheme => "UNKNOWN_MORPHEME",
            FailureKind::NoRule => "NO_RULE",
            FailureKind::ArityMismatch => "ARITY_MISMATCH",
            FailureKind::UniverseMismatch => "UNIVERSE_MISMATCH",
            FailureKind::RestrictionViolation => "RESTRICTION_VIOLATION",
        }
    }
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The failed premise `b : r` of CU-Elim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionViolation {
    pub head: String,
    pub position: usize,
    pub required: String,
    pub argument: MTerm,
    /// The restrictions the argument does witness.
    pub satisfies: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct CheckFailure {
    pub kind: FailureKind,
    /// The offending term or token, rendered.
    pub subject: String,
    pub message: String,
    pub violation: Option<Box<RestrictionViolation>>,
}

impl CheckFailure {
    fn new(kind: FailureKind, subject: impl Into<String>, message: String) -> Self {
        CheckFailure {
            kind,
            subject: subject.into(),
            message,
            violation: None,
        }
    }

    pub fn unknown_morpheme(token: &str) -> Self {
        Self::new(
            FailureKind::UnknownMorpheme,
            token,
            format!("unknown morpheme `{token}`"),
        )
    }

    fn restriction(v: RestrictionViolation) -> Self {
        let message = format!(
            "restriction violation: {} requires {} at position {}; {} satisfies {}",
            v.head,
            v.required,
            v.position,
            v.argument,
            id_set(&v.satisfies)
        );
        CheckFailure {
            kind: FailureKind::RestrictionViolation,
            subject: v.argument.to_string(),
            message,
            violation: Some(Box::new(v)),
        }
    }
}

fn lookup<'a>(surface: &str, lex: &'a Lexicon) -> Result<&'a Arc<LexEntry>, CheckFailure> {
    lex.entry(surface)
        .ok_or_else(|| CheckFailure::unknown_morpheme(surface))
}

fn map_node(entry: &Arc<LexEntry>, order: Option<usize>) -> Derivation {
    Derivation::leaf(
        Rule::Map,
        Judgment::Order {
            term: MTerm::atom(entry.clone()),
            order,
        },
    )
}

/// MAP: a morpheme is a type. Arity-0 entries are annotated with order 0;
/// the order of a head is left to the application it heads.
pub fn check_map(entry: &LexEntry, lex: &Lexicon) -> Result<Derivation, CheckFailure> {
    check_morpheme(&entry.surface, lex)
}

pub fn check_morpheme(surface: &str, lex: &Lexicon) -> Result<Derivation, CheckFailure> {
    let entry = lookup(surface, lex)?;
    let order = (entry.arity == 0).then_some(0);
    Ok(map_node(entry, order))
}

/// EU-Form: a declared elementary universe is a type.
pub fn check_eu_form(universe: &str, lex: &Lexicon) -> Result<Derivation, CheckFailure> {
    if lex.has_universe(universe) {
        Ok(Derivation::leaf(
            Rule::EuForm,
            Judgment::Universe(universe.to_string()),
        ))
    } else {
        Err(CheckFailure::new(
            FailureKind::UniverseMismatch,
            universe,
            format!("undeclared universe `{universe}`"),
        ))
    }
}

/// The universe a term exposes to the head that takes it as an argument.
pub fn external_universe(t: &MTerm, lex: &Lexicon) -> Result<String, CheckFailure> {
    match t.kind() {
        TermKind::Atom(e) => Ok(lookup(&e.surface, lex)?.universe.clone()),
        TermKind::App { head, args } => {
            let head_universe = external_universe(head, lex)?;
            let arg_universes = args
                .iter()
                .map(|a| external_universe(a, lex))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&str> = arg_universes.iter().map(String::as_str).collect();
            lex.rule_for(&head_universe, &refs)
                .map(|r| r.external_universe.clone())
                .ok_or_else(|| no_rule(t, &head_universe, &refs))
        }
    }
}

fn no_rule(t: &MTerm, head: &str, args: &[&str]) -> CheckFailure {
    CheckFailure::new(
        FailureKind::NoRule,
        t.to_string(),
        format!("no head rule licenses {head}({}) for `{t}`", args.join(",")),
    )
}

/// The restrictions a term witnesses as an argument.
pub fn satisfied_restrictions(t: &MTerm, lex: &Lexicon) -> Result<BTreeSet<String>, CheckFailure> {
    match t.kind() {
        TermKind::Atom(e) => Ok(lookup(&e.surface, lex)?.satisfies.clone()),
        TermKind::App { args, .. } => {
            let ext = external_universe(t, lex)?;
            match lex.universe_satisfies().get(&ext) {
                Some(set) => Ok(set.clone()),
                None => satisfied_restrictions(&args[0], lex),
            }
        }
    }
}

/// Derivation of `t : r`, if the term witnesses the restriction.
fn membership(t: &MTerm, r: &str, lex: &Lexicon) -> Result<Option<Derivation>, CheckFailure> {
    let conclusion = Judgment::Member {
        term: t.clone(),
        restriction: r.to_string(),
    };
    match t.kind() {
        TermKind::Atom(e) => {
            let entry = lookup(&e.surface, lex)?;
            Ok(entry
                .satisfies
                .contains(r)
                .then(|| Derivation::leaf(Rule::Sat, conclusion)))
        }
        TermKind::App { args, .. } => {
            let ext = external_universe(t, lex)?;
            if let Some(set) = lex.universe_satisfies().get(&ext) {
                return Ok(set
                    .contains(r)
                    .then(|| Derivation::leaf(Rule::Sat, conclusion)));
            }
            Ok(membership(&args[0], r, lex)?.map(|sub| Derivation {
                conclusion,
                rule: Rule::Sat,
                premises: vec![sub],
            }))
        }
    }
}

fn split_app(t: &MTerm) -> Result<(&MTerm, &[MTerm]), CheckFailure> {
    match t.kind() {
        TermKind::App { head, args } => Ok((head, args)),
        TermKind::Atom(_) => Err(CheckFailure::new(
            FailureKind::ArityMismatch,
            t.to_string(),
            format!("`{t}` is not an application"),
        )),
    }
}

/// CU-Form: from `a(b1,...)` with `a : A` and `bi : Bi`, form `A(B1,...) : M`.
pub fn check_cu_form(t: &MTerm, lex: &Lexicon) -> Result<Derivation, CheckFailure> {
    let (head, args) = split_app(t)?;
    let head_entry = lookup(&head.head_entry().surface, lex)?;
    if !head.is_atom() || head_entry.arity != args.len() {
        let arity = if head.is_atom() { head_entry.arity } else { 0 };
        return Err(CheckFailure::new(
            FailureKind::ArityMismatch,
            t.to_string(),
            format!(
                "`{head}` has arity {arity} but is applied to {} argument(s)",
                args.len()
            ),
        ));
    }
    let head_universe = head_entry.universe.clone();
    let arg_universes = args
        .iter()
        .map(|a| external_universe(a, lex))
        .collect::<Result<Vec<_>, _>>()?;
    let mut premises = vec![check_eu_form(&head_universe, lex)?];
    for u in &arg_universes {
        premises.push(check_eu_form(u, lex)?);
    }
    let refs: Vec<&str> = arg_universes.iter().map(String::as_str).collect();
    if lex.rule_for(&head_universe, &refs).is_none() {
        return Err(no_rule(t, &head_universe, &refs));
    }
    Ok(Derivation {
        conclusion: Judgment::Complex {
            head: head_universe,
            args: arg_universes,
        },
        rule: Rule::CuForm,
        premises,
    })
}

/// CU-Elim: every restricted argument position must be witnessed. Premises
/// are the head's MAP judgment, the CU-Form judgment, and one membership
/// judgment per restricted position in ascending order.
pub fn check_cu_elim(t: &MTerm, lex: &Lexicon) -> Result<Derivation, CheckFailure> {
    let cu_form = check_cu_form(t, lex)?;
    let (head, args) = split_app(t)?;
    let head_entry = lookup(&head.head_entry().surface, lex)?;
    let mut premises = vec![map_node(head_entry, Some(t.order())), cu_form];
    for (&position, required) in &head_entry.signature {
        let argument = &args[position - 1];
        match membership(argument, required, lex)? {
            Some(d) => premises.push(d),
            None => {
                return Err(CheckFailure::restriction(RestrictionViolation {
                    head: head_entry.surface.clone(),
                    position,
                    required: required.clone(),
                    argument: argument.clone(),
                    satisfies: satisfied_restrictions(argument, lex)?,
                }))
            }
        }
    }
    Ok(Derivation {
        conclusion: Judgment::Order {
            term: t.clone(),
            order: None,
        },
        rule: Rule::CuElim,
        premises,
    })
}

/// Full bottom-up check. The result concludes `t : M_n` with `n` the order
/// of `t`; the first failure in post-order (head, then arguments left to
/// right, then the application itself) is reported.
pub fn check_term(t: &MTerm, lex: &Lexicon) -> Result<Derivation, CheckFailure> {
    match t.kind() {
        TermKind::Atom(e) => {
            let entry = lookup(&e.surface, lex)?;
            Ok(map_node(entry, Some(0)))
        }
        TermKind::App { head, args } => {
            check_term(head, lex)?;
            let mut arg_derivations = Vec::with_capacity(args.len());
            for a in args {
                arg_derivations.push(check_term(a, lex)?);
            }
            let mut premises = vec![check_cu_elim(t, lex)?];
            premises.extend(arg_derivations);
            Ok(Derivation {
                conclusion: Judgment::Order {
                    term: t.clone(),
                    order: Some(order_of(t)),
                },
                rule: Rule::NForm,
                premises,
            })
        }
    }
}
