//! The declarative lexicon: restrictions, universes, entries and head rules.
//!
//! A lexicon is loaded from a line-oriented text format, one declaration per
//! line:
//!
//! ```text
//! restriction Phy : "physical entity"
//! universe A : "adjective"
//! universe_satisfies X {Phy}
//! entry "red" : A / arity 1 / restricts 1 -> Phy
//! entry "car" : X / arity 0 / satisfies {Phy, Cou}
//! headrule 20 : A ( X ) => X / head first
//! option max_arity 14
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Declarations may appear in
//! any order. [`load_lexicon`] parses and then validates; every error carries
//! the line and column of the declaration that caused it.

mod syntax;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{ElementaryUniverse, LexEntry, Restriction, DEFAULT_MAX_ARITY};

pub use validate::{validate_lexicon, Invariant, ValidationReport, Violation};

/// Where a head rule allows the head to sit relative to its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum HeadPosition {
    /// Anywhere in the window, arguments keep their declared order around it.
    #[default]
    Any,
    /// Head precedes its arguments (`red car`).
    First,
    /// Head follows its arguments (`work -s`).
    Last,
}

/// Declares that a head of `head_universe` combines with adjacent arguments
/// of `arg_universes` (in order), yielding a constituent of `external_universe`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeadRule {
    pub head_universe: String,
    pub arg_universes: Vec<String>,
    /// Higher binds first.
    pub precedence: i64,
    pub external_universe: String,
    pub position: HeadPosition,
}

impl HeadRule {
    pub fn new<I, S>(precedence: i64, head: &str, args: I, external: &str) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        HeadRule {
            head_universe: head.to_string(),
            arg_universes: args.into_iter().map(Into::into).collect(),
            precedence,
            external_universe: external.to_string(),
            position: HeadPosition::Any,
        }
    }

    pub fn with_position(mut self, position: HeadPosition) -> Self {
        self.position = position;
        self
    }

    pub fn arity(&self) -> usize {
        self.arg_universes.len()
    }

    pub fn matches(&self, head: &str, args: &[&str]) -> bool {
        self.head_universe == head
            && self.arg_universes.len() == args.len()
            && self.arg_universes.iter().zip(args).all(|(a, b)| a == b)
    }

    /// Head-universe application `H(A1,...)`.
    pub fn pattern(&self) -> String {
        format!("{}({})", self.head_universe, self.arg_universes.join(","))
    }
}

impl fmt::Display for HeadRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "headrule {} : {} ( {} ) => {}",
            self.precedence,
            self.head_universe,
            self.arg_universes.join(", "),
            self.external_universe
        )?;
        match self.position {
            HeadPosition::Any => Ok(()),
            HeadPosition::First => f.write_str(" / head first"),
            HeadPosition::Last => f.write_str(" / head last"),
        }
    }
}

/// Identifies one declaration of a lexicon, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeclRef {
    MaxArity,
    Restriction(String),
    Universe(String),
    UniverseSatisfies(String),
    Entry(String),
    HeadRule(HeadRule),
}

impl fmt::Display for DeclRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclRef::MaxArity => f.write_str("option max_arity"),
            DeclRef::Restriction(id) => write!(f, "restriction {id}"),
            DeclRef::Universe(id) => write!(f, "universe {id}"),
            DeclRef::UniverseSatisfies(id) => write!(f, "universe_satisfies {id}"),
            DeclRef::Entry(surface) => write!(f, "entry \"{surface}\""),
            DeclRef::HeadRule(rule) => write!(f, "headrule {}", rule.pattern()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    restrictions: BTreeMap<String, Restriction>,
    universes: BTreeMap<String, ElementaryUniverse>,
    universe_satisfies: BTreeMap<String, BTreeSet<String>>,
    entries: BTreeMap<String, Arc<LexEntry>>,
    head_rules: Vec<HeadRule>,
    max_arity: usize,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            restrictions: BTreeMap::new(),
            universes: BTreeMap::new(),
            universe_satisfies: BTreeMap::new(),
            entries: BTreeMap::new(),
            head_rules: Vec::new(),
            max_arity: DEFAULT_MAX_ARITY,
        }
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn restrictions(&self) -> &BTreeMap<String, Restriction> {
        &self.restrictions
    }

    pub fn universes(&self) -> &BTreeMap<String, ElementaryUniverse> {
        &self.universes
    }

    pub fn universe_satisfies(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.universe_satisfies
    }

    pub fn entries(&self) -> &BTreeMap<String, Arc<LexEntry>> {
        &self.entries
    }

    /// Head rules in canonical order (head universe, argument universes, ...).
    pub fn head_rules(&self) -> &[HeadRule] {
        &self.head_rules
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn entry(&self, surface: &str) -> Option<&Arc<LexEntry>> {
        self.entries.get(surface)
    }

    pub fn has_universe(&self, id: &str) -> bool {
        self.universes.contains_key(id)
    }

    pub fn has_restriction(&self, id: &str) -> bool {
        self.restrictions.contains_key(id)
    }

    /// The head rule licensing a head of universe `head` over arguments of
    /// the given universes, if any.
    pub fn rule_for(&self, head: &str, args: &[&str]) -> Option<&HeadRule> {
        self.head_rules.iter().find(|r| r.matches(head, args))
    }

    /// `p(r)` against this lexicon's declared restrictions.
    pub fn p_holds(&self, restriction: Option<&str>) -> bool {
        crate::term::p_holds(&self.restrictions, restriction)
    }

    pub fn set_max_arity(&mut self, max_arity: usize) {
        self.max_arity = max_arity;
    }

    pub fn add_restriction(&mut self, r: Restriction) -> Option<Restriction> {
        self.restrictions.insert(r.id.clone(), r)
    }

    pub fn add_universe(&mut self, u: ElementaryUniverse) -> Option<ElementaryUniverse> {
        self.universes.insert(u.id.clone(), u)
    }

    pub fn set_universe_satisfies<I, S>(&mut self, universe: &str, restrictions: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.universe_satisfies.insert(
            universe.to_string(),
            restrictions.into_iter().map(Into::into).collect(),
        );
    }

    pub fn add_entry(&mut self, entry: LexEntry) -> Option<Arc<LexEntry>> {
        self.entries.insert(entry.surface.clone(), Arc::new(entry))
    }

    pub fn remove_entry(&mut self, surface: &str) -> Option<Arc<LexEntry>> {
        self.entries.remove(surface)
    }

    pub fn add_head_rule(&mut self, rule: HeadRule) {
        let at = self.head_rules.partition_point(|r| r <= &rule);
        self.head_rules.insert(at, rule);
    }

    /// Serializes to the text format. Declarations are sorted by kind, then id.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if self.max_arity != DEFAULT_MAX_ARITY {
            out.push_str(&format!("option max_arity {}\n", self.max_arity));
        }
        for r in self.restrictions.values() {
            out.push_str(&format!("restriction {} : {}\n", r.id, quote(&r.gloss)));
        }
        for u in self.universes.values() {
            out.push_str(&format!("universe {} : {}\n", u.id, quote(&u.gloss)));
        }
        for (u, set) in &self.universe_satisfies {
            out.push_str(&format!("universe_satisfies {} {}\n", u, id_set(set)));
        }
        for e in self.entries.values() {
            out.push_str(&format!(
                "entry {} : {} / arity {}",
                quote(&e.surface),
                e.universe,
                e.arity
            ));
            if !e.signature.is_empty() {
                let parts: Vec<String> = e
                    .signature
                    .iter()
                    .map(|(pos, r)| format!("{pos} -> {r}"))
                    .collect();
                out.push_str(&format!(" / restricts {}", parts.join(", ")));
            }
            if !e.satisfies.is_empty() {
                out.push_str(&format!(" / satisfies {}", id_set(&e.satisfies)));
            }
            out.push('\n');
        }
        for rule in &self.head_rules {
            out.push_str(&format!("{rule}\n"));
        }
        out
    }
}

/// Renders `{A, B}`.
pub(crate) fn id_set<'a, I>(ids: I) -> String
where
    I: IntoIterator<Item = &'a String>,
{
    let ids: Vec<&str> = ids.into_iter().map(String::as_str).collect();
    format!("{{{}}}", ids.join(", "))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadErrorKind {
    Syntax,
    Duplicate,
    DanglingReference,
    ArityInconsistency,
    ArityCap,
    Invalid,
}

/// A located lexicon error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct LoadError {
    pub line: usize,
    pub column: usize,
    pub kind: LoadErrorKind,
    pub message: String,
}

/// Line numbers of each declaration in the source text.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    lines: BTreeMap<DeclRef, usize>,
}

impl SourceMap {
    pub fn line_of(&self, decl: &DeclRef) -> Option<usize> {
        self.lines.get(decl).copied()
    }

    fn insert(&mut self, decl: DeclRef, line: usize) {
        self.lines.insert(decl, line);
    }
}

/// Parses the text without running validation. Only syntax and duplicate
/// declaration errors are reported at this stage.
pub fn parse_lexicon(text: &str) -> Result<(Lexicon, SourceMap), Vec<LoadError>> {
    syntax::parse(text)
}

/// Parses and validates a lexicon.
pub fn load_lexicon(text: &str) -> Result<Lexicon, Vec<LoadError>> {
    let (lex, map) = parse_lexicon(text)?;
    let report = validate_lexicon(&lex);
    if report.is_empty() {
        Ok(lex)
    } else {
        Err(report.locate(&map))
    }
}
