//! Domain types: restrictions, universes, lexical entries and relation
//! formulas, plus the pure functions over them (order, arity, the partial
//! restriction function and its definedness predicate).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Default cap on the arity of a lexical entry.
pub const DEFAULT_MAX_ARITY: usize = 14;

/// A selectional restriction, an element of the restriction universe (`Phy`, `Inf`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Restriction {
    pub id: String,
    pub gloss: String,
}

impl Restriction {
    pub fn new(id: impl Into<String>, gloss: impl Into<String>) -> Self {
        Restriction {
            id: id.into(),
            gloss: gloss.into(),
        }
    }
}

/// A basic morphosyntactic category such as `A` (adjective) or `X` (core argument).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementaryUniverse {
    pub id: String,
    pub gloss: String,
}

impl ElementaryUniverse {
    pub fn new(id: impl Into<String>, gloss: impl Into<String>) -> Self {
        ElementaryUniverse {
            id: id.into(),
            gloss: gloss.into(),
        }
    }
}

/// A morpheme as declared in the lexicon.
///
/// `signature` holds the restrictions the entry imposes on its argument
/// positions (1-based, at most one per position). `satisfies` lists the
/// restrictions the entry witnesses when it occurs as an argument.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexEntry {
    pub surface: String,
    pub universe: String,
    pub arity: usize,
    pub signature: BTreeMap<usize, String>,
    pub satisfies: BTreeSet<String>,
}

impl LexEntry {
    pub fn new(surface: impl Into<String>, universe: impl Into<String>, arity: usize) -> Self {
        LexEntry {
            surface: surface.into(),
            universe: universe.into(),
            arity,
            signature: BTreeMap::new(),
            satisfies: BTreeSet::new(),
        }
    }

    pub fn restrict(mut self, position: usize, restriction: impl Into<String>) -> Self {
        self.signature.insert(position, restriction.into());
        self
    }

    pub fn satisfying<I, S>(mut self, restrictions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.satisfies
            .extend(restrictions.into_iter().map(Into::into));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("application of `{head}` to an empty argument sequence")]
    EmptyArguments { head: String },
    #[error("`{head}` has arity {arity} but is applied to {given} argument(s)")]
    ArityMismatch {
        head: String,
        arity: usize,
        given: usize,
    },
}

/// A relation formula: a lexical atom, or a head applied to a nonempty
/// sequence of arguments. The order is computed once at construction.
#[derive(Clone)]
pub struct MTerm(Arc<Node>);

struct Node {
    kind: TermKind,
    order: usize,
}

pub enum TermKind {
    Atom(Arc<LexEntry>),
    App { head: MTerm, args: Vec<MTerm> },
}

impl MTerm {
    pub fn atom(entry: Arc<LexEntry>) -> Self {
        MTerm(Arc::new(Node {
            kind: TermKind::Atom(entry),
            order: 0,
        }))
    }

    /// Builds `head(args)`. The number of arguments must equal the head's arity;
    /// since fully applied terms have arity 0, only atoms can head an application.
    pub fn app(head: MTerm, args: Vec<MTerm>) -> Result<Self, TermError> {
        if args.is_empty() {
            return Err(TermError::EmptyArguments {
                head: head.to_string(),
            });
        }
        let arity = arity_of(&head);
        if arity != args.len() {
            return Err(TermError::ArityMismatch {
                head: head.to_string(),
                arity,
                given: args.len(),
            });
        }
        let order = 1 + args.iter().map(MTerm::order).max().unwrap_or(0);
        Ok(MTerm(Arc::new(Node {
            kind: TermKind::App { head, args },
            order,
        })))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Cached order.
    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.0.kind, TermKind::Atom(_))
    }

    pub fn as_atom(&self) -> Option<&Arc<LexEntry>> {
        match &self.0.kind {
            TermKind::Atom(entry) => Some(entry),
            TermKind::App { .. } => None,
        }
    }

    pub fn head(&self) -> Option<&MTerm> {
        match &self.0.kind {
            TermKind::App { head, .. } => Some(head),
            TermKind::Atom(_) => None,
        }
    }

    pub fn args(&self) -> &[MTerm] {
        match &self.0.kind {
            TermKind::App { args, .. } => args,
            TermKind::Atom(_) => &[],
        }
    }

    /// The lexical entry at the root of the head spine.
    pub fn head_entry(&self) -> &Arc<LexEntry> {
        match &self.0.kind {
            TermKind::Atom(entry) => entry,
            TermKind::App { head, .. } => head.head_entry(),
        }
    }

    /// Nesting depth of applications; coincides with the order because
    /// heads are always atoms.
    pub fn depth(&self) -> usize {
        match &self.0.kind {
            TermKind::Atom(_) => 0,
            TermKind::App { head, args } => {
                1 + args
                    .iter()
                    .chain(std::iter::once(head))
                    .map(MTerm::depth)
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Renders the term in the explicit bracketed input notation, `(head arg ...)`.
    pub fn to_bracketed(&self) -> String {
        match &self.0.kind {
            TermKind::Atom(entry) => entry.surface.clone(),
            TermKind::App { head, args } => {
                let mut out = format!("({}", head.to_bracketed());
                for arg in args {
                    out.push(' ');
                    out.push_str(&arg.to_bracketed());
                }
                out.push(')');
                out
            }
        }
    }
}

impl fmt::Display for MTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            TermKind::Atom(entry) => f.write_str(&entry.surface),
            TermKind::App { head, args } => {
                write!(f, "{head}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for MTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MTerm({self})")
    }
}

impl PartialEq for MTerm {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Atom(a), TermKind::Atom(b)) => a == b,
            (TermKind::App { head: h1, args: a1 }, TermKind::App { head: h2, args: a2 }) => {
                h1 == h2 && a1 == a2
            }
            _ => false,
        }
    }
}

impl Eq for MTerm {}

impl Hash for MTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0.kind {
            TermKind::Atom(entry) => {
                0u8.hash(state);
                entry.hash(state);
            }
            TermKind::App { head, args } => {
                1u8.hash(state);
                head.hash(state);
                args.hash(state);
            }
        }
    }
}

/// Canonical ordering: by surface form of the head, then recursively by
/// arguments. An atom sorts before every application it heads.
impl Ord for MTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Atom(a), TermKind::Atom(b)) => a.cmp(b),
            (TermKind::Atom(_), TermKind::App { head, .. }) => self.cmp(head).then(Ordering::Less),
            (TermKind::App { head, .. }, TermKind::Atom(_)) => {
                head.cmp(other).then(Ordering::Greater)
            }
            (TermKind::App { head: h1, args: a1 }, TermKind::App { head: h2, args: a2 }) => {
                h1.cmp(h2).then_with(|| a1.cmp(a2))
            }
        }
    }
}

impl PartialOrd for MTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Recomputes the order bottom-up, ignoring the cached value.
pub fn order_of(t: &MTerm) -> usize {
    match t.kind() {
        TermKind::Atom(_) => 0,
        TermKind::App { args, .. } => 1 + args.iter().map(order_of).max().unwrap_or(0),
    }
}

/// The arity function: declared arity for atoms, 0 for applications.
pub fn arity_of(t: &MTerm) -> usize {
    match t.kind() {
        TermKind::Atom(entry) => entry.arity,
        TermKind::App { .. } => 0,
    }
}

/// The partial restriction function `s(t)(y)`. Defined only on atoms whose
/// signature maps position `y`.
pub fn restriction_at(t: &MTerm, y: usize) -> Option<&str> {
    match t.kind() {
        TermKind::Atom(entry) => entry.signature.get(&y).map(String::as_str),
        TermKind::App { .. } => None,
    }
}

/// A predicate over (possibly undefined) restrictions.
pub trait RestrictionPredicate {
    fn holds(&self, restriction: Option<&str>) -> bool;
}

/// The default predicate: the restriction is defined and declared in the given set.
pub struct Declared<'a>(pub &'a BTreeMap<String, Restriction>);

impl RestrictionPredicate for Declared<'_> {
    fn holds(&self, restriction: Option<&str>) -> bool {
        p_holds(self.0, restriction)
    }
}

/// `p(r)`: true iff `r` is present and declared.
pub fn p_holds(declared: &BTreeMap<String, Restriction>, restriction: Option<&str>) -> bool {
    restriction.is_some_and(|id| declared.contains_key(id))
}
