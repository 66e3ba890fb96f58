use std::collections::{BTreeMap, BTreeSet};

use crate::lexicon::Lexicon;
use crate::term::{arity_of, restriction_at, Declared, MTerm, RestrictionPredicate};

/// Per-term facts needed to extend the fragment by one level.
struct Analysis {
    external: String,
    satisfies: BTreeSet<String>,
}

/// Every well-formed, restriction-respecting term with application nesting
/// at most `depth`, in canonical order. Depth 0 yields the atoms.
pub fn enumerate_fragment(lex: &Lexicon, depth: usize) -> Vec<MTerm> {
    let mut known: BTreeMap<MTerm, Analysis> = BTreeMap::new();
    for entry in lex.entries().values() {
        known.insert(
            MTerm::atom(entry.clone()),
            Analysis {
                external: entry.universe.clone(),
                satisfies: entry.satisfies.clone(),
            },
        );
    }

    for level in 1..=depth {
        // arguments grouped by the universe they expose
        let mut by_universe: BTreeMap<&str, Vec<&MTerm>> = BTreeMap::new();
        for (t, a) in &known {
            by_universe.entry(a.external.as_str()).or_default().push(t);
        }
        let mut fresh: BTreeMap<MTerm, Analysis> = BTreeMap::new();
        for entry in lex.entries().values().filter(|e| e.arity > 0) {
            let head = MTerm::atom(entry.clone());
            for rule in lex.head_rules() {
                if rule.head_universe != entry.universe || rule.arity() != entry.arity {
                    continue;
                }
                let pools: Vec<&[&MTerm]> = rule
                    .arg_universes
                    .iter()
                    .map(|u| by_universe.get(u.as_str()).map_or(&[][..], Vec::as_slice))
                    .collect();
                for_each_product(&pools, &mut |args| {
                    // only terms new at this level: some argument has order level-1
                    if args.iter().all(|a| a.order() + 1 < level) {
                        return;
                    }
                    let respects = entry
                        .signature
                        .iter()
                        .all(|(&pos, r)| known[args[pos - 1]].satisfies.contains(r));
                    if !respects {
                        return;
                    }
                    let args: Vec<MTerm> = args.iter().map(|a| (*a).clone()).collect();
                    let satisfies = match lex.universe_satisfies().get(&rule.external_universe) {
                        Some(set) => set.clone(),
                        None => known[&args[0]].satisfies.clone(),
                    };
                    let t = MTerm::app(head.clone(), args).expect("arity matches rule");
                    fresh.insert(
                        t,
                        Analysis {
                            external: rule.external_universe.clone(),
                            satisfies,
                        },
                    );
                });
            }
        }
        if fresh.is_empty() {
            break;
        }
        known.extend(fresh);
    }
    known.into_keys().collect()
}

fn for_each_product<'a, F: FnMut(&[&'a MTerm])>(pools: &[&[&'a MTerm]], f: &mut F) {
    fn go<'a, F: FnMut(&[&'a MTerm])>(pools: &[&[&'a MTerm]], acc: &mut Vec<&'a MTerm>, f: &mut F) {
        match pools.split_first() {
            None => f(acc),
            Some((pool, rest)) => {
                for t in pool.iter() {
                    acc.push(t);
                    go(rest, acc, f);
                    acc.pop();
                }
            }
        }
    }
    go(pools, &mut Vec::with_capacity(pools.len()), f);
}

/// Which side of the biconditional failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// A suitable position (within the arity) lacks a restriction.
    Forward,
    /// A restriction holds at a position outside the arity.
    Backward,
}

impl Direction {
    pub fn arrow(self) -> &'static str {
        match self {
            Direction::Forward => "->",
            Direction::Backward => "<-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermVerdict {
    pub term: MTerm,
    pub arity: usize,
    /// Positions where the restriction function is defined.
    pub restricted: Vec<usize>,
    /// Biconditional outcome for positions `1..=position_bound`.
    pub verdicts: Vec<bool>,
}

impl TermVerdict {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(|&v| v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub term: MTerm,
    pub position: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Audit {
    /// Every head projects some restriction.
    pub q1: bool,
    /// Entries of arity >= 1 with an empty signature.
    pub unrestricted: Vec<String>,
    /// Every restricting head restricts all of its positions.
    pub q2: bool,
    /// Restricting entries and the positions they leave open.
    pub partial: Vec<(String, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub depth: usize,
    /// Positions are checked over `1..=position_bound` (max_arity + 1).
    pub position_bound: usize,
    pub checked: Vec<TermVerdict>,
    pub counterexamples: Vec<Counterexample>,
    pub audit: Audit,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks `1 <= y <= ar(x)  <->  p(s(x)(y))` for every term `x` of the
/// fragment at `depth` and every position `y` up to `max_arity + 1`, with
/// `p` the declared-restriction predicate.
pub fn verify_projection_theorem(lex: &Lexicon, depth: usize) -> TheoremReport {
    verify_projection_theorem_with(lex, depth, &Declared(lex.restrictions()))
}

pub fn verify_projection_theorem_with(
    lex: &Lexicon,
    depth: usize,
    predicate: &dyn RestrictionPredicate,
) -> TheoremReport {
    let position_bound = lex.max_arity() + 1;
    let mut checked = Vec::new();
    let mut counterexamples = Vec::new();
    for x in enumerate_fragment(lex, depth) {
        let arity = arity_of(&x);
        let mut restricted = Vec::new();
        let mut verdicts = Vec::with_capacity(position_bound);
        for y in 1..=position_bound {
            let s = restriction_at(&x, y);
            if s.is_some() {
                restricted.push(y);
            }
            let suitable = (1..=arity).contains(&y);
            let p = predicate.holds(s);
            verdicts.push(suitable == p);
            if suitable != p {
                counterexamples.push(Counterexample {
                    term: x.clone(),
                    position: y,
                    direction: if suitable {
                        Direction::Forward
                    } else {
                        Direction::Backward
                    },
                });
            }
        }
        checked.push(TermVerdict {
            term: x,
            arity,
            restricted,
            verdicts,
        });
    }
    TheoremReport {
        depth,
        position_bound,
        checked,
        counterexamples,
        audit: audit_questions(lex),
    }
}

/// Q1: do all entries of arity >= 1 project restrictions?
/// Q2: do restricting entries restrict all of their positions?
pub fn audit_questions(lex: &Lexicon) -> Audit {
    let mut audit = Audit::default();
    for e in lex.entries().values() {
        if e.arity >= 1 && e.signature.is_empty() {
            audit.unrestricted.push(e.surface.clone());
        }
        if !e.signature.is_empty() {
            let missing: Vec<usize> = (1..=e.arity)
                .filter(|y| !e.signature.contains_key(y))
                .collect();
            if !missing.is_empty() {
                audit.partial.push((e.surface.clone(), missing));
            }
        }
    }
    audit.q1 = audit.unrestricted.is_empty();
    audit.q2 = audit.partial.is_empty();
    audit
}
