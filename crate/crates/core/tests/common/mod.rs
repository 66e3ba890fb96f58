#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use zcheck::checker::check_term;
use zcheck::lexicon::{validate_lexicon, HeadPosition, HeadRule, Lexicon};
use zcheck::term::{ElementaryUniverse, LexEntry, MTerm, Restriction};

pub fn manifest_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

pub fn seed_path() -> PathBuf {
    manifest_path("../../seed.zlex")
}

pub fn seed_text() -> String {
    std::fs::read_to_string(seed_path()).unwrap()
}

pub fn seed() -> Lexicon {
    zcheck::load_lexicon(&seed_text()).unwrap()
}

/// The hand-written fixture files, sorted by name.
pub fn fixture_paths() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(manifest_path("tests/fixtures"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "zlex"))
        .collect();
    paths.sort();
    paths
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub max_entries: usize,
    pub max_arity: usize,
}

/// A random valid lexicon. Entries are `w0`, `w1`, ...; universes `U0`...;
/// restrictions `R0`...
pub fn random_lexicon(seed: u64, params: GenParams) -> Lexicon {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut lex = Lexicon::new();
    let n_restrictions = rng.gen_range(1..=3);
    let n_universes = rng.gen_range(1..=3);
    let restrictions: Vec<String> = (0..n_restrictions).map(|i| format!("R{i}")).collect();
    let universes: Vec<String> = (0..n_universes).map(|i| format!("U{i}")).collect();
    for r in &restrictions {
        lex.add_restriction(Restriction::new(r.clone(), format!("restriction {r}")));
    }
    for u in &universes {
        lex.add_universe(ElementaryUniverse::new(u.clone(), format!("universe {u}")));
    }
    // how strongly heads restrict their positions in this lexicon
    let coverage: f64 = *[0.0, 0.5, 1.0, 1.0].choose(&mut rng).unwrap();
    let n_entries = rng.gen_range(1..=params.max_entries);
    for i in 0..n_entries {
        let arity = if rng.gen_bool(0.5) {
            0
        } else {
            rng.gen_range(1..=params.max_arity.max(1))
        };
        let mut e = LexEntry::new(
            format!("w{i}"),
            universes.choose(&mut rng).unwrap().clone(),
            arity,
        );
        for pos in 1..=arity {
            if rng.gen_bool(coverage) {
                e.signature
                    .insert(pos, restrictions.choose(&mut rng).unwrap().clone());
            }
        }
        for r in &restrictions {
            if rng.gen_bool(0.6) {
                e.satisfies.insert(r.clone());
            }
        }
        lex.add_entry(e);
    }
    let heads: Vec<(String, usize)> = lex
        .entries()
        .values()
        .filter(|e| e.arity > 0)
        .map(|e| (e.universe.clone(), e.arity))
        .collect();
    let mut keys = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=4) {
        // mostly rules some declared head can use
        let (head, k) = match heads.choose(&mut rng) {
            Some(h) if rng.gen_bool(0.8) => h.clone(),
            _ => (
                universes.choose(&mut rng).unwrap().clone(),
                rng.gen_range(1..=params.max_arity.max(1)),
            ),
        };
        let args: Vec<String> = (0..k)
            .map(|_| universes.choose(&mut rng).unwrap().clone())
            .collect();
        if !keys.insert((head.clone(), args.clone())) {
            continue;
        }
        let position = *[HeadPosition::Any, HeadPosition::First, HeadPosition::Last]
            .choose(&mut rng)
            .unwrap();
        lex.add_head_rule(
            HeadRule::new(
                rng.gen_range(0..4),
                &head,
                args,
                universes.choose(&mut rng).unwrap(),
            )
            .with_position(position),
        );
    }
    if rng.gen_bool(0.25) {
        let u = universes.choose(&mut rng).unwrap().clone();
        let set: Vec<String> = restrictions
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        lex.set_universe_satisfies(&u, set);
    }
    let report = validate_lexicon(&lex);
    assert!(report.is_empty(), "generator produced {report:?}");
    lex
}

/// A random structurally well-formed term (arities respected, universes and
/// restrictions unchecked) with application nesting at most `depth`.
pub fn random_term(lex: &Lexicon, rng: &mut StdRng, depth: usize) -> MTerm {
    let entries: Vec<_> = lex.entries().values().cloned().collect();
    let entry = entries.choose(rng).unwrap().clone();
    if depth == 0 || entry.arity == 0 || rng.gen_bool(0.25) {
        return MTerm::atom(entry);
    }
    let args = (0..entry.arity)
        .map(|_| random_term(lex, rng, depth - 1))
        .collect();
    MTerm::app(MTerm::atom(entry), args).unwrap()
}

/// Every structurally well-formed term up to the nesting bound, ignoring
/// universes and head rules entirely.
pub fn all_terms(lex: &Lexicon, depth: usize) -> Vec<MTerm> {
    let atoms: Vec<MTerm> = lex.entries().values().cloned().map(MTerm::atom).collect();
    let mut level = atoms.clone();
    for _ in 0..depth {
        let mut next = atoms.clone();
        for head in atoms.iter().filter(|a| zcheck::arity_of(a) > 0) {
            let n = zcheck::arity_of(head);
            let mut tuples: Vec<Vec<MTerm>> = vec![vec![]];
            for _ in 0..n {
                tuples = tuples
                    .into_iter()
                    .flat_map(|prefix| {
                        level.iter().map(move |t| {
                            let mut v = prefix.clone();
                            v.push(t.clone());
                            v
                        })
                    })
                    .collect();
            }
            for args in tuples {
                next.push(MTerm::app(head.clone(), args).unwrap());
            }
        }
        level = next;
    }
    level
}

/// Brute-force fragment: every term within the nesting bound that checks.
pub fn brute_force_fragment(lex: &Lexicon, depth: usize) -> BTreeSet<MTerm> {
    all_terms(lex, depth)
        .into_iter()
        .filter(|t| check_term(t, lex).is_ok())
        .collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random term guided by the head rules, so that universes line up and
/// only restrictions may fail. Falls back to [`random_term`] when the
/// lexicon offers nothing to build from.
pub fn random_typed_term(lex: &Lexicon, rng: &mut StdRng, depth: usize) -> MTerm {
    let universes: Vec<&String> = lex.universes().keys().collect();
    for _ in 0..8 {
        let target = universes.choose(rng).unwrap();
        if let Some(t) = typed_for(lex, rng, target, depth) {
            return t;
        }
    }
    random_term(lex, rng, depth)
}

fn typed_for(lex: &Lexicon, rng: &mut StdRng, universe: &str, depth: usize) -> Option<MTerm> {
    let atoms: Vec<_> = lex
        .entries()
        .values()
        .filter(|e| e.universe == universe)
        .cloned()
        .collect();
    let rules: Vec<&HeadRule> = lex
        .head_rules()
        .iter()
        .filter(|r| r.external_universe == universe)
        .collect();
    if depth > 0 && !rules.is_empty() && (atoms.is_empty() || rng.gen_bool(0.7)) {
        let rule = rules.choose(rng).unwrap();
        let heads: Vec<_> = lex
            .entries()
            .values()
            .filter(|e| e.universe == rule.head_universe && e.arity == rule.arity())
            .cloned()
            .collect();
        if let Some(head) = heads.choose(rng) {
            let args: Option<Vec<MTerm>> = rule
                .arg_universes
                .iter()
                .map(|u| typed_for(lex, rng, u, depth - 1))
                .collect();
            if let Some(args) = args {
                return Some(MTerm::app(MTerm::atom(head.clone()), args).unwrap());
            }
        }
    }
    atoms.choose(rng).cloned().map(MTerm::atom)
}

/// Half rule-guided, half unconstrained.
pub fn mixed_term(lex: &Lexicon, rng: &mut StdRng, depth: usize) -> MTerm {
    if rng.gen_bool(0.5) {
        random_typed_term(lex, rng, depth)
    } else {
        random_term(lex, rng, depth)
    }
}

/// Token sequence that spells out a term, placing each head where its rule
/// allows (`Any` puts it first).
pub fn surface_yield(t: &MTerm, lex: &Lexicon) -> Vec<String> {
    let Some(head) = t.head() else {
        return vec![t.head_entry().surface.clone()];
    };
    let head_universe = &head.head_entry().universe;
    let arg_universes: Vec<String> = t
        .args()
        .iter()
        .map(|a| zcheck::checker::external_universe(a, lex).unwrap_or_default())
        .collect();
    let refs: Vec<&str> = arg_universes.iter().map(String::as_str).collect();
    let last = lex
        .rule_for(head_universe, &refs)
        .is_some_and(|r| r.position == HeadPosition::Last);
    let mut out: Vec<String> = t
        .args()
        .iter()
        .flat_map(|a| surface_yield(a, lex))
        .collect();
    if last {
        out.push(head.head_entry().surface.clone());
    } else {
        out.insert(0, head.head_entry().surface.clone());
    }
    out
}
