mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use zcheck::checker::{
    audit_questions, check_cu_elim, check_term, enumerate_fragment, replay,
    verify_projection_theorem, FailureKind, Judgment,
};
use zcheck::lexicon::{load_lexicon, parse_lexicon, validate_lexicon};
use zcheck::parser::{parse_bracketed, parse_with_trace};
use zcheck::term::{arity_of, order_of, restriction_at, MTerm, TermKind};

use common::{mixed_term, random_lexicon, rng, surface_yield, GenParams};

const PARAMS: GenParams = GenParams {
    max_entries: 10,
    max_arity: 3,
};

fn args_of(t: &MTerm) -> &[MTerm] {
    match t.kind() {
        TermKind::App { args, .. } => args,
        TermKind::Atom(_) => &[],
    }
}

fn subterms(t: &MTerm, out: &mut Vec<MTerm>) {
    out.push(t.clone());
    if let Some(h) = t.head() {
        subterms(h, out);
    }
    for a in t.args() {
        subterms(a, out);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_is_monotone_and_cached(seed in any::<u64>(), term_seed in any::<u64>()) {
        let lex = random_lexicon(seed, PARAMS);
        let t = mixed_term(&lex, &mut rng(term_seed), 3);
        let mut all = Vec::new();
        subterms(&t, &mut all);
        for s in &all {
            prop_assert_eq!(order_of(s), s.order());
            for a in args_of(s) {
                prop_assert!(s.order() > a.order());
            }
        }
    }

    #[test]
    fn restriction_function_bounded_by_arity(seed in any::<u64>(), term_seed in any::<u64>()) {
        let lex = random_lexicon(seed, PARAMS);
        let t = mixed_term(&lex, &mut rng(term_seed), 2);
        for y in 0..=lex.max_arity() + 1 {
            let s = restriction_at(&t, y);
            if s.is_some() {
                prop_assert!(t.is_atom());
                prop_assert!((1..=arity_of(&t)).contains(&y));
            }
            if lex.p_holds(s) {
                prop_assert!(s.is_some());
            }
        }
    }

    #[test]
    fn derivations_replay_and_agree_on_order(seed in any::<u64>(), term_seed in any::<u64>()) {
        let lex = random_lexicon(seed, PARAMS);
        let mut r = rng(term_seed);
        let mut terms: Vec<MTerm> = (0..8).map(|_| mixed_term(&lex, &mut r, 3)).collect();
        terms.extend(enumerate_fragment(&lex, 1));
        for t in terms {
            if let Ok(d) = check_term(&t, &lex) {
                prop_assert!(replay(&d, &lex).is_ok(), "{}", d.render());
                let expected = Judgment::Order { term: t.clone(), order: Some(order_of(&t)) };
                prop_assert_eq!(d.conclusion, expected);
            }
        }
    }

    #[test]
    fn restriction_violations_are_minimal(seed in any::<u64>(), term_seed in any::<u64>()) {
        let lex = random_lexicon(seed, PARAMS);
        let t = mixed_term(&lex, &mut rng(term_seed), 2);
        let Err(f) = check_term(&t, &lex) else { return Ok(()) };
        if f.kind != FailureKind::RestrictionViolation {
            return Ok(());
        }
        let v = f.violation.as_ref().unwrap();
        prop_assert!(!v.satisfies.contains(&v.required));
        // find the failing application and swap in each satisfying atom
        let mut all = Vec::new();
        subterms(&t, &mut all);
        let app = all
            .iter()
            .find(|s| {
                s.head().is_some_and(|h| h.to_string() == v.head)
                    && s.args().get(v.position - 1) == Some(&v.argument)
                    && check_cu_elim(s, &lex).is_err()
            })
            .unwrap();
        prop_assert_eq!(restriction_at(app.head().unwrap(), v.position), Some(v.required.as_str()));
        for e in lex.entries().values().filter(|e| e.satisfies.contains(&v.required)) {
            let mut args = app.args().to_vec();
            args[v.position - 1] = MTerm::atom(e.clone());
            let replaced = MTerm::app(app.head().unwrap().clone(), args).unwrap();
            // the position is satisfied; any remaining failure is elsewhere
            if let Err(g) = check_cu_elim(&replaced, &lex) {
                if let Some(w) = &g.violation {
                    prop_assert_ne!(w.position, v.position);
                }
            }
        }
    }

    #[test]
    fn theorem_and_audit_cohere(seed in any::<u64>()) {
        let lex = random_lexicon(seed, PARAMS);
        let report = verify_projection_theorem(&lex, 0);
        let audit = audit_questions(&lex);
        prop_assert_eq!(report.holds(), audit.q1 && audit.q2);
    }

    #[test]
    fn fragment_terms_all_check(seed in any::<u64>()) {
        let lex = random_lexicon(seed, GenParams { max_entries: 6, max_arity: 2 });
        let terms = enumerate_fragment(&lex, 2);
        let mut sorted = terms.clone();
        sorted.sort();
        prop_assert_eq!(&sorted, &terms);
        for t in &terms {
            prop_assert!(t.depth() <= 2);
            prop_assert!(check_term(t, &lex).is_ok(), "{}", t);
        }
    }

    #[test]
    fn serialization_is_a_fixpoint(seed in any::<u64>()) {
        let lex = random_lexicon(seed, PARAMS);
        let text = lex.serialize();
        let again = load_lexicon(&text).unwrap();
        prop_assert_eq!(&again, &lex);
        prop_assert_eq!(again.serialize(), text);
    }

    #[test]
    fn flat_parse_agrees_with_bracketing(seed in any::<u64>(), input_seed in any::<u64>()) {
        let lex = random_lexicon(seed, PARAMS);
        let mut r = rng(input_seed);
        let surfaces: Vec<&String> = lex.entries().keys().collect();
        let tokens: Vec<String> = if rand::Rng::gen_bool(&mut r, 0.5) {
            surface_yield(&common::random_typed_term(&lex, &mut r, 3), &lex)
        } else {
            let len = rand::Rng::gen_range(&mut r, 1..=5);
            (0..len)
                .map(|_| (*rand::seq::SliceRandom::choose(surfaces.as_slice(), &mut r).unwrap()).clone())
                .collect()
        };
        if let Ok(trace) = parse_with_trace(&tokens, &lex) {
            for step in &trace.steps {
                let mut next = 0;
                for c in step {
                    prop_assert_eq!(c.span.0, next);
                    prop_assert!(c.span.1 > c.span.0);
                    next = c.span.1;
                }
                prop_assert_eq!(next, tokens.len());
            }
            let t = trace.result();
            prop_assert_eq!(&parse_bracketed(&t.to_bracketed(), &lex).unwrap(), t);
            let again = parse_with_trace(&tokens, &lex).unwrap();
            prop_assert_eq!(again.result(), t);
        }
    }
}

#[test]
fn fragment_closure_against_brute_force() {
    for seed in 0..40 {
        let lex = random_lexicon(
            seed,
            GenParams {
                max_entries: 5,
                max_arity: 2,
            },
        );
        for depth in 0..=2 {
            let fragment: BTreeSet<_> = enumerate_fragment(&lex, depth).into_iter().collect();
            assert_eq!(
                fragment,
                common::brute_force_fragment(&lex, depth),
                "seed {seed} depth {depth}"
            );
        }
    }
}

#[test]
fn parse_validate_equivalence_and_error_locality() {
    // corrupt one line at a time; every reported line, when removed, clears its error
    let text = common::seed_text();
    let lines: Vec<&str> = text.lines().collect();
    let corruptions = [
        ("-> Phy", "-> Nope"),
        (": X /", ": Nowhere /"),
        ("arity 1", "arity 0"),
        ("( X )", "( Q )"),
        ("\"physical entity\"", "physical"),
    ];
    let mut exercised = 0;
    for (i, line) in lines.iter().enumerate() {
        for (from, to) in corruptions {
            if !line.contains(from) {
                continue;
            }
            let mut mutated = lines.clone();
            let replaced = line.replacen(from, to, 1);
            mutated[i] = &replaced;
            let mutated_text = mutated.join("\n");
            let loaded = load_lexicon(&mutated_text);
            if let Ok((lex, _)) = parse_lexicon(&mutated_text) {
                assert_eq!(loaded.is_ok(), validate_lexicon(&lex).is_empty());
            }
            let errors = loaded.unwrap_err();
            exercised += 1;
            for e in &errors {
                let mut removed = mutated.clone();
                removed.remove(e.line - 1);
                let after = load_lexicon(&removed.join("\n"));
                let still = after
                    .err()
                    .unwrap_or_default()
                    .iter()
                    .any(|f| f.message == e.message);
                assert!(
                    !still,
                    "removing line {} did not clear `{}`",
                    e.line, e.message
                );
            }
        }
    }
    assert!(exercised >= 10, "{exercised}");
}
