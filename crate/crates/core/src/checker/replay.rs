use thiserror::Error;

use super::{external_universe, Derivation, Judgment, Rule};
use crate::lexicon::Lexicon;
use crate::term::{order_of, MTerm, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{rule} node `{conclusion}`: {message}")]
pub struct ReplayError {
    pub rule: Rule,
    pub conclusion: String,
    pub message: String,
}

/// Re-checks every node of a derivation against its rule's schema: premise
/// count and shape, and the side conditions drawn from the lexicon.
pub fn replay(d: &Derivation, lex: &Lexicon) -> Result<(), ReplayError> {
    let fail = |message: String| ReplayError {
        rule: d.rule,
        conclusion: d.conclusion.to_string(),
        message,
    };
    let premise_count = |n: usize| {
        if d.premises.len() == n {
            Ok(())
        } else {
            Err(fail(format!(
                "expected {n} premise(s), found {}",
                d.premises.len()
            )))
        }
    };

    match (d.rule, &d.conclusion) {
        (Rule::Map, Judgment::Order { term, order }) => {
            premise_count(0)?;
            let TermKind::Atom(e) = term.kind() else {
                return Err(fail("MAP concludes only on atoms".into()));
            };
            let Some(entry) = lex.entry(&e.surface) else {
                return Err(fail(format!("`{}` is not a morpheme", e.surface)));
            };
            if entry.arity == 0 && order.is_some_and(|n| n != 0) {
                return Err(fail("an arity-0 morpheme has order 0".into()));
            }
        }
        (Rule::EuForm, Judgment::Universe(u)) => {
            premise_count(0)?;
            if !lex.has_universe(u) {
                return Err(fail(format!("undeclared universe `{u}`")));
            }
        }
        (Rule::CuForm, Judgment::Complex { head, args }) => {
            premise_count(1 + args.len())?;
            for (p, u) in d.premises.iter().zip(std::iter::once(head).chain(args)) {
                if p.rule != Rule::EuForm || p.conclusion != Judgment::Universe(u.clone()) {
                    return Err(fail(format!("premise must be EU-Form for `{u}`")));
                }
            }
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            if lex.rule_for(head, &refs).is_none() {
                return Err(fail("no head rule licenses this complex universe".into()));
            }
        }
        (Rule::CuElim, Judgment::Order { term, order: None }) => {
            let TermKind::App { head, args } = term.kind() else {
                return Err(fail("CU-Elim concludes only on applications".into()));
            };
            let Some(entry) = lex.entry(&head.head_entry().surface) else {
                return Err(fail(format!("`{head}` is not a morpheme")));
            };
            premise_count(2 + entry.signature.len())?;
            match &d.premises[0].conclusion {
                Judgment::Order { term: h, .. } if d.premises[0].rule == Rule::Map && h == head => {
                }
                _ => return Err(fail("first premise must be MAP of the head".into())),
            }
            let expected = Judgment::Complex {
                head: entry.universe.clone(),
                args: args
                    .iter()
                    .map(|a| external_universe(a, lex))
                    .collect::<Result<_, _>>()
                    .map_err(|e| fail(e.message))?,
            };
            if d.premises[1].rule != Rule::CuForm || d.premises[1].conclusion != expected {
                return Err(fail(format!("second premise must be CU-Form `{expected}`")));
            }
            for ((position, required), p) in entry.signature.iter().zip(&d.premises[2..]) {
                let expected = Judgment::Member {
                    term: args[position - 1].clone(),
                    restriction: required.clone(),
                };
                if p.rule != Rule::Sat || p.conclusion != expected {
                    return Err(fail(format!("premise must witness `{expected}`")));
                }
            }
        }
        (
            Rule::NForm,
            Judgment::Order {
                term,
                order: Some(n),
            },
        ) => {
            let TermKind::App { args, .. } = term.kind() else {
                return Err(fail("n-Form concludes only on applications".into()));
            };
            if *n != order_of(term) {
                return Err(fail(format!("order annotation {n} != {}", order_of(term))));
            }
            premise_count(1 + args.len())?;
            let first = &d.premises[0];
            if first.rule != Rule::CuElim
                || first.conclusion
                    != (Judgment::Order {
                        term: term.clone(),
                        order: None,
                    })
            {
                return Err(fail(
                    "first premise must be CU-Elim on the same term".into(),
                ));
            }
            for (arg, p) in args.iter().zip(&d.premises[1..]) {
                let rule = if arg.is_atom() {
                    Rule::Map
                } else {
                    Rule::NForm
                };
                let expected = Judgment::Order {
                    term: arg.clone(),
                    order: Some(order_of(arg)),
                };
                if p.rule != rule || p.conclusion != expected {
                    return Err(fail(format!("premise must be {rule} `{expected}`")));
                }
            }
        }
        (Rule::Sat, Judgment::Member { term, restriction }) => {
            replay_membership(d, term, restriction, lex).map_err(fail)?;
        }
        (rule, _) => return Err(fail(format!("{rule} cannot conclude this judgment"))),
    }

    d.premises.iter().try_for_each(|p| replay(p, lex))
}

fn replay_membership(
    d: &Derivation,
    term: &MTerm,
    restriction: &str,
    lex: &Lexicon,
) -> Result<(), String> {
    match term.kind() {
        TermKind::Atom(e) => {
            let entry = lex
                .entry(&e.surface)
                .ok_or_else(|| format!("`{}` is not a morpheme", e.surface))?;
            if !d.premises.is_empty() {
                return Err("an atom's membership is a leaf".into());
            }
            if !entry.satisfies.contains(restriction) {
                return Err(format!("`{}` does not list {restriction}", e.surface));
            }
        }
        TermKind::App { args, .. } => {
            let ext = external_universe(term, lex).map_err(|e| e.message)?;
            match lex.universe_satisfies().get(&ext) {
                Some(set) => {
                    if !d.premises.is_empty() || !set.contains(restriction) {
                        return Err(format!("universe `{ext}` does not declare {restriction}"));
                    }
                }
                None => {
                    let expected = Judgment::Member {
                        term: args[0].clone(),
                        restriction: restriction.to_string(),
                    };
                    if d.premises.len() != 1
                        || d.premises[0].rule != Rule::Sat
                        || d.premises[0].conclusion != expected
                    {
                        return Err(format!("must inherit from `{expected}`"));
                    }
                }
            }
        }
    }
    Ok(())
}
