//! The parsing function: maps a segmented token sequence to a relation
//! formula `a(e1,...,en)`.
//!
//! Flat input is reduced deterministically: at each step, among all
//! contiguous windows that some head rule matches, the rule with the highest
//! precedence wins; ties go to the leftmost window, then the shortest. Two
//! different matches on the winning window are an authoring error in the
//! lexicon. Bracketed input `(head arg ...)` fixes the grouping explicitly
//! and only checks that each bracket is licensed by a head rule.

use std::cmp::Reverse;

use thiserror::Error;

use crate::lexicon::{HeadPosition, HeadRule, Lexicon};
use crate::term::{arity_of, MTerm, TermError};

/// A parsed span of the input together with the universe it exposes for
/// further composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    pub term: MTerm,
    pub external_universe: String,
    /// Half-open token range `start..end`.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("unknown token `{token}`")]
    UnknownToken { token: String, index: usize },
    #[error("no applicable head rule; residual constituents: {}", residual.join(" "))]
    NoApplicableRule { residual: Vec<String> },
    #[error("ambiguous head rules for tokens {}..{}: {}", window.0, window.1, rules.join("; "))]
    AmbiguousRules {
        window: (usize, usize),
        rules: Vec<String>,
    },
    #[error("unbalanced brackets at offset {offset}")]
    UnbalancedBrackets { offset: usize },
    #[error("unexpected input after the bracketed term at offset {offset}")]
    TrailingInput { offset: usize },
    #[error("expected a head token after `(` at offset {offset}")]
    MissingHead { offset: usize },
    #[error("no head rule matches {pattern} in `{bracket}`")]
    NoRuleForBracket { bracket: String, pattern: String },
    #[error("`{head}` has arity {arity} but the bracket gives {given} argument(s)")]
    BracketArity {
        head: String,
        arity: usize,
        given: usize,
    },
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Splits an expression on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// The sequence of constituent lists visited by a flat parse.
#[derive(Debug, Clone)]
pub struct ParseTrace {
    pub steps: Vec<Vec<Constituent>>,
}

impl ParseTrace {
    pub fn result(&self) -> &MTerm {
        &self.steps.last().expect("trace has at least one step")[0].term
    }
}

pub fn parse<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> Result<MTerm, ParseError> {
    parse_with_trace(tokens, lex).map(|trace| trace.result().clone())
}

/// Like [`parse`], returning the final constituent (term and external universe).
pub fn parse_constituent<S: AsRef<str>>(
    tokens: &[S],
    lex: &Lexicon,
) -> Result<Constituent, ParseError> {
    let mut trace = parse_with_trace(tokens, lex)?;
    Ok(trace.steps.pop().unwrap().remove(0))
}

struct Match<'a> {
    rule: &'a HeadRule,
    start: usize,
    len: usize,
    head_offset: usize,
}

fn head_offsets(position: HeadPosition, arity: usize) -> std::ops::RangeInclusive<usize> {
    match position {
        HeadPosition::Any => 0..=arity,
        HeadPosition::First => 0..=0,
        HeadPosition::Last => arity..=arity,
    }
}

fn matches_at<'a>(cs: &[Constituent], rule: &'a HeadRule, start: usize) -> Vec<Match<'a>> {
    let k = rule.arity();
    let len = k + 1;
    if k == 0 || start + len > cs.len() {
        return Vec::new();
    }
    let window = &cs[start..start + len];
    head_offsets(rule.position, k)
        .filter(|&off| {
            let head = &window[off];
            head.term.is_atom()
                && arity_of(&head.term) == k
                && head.external_universe == rule.head_universe
                && window
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != off)
                    .map(|(_, c)| &c.external_universe)
                    .eq(rule.arg_universes.iter())
        })
        .map(|head_offset| Match {
            rule,
            start,
            len,
            head_offset,
        })
        .collect()
}

pub fn parse_with_trace<S: AsRef<str>>(
    tokens: &[S],
    lex: &Lexicon,
) -> Result<ParseTrace, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let mut cs = Vec::with_capacity(tokens.len());
    for (index, tok) in tokens.iter().enumerate() {
        let tok = tok.as_ref();
        let entry = lex.entry(tok).ok_or_else(|| ParseError::UnknownToken {
            token: tok.to_string(),
            index,
        })?;
        cs.push(Constituent {
            term: MTerm::atom(entry.clone()),
            external_universe: entry.universe.clone(),
            span: (index, index + 1),
        });
    }

    let mut steps = vec![cs.clone()];
    while cs.len() > 1 {
        let mut candidates: Vec<Match> = Vec::new();
        for start in 0..cs.len() {
            for rule in lex.head_rules() {
                candidates.extend(matches_at(&cs, rule, start));
            }
        }
        let key = |m: &Match| (m.rule.precedence, Reverse(m.start), Reverse(m.len));
        let Some(best) = candidates.iter().map(key).max() else {
            return Err(ParseError::NoApplicableRule {
                residual: cs
                    .iter()
                    .map(|c| format!("{}:{}", c.term, c.external_universe))
                    .collect(),
            });
        };
        let winners: Vec<&Match> = candidates.iter().filter(|m| key(m) == best).collect();
        if winners.len() > 1 {
            let (_, Reverse(start), Reverse(len)) = best;
            return Err(ParseError::AmbiguousRules {
                window: (cs[start].span.0, cs[start + len - 1].span.1),
                rules: winners
                    .iter()
                    .map(|m| format!("{} (head at {})", m.rule, m.head_offset + 1))
                    .collect(),
            });
        }
        let m = winners[0];
        let window: Vec<Constituent> = cs.drain(m.start..m.start + m.len).collect();
        let head = window[m.head_offset].term.clone();
        let args = window
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != m.head_offset)
            .map(|(_, c)| c.term.clone())
            .collect();
        let reduced = Constituent {
            term: MTerm::app(head, args)?,
            external_universe: m.rule.external_universe.clone(),
            span: (window[0].span.0, window[window.len() - 1].span.1),
        };
        cs.insert(m.start, reduced);
        steps.push(cs.clone());
    }
    Ok(ParseTrace { steps })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum BTok<'a> {
    Open(usize),
    Close(usize),
    Word(&'a str, usize),
}

fn bracket_tokens(text: &str) -> Vec<BTok<'_>> {
    let mut out = Vec::new();
    let mut word_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = word_start.take() {
                out.push(BTok::Word(&text[s..i], s));
            }
            match c {
                '(' => out.push(BTok::Open(i)),
                ')' => out.push(BTok::Close(i)),
                _ => {}
            }
        } else if word_start.is_none() {
            word_start = Some(i);
        }
    }
    if let Some(s) = word_start {
        out.push(BTok::Word(&text[s..], s));
    }
    out
}

/// Builds the term exactly as bracketed. The first symbol in each bracket is
/// the head; the bracket must be licensed by some head rule (in any head position).
pub fn parse_bracketed(text: &str, lex: &Lexicon) -> Result<MTerm, ParseError> {
    parse_bracketed_constituent(text, lex).map(|c| c.term)
}

pub fn parse_bracketed_constituent(text: &str, lex: &Lexicon) -> Result<Constituent, ParseError> {
    let toks = bracket_tokens(text);
    if toks.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let mut pos = 0;
    let mut words = 0;
    let (term, external_universe) = bracket_expr(&toks, &mut pos, &mut words, lex)?;
    if let Some(extra) = toks.get(pos) {
        let offset = match *extra {
            BTok::Open(o) | BTok::Close(o) | BTok::Word(_, o) => o,
        };
        return Err(match extra {
            BTok::Close(_) => ParseError::UnbalancedBrackets { offset },
            _ => ParseError::TrailingInput { offset },
        });
    }
    Ok(Constituent {
        term,
        external_universe,
        span: (0, words),
    })
}

fn bracket_atom(word: &str, index: usize, lex: &Lexicon) -> Result<(MTerm, String), ParseError> {
    let entry = lex.entry(word).ok_or_else(|| ParseError::UnknownToken {
        token: word.to_string(),
        index,
    })?;
    Ok((MTerm::atom(entry.clone()), entry.universe.clone()))
}

fn bracket_expr(
    toks: &[BTok],
    pos: &mut usize,
    words: &mut usize,
    lex: &Lexicon,
) -> Result<(MTerm, String), ParseError> {
    match toks.get(*pos) {
        None => Err(ParseError::UnbalancedBrackets {
            offset: toks.last().map_or(0, |t| match *t {
                BTok::Open(o) | BTok::Close(o) | BTok::Word(_, o) => o + 1,
            }),
        }),
        Some(&BTok::Close(offset)) => Err(ParseError::UnbalancedBrackets { offset }),
        Some(&BTok::Word(w, _)) => {
            *pos += 1;
            *words += 1;
            bracket_atom(w, *words - 1, lex)
        }
        Some(&BTok::Open(open)) => {
            *pos += 1;
            let (head, head_universe) = match toks.get(*pos) {
                Some(&BTok::Word(w, _)) => {
                    *pos += 1;
                    *words += 1;
                    bracket_atom(w, *words - 1, lex)?
                }
                _ => return Err(ParseError::MissingHead { offset: open + 1 }),
            };
            let mut args = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(BTok::Close(_)) => {
                        *pos += 1;
                        break;
                    }
                    None => {
                        return Err(ParseError::UnbalancedBrackets { offset: open });
                    }
                    Some(_) => args.push(bracket_expr(toks, pos, words, lex)?),
                }
            }
            let arity = arity_of(&head);
            if arity != args.len() {
                return Err(ParseError::BracketArity {
                    head: head.to_string(),
                    arity,
                    given: args.len(),
                });
            }
            if args.is_empty() {
                return Ok((head, head_universe));
            }
            let arg_universes: Vec<&str> = args.iter().map(|(_, u)| u.as_str()).collect();
            let Some(rule) = lex.rule_for(&head_universe, &arg_universes) else {
                let terms: Vec<MTerm> = args.iter().map(|(t, _)| t.clone()).collect();
                return Err(ParseError::NoRuleForBracket {
                    bracket: MTerm::app(head, terms)?.to_bracketed(),
                    pattern: format!("{head_universe}({})", arg_universes.join(",")),
                });
            };
            let external = rule.external_universe.clone();
            let term = MTerm::app(head, args.into_iter().map(|(t, _)| t).collect())?;
            Ok((term, external))
        }
    }
}
