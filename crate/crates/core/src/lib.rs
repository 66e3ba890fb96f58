//! A lexicon-driven parser and type checker for a relational type system of
//! morphosyntactic types.
//!
//! Segmented expressions such as `red car` or `work -s` are parsed into
//! relation formulas (`red(car)`, `-s(work)`), typed by the rules MAP,
//! n-Form, EU-Form, CU-Form and CU-Elim, and checked against the selectional
//! restrictions the lexicon declares. The [`checker`] also verifies, over a
//! finite fragment, that restrictions are defined on exactly the argument
//! positions `1..=arity` of every term.

pub mod checker;
pub mod cli;
pub mod lexicon;
pub mod parser;
pub mod term;

pub use checker::{check_term, CheckFailure, Derivation, Judgment, Rule};
pub use lexicon::{load_lexicon, HeadRule, Lexicon};
pub use parser::{parse, parse_bracketed};
pub use term::{arity_of, order_of, restriction_at, LexEntry, MTerm};
