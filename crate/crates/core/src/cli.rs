//! The `zcheck` command line.
//!
//! ```text
//! zcheck <parse|check|verify|audit|validate> -l <lexicon-file> [-e <expression>]
//!        [--depth <n>] [--format <text|records>] [--color]
//! ```
//!
//! Results go to standard output, diagnostics to standard error. Exit codes:
//! 0 success, 1 restriction violation or theorem failure, 2 parse or check
//! failure, 3 lexicon error, 64 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checker::{
    audit_questions, check_term, verify_projection_theorem, Audit, FailureKind, TheoremReport,
};
use crate::lexicon::{load_lexicon, parse_lexicon, validate_lexicon, Lexicon, LoadError};
use crate::parser::{
    parse_bracketed_constituent, parse_constituent, tokenize, Constituent, ParseError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_LEXICON: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    /// One `kind<TAB>field=value<TAB>...` line per report item.
    Records,
}

#[derive(Debug, Parser)]
#[command(
    name = "zcheck",
    version,
    about = "Parse and type-check relation formulas against a lexicon"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an expression into a relation formula and print its order.
    Parse(ExprArgs),
    /// Print the full typing derivation of an expression.
    Check(ExprArgs),
    /// Verify the projection theorem over the lexicon's fragment.
    Verify(CliConfig),
    /// Answer the two restriction-coverage questions for the lexicon.
    Audit(CliConfig),
    /// Validate the lexicon and list every violated invariant.
    Validate(CliConfig),
}

#[derive(Debug, Args)]
pub struct CliConfig {
    /// Lexicon file.
    #[arg(short = 'l', long = "lexicon")]
    pub lexicon_path: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Application nesting depth for theorem verification.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Largest accepted `--depth`.
    #[arg(long, default_value_t = 6)]
    pub depth_limit: usize,
    #[arg(long)]
    pub color: bool,
}

#[derive(Debug, Args)]
struct ExprArgs {
    #[command(flatten)]
    config: CliConfig,
    /// Expression: space-separated tokens, or a bracketed term `(head arg ...)`.
    #[arg(short = 'e', long = "expression")]
    expression: Option<String>,
    #[arg(value_name = "EXPRESSION")]
    positional: Option<String>,
}

impl ExprArgs {
    fn expression(&self) -> Result<&str, String> {
        match (&self.expression, &self.positional) {
            (Some(e), None) | (None, Some(e)) => Ok(e),
            (Some(_), Some(_)) => {
                Err("give the expression either with -e or positionally, not both".into())
            }
            (None, None) => Err("missing expression".into()),
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn new(code: i32) -> Self {
        Outcome {
            code,
            ..Default::default()
        }
    }

    fn out(mut self, text: impl AsRef<str>) -> Self {
        self.stdout.push_str(text.as_ref());
        self
    }

    fn err(mut self, text: impl AsRef<str>) -> Self {
        self.stderr.push_str(text.as_ref());
        self
    }
}

/// Runs the command line (including the program name) and captures its output.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::new(EXIT_USAGE).err(text)
            } else {
                Outcome::new(EXIT_OK).out(text)
            };
        }
    };
    match cli.command {
        Command::Parse(args) => with_expression(&args, cmd_parse),
        Command::Check(args) => with_expression(&args, cmd_check),
        Command::Verify(config) => with_lexicon(&config, |lex| cmd_verify(&config, lex)),
        Command::Audit(config) => with_lexicon(&config, |lex| cmd_audit(&config, lex)),
        Command::Validate(config) => cmd_validate(&config),
    }
}

fn with_expression(args: &ExprArgs, f: fn(&CliConfig, &Lexicon, &str) -> Outcome) -> Outcome {
    let expression = match args.expression() {
        Ok(e) => e,
        Err(msg) => return Outcome::new(EXIT_USAGE).err(format!("error: {msg}\n")),
    };
    with_lexicon(&args.config, |lex| f(&args.config, lex, expression))
}

fn with_lexicon(config: &CliConfig, f: impl FnOnce(&Lexicon) -> Outcome) -> Outcome {
    if config.depth > config.depth_limit {
        return Outcome::new(EXIT_USAGE).err(format!(
            "error: --depth {} exceeds the limit of {}\n",
            config.depth, config.depth_limit
        ));
    }
    let text = match read_lexicon(config) {
        Ok(t) => t,
        Err(o) => return o,
    };
    match load_lexicon(&text) {
        Ok(lex) => f(&lex),
        Err(errors) => lexicon_errors(config, &errors),
    }
}

fn read_lexicon(config: &CliConfig) -> Result<String, Outcome> {
    std::fs::read_to_string(&config.lexicon_path).map_err(|e| {
        Outcome::new(EXIT_LEXICON).err(format!(
            "error: cannot read {}: {e}\n",
            config.lexicon_path.display()
        ))
    })
}

fn lexicon_errors(config: &CliConfig, errors: &[LoadError]) -> Outcome {
    let mut text = String::new();
    for e in errors {
        let _ = writeln!(
            text,
            "{}:{}:{}: error: {}",
            config.lexicon_path.display(),
            e.line,
            e.column,
            e.message
        );
    }
    Outcome::new(EXIT_LEXICON).err(text)
}

fn paint(text: &str, ansi: &str, enabled: bool) -> String {
    if enabled {
        format!("\x1b[{ansi}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn parse_expression(lex: &Lexicon, expression: &str) -> Result<Constituent, ParseError> {
    if expression.contains(['(', ')']) {
        parse_bracketed_constituent(expression, lex)
    } else {
        parse_constituent(&tokenize(expression), lex)
    }
}

fn parse_failure(e: &ParseError) -> Outcome {
    let text = match e {
        ParseError::UnknownToken { token, .. } => {
            format!(
                "{}: unknown morpheme `{token}`\n",
                FailureKind::UnknownMorpheme
            )
        }
        other => format!("parse error: {other}\n"),
    };
    Outcome::new(EXIT_FAILURE).err(text)
}

fn cmd_parse(config: &CliConfig, lex: &Lexicon, expression: &str) -> Outcome {
    match parse_expression(lex, expression) {
        Ok(c) => Outcome::new(EXIT_OK).out(match config.format {
            Format::Text => format!("{} : M_{}\n", c.term, c.term.order()),
            Format::Records => format!(
                "term\tformula={}\torder={}\tuniverse={}\n",
                c.term,
                c.term.order(),
                c.external_universe
            ),
        }),
        Err(e) => parse_failure(&e),
    }
}

fn cmd_check(config: &CliConfig, lex: &Lexicon, expression: &str) -> Outcome {
    let constituent = match parse_expression(lex, expression) {
        Ok(c) => c,
        Err(e) => return parse_failure(&e),
    };
    match check_term(&constituent.term, lex) {
        Ok(d) => {
            let text = match config.format {
                Format::Text => d.render(),
                Format::Records => {
                    let mut out = String::new();
                    d.walk_post_order(&mut |node, depth| {
                        let _ = writeln!(
                            out,
                            "node\tdepth={depth}\trule={}\tjudgment={}",
                            node.rule, node.conclusion
                        );
                    });
                    out
                }
            };
            Outcome::new(EXIT_OK).out(text)
        }
        Err(f) if f.kind == FailureKind::RestrictionViolation => {
            Outcome::new(EXIT_VIOLATION).err(format!("{}\n", f.message))
        }
        Err(f) => Outcome::new(EXIT_FAILURE).err(format!("{}: {}\n", f.kind, f.message)),
    }
}

fn join_positions(positions: &[usize]) -> String {
    positions
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn audit_lines(audit: &Audit, format: Format) -> String {
    let mut out = String::new();
    let partial: Vec<String> = audit
        .partial
        .iter()
        .map(|(e, ps)| {
            let noun = if ps.len() == 1 {
                "position"
            } else {
                "positions"
            };
            format!("{e}: {noun} {}", join_positions(ps))
        })
        .collect();
    match format {
        Format::Text => {
            if audit.q1 {
                out.push_str("Q1: yes\n");
            } else {
                let _ = writeln!(out, "Q1: no ({})", audit.unrestricted.join(", "));
            }
            if audit.q2 {
                out.push_str("Q2: yes\n");
            } else {
                let _ = writeln!(out, "Q2: no ({})", partial.join("; "));
            }
        }
        Format::Records => {
            let yes_no = |b: bool| if b { "yes" } else { "no" };
            let _ = writeln!(
                out,
                "audit\tquestion=Q1\tanswer={}\tviolators={}",
                yes_no(audit.q1),
                audit.unrestricted.join(",")
            );
            let missing: Vec<String> = audit
                .partial
                .iter()
                .map(|(e, ps)| format!("{e}:{}", join_positions(ps).replace(", ", "+")))
                .collect();
            let _ = writeln!(
                out,
                "audit\tquestion=Q2\tanswer={}\tviolators={}",
                yes_no(audit.q2),
                missing.join(",")
            );
        }
    }
    out
}

/// Renders a theorem report.
pub fn render_theorem_report(report: &TheoremReport, format: Format, color: bool) -> String {
    let mut out = String::new();
    let statement = "1 <= y <= ar(x) <-> p(s(x)(y))";
    match format {
        Format::Text => {
            let _ = writeln!(
                out,
                "# {statement}, with ar applied to the term x; positions y in 1..={}",
                report.position_bound
            );
            for v in &report.checked {
                let status = if v.holds() {
                    paint("ok  ", "32", color)
                } else {
                    paint("FAIL", "31", color)
                };
                let restricted = if v.restricted.is_empty() {
                    "none".to_string()
                } else {
                    join_positions(&v.restricted)
                };
                let _ = writeln!(
                    out,
                    "{status} {} (arity {}; restricted at {restricted})",
                    v.term, v.arity
                );
            }
            for c in &report.counterexamples {
                let why = match c.direction {
                    crate::checker::Direction::Forward => "suitable position lacks a restriction",
                    crate::checker::Direction::Backward => "restriction outside the arity",
                };
                let _ = writeln!(
                    out,
                    "counterexample: {} at position {} ({}: {why})",
                    c.term,
                    c.position,
                    c.direction.arrow()
                );
            }
            out.push_str(&audit_lines(&report.audit, format));
            let verdict = if report.holds() {
                paint("HOLDS", "32", color)
            } else {
                paint("FAILS", "31", color)
            };
            let _ = writeln!(
                out,
                "theorem: {verdict} ({} counterexamples, depth {})",
                report.counterexamples.len(),
                report.depth
            );
        }
        Format::Records => {
            let _ = writeln!(
                out,
                "header\tstatement={statement}\tpositions=1..{}\tdepth={}",
                report.position_bound, report.depth
            );
            for v in &report.checked {
                let _ = writeln!(
                    out,
                    "verdict\tterm={}\tarity={}\trestricted={}\tstatus={}",
                    v.term,
                    v.arity,
                    join_positions(&v.restricted).replace(", ", ","),
                    if v.holds() { "ok" } else { "fail" }
                );
            }
            for c in &report.counterexamples {
                let _ = writeln!(
                    out,
                    "counterexample\tterm={}\tposition={}\tdirection={}",
                    c.term,
                    c.position,
                    c.direction.arrow()
                );
            }
            out.push_str(&audit_lines(&report.audit, format));
            let _ = writeln!(
                out,
                "summary\ttheorem={}\tcounterexamples={}\tdepth={}",
                if report.holds() { "HOLDS" } else { "FAILS" },
                report.counterexamples.len(),
                report.depth
            );
        }
    }
    out
}

fn cmd_verify(config: &CliConfig, lex: &Lexicon) -> Outcome {
    let report = verify_projection_theorem(lex, config.depth);
    let code = if report.holds() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Outcome::new(code).out(render_theorem_report(&report, config.format, config.color))
}

fn cmd_audit(config: &CliConfig, lex: &Lexicon) -> Outcome {
    Outcome::new(EXIT_OK).out(audit_lines(&audit_questions(lex), config.format))
}

fn cmd_validate(config: &CliConfig) -> Outcome {
    let text = match read_lexicon(config) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let (lex, map) = match parse_lexicon(&text) {
        Ok(parsed) => parsed,
        Err(errors) => return lexicon_errors(config, &errors),
    };
    let report = validate_lexicon(&lex);
    let mut out = String::new();
    if report.is_empty() {
        match config.format {
            Format::Text => {
                let _ = writeln!(
                    out,
                    "{}: {} restrictions, {} universes, {} entries, {} head rules",
                    paint("valid", "32", config.color),
                    lex.restrictions().len(),
                    lex.universes().len(),
                    lex.entries().len(),
                    lex.head_rules().len()
                );
            }
            Format::Records => {
                let _ = writeln!(
                    out,
                    "valid\trestrictions={}\tuniverses={}\tentries={}\thead_rules={}",
                    lex.restrictions().len(),
                    lex.universes().len(),
                    lex.entries().len(),
                    lex.head_rules().len()
                );
            }
        }
        return Outcome::new(EXIT_OK).out(out);
    }
    for v in &report.violations {
        let line = map.line_of(&v.decl).unwrap_or(0);
        match config.format {
            Format::Text => {
                let _ = writeln!(
                    out,
                    "{}:{line}: {}: {}: {}",
                    config.lexicon_path.display(),
                    v.invariant,
                    v.decl,
                    v.message
                );
            }
            Format::Records => {
                let _ = writeln!(
                    out,
                    "violation\tline={line}\tinvariant={}\tdecl={}\tmessage={}",
                    v.invariant, v.decl, v.message
                );
            }
        }
    }
    Outcome::new(EXIT_LEXICON).out(out)
}
