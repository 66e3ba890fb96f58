use std::collections::{BTreeMap, BTreeSet};

use super::{DeclRef, HeadPosition, HeadRule, Lexicon, LoadError, LoadErrorKind, SourceMap};
use crate::term::{ElementaryUniverse, LexEntry, Restriction};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Punct(&'static str),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Int(n) => format!("number {n}"),
            Tok::Punct(p) => format!("`{p}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

struct Fail {
    col: usize,
    kind: LoadErrorKind,
    message: String,
}

fn syntax(col: usize, message: impl Into<String>) -> Fail {
    Fail {
        col,
        kind: LoadErrorKind::Syntax,
        message: message.into(),
    }
}

const PUNCT: [&str; 9] = ["->", "=>", ":", "/", ",", "{", "}", "(", ")"];

fn lex_line(line: &str) -> Result<Vec<Spanned>, Fail> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(syntax(col, "unterminated string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(&e @ ('"' | '\\')) => {
                            s.push(e);
                            i += 2;
                        }
                        _ => return Err(syntax(i + 1, "invalid escape in string")),
                    },
                    Some(&other) => {
                        s.push(other);
                        i += 1;
                    }
                }
            }
            out.push(Spanned {
                tok: Tok::Str(s),
                col,
            });
            continue;
        }
        if let Some(p) = PUNCT.iter().find(|p| {
            p.chars()
                .enumerate()
                .all(|(k, pc)| chars.get(i + k) == Some(&pc))
        }) {
            out.push(Spanned {
                tok: Tok::Punct(p),
                col,
            });
            i += p.len();
            continue;
        }
        let negative = c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit);
        if c.is_ascii_digit() || negative {
            let start = i;
            i += 1;
            while chars.get(i).is_some_and(char::is_ascii_digit) {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| syntax(col, format!("number `{text}` out of range")))?;
            out.push(Spanned {
                tok: Tok::Int(n),
                col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            i += 1;
            while let Some(&n) = chars.get(i) {
                let dash_ok = n == '-' && chars.get(i + 1) != Some(&'>');
                if n.is_ascii_alphanumeric() || n == '_' || dash_ok {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
            continue;
        }
        return Err(syntax(col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    end_col: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn next(&mut self, what: &str) -> Result<Spanned, Fail> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(syntax(
                self.end_col,
                format!("expected {what}, found end of line"),
            )),
        }
    }

    fn unexpected(&self, t: &Spanned, what: &str) -> Fail {
        syntax(
            t.col,
            format!("expected {what}, found {}", t.tok.describe()),
        )
    }

    fn punct(&mut self, p: &'static str) -> Result<(), Fail> {
        let t = self.next(&format!("`{p}`"))?;
        match t.tok {
            Tok::Punct(q) if q == p => Ok(()),
            _ => Err(self.unexpected(&t, &format!("`{p}`"))),
        }
    }

    fn eat(&mut self, p: &'static str) -> bool {
        if self.peek() == Some(&Tok::Punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), Fail> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.col)),
            _ => Err(self.unexpected(&t, what)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), Fail> {
        let t = self.next(&format!("`{kw}`"))?;
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => Err(self.unexpected(&t, &format!("`{kw}`"))),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, Fail> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Str(s) => Ok(s),
            _ => Err(self.unexpected(&t, what)),
        }
    }

    fn int(&mut self, what: &str) -> Result<(i64, usize), Fail> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Int(n) => Ok((n, t.col)),
            _ => Err(self.unexpected(&t, what)),
        }
    }

    fn natural(&mut self, what: &str) -> Result<usize, Fail> {
        let (n, col) = self.int(what)?;
        usize::try_from(n).map_err(|_| syntax(col, format!("{what} must be a natural number")))
    }

    fn finish(&self) -> Result<(), Fail> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(syntax(
                t.col,
                format!("unexpected {} after declaration", t.tok.describe()),
            )),
        }
    }

    /// `{A, B, ...}`, possibly empty.
    fn id_set(&mut self) -> Result<BTreeSet<String>, Fail> {
        self.punct("{")?;
        let mut set = BTreeSet::new();
        if self.eat("}") {
            return Ok(set);
        }
        loop {
            let (id, col) = self.ident("restriction id")?;
            if !set.insert(id.clone()) {
                return Err(syntax(col, format!("`{id}` listed twice")));
            }
            if self.eat("}") {
                return Ok(set);
            }
            self.punct(",")?;
        }
    }
}

enum Decl {
    Restriction(Restriction),
    Universe(ElementaryUniverse),
    UniverseSatisfies(String, BTreeSet<String>),
    Entry(LexEntry),
    HeadRule(HeadRule),
    MaxArity(usize),
}

fn parse_decl(cur: &mut Cursor) -> Result<Decl, Fail> {
    let (kw, col) = cur.ident("declaration keyword")?;
    let decl = match kw.as_str() {
        "restriction" => {
            let (id, _) = cur.ident("restriction id")?;
            cur.punct(":")?;
            let gloss = cur.string("quoted gloss")?;
            Decl::Restriction(Restriction::new(id, gloss))
        }
        "universe" => {
            let (id, _) = cur.ident("universe id")?;
            cur.punct(":")?;
            let gloss = cur.string("quoted gloss")?;
            Decl::Universe(ElementaryUniverse::new(id, gloss))
        }
        "universe_satisfies" => {
            let (id, _) = cur.ident("universe id")?;
            let set = cur.id_set()?;
            Decl::UniverseSatisfies(id, set)
        }
        "entry" => Decl::Entry(parse_entry(cur)?),
        "headrule" => Decl::HeadRule(parse_head_rule(cur)?),
        "option" => {
            let (name, ncol) = cur.ident("option name")?;
            if name != "max_arity" {
                return Err(syntax(ncol, format!("unknown option `{name}`")));
            }
            Decl::MaxArity(cur.natural("max_arity value")?)
        }
        _ => return Err(syntax(col, format!("unknown declaration `{kw}`"))),
    };
    cur.finish()?;
    Ok(decl)
}

fn parse_entry(cur: &mut Cursor) -> Result<LexEntry, Fail> {
    let surface = cur.string("quoted surface form")?;
    cur.punct(":")?;
    let (universe, _) = cur.ident("universe id")?;
    cur.punct("/")?;
    cur.keyword("arity")?;
    let arity = cur.natural("arity")?;
    let mut entry = LexEntry::new(surface, universe, arity);
    let mut seen_restricts = false;
    let mut seen_satisfies = false;
    while cur.eat("/") {
        let (clause, col) = cur.ident("`restricts` or `satisfies`")?;
        match clause.as_str() {
            "restricts" if !seen_restricts => {
                seen_restricts = true;
                loop {
                    let pcol = cur.col();
                    let pos = cur.natural("argument position")?;
                    cur.punct("->")?;
                    let (r, _) = cur.ident("restriction id")?;
                    if entry.signature.insert(pos, r).is_some() {
                        return Err(syntax(pcol, format!("position {pos} restricted twice")));
                    }
                    if !cur.eat(",") {
                        break;
                    }
                }
            }
            "satisfies" if !seen_satisfies => {
                seen_satisfies = true;
                entry.satisfies = cur.id_set()?;
            }
            "restricts" | "satisfies" => {
                return Err(syntax(col, format!("duplicate `{clause}` clause")))
            }
            _ => {
                return Err(syntax(
                    col,
                    format!("expected `restricts` or `satisfies`, found `{clause}`"),
                ))
            }
        }
    }
    Ok(entry)
}

fn parse_head_rule(cur: &mut Cursor) -> Result<HeadRule, Fail> {
    let (precedence, _) = cur.int("precedence")?;
    cur.punct(":")?;
    let (head, _) = cur.ident("head universe")?;
    cur.punct("(")?;
    let mut args = Vec::new();
    loop {
        let (arg, _) = cur.ident("argument universe")?;
        args.push(arg);
        if cur.eat(")") {
            break;
        }
        cur.punct(",")?;
    }
    cur.punct("=>")?;
    let (external, _) = cur.ident("external universe")?;
    let mut rule = HeadRule::new(precedence, &head, args, &external);
    if cur.eat("/") {
        cur.keyword("head")?;
        let (pos, col) = cur.ident("`first` or `last`")?;
        rule.position = match pos.as_str() {
            "first" => HeadPosition::First,
            "last" => HeadPosition::Last,
            _ => {
                return Err(syntax(
                    col,
                    format!("expected `first` or `last`, found `{pos}`"),
                ))
            }
        };
    }
    Ok(rule)
}

pub(super) fn parse(text: &str) -> Result<(Lexicon, SourceMap), Vec<LoadError>> {
    let mut lex = Lexicon::new();
    let mut map = SourceMap::default();
    let mut errors = Vec::new();
    let mut max_arity_line: Option<usize> = None;
    let mut rule_lines: BTreeMap<(String, Vec<String>), usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = match lex_line(raw) {
            Ok(t) => t,
            Err(f) => {
                errors.push(located(line, f));
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        let first_col = toks[0].col;
        let mut cur = Cursor {
            toks,
            pos: 0,
            end_col: raw.chars().count() + 1,
        };
        let decl = match parse_decl(&mut cur) {
            Ok(d) => d,
            Err(f) => {
                errors.push(located(line, f));
                continue;
            }
        };
        let dup = |what: String, first: usize| Fail {
            col: first_col,
            kind: LoadErrorKind::Duplicate,
            message: format!("duplicate declaration of {what} (first declared on line {first})"),
        };
        let result = match decl {
            Decl::Restriction(r) => {
                let key = DeclRef::Restriction(r.id.clone());
                match map.line_of(&key) {
                    Some(first) => Err(dup(key.to_string(), first)),
                    None => {
                        lex.add_restriction(r);
                        map.insert(key, line);
                        Ok(())
                    }
                }
            }
            Decl::Universe(u) => {
                let key = DeclRef::Universe(u.id.clone());
                match map.line_of(&key) {
                    Some(first) => Err(dup(key.to_string(), first)),
                    None => {
                        lex.add_universe(u);
                        map.insert(key, line);
                        Ok(())
                    }
                }
            }
            Decl::UniverseSatisfies(u, set) => {
                let key = DeclRef::UniverseSatisfies(u.clone());
                match map.line_of(&key) {
                    Some(first) => Err(dup(key.to_string(), first)),
                    None => {
                        lex.set_universe_satisfies(&u, set);
                        map.insert(key, line);
                        Ok(())
                    }
                }
            }
            Decl::Entry(e) => {
                let key = DeclRef::Entry(e.surface.clone());
                match map.line_of(&key) {
                    Some(first) => Err(dup(key.to_string(), first)),
                    None => {
                        lex.add_entry(e);
                        map.insert(key, line);
                        Ok(())
                    }
                }
            }
            Decl::HeadRule(rule) => {
                let key = (rule.head_universe.clone(), rule.arg_universes.clone());
                let identical = lex.head_rules().iter().any(|r| r == &rule);
                match rule_lines.get(&key) {
                    Some(&first) if identical => {
                        Err(dup(format!("headrule {}", rule.pattern()), first))
                    }
                    _ => {
                        rule_lines.entry(key).or_insert(line);
                        map.insert(DeclRef::HeadRule(rule.clone()), line);
                        lex.add_head_rule(rule);
                        Ok(())
                    }
                }
            }
            Decl::MaxArity(n) => match max_arity_line {
                Some(first) => Err(dup("option max_arity".to_string(), first)),
                None => {
                    max_arity_line = Some(line);
                    lex.set_max_arity(n);
                    map.insert(DeclRef::MaxArity, line);
                    Ok(())
                }
            },
        };
        if let Err(f) = result {
            errors.push(located(line, f));
        }
    }

    if errors.is_empty() {
        Ok((lex, map))
    } else {
        Err(errors)
    }
}

fn located(line: usize, f: Fail) -> LoadError {
    LoadError {
        line,
        column: f.col,
        kind: f.kind,
        message: f.message,
    }
}
