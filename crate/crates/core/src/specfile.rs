//! Text format for systems and its parser.
//!
//! ```text
//! # two-bit LFSR
//! field p=2 m=1
//! vars n=2
//! transition:
//!   x1' = x2
//!   x2' = x1 + x2
//! output:
//!   z1 = x1
//! ```
//!
//! Blocks appear in the order `field`, `vars`, `transition`, `output`.
//! Statements end at a newline or `;`. Expressions use `+`, `*`, `^` with
//! the usual precedence; `^` takes a literal nonnegative exponent. Constants
//! are canonical element codes in `[0, q)`; extension fields add
//! `modulus=c0,c1,…,cm` to the field line. Either block may instead be given
//! as a table (`table transition:` / `table output:`) with one
//! `x1,…,xn -> …` line per state.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::funcspace::{FuncError, FuncTable, StateIndexing, StateMap};
use crate::gf::{Elem, Field, FieldSpec, GfError, MAX_ORDER};
use crate::system::{Dsff, SystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown variable `{name}`")]
    UnknownVariable { line: usize, column: usize, name: String },
    #[error("line {line}, column {column}: constant {value} is not in [0, {q})")]
    ConstantOutOfRange { line: usize, column: usize, value: u64, q: u32 },
    #[error("missing `{0}` block")]
    MissingBlock(&'static str),
    #[error("line {line}: `{name}` is assigned more than once")]
    DuplicateAssignment { line: usize, name: String },
    #[error("no assignment for `{0}`")]
    MissingAssignment(String),
    #[error("{block} table: {message}")]
    TableIncomplete { block: &'static str, message: String },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Polynomial expression over the state variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(u32),
    /// 1-based variable index.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u64),
}

impl Expr {
    pub fn eval(&self, field: &Field, x: &[Elem]) -> Elem {
        match self {
            Expr::Const(c) => Elem::from_code(*c),
            Expr::Var(i) => x[i - 1],
            Expr::Add(l, r) => field.add(l.eval(field, x), r.eval(field, x)),
            Expr::Mul(l, r) => field.mul(l.eval(field, x), r.eval(field, x)),
            Expr::Pow(b, k) => field.pow(b.eval(field, x), *k),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Const(_) | Expr::Var(_) => 4,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Left-associative: the right operand needs parentheses at equal precedence.
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(l, r) => {
                l.fmt_child(f, 1)?;
                f.write_str(" + ")?;
                r.fmt_child(f, 2)
            }
            Expr::Mul(l, r) => {
                l.fmt_child(f, 2)?;
                f.write_str(" * ")?;
                r.fmt_child(f, 3)
            }
            Expr::Pow(b, k) => {
                b.fmt_child(f, 3)?;
                write!(f, "^{k}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableEntry {
    pub src: Vec<u32>,
    pub dst: Vec<u32>,
}

/// A transition or output block. Expressions are stored in variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Block {
    Exprs(Vec<Expr>),
    Table(Vec<TableEntry>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemSpec {
    pub field: FieldSpec,
    pub n: usize,
    pub transition: Block,
    pub output: Block,
}

fn render_codes(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

impl SystemSpec {
    pub fn render(&self) -> String {
        let mut out = format!("field p={} m={}", self.field.p, self.field.m);
        if let Some(modulus) = &self.field.modulus {
            out.push_str(&format!(" modulus={}", render_codes(modulus)));
        }
        out.push_str(&format!("\nvars n={}\n", self.n));
        for (name, block, lhs) in [("transition", &self.transition, "x"), ("output", &self.output, "z")] {
            match block {
                Block::Exprs(exprs) => {
                    out.push_str(&format!("{name}:\n"));
                    let prime = if lhs == "x" { "'" } else { "" };
                    for (i, e) in exprs.iter().enumerate() {
                        out.push_str(&format!("{lhs}{}{prime} = {e}\n", i + 1));
                    }
                }
                Block::Table(entries) => {
                    out.push_str(&format!("table {name}:\n"));
                    for t in entries {
                        out.push_str(&format!("{} -> {}\n", render_codes(&t.src), render_codes(&t.dst)));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Star,
    Caret,
    LParen,
    RParen,
    Eq,
    Arrow,
    Colon,
    Prime,
    Comma,
    Sep,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Prime => f.write_str("`'`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Sep => f.write_str("end of statement"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, SpecError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let single = match c {
                '+' => Some(Tok::Plus),
                '*' => Some(Tok::Star),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '=' => Some(Tok::Eq),
                ':' => Some(Tok::Colon),
                '\'' => Some(Tok::Prime),
                ',' => Some(Tok::Comma),
                ';' => Some(Tok::Sep),
                _ => None,
            };
            if let Some(tok) = single {
                out.push(Token { tok, line, column });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c == '-' {
                if chars.get(i + 1) != Some(&'>') {
                    return Err(SpecError::Syntax { line, column, message: "expected `->`".into() });
                }
                out.push(Token { tok: Tok::Arrow, line, column });
                i += 2;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let value = digits.parse::<u64>().map_err(|_| SpecError::Syntax {
                    line,
                    column,
                    message: format!("integer `{digits}` is too large"),
                })?;
                out.push(Token { tok: Tok::Int(value), line, column });
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line, column });
            } else {
                return Err(SpecError::Syntax { line, column, message: format!("unexpected character `{c}`") });
            }
        }
        out.push(Token { tok: Tok::Sep, line, column: chars.len() + 1 });
    }
    let (line, column) = out.last().map_or((1, 1), |t| (t.line, t.column));
    out.push(Token { tok: Tok::Eof, line, column });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Field,
    Vars,
    Transition { table: bool },
    Output { table: bool },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    q: u32,
    n: usize,
}

/// `x12` -> 12, for identifiers of the form `<prefix><digits>`.
fn indexed_name(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(t: &Token, message: impl Into<String>) -> SpecError {
        SpecError::Syntax { line: t.line, column: t.column, message: message.into() }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, SpecError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(Self::error(&t, format!("expected {tok}, found {}", t.tok)))
        }
    }

    fn expect_int(&mut self) -> Result<(u64, Token), SpecError> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) => Ok((v, t)),
            _ => Err(Self::error(&t, format!("expected an integer, found {}", t.tok))),
        }
    }

    fn end_statement(&mut self) -> Result<(), SpecError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Sep => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(Self::error(&t, format!("expected end of statement, found {}", t.tok))),
        }
    }

    fn skip_seps(&mut self) {
        while self.peek().tok == Tok::Sep {
            self.next();
        }
    }

    fn code(&self, value: u64, t: &Token) -> Result<u32, SpecError> {
        if value < self.q as u64 {
            Ok(value as u32)
        } else {
            Err(SpecError::ConstantOutOfRange { line: t.line, column: t.column, value, q: self.q })
        }
    }

    fn parse_field(&mut self) -> Result<FieldSpec, SpecError> {
        let (mut p, mut m, mut modulus) = (None, None, None);
        let head = self.peek().clone();
        while let Tok::Ident(key) = self.peek().tok.clone() {
            let kt = self.next();
            self.expect(Tok::Eq)?;
            match key.as_str() {
                "p" | "m" => {
                    let (v, vt) = self.expect_int()?;
                    let v = u32::try_from(v).map_err(|_| Self::error(&vt, "value too large"))?;
                    let slot = if key == "p" { &mut p } else { &mut m };
                    if slot.replace(v).is_some() {
                        return Err(Self::error(&kt, format!("`{key}` given twice")));
                    }
                }
                "modulus" => {
                    let mut coeffs = Vec::new();
                    loop {
                        let (v, vt) = self.expect_int()?;
                        coeffs.push(u32::try_from(v).map_err(|_| Self::error(&vt, "value too large"))?);
                        if self.peek().tok != Tok::Comma {
                            break;
                        }
                        self.next();
                    }
                    if modulus.replace(coeffs).is_some() {
                        return Err(Self::error(&kt, "`modulus` given twice"));
                    }
                }
                _ => return Err(Self::error(&kt, format!("unknown field parameter `{key}`"))),
            }
        }
        let p = p.ok_or_else(|| Self::error(&head, "field block needs `p=`"))?;
        let m = m.unwrap_or(1);
        let spec = FieldSpec { p, m, modulus };
        self.q = match spec.order() {
            Some(q) if q <= MAX_ORDER as u64 => q as u32,
            _ => return Err(GfError::FieldTooLarge { p, m }.into()),
        };
        Ok(spec)
    }

    fn parse_vars(&mut self) -> Result<usize, SpecError> {
        let t = self.next();
        if t.tok != Tok::Ident("n".into()) {
            return Err(Self::error(&t, format!("expected `n`, found {}", t.tok)));
        }
        self.expect(Tok::Eq)?;
        let (n, nt) = self.expect_int()?;
        if n == 0 {
            return Err(Self::error(&nt, "state dimension must be at least 1"));
        }
        usize::try_from(n).map_err(|_| Self::error(&nt, "value too large"))
    }

    fn parse_expr(&mut self) -> Result<Expr, SpecError> {
        let mut lhs = self.parse_term()?;
        while self.peek().tok == Tok::Plus {
            self.next();
            lhs = Expr::Add(Box::new(lhs), Box::new(self.parse_term()?));
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr, SpecError> {
        let mut lhs = self.parse_factor()?;
        while self.peek().tok == Tok::Star {
            self.next();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.parse_factor()?));
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Expr, SpecError> {
        let mut base = self.parse_primary()?;
        while self.peek().tok == Tok::Caret {
            self.next();
            let (k, _) = self.expect_int()?;
            base = Expr::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn parse_primary(&mut self) -> Result<Expr, SpecError> {
        let t = self.next();
        match &t.tok {
            Tok::Int(v) => Ok(Expr::Const(self.code(*v, &t)?)),
            Tok::Ident(name) => match indexed_name(name, 'x') {
                Some(i) if (1..=self.n).contains(&i) => Ok(Expr::Var(i)),
                _ => Err(SpecError::UnknownVariable { line: t.line, column: t.column, name: name.clone() }),
            },
            Tok::LParen => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(Self::error(&t, format!("expected an expression, found {other}"))),
        }
    }

    fn parse_tuple(&mut self) -> Result<Vec<u32>, SpecError> {
        let mut out = Vec::new();
        loop {
            let (v, t) = self.expect_int()?;
            out.push(self.code(v, &t)?);
            if self.peek().tok != Tok::Comma {
                return Ok(out);
            }
            self.next();
        }
    }

    fn parse_entry(&mut self) -> Result<(TableEntry, Token), SpecError> {
        let start = self.peek().clone();
        let src = self.parse_tuple()?;
        if src.len() != self.n {
            return Err(Self::error(&start, format!("state has {} coordinates, expected {}", src.len(), self.n)));
        }
        self.expect(Tok::Arrow)?;
        let dst = self.parse_tuple()?;
        Ok((TableEntry { src, dst }, start))
    }

    fn parse_header(&mut self, first: &Token) -> Result<Option<(bool, &'static str)>, SpecError> {
        let Tok::Ident(word) = &first.tok else { return Ok(None) };
        let (table, name) = match word.as_str() {
            "transition" => (false, "transition"),
            "output" => (false, "output"),
            "table" => {
                let t = self.next();
                match &t.tok {
                    Tok::Ident(w) if w == "transition" => (true, "transition"),
                    Tok::Ident(w) if w == "output" => (true, "output"),
                    _ => return Err(Self::error(&t, "expected `transition` or `output` after `table`")),
                }
            }
            _ => return Ok(None),
        };
        self.expect(Tok::Colon)?;
        Ok(Some((table, name)))
    }
}

#[derive(Default)]
struct BlockBuilder {
    exprs: BTreeMap<usize, Expr>,
    entries: Vec<TableEntry>,
}

impl BlockBuilder {
    fn finish(self, table: bool, lhs: char, expected: Option<usize>) -> Result<Block, SpecError> {
        if table {
            return Ok(Block::Table(self.entries));
        }
        let count = expected.unwrap_or_else(|| self.exprs.keys().next_back().copied().unwrap_or(0));
        for i in 1..=count {
            if !self.exprs.contains_key(&i) {
                return Err(SpecError::MissingAssignment(format!("{lhs}{i}")));
            }
        }
        if count == 0 {
            return Err(SpecError::MissingAssignment(format!("{lhs}1")));
        }
        Ok(Block::Exprs(self.exprs.into_values().collect()))
    }
}

fn check_table(block: &'static str, entries: &[TableEntry], q: u32, n: usize) -> Result<usize, SpecError> {
    let size = (q as usize).checked_pow(n as u32).filter(|&s| s <= crate::funcspace::MAX_STATES);
    let size = size.ok_or(FuncError::StateSpaceTooLarge { q, n })?;
    let mut seen = vec![false; size];
    for t in entries {
        let s = t.src.iter().rev().fold(0usize, |acc, &c| acc * q as usize + c as usize);
        if std::mem::replace(&mut seen[s], true) {
            return Err(SpecError::TableIncomplete {
                block,
                message: format!("state ({}) is listed more than once", render_codes(&t.src)),
            });
        }
    }
    if let Some(missing) = seen.iter().position(|&b| !b) {
        let idx_codes: Vec<u32> =
            (0..n).map(|i| ((missing / (q as usize).pow(i as u32)) % q as usize) as u32).collect();
        return Err(SpecError::TableIncomplete {
            block,
            message: format!("state ({}) is missing", render_codes(&idx_codes)),
        });
    }
    Ok(size)
}

pub fn parse_system(text: &str) -> Result<SystemSpec, SpecError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, q: 0, n: 0 };
    let mut section = Section::Start;
    let mut field = None;
    let mut transition = BlockBuilder::default();
    let mut output = BlockBuilder::default();
    let mut output_width: Option<usize> = None;
    let mut transition_table = false;

    loop {
        p.skip_seps();
        let t = p.next();
        if t.tok == Tok::Eof {
            break;
        }
        match (&t.tok, section) {
            (Tok::Ident(w), Section::Start) if w == "field" => {
                field = Some(p.parse_field()?);
                section = Section::Field;
                p.end_statement()?;
                continue;
            }
            (_, Section::Start) => return Err(Parser::error(&t, "expected `field` block")),
            (Tok::Ident(w), Section::Field) if w == "vars" => {
                p.n = p.parse_vars()?;
                section = Section::Vars;
                p.end_statement()?;
                continue;
            }
            (_, Section::Field) => return Err(Parser::error(&t, "expected `vars` block")),
            _ => {}
        }
        if let Some((table, name)) = p.parse_header(&t)? {
            section = match (section, name) {
                (Section::Vars, "transition") => {
                    transition_table = table;
                    Section::Transition { table }
                }
                (Section::Transition { .. }, "output") => Section::Output { table },
                _ => return Err(Parser::error(&t, format!("unexpected `{name}` block"))),
            };
            continue;
        }
        match section {
            Section::Vars => return Err(Parser::error(&t, "expected `transition` block")),
            Section::Transition { table: false } => {
                let name = match &t.tok {
                    Tok::Ident(name) => name.clone(),
                    _ => return Err(Parser::error(&t, format!("expected an assignment `x<i>' = …`, found {}", t.tok))),
                };
                let i = match indexed_name(&name, 'x') {
                    Some(i) if (1..=p.n).contains(&i) => i,
                    _ => return Err(SpecError::UnknownVariable { line: t.line, column: t.column, name }),
                };
                p.expect(Tok::Prime)?;
                p.expect(Tok::Eq)?;
                let e = p.parse_expr()?;
                if transition.exprs.insert(i, e).is_some() {
                    return Err(SpecError::DuplicateAssignment { line: t.line, name: format!("{name}'") });
                }
            }
            Section::Output { table: false } => {
                let name = match &t.tok {
                    Tok::Ident(name) => name.clone(),
                    _ => return Err(Parser::error(&t, format!("expected an assignment `z<j> = …`, found {}", t.tok))),
                };
                let j = match indexed_name(&name, 'z') {
                    Some(j) if j >= 1 => j,
                    _ => return Err(SpecError::UnknownVariable { line: t.line, column: t.column, name }),
                };
                p.expect(Tok::Eq)?;
                let e = p.parse_expr()?;
                if output.exprs.insert(j, e).is_some() {
                    return Err(SpecError::DuplicateAssignment { line: t.line, name });
                }
            }
            Section::Transition { table: true } | Section::Output { table: true } => {
                p.pos -= 1;
                let (entry, start) = p.parse_entry()?;
                let is_transition = matches!(section, Section::Transition { .. });
                let expected = if is_transition { p.n } else { *output_width.get_or_insert(entry.dst.len()) };
                if entry.dst.len() != expected {
                    return Err(Parser::error(
                        &start,
                        format!("entry has {} values after `->`, expected {expected}", entry.dst.len()),
                    ));
                }
                if is_transition {
                    transition.entries.push(entry);
                } else {
                    output.entries.push(entry);
                }
            }
            Section::Start | Section::Field => unreachable!(),
        }
        p.end_statement()?;
    }

    let field = field.ok_or(SpecError::MissingBlock("field"))?;
    let (t_table, o_table) = match section {
        Section::Start => return Err(SpecError::MissingBlock("field")),
        Section::Field => return Err(SpecError::MissingBlock("vars")),
        Section::Vars => return Err(SpecError::MissingBlock("transition")),
        Section::Transition { .. } => return Err(SpecError::MissingBlock("output")),
        Section::Output { table } => (transition_table, table),
    };
    let transition = transition.finish(t_table, 'x', Some(p.n))?;
    let output = output.finish(o_table, 'z', None)?;
    if let Block::Table(entries) = &transition {
        check_table("transition", entries, p.q, p.n)?;
    }
    if let Block::Table(entries) = &output {
        check_table("output", entries, p.q, p.n)?;
    }
    Ok(SystemSpec { field, n: p.n, transition, output })
}

/// Builds the transition and output tables of a parsed spec.
pub fn elaborate(spec: &SystemSpec) -> Result<Dsff, SpecError> {
    let field = Field::new(&spec.field)?;
    let idx = StateIndexing::new(&field, spec.n)?;
    let to_elems = |codes: &[u32]| codes.iter().map(|&c| field.element(c)).collect::<Result<Vec<_>, _>>();

    let map = match &spec.transition {
        Block::Exprs(exprs) => {
            if exprs.len() != spec.n {
                return Err(SpecError::MissingAssignment(format!("x{}'", exprs.len() + 1)));
            }
            StateMap::from_fn(&idx, |s| {
                let x = idx.decode(s);
                let y: Vec<Elem> = exprs.iter().map(|e| e.eval(&field, &x)).collect();
                idx.encode(&y).expect("expression values are field elements")
            })?
        }
        Block::Table(entries) => {
            check_table("transition", entries, field.order(), spec.n)?;
            let mut next = vec![0; idx.size()];
            for t in entries {
                next[idx.encode(&to_elems(&t.src)?)?] = idx.encode(&to_elems(&t.dst)?)?;
            }
            StateMap::new(&idx, next)?
        }
    };

    let outputs = match &spec.output {
        Block::Exprs(exprs) => {
            exprs.iter().map(|e| FuncTable::from_fn(&idx, |s| e.eval(&field, &idx.decode(s)))).collect::<Vec<_>>()
        }
        Block::Table(entries) => {
            check_table("output", entries, field.order(), spec.n)?;
            let m = entries.first().map_or(0, |t| t.dst.len());
            let mut columns = vec![vec![Elem::ZERO; idx.size()]; m];
            for t in entries {
                let s = idx.encode(&to_elems(&t.src)?)?;
                let z = to_elems(&t.dst)?;
                if z.len() != m {
                    return Err(SpecError::TableIncomplete {
                        block: "output",
                        message: "ragged output entries".into(),
                    });
                }
                for (col, v) in columns.iter_mut().zip(z) {
                    col[s] = v;
                }
            }
            columns.into_iter().map(|c| FuncTable::new(&idx, c)).collect::<Result<Vec<_>, _>>()?
        }
    };
    Ok(Dsff::new(map, outputs)?)
}

/// Parses and elaborates in one step.
pub fn load_system(text: &str) -> Result<Dsff, SpecError> {
    elaborate(&parse_system(text)?)
}
