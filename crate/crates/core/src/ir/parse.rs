//! Line-oriented parser for the textual IR.
//!
//! ```text
//! decl x : s32            # declaration
//! x := 0
//! L1:                     # label (may prefix a statement on the same line)
//! if 100 <= x goto L2
//! x := x + 1
//! goto L1                 # sugar for `if 1 goto L1`
//! L2: assert 51 <= x
//! ```
//!
//! Untyped integer literals take the type of the variable they meet: the other
//! operand of a binary operator or comparison, or the destination of a plain
//! assignment. Literals with no such partner default to `s32`, except the
//! operand of a cast which is read as `s64` (or `u64` when too large).
//! A literal can carry its type explicitly as `7:s8`, which overrides the
//! inference and also fixes the type of an untyped partner.
//! `<`, `>` and `>=` are accepted as sugar and rewritten to `<=`.

use std::fmt;

use thiserror::Error;

use super::program::{BinOp, Expr, Program, Stmt, SymbolTable, Term};
use super::types::MachType;
use super::IrError;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub error: IrError,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.error)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i128),
    Op(&'static str),
    LParen,
    RParen,
    Colon,
    Define,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

const OPS: [&str; 17] = [
    "<<", ">>", "<=", ">=", "&&", "+", "-", "*", "/", "&", "|", "^", "<", ">", "!", "~", "=",
];

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>, ParseError> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| ParseError { line: lineno, col, error: IrError::Syntax(msg) };
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'#' {
            break;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'.') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(line[start..i].to_string()), col });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let text = &line[start..i];
            let parsed = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
                i128::from_str_radix(hex, 16)
            } else {
                text.parse::<i128>()
            };
            let v = parsed.map_err(|_| err(col, format!("invalid integer literal `{text}`")))?;
            out.push(Token { tok: Tok::Int(v), col });
        } else if c == b'(' {
            out.push(Token { tok: Tok::LParen, col });
            i += 1;
        } else if c == b')' {
            out.push(Token { tok: Tok::RParen, col });
            i += 1;
        } else if line[i..].starts_with(":=") {
            out.push(Token { tok: Tok::Define, col });
            i += 2;
        } else if c == b':' {
            out.push(Token { tok: Tok::Colon, col });
            i += 1;
        } else if let Some(op) = OPS.iter().find(|op| line[i..].starts_with(**op)) {
            if *op == "=" {
                return Err(err(col, "`=` is not an operator; use `:=` for assignment".into()));
            }
            out.push(Token { tok: Tok::Op(op), col });
            i += op.len();
        } else {
            return Err(err(col, format!("unexpected character `{}`", c as char)));
        }
    }
    Ok(out)
}

const KEYWORDS: [&str; 6] = ["decl", "skip", "assume", "assert", "if", "goto"];

#[derive(Clone, Debug)]
enum RawTerm {
    Var(String, usize),
    /// Value, column and an explicit `:type` suffix.
    Int(i128, usize, Option<MachType>),
}

#[derive(Clone, Debug)]
enum RawExpr {
    Term(RawTerm),
    Binary(&'static str, RawTerm, RawTerm),
    Not(RawTerm),
    BitNot(RawTerm),
    Cast(MachType, RawTerm),
}

enum RawStmt {
    Assign(String, usize, RawExpr),
    Assume(RawExpr),
    Assert(RawExpr),
    IfGoto(RawExpr, String),
    Goto(String),
    Label(String),
    Skip,
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    eol_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol_col, |t| t.col)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn error(&self, error: IrError) -> ParseError {
        ParseError { line: self.line, col: self.col(), error }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(IrError::Syntax(msg.into()))
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Op("-")) => match self.peek_at(1) {
                Some(Tok::Int(v)) => {
                    let v = -*v;
                    self.pos += 2;
                    Ok(RawTerm::Int(v, col, self.suffix()?))
                }
                _ => Err(self.syntax("expected integer after unary `-`")),
            },
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(RawTerm::Int(*v, col, self.suffix()?))
            }
            Some(Tok::Ident(_)) => Ok(RawTerm::Var(self.ident("variable")?, col)),
            Some(Tok::LParen) => Err(self.error(IrError::NestedExpression)),
            _ => Err(self.syntax("expected a variable or constant")),
        }
    }

    /// Optional `:type` after an integer literal.
    fn suffix(&mut self) -> Result<Option<MachType>, ParseError> {
        match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Colon), Some(Tok::Ident(t))) => {
                self.pos += 1;
                let ty = t.parse::<MachType>().map_err(|m| self.syntax(m))?;
                self.pos += 1;
                Ok(Some(ty))
            }
            _ => Ok(None),
        }
    }

    fn cast_type(&self) -> Option<MachType> {
        match (self.peek(), self.peek_at(1), self.peek_at(2)) {
            (Some(Tok::LParen), Some(Tok::Ident(t)), Some(Tok::RParen)) => t.parse().ok(),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<RawExpr, ParseError> {
        let e = match self.peek() {
            Some(Tok::Op("!")) => {
                self.pos += 1;
                RawExpr::Not(self.term()?)
            }
            Some(Tok::Op("~")) => {
                self.pos += 1;
                RawExpr::BitNot(self.term()?)
            }
            Some(Tok::LParen) => {
                let ty = self.cast_type().ok_or_else(|| self.error(IrError::NestedExpression))?;
                self.pos += 3;
                RawExpr::Cast(ty, self.term()?)
            }
            _ => {
                let lhs = self.term()?;
                match self.peek() {
                    Some(Tok::Op(op)) if !matches!(*op, "!" | "~") => {
                        self.pos += 1;
                        let rhs = self.term()?;
                        RawExpr::Binary(op, lhs, rhs)
                    }
                    _ => RawExpr::Term(lhs),
                }
            }
        };
        if let Some(Tok::Op(_)) = self.peek() {
            return Err(self.error(IrError::NestedExpression));
        }
        Ok(e)
    }
}

fn parse_line(cur: &mut Cursor<'_>, out: &mut Vec<RawStmt>) -> Result<(), ParseError> {
    // Leading labels.
    while let (Some(Tok::Ident(name)), Some(Tok::Colon)) = (cur.peek(), cur.peek_at(1)) {
        if KEYWORDS.contains(&name.as_str()) {
            break;
        }
        out.push(RawStmt::Label(name.clone()));
        cur.pos += 2;
    }
    if cur.at_end() {
        return Ok(());
    }
    let stmt = match cur.peek() {
        Some(Tok::Ident(kw)) if kw == "skip" => {
            cur.next();
            RawStmt::Skip
        }
        Some(Tok::Ident(kw)) if kw == "assume" => {
            cur.next();
            RawStmt::Assume(cur.expr()?)
        }
        Some(Tok::Ident(kw)) if kw == "assert" => {
            cur.next();
            RawStmt::Assert(cur.expr()?)
        }
        Some(Tok::Ident(kw)) if kw == "goto" => {
            cur.next();
            RawStmt::Goto(cur.ident("label")?)
        }
        Some(Tok::Ident(kw)) if kw == "if" => {
            cur.next();
            let cond = cur.expr()?;
            match cur.next() {
                Some(Tok::Ident(kw)) if kw == "goto" => {}
                _ => {
                    cur.pos -= 1;
                    return Err(cur.syntax("expected `goto` after condition"));
                }
            }
            RawStmt::IfGoto(cond, cur.ident("label")?)
        }
        Some(Tok::Ident(kw)) if kw == "decl" => {
            return Err(cur.syntax("declarations must appear on their own line"));
        }
        Some(Tok::Ident(_)) => {
            let col = cur.col();
            let v = cur.ident("variable")?;
            if cur.next() != Some(&Tok::Define) {
                cur.pos -= 1;
                return Err(cur.syntax("expected `:=`"));
            }
            RawStmt::Assign(v, col, cur.expr()?)
        }
        _ => return Err(cur.syntax("expected a statement")),
    };
    if !cur.at_end() {
        return Err(cur.syntax("unexpected trailing tokens"));
    }
    out.push(stmt);
    Ok(())
}

fn parse_decl(cur: &mut Cursor<'_>) -> Result<(String, MachType), ParseError> {
    cur.next();
    let name = cur.ident("variable name")?;
    if cur.next() != Some(&Tok::Colon) {
        cur.pos -= 1;
        return Err(cur.syntax("expected `:` in declaration"));
    }
    let ty = match cur.peek() {
        Some(Tok::Ident(t)) => t.parse::<MachType>().map_err(|m| cur.syntax(m))?,
        _ => return Err(cur.syntax("expected a type such as `s32` or `u8`")),
    };
    cur.next();
    if !cur.at_end() {
        return Err(cur.syntax("unexpected trailing tokens"));
    }
    Ok((name, ty))
}

const DEFAULT_CONST: MachType = MachType::S32;

struct Resolver<'a> {
    symbols: &'a SymbolTable,
    line: usize,
}

impl Resolver<'_> {
    fn err(&self, col: usize, error: IrError) -> ParseError {
        ParseError { line: self.line, col, error }
    }

    fn var(&self, name: &str, col: usize) -> Result<Term, ParseError> {
        self.symbols
            .lookup(name)
            .map(Term::Var)
            .ok_or_else(|| self.err(col, IrError::UndeclaredVar(name.to_string())))
    }

    fn typed_const(&self, v: i128, ty: MachType, col: usize) -> Result<Term, ParseError> {
        if ty.contains(v) {
            Ok(Term::Const(v, ty))
        } else {
            Err(self.err(col, IrError::ConstOutOfRange { value: v, ty }))
        }
    }

    fn term(&self, t: &RawTerm, ctx: MachType) -> Result<Term, ParseError> {
        match t {
            RawTerm::Var(name, col) => self.var(name, *col),
            RawTerm::Int(v, col, ty) => self.typed_const(*v, ty.unwrap_or(ctx), *col),
        }
    }

    fn var_type(&self, t: &RawTerm) -> Option<MachType> {
        match t {
            RawTerm::Var(name, _) => self.symbols.lookup(name).map(|v| self.symbols.ty(v)),
            RawTerm::Int(_, _, ty) => *ty,
        }
    }

    /// Resolve a pair of operands that must share a type.
    fn pair(&self, a: &RawTerm, b: &RawTerm, ctx: MachType) -> Result<(Term, Term), ParseError> {
        let ty = self.var_type(a).or_else(|| self.var_type(b)).unwrap_or(ctx);
        Ok((self.term(a, ty)?, self.term(b, ty)?))
    }

    fn col(t: &RawTerm) -> usize {
        match t {
            RawTerm::Var(_, c) | RawTerm::Int(_, c, _) => *c,
        }
    }

    /// `a < b` as `<=` by adjusting a literal operand.
    fn strict_less(&self, a: &RawTerm, b: &RawTerm, ctx: MachType) -> Result<Expr, ParseError> {
        let (ta, tb) = self.pair(a, b, ctx)?;
        match (ta, tb) {
            (_, Term::Const(c, ty)) => {
                if c == ty.min() {
                    return Err(self.err(
                        Self::col(b),
                        IrError::Unsupported(format!("`< {c}` is always false at {ty}")),
                    ));
                }
                Ok(Expr::Le(ta, Term::Const(c - 1, ty)))
            }
            (Term::Const(c, ty), _) => {
                if c == ty.max() {
                    return Err(self.err(
                        Self::col(a),
                        IrError::Unsupported(format!("`{c} <` is always false at {ty}")),
                    ));
                }
                Ok(Expr::Le(Term::Const(c + 1, ty), tb))
            }
            _ => Err(self.err(
                Self::col(a),
                IrError::Unsupported("strict comparison between two variables; use `<=`".into()),
            )),
        }
    }

    fn expr(&self, e: &RawExpr, ctx: MachType) -> Result<Expr, ParseError> {
        Ok(match e {
            RawExpr::Term(t) => Expr::Term(self.term(t, ctx)?),
            RawExpr::Not(t) => Expr::Not(self.term(t, DEFAULT_CONST)?),
            RawExpr::BitNot(t) => Expr::BitNot(self.term(t, ctx)?),
            RawExpr::Cast(ty, t) => {
                let src = match t {
                    RawTerm::Int(_, _, Some(ty)) => *ty,
                    RawTerm::Int(v, _, None) if !MachType::S64.contains(*v) => MachType::U64,
                    _ => MachType::S64,
                };
                Expr::Cast(*ty, self.term(t, src)?)
            }
            RawExpr::Binary(op, a, b) => match *op {
                "<=" => {
                    let (a, b) = self.pair(a, b, DEFAULT_CONST)?;
                    Expr::Le(a, b)
                }
                ">=" => {
                    let (b, a) = self.pair(b, a, DEFAULT_CONST)?;
                    Expr::Le(b, a)
                }
                "<" => self.strict_less(a, b, DEFAULT_CONST)?,
                ">" => self.strict_less(b, a, DEFAULT_CONST)?,
                "&&" => Expr::LogicAnd(self.term(a, DEFAULT_CONST)?, self.term(b, DEFAULT_CONST)?),
                "<<" | ">>" => {
                    let op = if *op == "<<" { BinOp::Shl } else { BinOp::Shr };
                    let lhs_ty = self.var_type(a).unwrap_or(ctx);
                    Expr::Binary(op, self.term(a, lhs_ty)?, self.term(b, DEFAULT_CONST)?)
                }
                _ => {
                    let op = match *op {
                        "+" => BinOp::Add,
                        "-" => BinOp::Sub,
                        "*" => BinOp::Mul,
                        "/" => BinOp::Div,
                        "&" => BinOp::And,
                        "|" => BinOp::Or,
                        "^" => BinOp::Xor,
                        other => {
                            return Err(self.err(Self::col(a), IrError::Syntax(format!("unknown operator `{other}`"))))
                        }
                    };
                    let (a, b) = self.pair(a, b, ctx)?;
                    Expr::Binary(op, a, b)
                }
            },
        })
    }

    fn guard(&self, e: &RawExpr, col: usize) -> Result<Expr, ParseError> {
        let e = self.expr(e, DEFAULT_CONST)?;
        if e.is_condition() {
            Ok(e)
        } else {
            Err(self.err(col, IrError::NonBooleanGuard))
        }
    }
}

/// Parse and validate a program in the textual IR format.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut symbols = SymbolTable::new();
    let mut raw: Vec<(usize, usize, RawStmt)> = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks = lex(line, lineno)?;
        let mut cur = Cursor { toks: &toks, pos: 0, line: lineno, eol_col: line.len() + 1 };
        if matches!(cur.peek(), Some(Tok::Ident(kw)) if kw == "decl") {
            let col = cur.col();
            let (name, ty) = parse_decl(&mut cur)?;
            symbols
                .declare(&name, ty)
                .map_err(|error| ParseError { line: lineno, col, error })?;
            continue;
        }
        let col = cur.col();
        let mut stmts = Vec::new();
        parse_line(&mut cur, &mut stmts)?;
        raw.extend(stmts.into_iter().map(|s| (lineno, col, s)));
    }

    let mut stmts = Vec::with_capacity(raw.len());
    let mut lines = Vec::with_capacity(raw.len());
    for (line, col, s) in &raw {
        let r = Resolver { symbols: &symbols, line: *line };
        let stmt = match s {
            RawStmt::Assign(v, vcol, e) => {
                let dest = r.var(v, *vcol)?;
                let ty = dest.ty(&symbols);
                Stmt::Assign(dest.var().expect("variable term"), r.expr(e, ty)?)
            }
            RawStmt::Assume(e) => Stmt::Assume(r.guard(e, *col)?),
            RawStmt::Assert(e) => Stmt::Assert(r.guard(e, *col)?),
            RawStmt::IfGoto(e, l) => Stmt::IfGoto(r.guard(e, *col)?, l.clone()),
            RawStmt::Goto(l) => Stmt::IfGoto(Expr::truth(), l.clone()),
            RawStmt::Label(l) => Stmt::Label(l.clone()),
            RawStmt::Skip => Stmt::Skip,
        };
        stmts.push(stmt);
        lines.push(*line);
    }

    Program::new(symbols, stmts).map_err(|e| match e {
        IrError::InStmt { idx, source } => ParseError { line: lines[idx - 1], col: 1, error: *source },
        other => {
            let line = match &other {
                IrError::DuplicateLabel(l) => raw
                    .iter()
                    .filter(|(_, _, s)| matches!(s, RawStmt::Label(x) if x == l))
                    .nth(1)
                    .map_or(1, |(line, _, _)| *line),
                _ => 1,
            };
            ParseError { line, col: 1, error: other }
        }
    })
}
