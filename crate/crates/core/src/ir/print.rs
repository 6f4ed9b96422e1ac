use std::fmt::{self, Write as _};

use super::program::{Expr, Program, Stmt, SymbolTable, Term};

use super::types::MachType;

/// Borrowing adapter that prints an expression with variable names.
///
/// `context` is the type an unannotated literal takes when nothing else
/// fixes it: the destination type for an assignment right-hand side, `s32`
/// for guards. Literals whose type the parser would not infer are printed
/// with an explicit suffix (`7:s8`).
pub struct ExprDisplay<'a> {
    pub expr: &'a Expr,
    pub symbols: &'a SymbolTable,
    pub context: MachType,
}

struct TermDisplay<'a>(&'a Term, &'a SymbolTable, MachType);

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self.0 {
            Term::Var(v) => f.write_str(self.1.name(v)),
            Term::Const(c, ty) if ty == self.2 => write!(f, "{c}"),
            Term::Const(c, ty) => write!(f, "{c}:{ty}"),
        }
    }
}

impl ExprDisplay<'_> {
    /// The type the parser gives an unannotated literal in each operand
    /// position.
    fn implied(&self) -> [MachType; 2] {
        let var_ty = |t: &Term| t.var().map(|v| self.symbols.ty(v));
        let pair = |a: &Term, b: &Term, ctx| {
            let ty = var_ty(a).or_else(|| var_ty(b)).unwrap_or(ctx);
            [ty, ty]
        };
        let ctx = self.context;
        match self.expr {
            Expr::Term(_) | Expr::BitNot(_) => [ctx; 2],
            Expr::Not(_) | Expr::LogicAnd(..) => [MachType::S32; 2],
            Expr::Cast(_, Term::Const(c, _)) if !MachType::S64.contains(*c) => [MachType::U64; 2],
            Expr::Cast(..) => [MachType::S64; 2],
            Expr::Binary(op, a, _) if op.is_shift() => [var_ty(a).unwrap_or(ctx), MachType::S32],
            Expr::Binary(_, a, b) => pair(a, b, ctx),
            Expr::Le(a, b) => pair(a, b, MachType::S32),
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [ia, ib] = self.implied();
        let t = |t, ty| TermDisplay(t, self.symbols, ty);
        match self.expr {
            Expr::Term(a) => write!(f, "{}", t(a, ia)),
            Expr::Binary(op, a, b) => write!(f, "{} {} {}", t(a, ia), op.symbol(), t(b, ib)),
            Expr::Le(a, b) => write!(f, "{} <= {}", t(a, ia), t(b, ib)),
            Expr::LogicAnd(a, b) => write!(f, "{} && {}", t(a, ia), t(b, ib)),
            Expr::Not(a) => write!(f, "!{}", t(a, ia)),
            Expr::BitNot(a) => write!(f, "~{}", t(a, ia)),
            Expr::Cast(ty, a) => write!(f, "({ty}) {}", t(a, ia)),
        }
    }
}

/// One statement in concrete syntax, without a trailing newline.
pub fn emit_stmt(stmt: &Stmt, symbols: &SymbolTable) -> String {
    let e = |expr| ExprDisplay { expr, symbols, context: MachType::S32 };
    match stmt {
        Stmt::Assign(v, expr) => {
            let rhs = ExprDisplay { expr, symbols, context: symbols.ty(*v) };
            format!("{} := {rhs}", symbols.name(*v))
        }
        Stmt::Assume(expr) => format!("assume {}", e(expr)),
        Stmt::Assert(expr) => format!("assert {}", e(expr)),
        Stmt::IfGoto(expr, l) if *expr == Expr::truth() => format!("goto {l}"),
        Stmt::IfGoto(expr, l) => format!("if {} goto {l}", e(expr)),
        Stmt::Label(l) => format!("{l}:"),
        Stmt::Skip => "skip".to_string(),
    }
}

/// Render a program in the textual format accepted by
/// [`parse_program`](super::parse_program).
pub fn emit_program(program: &Program) -> String {
    emit_with(program, |_| None)
}

/// Render a program, appending `# <note>` to statements for which `note`
/// returns something.
pub fn emit_with(program: &Program, mut note: impl FnMut(usize) -> Option<String>) -> String {
    let mut out = String::new();
    for d in program.symbols().decls() {
        let _ = writeln!(out, "decl {} : {}", d.name, d.ty);
    }
    for (i, s) in program.stmts().iter().enumerate() {
        let text = emit_stmt(s, program.symbols());
        match note(i + 1) {
            Some(n) => {
                let _ = writeln!(out, "{text:<32}# {n}");
            }
            None => {
                let _ = writeln!(out, "{text}");
            }
        }
    }
    out
}
