use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::types::MachType;
use super::IrError;

/// Index of a declared variable in the program's symbol table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: MachType,
}

/// Declared variables and their types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    decls: Vec<VarDecl>,
    by_name: HashMap<String, VarId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, ty: MachType) -> Result<VarId, IrError> {
        if self.by_name.contains_key(name) {
            return Err(IrError::DuplicateDecl(name.to_string()));
        }
        let id = VarId(self.decls.len() as u32);
        self.decls.push(VarDecl { name: name.to_string(), ty });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn ty(&self, v: VarId) -> MachType {
        self.decls[v.index()].ty
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.decls[v.index()].name
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.decls.len() as u32).map(VarId)
    }

    pub fn decls(&self) -> &[VarDecl] {
        &self.decls
    }

    /// Variables sorted by name.
    pub fn ids_by_name(&self) -> Vec<VarId> {
        let mut ids: Vec<VarId> = self.ids().collect();
        ids.sort_by(|a, b| self.name(*a).cmp(self.name(*b)));
        ids
    }

    pub fn max_width(&self) -> u8 {
        self.decls.iter().map(|d| d.ty.width()).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    /// A literal together with the type it is interpreted at.
    Const(i128, MachType),
}

impl Term {
    pub fn ty(&self, symbols: &SymbolTable) -> MachType {
        match *self {
            Term::Var(v) => symbols.ty(v),
            Term::Const(_, ty) => ty,
        }
    }

    pub fn var(&self) -> Option<VarId> {
        match *self {
            Term::Var(v) => Some(v),
            Term::Const(..) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Shl,
    Shr,
    And,
    Or,
    Xor,
}

impl BinOp {
    pub const ALL: [BinOp; 9] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Shl,
        BinOp::Shr,
        BinOp::And,
        BinOp::Or,
        BinOp::Xor,
    ];

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_shift(self) -> bool {
        matches!(self, BinOp::Shl | BinOp::Shr)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Xor => "^",
        }
    }
}

/// Three-address expressions: every operand is a [`Term`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Term(Term),
    Binary(BinOp, Term, Term),
    /// `t0 <= t1` in the operands' type order.
    Le(Term, Term),
    /// `t0 && t1` on C truthiness.
    LogicAnd(Term, Term),
    /// `!t`
    Not(Term),
    /// `~t`
    BitNot(Term),
    /// `(ty) t`
    Cast(MachType, Term),
}

/// Static result type of an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExprType {
    Num(MachType),
    /// 0/1 valued.
    Bool,
}

impl Expr {
    pub fn terms(&self) -> Vec<Term> {
        match self {
            Expr::Term(t) | Expr::Not(t) | Expr::BitNot(t) | Expr::Cast(_, t) => vec![*t],
            Expr::Binary(_, a, b) | Expr::Le(a, b) | Expr::LogicAnd(a, b) => vec![*a, *b],
        }
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms().iter().filter_map(Term::var).collect();
        vs.dedup();
        vs
    }

    pub fn result_type(&self, symbols: &SymbolTable) -> ExprType {
        match self {
            Expr::Term(t) | Expr::BitNot(t) => ExprType::Num(t.ty(symbols)),
            Expr::Binary(_, a, _) => ExprType::Num(a.ty(symbols)),
            Expr::Cast(ty, _) => ExprType::Num(*ty),
            Expr::Le(..) | Expr::LogicAnd(..) | Expr::Not(_) => ExprType::Bool,
        }
    }

    /// Forms accepted as guards of `assume`, `assert` and `if`.
    pub fn is_condition(&self) -> bool {
        matches!(
            self,
            Expr::Term(_) | Expr::Le(..) | Expr::LogicAnd(..) | Expr::Not(_)
        )
    }

    pub fn as_const(&self) -> Option<i128> {
        match self {
            Expr::Term(Term::Const(c, _)) => Some(*c),
            _ => None,
        }
    }

    /// The literal `1` used for folded and unconditional guards.
    pub fn truth() -> Expr {
        Expr::Term(Term::Const(1, MachType::signed(32)))
    }

    pub fn falsity() -> Expr {
        Expr::Term(Term::Const(0, MachType::signed(32)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign(VarId, Expr),
    Assume(Expr),
    Assert(Expr),
    IfGoto(Expr, String),
    Label(String),
    Skip,
}

impl Stmt {
    pub fn guard(&self) -> Option<&Expr> {
        match self {
            Stmt::Assume(e) | Stmt::Assert(e) | Stmt::IfGoto(e, _) => Some(e),
            _ => None,
        }
    }

    pub fn is_guard(&self) -> bool {
        self.guard().is_some()
    }

    /// Every variable mentioned by the statement, including an assignment's
    /// destination.
    pub fn vars(&self) -> Vec<VarId> {
        let mut vs = match self {
            Stmt::Assign(v, e) => {
                let mut vs = vec![*v];
                vs.extend(e.vars());
                vs
            }
            Stmt::Assume(e) | Stmt::Assert(e) | Stmt::IfGoto(e, _) => e.vars(),
            Stmt::Label(_) | Stmt::Skip => Vec::new(),
        };
        vs.sort();
        vs.dedup();
        vs
    }
}

/// A validated GOTO program. Statement indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    symbols: SymbolTable,
    stmts: Vec<Stmt>,
    labels: BTreeMap<String, usize>,
}

impl Program {
    /// Validate and index a statement list.
    pub fn new(symbols: SymbolTable, stmts: Vec<Stmt>) -> Result<Self, IrError> {
        let mut labels = BTreeMap::new();
        for (i, s) in stmts.iter().enumerate() {
            if let Stmt::Label(l) = s {
                if labels.insert(l.clone(), i + 1).is_some() {
                    return Err(IrError::DuplicateLabel(l.clone()));
                }
            }
        }
        for (i, s) in stmts.iter().enumerate() {
            validate_stmt(&symbols, &labels, s).map_err(|e| e.at_stmt(i + 1))?;
        }
        Ok(Program { symbols, stmts, labels })
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn stmts(&self) -> &[Stmt] {
        &self.stmts
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }

    /// Statement at 1-based index `idx`.
    pub fn stmt(&self, idx: usize) -> &Stmt {
        &self.stmts[idx - 1]
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.stmts.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.get(label).copied()
    }

    pub fn labels(&self) -> &BTreeMap<String, usize> {
        &self.labels
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.symbols.lookup(name)
    }

    /// Rebuild with a new statement list over the same symbol table.
    pub fn with_stmts(&self, stmts: Vec<Stmt>) -> Result<Program, IrError> {
        Program::new(self.symbols.clone(), stmts)
    }
}

fn validate_term(symbols: &SymbolTable, t: &Term) -> Result<(), IrError> {
    match *t {
        Term::Var(v) if v.index() >= symbols.len() => Err(IrError::UnknownVarId(v.0)),
        Term::Const(c, ty) if !ty.contains(c) => Err(IrError::ConstOutOfRange { value: c, ty }),
        _ => Ok(()),
    }
}

fn validate_expr(symbols: &SymbolTable, e: &Expr) -> Result<(), IrError> {
    for t in e.terms() {
        validate_term(symbols, &t)?;
    }
    match e {
        Expr::Binary(op, a, b) if !op.is_shift() => same_type(symbols, a, b),
        Expr::Le(a, b) => same_type(symbols, a, b),
        _ => Ok(()),
    }
}

fn same_type(symbols: &SymbolTable, a: &Term, b: &Term) -> Result<(), IrError> {
    let (ta, tb) = (a.ty(symbols), b.ty(symbols));
    if ta == tb {
        Ok(())
    } else {
        Err(IrError::TypeMismatch(ta, tb))
    }
}

fn validate_stmt(
    symbols: &SymbolTable,
    labels: &BTreeMap<String, usize>,
    s: &Stmt,
) -> Result<(), IrError> {
    match s {
        Stmt::Assign(v, e) => {
            if v.index() >= symbols.len() {
                return Err(IrError::UnknownVarId(v.0));
            }
            validate_expr(symbols, e)
        }
        Stmt::Assume(e) | Stmt::Assert(e) => {
            if !e.is_condition() {
                return Err(IrError::NonBooleanGuard);
            }
            validate_expr(symbols, e)
        }
        Stmt::IfGoto(e, l) => {
            if !labels.contains_key(l) {
                return Err(IrError::UnresolvedLabel(l.clone()));
            }
            if !e.is_condition() {
                return Err(IrError::NonBooleanGuard);
            }
            validate_expr(symbols, e)
        }
        Stmt::Label(_) | Stmt::Skip => Ok(()),
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
