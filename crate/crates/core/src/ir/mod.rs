//! The GOTO intermediate language: types, three-address expressions,
//! statements, the textual format and control-flow queries.
//!
//! A program is a flat list of statements addressed by 1-based index, a
//! symbol table mapping each variable to its [`MachType`], and an index from
//! label names to the position of their `Label` statement.

mod cfg;
mod parse;
mod print;
mod program;
mod types;

use thiserror::Error;

pub use cfg::{detect_loops, dominators, flatten, predecessors, reachable, successors, Loop};
pub use parse::{parse_program, ParseError};
pub use print::{emit_program, emit_stmt, emit_with, ExprDisplay};
pub use program::{BinOp, Expr, ExprType, Program, Stmt, SymbolTable, Term, VarDecl, VarId};
pub use types::MachType;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum IrError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("variable `{0}` declared twice")]
    DuplicateDecl(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVar(String),
    #[error("label `{0}` defined more than once")]
    DuplicateLabel(String),
    #[error("goto target `{0}` is not defined")]
    UnresolvedLabel(String),
    #[error("constant {value} is out of range for {ty}")]
    ConstOutOfRange { value: i128, ty: MachType },
    #[error("operand types differ: {0} vs {1} (insert an explicit cast)")]
    TypeMismatch(MachType, MachType),
    #[error("guard must be a boolean expression (`a <= b`, `a && b`, `!a` or a term)")]
    NonBooleanGuard,
    #[error("nested expression: operands must be terms (three-address form)")]
    NestedExpression,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown variable id {0}")]
    UnknownVarId(u32),
    #[error("statement {idx}: {source}")]
    InStmt {
        idx: usize,
        #[source]
        source: Box<IrError>,
    },
}

impl IrError {
    pub(crate) fn at_stmt(self, idx: usize) -> IrError {
        IrError::InStmt { idx, source: Box::new(self) }
    }
}
