//! Abstract syntax of the source language.
//!
//! Every node carries a [`Span`]. Spans never participate in equality, so two
//! ASTs compare equal when they have the same shape regardless of where in the
//! source text they came from. This is what the pretty-printer round trip
//! relies on.

use std::collections::BTreeSet;
use std::fmt;

/// A party identifier as written in owner-set literals.
pub type PartyId = u32;

/// Source position of a syntax node.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    /// Byte offset of the first character.
    pub lo: usize,
    /// Byte offset one past the last character.
    pub hi: usize,
    /// 1-based line of the first character.
    pub line: u32,
    /// 1-based column of the first character.
    pub col: u32,
}

impl Span {
    pub fn to(self, end: Span) -> Span {
        Span {
            lo: self.lo,
            hi: end.hi,
            line: self.line,
            col: self.col,
        }
    }

    /// Key that identifies the node within one source file.
    pub fn key(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomicSyntax {
    Int,
    Bool,
}

impl fmt::Display for AtomicSyntax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicSyntax::Int => f.write_str("int"),
            AtomicSyntax::Bool => f.write_str("bool"),
        }
    }
}

/// A type as written in source: `int`, `bool@{1}`, `int[]@{0,1}`, `int[4]@{2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SecTypeSyntax {
    pub atomic: AtomicSyntax,
    /// `None` for scalars, `Some(None)` for `[]`, `Some(Some(n))` for `[n]`.
    pub array: Option<Option<u32>>,
    /// Owner annotation, absent for plaintext types.
    pub owners: Option<BTreeSet<PartyId>>,
    pub span: Span,
}

impl SecTypeSyntax {
    pub fn is_array(&self) -> bool {
        self.array.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Eq,
    Ne,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }
}

/// Associative operators accepted by `reduce`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReduceOp {
    Add,
    Mul,
    Max,
    Min,
}

impl ReduceOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ReduceOp::Add => "+",
            ReduceOp::Mul => "*",
            ReduceOp::Max => "max",
            ReduceOp::Min => "min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprKind {
    IntLit(i64),
    BoolLit(bool),
    Var(String),
    /// Declassify `expr` to the given audience.
    Eval(BTreeSet<PartyId>, Box<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    ArrIndex(String, Box<Expr>),
    ArrSlice(String, Box<Expr>, Box<Expr>),
    ArrLen(String),
    Reduce(ReduceOp, Box<Expr>),
    Pow(Box<Expr>, u32),
    Input(PartyId, SecTypeSyntax),
    /// `[e1, e2, ...]`
    ArrayLit(Vec<Expr>),
    /// `zeros(n)`: a plaintext array of `n` zeros.
    Zeros(Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }

    /// Visit this expression and all subexpressions in pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::IntLit(_)
            | ExprKind::BoolLit(_)
            | ExprKind::Var(_)
            | ExprKind::ArrLen(_)
            | ExprKind::Input(..) => {}
            ExprKind::Eval(_, e)
            | ExprKind::Reduce(_, e)
            | ExprKind::Pow(e, _)
            | ExprKind::Zeros(e) => e.walk(f),
            ExprKind::ArrIndex(_, e) => e.walk(f),
            ExprKind::BinOp(_, a, b) | ExprKind::ArrSlice(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            ExprKind::If(c, a, b) => {
                c.walk(f);
                a.walk(f);
                b.walk(f);
            }
            ExprKind::Call(_, args) | ExprKind::ArrayLit(args) => {
                for a in args {
                    a.walk(f);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Skip,
    ValDecl(String, SecTypeSyntax, Expr),
    Assign(String, Expr),
    /// `while (var < bound) { body }`
    While(String, Expr, Block),
    /// Statement-level conditional; both branches are statement blocks.
    If(Expr, Block, Block),
    ArrUpdate(String, Expr, Expr),
    Output(Expr),
}

/// A sequence of statements, optionally ending in a result expression.
///
/// Statement sequencing (`S1 S2`) is the order of `stmts`. Function bodies
/// carry a result; the main block and loop/branch bodies do not.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub result: Option<Box<Expr>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub ty: SecTypeSyntax,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FuncDef {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: SecTypeSyntax,
    pub bound: Option<Expr>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub declared_parties: BTreeSet<PartyId>,
    pub functions: Vec<FuncDef>,
    pub main: Block,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&FuncDef> {
        self.functions.iter().find(|f| f.name == name)
    }
}

impl Block {
    /// Visit every statement, including those nested in loops and branches.
    pub fn walk_stmts<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        for s in &self.stmts {
            f(s);
            match &s.kind {
                StmtKind::While(_, _, body) => body.walk_stmts(f),
                StmtKind::If(_, t, e) => {
                    t.walk_stmts(f);
                    e.walk_stmts(f);
                }
                _ => {}
            }
        }
    }

    /// Visit every expression in the block, nested statements included.
    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        for s in &self.stmts {
            match &s.kind {
                StmtKind::Skip => {}
                StmtKind::ValDecl(_, _, e) | StmtKind::Assign(_, e) | StmtKind::Output(e) => {
                    e.walk(f)
                }
                StmtKind::While(_, bound, body) => {
                    bound.walk(f);
                    body.walk_exprs(f);
                }
                StmtKind::If(c, t, e) => {
                    c.walk(f);
                    t.walk_exprs(f);
                    e.walk_exprs(f);
                }
                StmtKind::ArrUpdate(_, i, v) => {
                    i.walk(f);
                    v.walk(f);
                }
            }
        }
        if let Some(r) = &self.result {
            r.walk(f);
        }
    }

    /// Names assigned (but not declared) anywhere inside the block.
    pub fn assigned_vars(&self) -> BTreeSet<String> {
        let mut declared = BTreeSet::new();
        let mut assigned = BTreeSet::new();
        self.walk_stmts(&mut |s| match &s.kind {
            StmtKind::ValDecl(x, _, _) => {
                declared.insert(x.clone());
            }
            StmtKind::Assign(x, _) | StmtKind::ArrUpdate(x, _, _) => {
                assigned.insert(x.clone());
            }
            _ => {}
        });
        assigned.retain(|x| !declared.contains(x));
        assigned
    }
}
