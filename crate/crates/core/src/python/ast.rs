//! A deliberately coarse syntax tree: declarations, imports, assignments and
//! calls are precise; every other expression form is a `Compound` node that
//! only keeps its children so that nested calls can still be found.

use crate::literal::LiteralValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Module {
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImportName {
    /// Dotted name, or `*` for star imports.
    pub name: String,
    pub alias: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Import(Vec<ImportName>),
    ImportFrom { module: Option<String>, level: u32, names: Vec<ImportName> },
    FunctionDef(FunctionDef),
    ClassDef(ClassDef),
    /// `a = b = value`, `a: T = value`, `a += value`.
    Assign { targets: Vec<Expr>, value: Option<Expr>, augmented: bool },
    Expr(Expr),
    /// if/while/for/with/try. `targets` are names bound by the header.
    Block { header: Vec<Expr>, targets: Vec<Expr>, bodies: Vec<Vec<Stmt>> },
    /// return, raise, assert, del, pass, global, ...
    Other(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Param>,
    pub decorators: Vec<String>,
    pub body: Vec<Stmt>,
    pub docstring: Option<String>,
    pub is_async: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    PositionalOnly,
    PositionalOrKeyword,
    KeywordOnly,
    VarPositional,
    VarKeyword,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
    pub annotation: Option<Expr>,
    pub default: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDef {
    pub name: String,
    /// Source text of positional base expressions.
    pub bases: Vec<String>,
    pub decorators: Vec<String>,
    pub body: Vec<Stmt>,
    pub docstring: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ArgKind {
    Positional,
    Keyword(String),
    Star,
    DoubleStar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Argument {
    pub kind: ArgKind,
    pub value: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Name(String),
    Attribute { value: Box<Expr>, attr: String },
    Call { func: Box<Expr>, args: Vec<Argument> },
    Literal(LiteralValue),
    Starred(Box<Expr>),
    Compound(Vec<Expr>),
}

impl Expr {
    pub fn as_literal(&self) -> Option<LiteralValue> {
        match &self.kind {
            ExprKind::Literal(v) => Some(v.clone()),
            _ => None,
        }
    }

    /// The content of a string literal.
    pub fn as_literal_string(&self) -> Option<String> {
        match &self.kind {
            ExprKind::Literal(v) if v.tag() == crate::literal::LiteralTag::String => {
                // Decode the canonical form via the lexer; canonical strings are always valid.
                let tokens = super::lexer::tokenize(v.canonical_text()).ok()?;
                match &tokens.first()?.kind {
                    super::lexer::TokenKind::Str { value, .. } => Some(value.clone()),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// `a.b.c` as a dotted string when the expression is a plain name chain.
    pub fn dotted_name(&self) -> Option<String> {
        match &self.kind {
            ExprKind::Name(n) => Some(n.clone()),
            ExprKind::Attribute { value, attr } => Some(format!("{}.{attr}", value.dotted_name()?)),
            _ => None,
        }
    }

    /// Calls `f` on this expression and every nested sub-expression, pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Attribute { value, .. } | ExprKind::Starred(value) => value.walk(f),
            ExprKind::Call { func, args } => {
                func.walk(f);
                for a in args {
                    a.value.walk(f);
                }
            }
            ExprKind::Compound(children) => {
                for c in children {
                    c.walk(f);
                }
            }
            ExprKind::Name(_) | ExprKind::Literal(_) => {}
        }
    }
}
