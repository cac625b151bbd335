//! Static call-target resolution for client code.
//!
//! Names are tracked per scope in statement order. Module-level imports are
//! visible everywhere; instances created with `v = C(...)` are only tracked
//! inside the scope that created them.

use std::collections::HashMap;

use serde::Serialize;

use crate::literal::LiteralValue;
use crate::model::{ApiModel, ClassDecl, ElementRef, FunctionDecl};
use crate::python::ast::{ArgKind, Argument, Expr, ExprKind, Module, Stmt, StmtKind};
use crate::qname::QualifiedName;
use crate::usage::{SiteId, ValueKey};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CallTarget {
    Function { function: QualifiedName },
    /// `init` is absent when no `__init__` is declared along the hierarchy.
    Constructor { class: QualifiedName, init: Option<QualifiedName> },
    BoundMethod { class: QualifiedName, method: QualifiedName },
    /// `C.m(obj, ...)`: the first positional argument is the receiver.
    UnboundMethod { class: QualifiedName, method: QualifiedName },
    Unresolved,
}

impl CallTarget {
    /// The callable that runs, if any.
    pub fn callee(&self) -> Option<&QualifiedName> {
        match self {
            CallTarget::Function { function } => Some(function),
            CallTarget::Constructor { init, .. } => init.as_ref(),
            CallTarget::BoundMethod { method, .. } | CallTarget::UnboundMethod { method, .. } => Some(method),
            CallTarget::Unresolved => None,
        }
    }

    /// The statically named class whose usage this call counts as.
    pub fn class(&self) -> Option<&QualifiedName> {
        match self {
            CallTarget::Constructor { class, .. }
            | CallTarget::BoundMethod { class, .. }
            | CallTarget::UnboundMethod { class, .. } => Some(class),
            _ => None,
        }
    }
}

/// How the arguments of one resolved call bind to the callee's parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArgBinding {
    /// Parameters set explicitly, by name, with the value passed.
    pub explicit: Vec<(String, ValueKey)>,
    /// Optional parameters left out and therefore set to their literal default.
    pub implicit: Vec<(String, LiteralValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedCall {
    pub line: u32,
    pub col: u32,
    pub target: CallTarget,
    /// `None` for unresolved calls and for constructors without `__init__`.
    pub binding: Option<ArgBinding>,
}

#[derive(Clone, Copy, Debug)]
enum Value<'m> {
    Module(usize),
    Class(&'m ClassDecl),
    Function(&'m FunctionDecl),
    Instance(&'m ClassDecl),
    Method { class: &'m ClassDecl, method: &'m FunctionDecl, bound: bool },
    Unknown,
}

/// Dotted library paths visible to clients.
pub struct NameTable<'m> {
    model: &'m ApiModel,
    modules: Vec<QualifiedName>,
    module_index: HashMap<QualifiedName, usize>,
}

impl<'m> NameTable<'m> {
    pub fn new(model: &'m ApiModel) -> Self {
        let mut modules = Vec::new();
        let mut module_index = HashMap::new();
        for m in &model.modules {
            // Every package prefix is importable too.
            for n in 1..=m.qname.len() {
                let prefix = QualifiedName::new(m.qname.segments()[..n].iter().cloned()).expect("prefix of a valid name");
                if !module_index.contains_key(&prefix) {
                    module_index.insert(prefix.clone(), modules.len());
                    modules.push(prefix);
                }
            }
        }
        NameTable { model, modules, module_index }
    }

    fn lookup(&self, path: &QualifiedName) -> Value<'m> {
        self.lookup_depth(path, 0)
    }

    fn lookup_depth(&self, path: &QualifiedName, depth: usize) -> Value<'m> {
        if let Some(&i) = self.module_index.get(path) {
            return Value::Module(i);
        }
        match self.model.element(path) {
            Some(ElementRef::Class(c)) => return Value::Class(c),
            Some(ElementRef::Function(f, None)) => return Value::Function(f),
            _ => {}
        }
        if depth < 8 {
            if let Some(target) = self.model.resolve_reexport(path) {
                return self.lookup_depth(&target.clone(), depth + 1);
            }
        }
        Value::Unknown
    }

    /// Public names a star import of module `i` binds.
    fn star_names(&self, i: usize) -> Vec<String> {
        let Some(m) = self.model.module(&self.modules[i]) else { return Vec::new() };
        m.classes
            .iter()
            .map(|c| c.name().to_string())
            .chain(m.functions.iter().map(|f| f.name().to_string()))
            .chain(m.reexports.iter().map(|r| r.name.clone()))
            .filter(|n| !n.starts_with('_'))
            .collect()
    }
}

struct Resolver<'m, 't> {
    table: &'t NameTable<'m>,
    file: &'t str,
    globals: HashMap<String, Value<'m>>,
    calls: Vec<ResolvedCall>,
}

/// Resolves every call in a parsed client module. `file` names the file in
/// non-literal site ids.
pub fn resolve_calls(module: &Module, table: &NameTable<'_>, file: &str) -> Vec<ResolvedCall> {
    let mut r = Resolver { table, file, globals: HashMap::new(), calls: Vec::new() };
    r.block(&module.body, None);
    r.calls
}

impl<'m> Resolver<'m, '_> {
    fn get(&self, name: &str, locals: Option<&HashMap<String, Value<'m>>>) -> Value<'m> {
        if let Some(locals) = locals {
            if let Some(v) = locals.get(name) {
                return *v;
            }
            // Instances only flow within the scope that created them.
            return match self.globals.get(name) {
                Some(Value::Instance(_)) | None => Value::Unknown,
                Some(v) => *v,
            };
        }
        self.globals.get(name).copied().unwrap_or(Value::Unknown)
    }

    fn bind(&mut self, name: &str, value: Value<'m>, locals: Option<&mut HashMap<String, Value<'m>>>) {
        match locals {
            Some(l) => l.insert(name.to_string(), value),
            None => self.globals.insert(name.to_string(), value),
        };
    }

    fn block(&mut self, body: &[Stmt], mut locals: Option<&mut HashMap<String, Value<'m>>>) {
        for stmt in body {
            self.stmt(stmt, locals.as_deref_mut());
        }
    }

    fn stmt(&mut self, stmt: &Stmt, mut locals: Option<&mut HashMap<String, Value<'m>>>) {
        match &stmt.kind {
            StmtKind::Import(names) => {
                for n in names {
                    let path: Result<QualifiedName, _> = n.name.parse();
                    match (&n.alias, path) {
                        (Some(alias), Ok(path)) => {
                            let v = self.table.lookup(&path);
                            self.bind(alias, v, locals.as_deref_mut());
                        }
                        (None, Ok(path)) => {
                            let root = &path.segments()[0];
                            let v = self.table.lookup(&root.parse().expect("identifier"));
                            self.bind(root, v, locals.as_deref_mut());
                        }
                        (alias, Err(_)) => {
                            let bound = alias.clone().unwrap_or_else(|| n.name.split('.').next().unwrap_or("").to_string());
                            self.bind(&bound, Value::Unknown, locals.as_deref_mut());
                        }
                    }
                }
            }
            StmtKind::ImportFrom { module, level, names } => {
                let base = match (level, module.as_deref().map(str::parse::<QualifiedName>)) {
                    (0, Some(Ok(path))) => Some(path),
                    _ => None,
                };
                for n in names {
                    if n.name == "*" {
                        if let Some(Value::Module(i)) = base.as_ref().map(|b| self.table.lookup(b)) {
                            for name in self.table.star_names(i) {
                                let v = self.table.lookup(&self.table.modules[i].child(&name));
                                self.bind(&name, v, locals.as_deref_mut());
                            }
                        }
                        continue;
                    }
                    let bound = n.alias.as_deref().unwrap_or(&n.name);
                    let v = match (&base, crate::qname::is_identifier(&n.name)) {
                        (Some(b), true) => self.table.lookup(&b.child(&n.name)),
                        _ => Value::Unknown,
                    };
                    self.bind(bound, v, locals.as_deref_mut());
                }
            }
            StmtKind::FunctionDef(def) => {
                for p in &def.params {
                    for e in p.default.iter().chain(p.annotation.iter()) {
                        self.eval(e, locals.as_deref());
                    }
                }
                let mut inner: HashMap<String, Value<'m>> =
                    def.params.iter().map(|p| (p.name.clone(), Value::Unknown)).collect();
                self.block(&def.body, Some(&mut inner));
                self.bind(&def.name, Value::Unknown, locals);
            }
            StmtKind::ClassDef(def) => {
                let mut inner = HashMap::new();
                self.block(&def.body, Some(&mut inner));
                self.bind(&def.name, Value::Unknown, locals);
            }
            StmtKind::Assign { targets, value, augmented } => {
                let v = value.as_ref().map(|e| self.eval(e, locals.as_deref())).unwrap_or(Value::Unknown);
                for t in targets {
                    self.eval(t, locals.as_deref());
                    match &t.kind {
                        ExprKind::Name(n) if value.is_some() => {
                            let v = if *augmented { Value::Unknown } else { v };
                            self.bind(n, v, locals.as_deref_mut());
                        }
                        _ => self.unbind_names(t, locals.as_deref_mut()),
                    }
                }
            }
            StmtKind::Expr(e) => {
                self.eval(e, locals.as_deref());
            }
            StmtKind::Block { header, targets, bodies } => {
                for e in header {
                    self.eval(e, locals.as_deref());
                }
                for t in targets {
                    self.unbind_names(t, locals.as_deref_mut());
                }
                for body in bodies {
                    self.block(body, locals.as_deref_mut());
                }
            }
            StmtKind::Other(exprs) => {
                for e in exprs {
                    self.eval(e, locals.as_deref());
                }
            }
        }
    }

    /// Names bound by a tuple target or loop variable lose what we knew.
    fn unbind_names(&mut self, target: &Expr, mut locals: Option<&mut HashMap<String, Value<'m>>>) {
        match &target.kind {
            ExprKind::Name(n) => self.bind(n, Value::Unknown, locals),
            ExprKind::Compound(children) => {
                for c in children {
                    self.unbind_names(c, locals.as_deref_mut());
                }
            }
            ExprKind::Starred(inner) => self.unbind_names(inner, locals),
            _ => {}
        }
    }

    fn eval(&mut self, expr: &Expr, locals: Option<&HashMap<String, Value<'m>>>) -> Value<'m> {
        match &expr.kind {
            ExprKind::Name(n) => self.get(n, locals),
            ExprKind::Attribute { value, attr } => {
                let base = self.eval(value, locals);
                self.attribute(base, attr)
            }
            ExprKind::Call { func, args } => {
                let callee = self.eval(func, locals);
                for a in args {
                    self.eval(&a.value, locals);
                }
                self.call(expr, callee, args)
            }
            ExprKind::Literal(_) => Value::Unknown,
            ExprKind::Starred(inner) => {
                self.eval(inner, locals);
                Value::Unknown
            }
            ExprKind::Compound(children) => {
                for c in children {
                    self.eval(c, locals);
                }
                Value::Unknown
            }
        }
    }

    fn attribute(&self, base: Value<'m>, attr: &str) -> Value<'m> {
        let model = self.table.model;
        match base {
            Value::Module(i) => self.table.lookup(&self.table.modules[i].child(attr)),
            Value::Class(c) => match model.find_method(c, attr) {
                Some((_, m)) => {
                    let bound = m.decorators.iter().any(|d| d == "classmethod" || d == "staticmethod");
                    Value::Method { class: c, method: m, bound }
                }
                None => Value::Unknown,
            },
            Value::Instance(c) => match model.find_method(c, attr) {
                Some((_, m)) => Value::Method { class: c, method: m, bound: true },
                None => Value::Unknown,
            },
            _ => Value::Unknown,
        }
    }

    fn call(&mut self, expr: &Expr, callee: Value<'m>, args: &[Argument]) -> Value<'m> {
        let site = |target, binding| ResolvedCall { line: expr.span.line, col: expr.span.col, target, binding };
        let (record, result) = match callee {
            Value::Function(f) => match self.bind_args(f, args, false) {
                Some(b) => (site(CallTarget::Function { function: f.qname.clone() }, Some(b)), Value::Unknown),
                None => (site(CallTarget::Unresolved, None), Value::Unknown),
            },
            Value::Class(c) => match self.table.model.find_method(c, "__init__") {
                Some((_, init)) => match self.bind_args(init, args, false) {
                    Some(b) => (
                        site(CallTarget::Constructor { class: c.qname.clone(), init: Some(init.qname.clone()) }, Some(b)),
                        Value::Instance(c),
                    ),
                    None => (site(CallTarget::Unresolved, None), Value::Unknown),
                },
                None => (site(CallTarget::Constructor { class: c.qname.clone(), init: None }, None), Value::Instance(c)),
            },
            Value::Method { class, method, bound } => match self.bind_args(method, args, !bound) {
                Some(b) => {
                    let target = if bound {
                        CallTarget::BoundMethod { class: class.qname.clone(), method: method.qname.clone() }
                    } else {
                        CallTarget::UnboundMethod { class: class.qname.clone(), method: method.qname.clone() }
                    };
                    (site(target, Some(b)), Value::Unknown)
                }
                None => (site(CallTarget::Unresolved, None), Value::Unknown),
            },
            Value::Module(_) | Value::Instance(_) | Value::Unknown => (site(CallTarget::Unresolved, None), Value::Unknown),
        };
        self.calls.push(record);
        result
    }

    fn value_key(&self, e: &Expr) -> ValueKey {
        match e.as_literal() {
            Some(v) => ValueKey::Literal(v),
            None => ValueKey::NonLiteral(SiteId { file: self.file.to_string(), line: e.span.line, col: e.span.col }),
        }
    }

    /// Maps call arguments onto `f`'s parameters. `None` means the call
    /// cannot be a valid call of `f`.
    fn bind_args(&self, f: &FunctionDecl, args: &[Argument], receiver_first: bool) -> Option<ArgBinding> {
        let mut args = args;
        if receiver_first {
            match args.first() {
                Some(Argument { kind: ArgKind::Positional, .. }) => args = &args[1..],
                _ => return None,
            }
        }
        let positional: Vec<usize> =
            (0..f.parameters.len()).filter(|&i| f.parameters[i].kind.accepts_position()).collect();
        let mut assigned: Vec<Option<ValueKey>> = vec![None; f.parameters.len()];
        let mut next_position = 0usize;
        let mut ambiguous = false;
        let mut star_seen = false;
        for a in args {
            match &a.kind {
                ArgKind::Positional => {
                    if star_seen {
                        continue;
                    }
                    match positional.get(next_position) {
                        Some(&i) => assigned[i] = Some(self.value_key(&a.value)),
                        None if f.has_var_positional() => {}
                        None => return None,
                    }
                    next_position += 1;
                }
                ArgKind::Keyword(name) => {
                    match f.parameters.iter().position(|p| p.name == *name && p.kind.accepts_keyword()) {
                        Some(i) => {
                            if assigned[i].is_some() {
                                return None;
                            }
                            assigned[i] = Some(self.value_key(&a.value));
                        }
                        None if f.has_var_keyword() => {}
                        None => return None,
                    }
                }
                ArgKind::Star => {
                    star_seen = true;
                    ambiguous = true;
                }
                ArgKind::DoubleStar => ambiguous = true,
            }
        }
        let mut binding = ArgBinding::default();
        for (p, value) in f.parameters.iter().zip(assigned) {
            if p.kind.is_variadic() {
                continue;
            }
            match value {
                Some(v) => binding.explicit.push((p.name.clone(), v)),
                None if ambiguous => {}
                None => {
                    let d = p.default()?;
                    if let Some(lit) = d.as_literal() {
                        binding.implicit.push((p.name.clone(), lit.clone()));
                    }
                },
            }
        }
        Some(binding)
    }
}
