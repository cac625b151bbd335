//! The extracted public surface of a library and its `api.json` form.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::docstring::Docstring;
use crate::literal::LiteralValue;
use crate::qname::QualifiedName;

pub const API_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiModel {
    pub library_name: String,
    pub version: String,
    pub modules: Vec<ModuleDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDecl {
    pub qname: QualifiedName,
    pub classes: Vec<ClassDecl>,
    pub functions: Vec<FunctionDecl>,
    /// Names imported from elsewhere in the library, e.g. by a package `__init__`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reexports: Vec<Reexport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reexport {
    pub name: String,
    /// The class or function the name refers to.
    pub target: QualifiedName,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecl {
    pub qname: QualifiedName,
    /// Base class expressions as written.
    pub superclasses: Vec<String>,
    #[serde(default)]
    pub decorators: Vec<String>,
    #[serde(default)]
    pub docstring: Docstring,
    pub methods: Vec<FunctionDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDecl {
    pub qname: QualifiedName,
    #[serde(default)]
    pub decorators: Vec<String>,
    #[serde(default)]
    pub docstring: Docstring,
    pub is_method: bool,
    pub is_public: bool,
    pub parameters: Vec<Parameter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub kind: ParameterKind,
    pub optionality: Optionality,
    #[serde(default)]
    pub doc_type: String,
    #[serde(default)]
    pub doc_description: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    PositionalOnly,
    PositionalOrKeyword,
    KeywordOnly,
    VariadicPositional,
    VariadicKeyword,
}

impl ParameterKind {
    pub fn is_variadic(self) -> bool {
        matches!(self, ParameterKind::VariadicPositional | ParameterKind::VariadicKeyword)
    }

    pub fn accepts_position(self) -> bool {
        matches!(self, ParameterKind::PositionalOnly | ParameterKind::PositionalOrKeyword)
    }

    pub fn accepts_keyword(self) -> bool {
        matches!(self, ParameterKind::PositionalOrKeyword | ParameterKind::KeywordOnly)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optionality {
    Required,
    Optional(DefaultValue),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DefaultValue {
    Literal(LiteralValue),
    /// A default that is not a literal, kept as source text.
    NonLiteral { non_literal: String },
}

impl DefaultValue {
    pub fn as_literal(&self) -> Option<&LiteralValue> {
        match self {
            DefaultValue::Literal(v) => Some(v),
            DefaultValue::NonLiteral { .. } => None,
        }
    }

    /// Python source for the default.
    pub fn source(&self) -> &str {
        match self {
            DefaultValue::Literal(v) => v.canonical_text(),
            DefaultValue::NonLiteral { non_literal } => non_literal,
        }
    }
}

impl Parameter {
    pub fn is_optional(&self) -> bool {
        matches!(self.optionality, Optionality::Optional(_))
    }

    pub fn default(&self) -> Option<&DefaultValue> {
        match &self.optionality {
            Optionality::Optional(d) => Some(d),
            Optionality::Required => None,
        }
    }

    pub fn default_literal(&self) -> Option<&LiteralValue> {
        self.default().and_then(DefaultValue::as_literal)
    }
}

impl FunctionDecl {
    pub fn name(&self) -> &str {
        self.qname.name()
    }

    pub fn param(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn is_init(&self) -> bool {
        self.is_method && self.name() == "__init__"
    }

    pub fn param_qname(&self, param: &Parameter) -> QualifiedName {
        self.qname.child(&param.name)
    }

    pub fn has_var_positional(&self) -> bool {
        self.parameters.iter().any(|p| p.kind == ParameterKind::VariadicPositional)
    }

    pub fn has_var_keyword(&self) -> bool {
        self.parameters.iter().any(|p| p.kind == ParameterKind::VariadicKeyword)
    }
}

impl ClassDecl {
    pub fn name(&self) -> &str {
        self.qname.name()
    }

    pub fn method(&self, name: &str) -> Option<&FunctionDecl> {
        self.methods.iter().find(|m| m.name() == name)
    }

    pub fn init(&self) -> Option<&FunctionDecl> {
        self.method("__init__")
    }

    pub fn is_public(&self) -> bool {
        !self.name().starts_with('_')
    }
}

/// Bases that contribute no methods of interest.
pub fn is_trivial_base(base: &str) -> bool {
    matches!(base, "object" | "builtins.object")
}

/// `_x` is internal; dunder methods such as `__init__` are not.
pub fn is_public_name(name: &str) -> bool {
    !name.starts_with('_') || (name.len() > 4 && name.starts_with("__") && name.ends_with("__"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Module,
    Class,
    Function,
    Parameter,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Module => "module",
            ElementKind::Class => "class",
            ElementKind::Function => "function",
            ElementKind::Parameter => "parameter",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ElementRef<'a> {
    Module(&'a ModuleDecl),
    Class(&'a ClassDecl),
    /// A function or method; the class is set for methods.
    Function(&'a FunctionDecl, Option<&'a ClassDecl>),
    Parameter(&'a Parameter, &'a FunctionDecl, Option<&'a ClassDecl>),
}

impl<'a> ElementRef<'a> {
    pub fn kind(&self) -> ElementKind {
        match self {
            ElementRef::Module(_) => ElementKind::Module,
            ElementRef::Class(_) => ElementKind::Class,
            ElementRef::Function(..) => ElementKind::Function,
            ElementRef::Parameter(..) => ElementKind::Parameter,
        }
    }

    /// Public when the element and every enclosing declaration are public.
    pub fn is_public(&self) -> bool {
        match self {
            ElementRef::Module(_) => true,
            ElementRef::Class(c) => c.is_public(),
            ElementRef::Function(f, c) | ElementRef::Parameter(_, f, c) => {
                f.is_public && c.is_none_or(|c| c.is_public())
            }
        }
    }

    pub fn docstring(&self) -> Option<&'a Docstring> {
        match self {
            ElementRef::Module(_) | ElementRef::Parameter(..) => None,
            ElementRef::Class(c) => Some(&c.docstring),
            ElementRef::Function(f, _) => Some(&f.docstring),
        }
    }
}

/// Hashed lookup of every class, function and parameter.
pub struct ModelIndex<'a> {
    pub model: &'a ApiModel,
    elements: HashMap<QualifiedName, ElementRef<'a>>,
    order: Vec<QualifiedName>,
}

impl<'a> ModelIndex<'a> {
    pub fn new(model: &'a ApiModel) -> Self {
        let all = model.elements();
        let order = all.iter().map(|(q, _)| q.clone()).collect();
        let mut elements: HashMap<_, _> = all.into_iter().collect();
        for m in &model.modules {
            elements.insert(m.qname.clone(), ElementRef::Module(m));
        }
        ModelIndex { model, elements, order }
    }

    pub fn get(&self, qname: &QualifiedName) -> Option<ElementRef<'a>> {
        self.elements.get(qname).copied()
    }

    /// Classes, functions and parameters in declaration order.
    pub fn qnames(&self) -> &[QualifiedName] {
        &self.order
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at line {line} column {column}")]
pub struct SchemaError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl SchemaError {
    pub fn semantic(message: impl Into<String>) -> Self {
        SchemaError { message: message.into(), line: 0, column: 0 }
    }
}

impl From<serde_json::Error> for SchemaError {
    fn from(e: serde_json::Error) -> Self {
        // serde_json appends the position to Display; keep the bare message.
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        SchemaError { message, line: e.line(), column: e.column() }
    }
}

#[derive(Serialize, Deserialize)]
struct ApiDocument<M> {
    schema_version: u32,
    library_name: String,
    version: String,
    modules: M,
}

impl ApiModel {
    pub fn module(&self, qname: &QualifiedName) -> Option<&ModuleDecl> {
        self.modules.iter().find(|m| &m.qname == qname)
    }

    /// Finds any declaration by qualified name.
    pub fn element(&self, qname: &QualifiedName) -> Option<ElementRef<'_>> {
        for module in &self.modules {
            if module.qname == *qname {
                return Some(ElementRef::Module(module));
            }
            if !qname.starts_with(&module.qname) {
                continue;
            }
            let rest = &qname.segments()[module.qname.len()..];
            let found = match rest {
                [name, tail @ ..] => {
                    if let Some(c) = module.classes.iter().find(|c| c.name() == name) {
                        match tail {
                            [] => Some(ElementRef::Class(c)),
                            [m] => c.method(m).map(|f| ElementRef::Function(f, Some(c))),
                            [m, p] => c
                                .method(m)
                                .and_then(|f| f.param(p).map(|p| ElementRef::Parameter(p, f, Some(c)))),
                            _ => None,
                        }
                    } else if let Some(f) = module.functions.iter().find(|f| f.name() == name) {
                        match tail {
                            [] => Some(ElementRef::Function(f, None)),
                            [p] => f.param(p).map(|p| ElementRef::Parameter(p, f, None)),
                            _ => None,
                        }
                    } else {
                        None
                    }
                }
                [] => None,
            };
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Follows a re-export to the declaration it names.
    pub fn resolve_reexport(&self, qname: &QualifiedName) -> Option<&QualifiedName> {
        let module = self.module(&qname.parent()?)?;
        module.reexports.iter().find(|r| r.name == qname.name()).map(|r| &r.target)
    }

    /// Resolves a base class expression of `class` to a class of this model:
    /// a name bound in the same module first, then a unique dotted-suffix match.
    pub fn resolve_superclass(&self, class: &ClassDecl, base: &str) -> Option<&ClassDecl> {
        let module_qname = class.qname.parent()?;
        let module = self.module(&module_qname)?;
        if let Some(c) = module.classes.iter().find(|c| c.name() == base) {
            return Some(c);
        }
        if let Some(r) = module.reexports.iter().find(|r| r.name == base) {
            if let Some(ElementRef::Class(c)) = self.element(&r.target) {
                return Some(c);
            }
        }
        let parts: Vec<&str> = base.split('.').collect();
        if parts.iter().any(|p| !crate::qname::is_identifier(p)) {
            return None;
        }
        let mut found = self.classes().filter(|c| {
            let segs = c.qname.segments();
            segs.len() >= parts.len() && segs[segs.len() - parts.len()..].iter().zip(&parts).all(|(a, b)| a == b)
        });
        match (found.next(), found.next()) {
            (Some(c), None) => Some(c),
            _ => None,
        }
    }

    /// `class` followed by its resolvable ancestors, depth-first left to right,
    /// each class once.
    pub fn ancestry<'a>(&'a self, class: &'a ClassDecl) -> Vec<&'a ClassDecl> {
        let mut out: Vec<&ClassDecl> = Vec::new();
        let mut stack = vec![class];
        while let Some(c) = stack.pop() {
            if out.iter().any(|o| o.qname == c.qname) {
                continue;
            }
            out.push(c);
            for base in c.superclasses.iter().rev() {
                if let Some(b) = self.resolve_superclass(c, base) {
                    stack.push(b);
                }
            }
        }
        out
    }

    /// Looks a method up on `class` and then its ancestors.
    pub fn find_method<'a>(&'a self, class: &'a ClassDecl, name: &str) -> Option<(&'a ClassDecl, &'a FunctionDecl)> {
        self.ancestry(class).into_iter().find_map(|c| c.method(name).map(|m| (c, m)))
    }

    /// Whether every base of `class` (transitively) resolves inside the model.
    pub fn hierarchy_is_closed(&self, class: &ClassDecl) -> bool {
        self.ancestry(class)
            .iter()
            .all(|c| c.superclasses.iter().all(|b| is_trivial_base(b) || self.resolve_superclass(c, b).is_some()))
    }

    pub fn contains(&self, qname: &QualifiedName) -> bool {
        self.element(qname).is_some()
    }

    /// Every function and method with its enclosing class.
    pub fn functions(&self) -> impl Iterator<Item = (&FunctionDecl, Option<&ClassDecl>)> {
        self.modules.iter().flat_map(|m| {
            m.classes
                .iter()
                .flat_map(|c| c.methods.iter().map(move |f| (f, Some(c))))
                .chain(m.functions.iter().map(|f| (f, None)))
        })
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.modules.iter().flat_map(|m| m.classes.iter())
    }

    /// Classes, functions and parameters in declaration order.
    pub fn elements(&self) -> Vec<(QualifiedName, ElementRef<'_>)> {
        fn push_fn<'a>(out: &mut Vec<(QualifiedName, ElementRef<'a>)>, f: &'a FunctionDecl, c: Option<&'a ClassDecl>) {
            out.push((f.qname.clone(), ElementRef::Function(f, c)));
            for p in &f.parameters {
                out.push((f.param_qname(p), ElementRef::Parameter(p, f, c)));
            }
        }
        let mut out = Vec::new();
        for m in &self.modules {
            for c in &m.classes {
                out.push((c.qname.clone(), ElementRef::Class(c)));
                for f in &c.methods {
                    push_fn(&mut out, f, Some(c));
                }
            }
            for f in &m.functions {
                push_fn(&mut out, f, None);
            }
        }
        out
    }

    pub fn declaration_count(&self) -> usize {
        self.modules.iter().map(|m| m.functions.len() + m.classes.iter().map(|c| 1 + c.methods.len()).sum::<usize>()).sum()
    }

    /// Structural checks that serde cannot express.
    pub fn check(&self) -> Result<(), SchemaError> {
        let root: QualifiedName =
            self.library_name.parse().map_err(|_| SchemaError::semantic(format!("invalid library name `{}`", self.library_name)))?;
        if let Some(m) = self.modules.iter().find(|m| !m.qname.starts_with(&root)) {
            return Err(SchemaError::semantic(format!("module `{}` is outside library `{root}`", m.qname)));
        }
        let mut seen = HashSet::new();
        let mut claim = |q: &QualifiedName| {
            if seen.insert(q.clone()) {
                Ok(())
            } else {
                Err(SchemaError::semantic(format!("duplicate qualified name `{q}`")))
            }
        };
        let check_fn = |f: &FunctionDecl, parent: &QualifiedName, is_method: bool| -> Result<(), SchemaError> {
            if f.qname.parent().as_ref() != Some(parent) {
                return Err(SchemaError::semantic(format!("`{}` is not a member of `{parent}`", f.qname)));
            }
            if f.is_method != is_method {
                return Err(SchemaError::semantic(format!("`{}` has the wrong is_method flag", f.qname)));
            }
            let mut names = HashSet::new();
            for p in &f.parameters {
                if !crate::qname::is_identifier(&p.name) || !names.insert(p.name.as_str()) {
                    return Err(SchemaError::semantic(format!("bad parameter `{}` in `{}`", p.name, f.qname)));
                }
                if p.kind.is_variadic() && p.is_optional() {
                    return Err(SchemaError::semantic(format!("variadic parameter `{}` cannot be optional", p.name)));
                }
            }
            Ok(())
        };
        for m in &self.modules {
            claim(&m.qname)?;
            for c in &m.classes {
                if c.qname.parent().as_ref() != Some(&m.qname) {
                    return Err(SchemaError::semantic(format!("`{}` is not a member of `{}`", c.qname, m.qname)));
                }
                claim(&c.qname)?;
                for f in &c.methods {
                    check_fn(f, &c.qname, true)?;
                    claim(&f.qname)?;
                }
            }
            for f in &m.functions {
                check_fn(f, &m.qname, false)?;
                claim(&f.qname)?;
            }
        }
        for m in &self.modules {
            for r in &m.reexports {
                claim(&m.qname.child(&r.name))?;
                if !matches!(self.element(&r.target), Some(ElementRef::Class(_) | ElementRef::Function(_, None))) {
                    return Err(SchemaError::semantic(format!("re-export `{}` targets unknown `{}`", r.name, r.target)));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = ApiDocument {
            schema_version: API_SCHEMA_VERSION,
            library_name: self.library_name.clone(),
            version: self.version.clone(),
            modules: &self.modules,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SchemaError> {
        let doc: ApiDocument<Vec<ModuleDecl>> = serde_json::from_slice(bytes)?;
        if doc.schema_version != API_SCHEMA_VERSION {
            return Err(SchemaError::semantic(format!("unsupported schema_version {}", doc.schema_version)));
        }
        let model = ApiModel { library_name: doc.library_name, version: doc.version, modules: doc.modules };
        model.check()?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QualifiedName {
        s.parse().unwrap()
    }

    fn func(qname: &str, is_method: bool, params: Vec<Parameter>) -> FunctionDecl {
        let qname = q(qname);
        FunctionDecl {
            is_public: is_public_name(qname.name()),
            qname,
            decorators: vec![],
            docstring: Docstring::default(),
            is_method,
            parameters: params,
        }
    }

    fn param(name: &str, default: Option<LiteralValue>) -> Parameter {
        Parameter {
            name: name.into(),
            kind: ParameterKind::PositionalOrKeyword,
            optionality: default.map_or(Optionality::Required, |d| Optionality::Optional(DefaultValue::Literal(d))),
            doc_type: String::new(),
            doc_description: String::new(),
        }
    }

    fn sample() -> ApiModel {
        ApiModel {
            library_name: "lib".into(),
            version: "1.0".into(),
            modules: vec![ModuleDecl {
                qname: q("lib.m"),
                classes: vec![ClassDecl {
                    qname: q("lib.m.C"),
                    superclasses: vec!["Base".into()],
                    decorators: vec![],
                    docstring: Docstring::default(),
                    methods: vec![func("lib.m.C.__init__", true, vec![param("x", None)])],
                }],
                reexports: vec![],
                functions: vec![func(
                    "lib.m.f",
                    false,
                    vec![param("a", None), param("b", Some(LiteralValue::int(1))), Parameter {
                        name: "c".into(),
                        kind: ParameterKind::KeywordOnly,
                        optionality: Optionality::Optional(DefaultValue::NonLiteral { non_literal: "CONST".into() }),
                        doc_type: String::new(),
                        doc_description: String::new(),
                    }],
                )],
            }],
        }
    }

    #[test]
    fn element_lookup() {
        let m = sample();
        assert_eq!(m.element(&q("lib.m")).unwrap().kind(), ElementKind::Module);
        assert_eq!(m.element(&q("lib.m.C")).unwrap().kind(), ElementKind::Class);
        assert_eq!(m.element(&q("lib.m.C.__init__.x")).unwrap().kind(), ElementKind::Parameter);
        assert_eq!(m.element(&q("lib.m.f.b")).unwrap().kind(), ElementKind::Parameter);
        assert!(m.element(&q("lib.m.g")).is_none());
        assert!(m.element(&q("lib.m.f.b.z")).is_none());
        assert_eq!(m.elements().len(), 7);
    }

    #[test]
    fn method_lookup_follows_bases() {
        let mut m = sample();
        m.modules[0].classes.insert(0, ClassDecl {
            qname: q("lib.m.Base"),
            superclasses: vec!["object".into()],
            decorators: vec![],
            docstring: Docstring::default(),
            methods: vec![func("lib.m.Base.run", true, vec![]), func("lib.m.Base.__init__", true, vec![])],
        });
        let c = &m.modules[0].classes[1];
        let (owner, run) = m.find_method(c, "run").unwrap();
        assert_eq!(owner.name(), "Base");
        assert_eq!(run.qname, q("lib.m.Base.run"));
        assert_eq!(m.find_method(c, "__init__").unwrap().1.qname, q("lib.m.C.__init__"));
        assert!(m.find_method(c, "missing").is_none());
        assert!(m.hierarchy_is_closed(c));
        m.modules[0].classes[1].superclasses.push("external.Thing".into());
        assert!(!m.hierarchy_is_closed(&m.modules[0].classes[1]));
    }

    #[test]
    fn json_round_trip_and_shape() {
        let m = sample();
        let text = m.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["schema_version"], 1);
        let f = &value["modules"][0]["functions"][0];
        assert_eq!(f["qname"], "lib.m.f");
        assert_eq!(f["parameters"][0]["optionality"], "required");
        assert_eq!(f["parameters"][1]["optionality"]["optional"], "1");
        assert_eq!(f["parameters"][2]["optionality"]["optional"]["non_literal"], "CONST");
        assert_eq!(ApiModel::from_json(text.as_bytes()).unwrap(), m);
    }

    #[test]
    fn missing_field_names_the_field() {
        let text = r#"{"schema_version": 1, "library_name": "lib", "version": "1",
            "modules": [{"classes": [], "functions": []}]}"#;
        let err = ApiModel::from_json(text.as_bytes()).unwrap_err();
        assert!(err.message.contains("qname"), "{err}");
        assert!(err.line > 0);
    }

    #[test]
    fn duplicate_qnames_are_rejected() {
        let mut m = sample();
        let dup = m.modules[0].functions[0].clone();
        m.modules[0].functions.push(dup);
        assert!(ApiModel::from_json(m.to_json().as_bytes()).is_err());
    }

    #[test]
    fn library_name_and_module_roots_are_checked() {
        let mut m = sample();
        m.library_name = "1lib".into();
        assert!(ApiModel::from_json(m.to_json().as_bytes()).is_err());
        let mut m = sample();
        m.library_name = "other".into();
        assert!(ApiModel::from_json(m.to_json().as_bytes()).is_err());
    }

    #[test]
    fn thousand_function_round_trip() {
        let mut m = sample();
        for i in 0..1000 {
            m.modules[0].functions.push(func(
                &format!("lib.m.f{i}"),
                false,
                vec![param("a", None), param("b", Some(LiteralValue::float(i as f64 / 7.0).unwrap()))],
            ));
        }
        assert_eq!(ApiModel::from_json(m.to_json().as_bytes()).unwrap(), m);
    }

    fn literal_strategy() -> impl Strategy<Value = LiteralValue> {
        prop_oneof![
            any::<i64>().prop_map(|i| LiteralValue::int(i as i128)),
            any::<f64>().prop_filter_map("nan", LiteralValue::float),
            ".*".prop_map(|s: String| LiteralValue::string(&s)),
            any::<bool>().prop_map(LiteralValue::bool),
            Just(LiteralValue::none()),
        ]
    }

    fn param_strategy() -> impl Strategy<Value = (ParameterKind, Option<DefaultValue>, String)> {
        (
            prop_oneof![
                Just(ParameterKind::PositionalOnly),
                Just(ParameterKind::PositionalOrKeyword),
                Just(ParameterKind::KeywordOnly),
                Just(ParameterKind::VariadicPositional),
                Just(ParameterKind::VariadicKeyword),
            ],
            proptest::option::of(prop_oneof![
                literal_strategy().prop_map(DefaultValue::Literal),
                "[a-z.]{1,8}".prop_map(|s| DefaultValue::NonLiteral { non_literal: s }),
            ]),
            ".{0,20}",
        )
    }

    proptest! {
        #[test]
        fn generated_models_round_trip(
            fns in proptest::collection::vec(proptest::collection::vec(param_strategy(), 0..5), 0..8),
            summary in ".{0,30}",
        ) {
            let mut m = sample();
            for (i, params) in fns.into_iter().enumerate() {
                let mut f = func(&format!("lib.m.g{i}"), false, vec![]);
                f.docstring = crate::docstring::parse_docstring(&summary);
                for (j, (kind, default, doc)) in params.into_iter().enumerate() {
                    let optionality = match default {
                        Some(d) if !kind.is_variadic() => Optionality::Optional(d),
                        _ => Optionality::Required,
                    };
                    f.parameters.push(Parameter { name: format!("p{j}"), kind, optionality, doc_type: doc.clone(), doc_description: doc });
                }
                m.modules[0].functions.push(f);
            }
            let text = m.to_json();
            let back = ApiModel::from_json(text.as_bytes()).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
