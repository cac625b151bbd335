//! Adapter generation: trivial wrappers, annotation application,
//! post-processing and Python emission.

mod apply;
mod build;
mod emit;
mod postprocess;

use serde::Serialize;

use crate::annotation::{validate, AnnotationKind, AnnotationSet, EnumMember, Violation};
use crate::literal::LiteralValue;
use crate::model::{ApiModel, ParameterKind};
use crate::qname::QualifiedName;
use crate::usage::LibraryRef;

pub use apply::apply_annotations;
pub use build::build_trivial_wrappers;
pub use emit::{emit, render, write_zip, GeneratedFile, HEADER_PREFIX};
pub use postprocess::post_process;

#[derive(Clone, Debug, PartialEq)]
pub struct AdapterUnit {
    pub library: LibraryRef,
    /// Root package of the generated code, e.g. `sklearn_adapted`.
    pub package: String,
    pub modules: Vec<AdapterModule>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdapterModule {
    /// Name within the original library; emission swaps the root for `package`.
    pub qname: QualifiedName,
    pub enums: Vec<EnumDef>,
    pub groups: Vec<GroupClass>,
    pub classes: Vec<AdapterClass>,
    pub functions: Vec<AdapterFunction>,
    pub reexports: Vec<AdapterReexport>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumDef {
    pub name: String,
    pub members: Vec<EnumMember>,
}

/// Parameter object produced by a Group annotation.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupClass {
    pub name: String,
    pub fields: Vec<AdapterParam>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdapterReexport {
    pub name: String,
    /// Original qname of the re-exported class or function.
    pub target: QualifiedName,
    /// Adapter module and current name of the target, filled in by post-processing.
    pub resolved: Option<(QualifiedName, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdapterClass {
    pub name: String,
    pub original: QualifiedName,
    pub docstring: DocText,
    pub init: AdapterFunction,
    pub methods: Vec<AdapterFunction>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    Function,
    Init,
    Instance,
    Static,
    Class,
    Property,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdapterFunction {
    pub name: String,
    /// Declaration the wrapper forwards to; annotation targets refer to it.
    pub original: QualifiedName,
    pub kind: FunctionKind,
    pub params: Vec<AdapterParam>,
    pub checks: Vec<Check>,
    pub call: Call,
    pub docstring: DocText,
    /// Enums and parameter objects this wrapper needs; hoisted into the
    /// module by post-processing.
    pub enums: Vec<EnumDef>,
    pub groups: Vec<GroupClass>,
    /// Original parameters no longer in the signature.
    pub deleted: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdapterParam {
    pub name: String,
    /// Name in the original signature; `None` for parameter objects.
    pub original: Option<String>,
    pub kind: ParameterKind,
    pub default: Option<ParamDefault>,
    pub hint: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamDefault {
    Literal(LiteralValue),
    /// Non-literal default source, resolved in `module` of the original.
    Source { text: String, module: QualifiedName },
    EnumMember { enum_name: String, member: String },
}

/// Where a wrapper reads a value from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueRef {
    Param(String),
    Field { param: String, field: String },
}

impl ValueRef {
    pub fn expr(&self) -> String {
        match self {
            ValueRef::Param(p) => p.clone(),
            ValueRef::Field { param, field } => format!("{param}.{field}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ArgValue {
    Ref(ValueRef),
    Constant(LiteralValue),
    /// `x.value`; `nullable` passes `None` through.
    EnumValue { value: ValueRef, nullable: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CallArg {
    /// Original parameter name and kind.
    pub name: String,
    pub kind: ParameterKind,
    pub value: ArgValue,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CallTarget {
    /// `_orig_m.f(...)`
    Function { module: QualifiedName, name: String },
    /// `self._wrapped = _orig_m.C(...)`
    Constructor { module: QualifiedName, class: String },
    /// `self._wrapped.m(...)`
    Method { name: String },
    /// `_orig_m.C.m(...)`, for static and class methods.
    ClassAttr { module: QualifiedName, class: String, name: String },
    /// `self._wrapped.name`, no call.
    Property { name: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Call {
    pub target: CallTarget,
    /// Original parameter order.
    pub args: Vec<CallArg>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub value: ValueRef,
    pub min: Option<f64>,
    pub min_exclusive: bool,
    pub max: Option<f64>,
    pub max_exclusive: bool,
    /// Emit an `is not None` guard; the parameter defaults to `None`.
    pub allow_none: bool,
}

/// Docstring text plus the edits applied to it at post-processing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DocText {
    pub text: String,
    pub removed: Vec<String>,
    pub renamed: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub replaced: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[error("cannot apply {kind} to {target}: {message}")]
pub struct ApplyError {
    pub target: QualifiedName,
    pub kind: AnnotationKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collision {
    /// Adapter module, in original-library naming.
    pub module: QualifiedName,
    pub name: String,
    pub claimants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error, Serialize)]
#[error("generated names collide: {}", .collisions.iter().map(|c| format!("{}.{} ({})", c.module, c.name, c.claimants.join(", "))).collect::<Vec<_>>().join("; "))]
pub struct EmitBlocked {
    pub collisions: Vec<Collision>,
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("annotations do not validate: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Apply(#[from] ApplyError),
    #[error(transparent)]
    Blocked(#[from] EmitBlocked),
}

/// Validates, builds, applies and post-processes.
pub fn generate(model: &ApiModel, set: &AnnotationSet) -> Result<AdapterUnit, GenerateError> {
    let violations = validate(set, model);
    if !violations.is_empty() {
        return Err(GenerateError::Invalid(violations));
    }
    let unit = build_trivial_wrappers(model);
    let unit = apply_annotations(unit, set, model)?;
    Ok(post_process(unit)?)
}

impl AdapterUnit {
    pub fn module(&self, qname: &QualifiedName) -> Option<&AdapterModule> {
        self.modules.iter().find(|m| &m.qname == qname)
    }

    /// Every wrapper with its class, if it is a method.
    pub fn functions(&self) -> impl Iterator<Item = (&AdapterModule, Option<&AdapterClass>, &AdapterFunction)> {
        self.modules.iter().flat_map(|m| {
            m.classes
                .iter()
                .flat_map(move |c| std::iter::once(&c.init).chain(&c.methods).map(move |f| (m, Some(c), f)))
                .chain(m.functions.iter().map(move |f| (m, None, f)))
        })
    }

    /// Dotted adapter module name for an original-library module name.
    pub fn adapted_module(&self, qname: &QualifiedName) -> String {
        let lib_len = self.library.name.split('.').count();
        let rest = &qname.segments()[lib_len.min(qname.len())..];
        std::iter::once(self.package.as_str()).chain(rest.iter().map(String::as_str)).collect::<Vec<_>>().join(".")
    }
}

/// `sklearn` becomes `sklearn_adapted`.
pub fn package_name(library: &str) -> String {
    format!("{}_adapted", library.replace('.', "_"))
}
