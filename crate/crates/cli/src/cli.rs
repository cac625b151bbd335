use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use adaptor_core::adapter::{emit, generate, render, write_zip, GenerateError};
use adaptor_core::annotation::{merge_annotation_sets, validate, Annotation, AnnotationSet, Violation};
use adaptor_core::evolution::{diff_api, migrate_annotations, resolve_conflict, ApiDiff, MergeResult, RenameHint, Resolution, ResolveError};
use adaptor_core::extract::extract_api;
use adaptor_core::inference::{infer_annotations, InferenceConfig};
use adaptor_core::model::ApiModel;
use adaptor_core::usage::{analyze_corpus, UsageStore};
use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::service::{self, Session, SessionError, DEFAULT_PORT};

#[derive(Parser, Debug)]
#[command(name = "adaptor", version, about = "Mine API usage, infer API improvements and generate adapter libraries")]
pub struct Cli {
    /// Report errors on stderr as one JSON object.
    #[arg(long, global = true)]
    pub json_errors: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract the public API of a library source tree into api.json.
    Extract {
        source: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long = "lib-version")]
        lib_version: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count API usages in a corpus of client programs.
    Analyze {
        corpus: PathBuf,
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Suggest annotations from usage data and docstrings.
    Infer {
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        usages: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the usefulness report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the optionality test decisions.
        #[arg(long)]
        decisions: Option<PathBuf>,
    },
    /// Generate the adapter package.
    Generate {
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write `adapters.zip` into the output directory.
        #[arg(long)]
        zip: bool,
    },
    /// Merge two annotation files for the same library version.
    Merge {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the conflicting pairs, if any.
        #[arg(long)]
        conflicts: Option<PathBuf>,
    },
    /// Diff two versions of a library's api.json.
    Diff {
        old: PathBuf,
        new: PathBuf,
        /// JSON list of `{"old": ..., "new": ...}` rename pairs.
        #[arg(long)]
        hints: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Carry an annotation file over to a new library version.
    Migrate {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        diff: PathBuf,
        #[arg(long)]
        old: PathBuf,
        #[arg(long)]
        new: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Settle one conflict of a migration result.
    Resolve {
        result: PathBuf,
        #[arg(long)]
        new: PathBuf,
        #[arg(long)]
        conflict: u32,
        #[arg(long, value_enum)]
        choice: Choice,
        /// The annotation to use with `--choice custom`.
        #[arg(long, required_if_eq("choice", "custom"))]
        annotation: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the editor API on loopback.
    Serve {
        #[arg(long)]
        api: PathBuf,
        #[arg(long)]
        usages: Option<PathBuf>,
        /// Loaded if it exists; `POST /api/save` writes here.
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, env = "ADAPTOR_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
    },
}

#[derive(Args, Debug)]
pub struct ConfigArgs {
    /// Elements used fewer times than this are suggested for deletion.
    #[arg(long, default_value_t = 1)]
    threshold: u64,
    /// Significance level of the optionality test.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

impl ConfigArgs {
    fn config(&self) -> Result<InferenceConfig, CliError> {
        InferenceConfig::new(self.threshold, self.alpha).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Choice {
    KeepAdapter,
    KeepMaintainer,
    Custom,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Violations { message: String, violations: Vec<Violation> },
    #[error("{0:#}")]
    Failed(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn violations(message: &str, violations: Vec<Violation>) -> Self {
        CliError::Violations { message: message.to_string(), violations }
    }

    /// Human or JSON report for stderr.
    pub fn report(&self, json: bool) -> String {
        if json {
            let (kind, violations) = match self {
                CliError::Usage(_) => ("usage", &[][..]),
                CliError::Violations { violations, .. } => ("violations", &violations[..]),
                CliError::Failed(_) => ("failed", &[][..]),
            };
            serde_json::json!({"error": kind, "message": self.to_string(), "violations": violations}).to_string()
        } else {
            let mut s = format!("error: {self}");
            if let CliError::Violations { violations, .. } = self {
                for v in violations {
                    s.push_str(&format!("\n  {v}"));
                }
            }
            s
        }
    }
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<ApiModel> {
    ApiModel::from_json(&read(path)?).with_context(|| format!("{} is not a valid api.json", path.display()))
}

fn load_usages(path: &Path) -> anyhow::Result<UsageStore> {
    UsageStore::from_json(&read(path)?).with_context(|| format!("{} is not a valid usages.json", path.display()))
}

fn load_annotations(path: &Path) -> anyhow::Result<AnnotationSet> {
    AnnotationSet::from_json(&read(path)?).with_context(|| format!("{} is not a valid annotations.json", path.display()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    serde_json::from_slice(&read(path)?).with_context(|| format!("{} is not a valid {what}", path.display()))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

/// Writes `text` to `path`, or stdout without one.
fn output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            }
            fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))
        }
        None => std::io::stdout().write_all(text.as_bytes()).context("cannot write to stdout"),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract { source, name, lib_version, out } => {
            let ex = extract_api(&source, &name, &lib_version).map_err(anyhow::Error::from)?;
            for w in &ex.warnings {
                eprintln!("warning: {w}");
            }
            output(out.as_deref(), &ex.model.to_json())?;
        }
        Command::Analyze { corpus, api, out } => {
            let model = load_model(&api)?;
            let store = analyze_corpus(&corpus, &model).map_err(anyhow::Error::from)?;
            output(out.as_deref(), &store.to_json())?;
        }
        Command::Infer { api, usages, config, out, report, decisions } => {
            let config = config.config()?;
            let model = load_model(&api)?;
            let usages = usages.as_deref().map(load_usages).transpose()?;
            let inf = infer_annotations(&model, usages.as_ref(), &config).map_err(anyhow::Error::from)?;
            for w in &inf.warnings {
                eprintln!("warning: {w}");
            }
            output(out.as_deref(), &inf.annotations.to_json())?;
            if let Some(path) = report {
                let Some(r) = &inf.report else {
                    return Err(CliError::Usage("--report needs --usages".into()));
                };
                output(Some(&path), &r.to_json())?;
            }
            if let Some(path) = decisions {
                output(Some(&path), &pretty(&inf.decisions))?;
            }
        }
        Command::Generate { api, annotations, out_dir, zip } => {
            let model = load_model(&api)?;
            let set = load_annotations(&annotations)?;
            let unit = generate(&model, &set).map_err(|e| match e {
                GenerateError::Invalid(v) => CliError::violations("annotations do not validate against the model", v),
                other => CliError::Failed(other.into()),
            })?;
            emit(&unit, &out_dir).with_context(|| format!("cannot write below {}", out_dir.display()))?;
            if zip {
                let path = out_dir.join("adapters.zip");
                let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
                write_zip(&render(&unit), file).with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        Command::Merge { left, right, out, conflicts } => {
            let outcome = merge_annotation_sets(&load_annotations(&left)?, &load_annotations(&right)?).map_err(anyhow::Error::from)?;
            output(out.as_deref(), &outcome.merged.to_json())?;
            if let Some(path) = conflicts {
                output(Some(&path), &pretty(&outcome.conflicts))?;
            }
            if !outcome.conflicts.is_empty() {
                return Err(CliError::Failed(anyhow::anyhow!(
                    "{} conflicting annotation pair(s) were left out of the merge",
                    outcome.conflicts.len()
                )));
            }
        }
        Command::Diff { old, new, hints, out } => {
            let hints: Vec<RenameHint> = hints.as_deref().map(|p| load_json(p, "hints file")).transpose()?.unwrap_or_default();
            let diff = diff_api(&load_model(&old)?, &load_model(&new)?, &hints).map_err(anyhow::Error::from)?;
            output(out.as_deref(), &pretty(&diff))?;
        }
        Command::Migrate { annotations, diff, old, new, out } => {
            let old = load_model(&old)?;
            let new = load_model(&new)?;
            let set = load_annotations(&annotations)?;
            let violations = validate(&set, &old);
            if !violations.is_empty() {
                return Err(CliError::violations("annotations do not validate against the old model", violations));
            }
            let diff: ApiDiff = load_json(&diff, "diff.json")?;
            let result = migrate_annotations(&set, &diff, &old, &new).map_err(anyhow::Error::from)?;
            if !result.conflicts.is_empty() {
                eprintln!("{} conflict(s) need resolving", result.conflicts.len());
            }
            output(out.as_deref(), &pretty(&result))?;
        }
        Command::Resolve { result, new, conflict, choice, annotation, out } => {
            let new = load_model(&new)?;
            let result: MergeResult = load_json(&result, "merge result")?;
            let choice = match choice {
                Choice::KeepAdapter => Resolution::KeepAdapter,
                Choice::KeepMaintainer => Resolution::KeepMaintainer,
                Choice::Custom => {
                    let path = annotation.expect("clap requires --annotation");
                    Resolution::Custom { annotation: load_json::<Annotation>(&path, "annotation")? }
                }
            };
            let resolved = resolve_conflict(&result, conflict, &choice, &new).map_err(|e| match e {
                ResolveError::InvalidCustom(v) => CliError::violations("the custom annotation does not validate", v),
                ResolveError::Rejected(v) => CliError::violations("keeping the adapter change does not validate", v),
                ResolveError::UnknownConflict(id) => CliError::Usage(format!("no conflict with id {id}")),
            })?;
            output(out.as_deref(), &pretty(&resolved))?;
        }
        Command::Serve { api, usages, annotations, config, port } => {
            let config = config.config()?;
            let model = load_model(&api)?;
            let usages = usages.as_deref().map(load_usages).transpose()?;
            let set = match &annotations {
                Some(p) if p.exists() => Some(load_annotations(p)?),
                _ => None,
            };
            let session = Session::new(model, usages, set, &config).map_err(|e| match e {
                SessionError::Invalid(v) => CliError::violations("annotations do not validate against the model", v),
                other => CliError::Failed(other.into()),
            })?;
            let session = match annotations {
                Some(p) => session.with_save_path(p),
                None => session,
            };
            let rt = tokio::runtime::Runtime::new().context("cannot start the async runtime")?;
            rt.block_on(service::serve(session, port)).context("service failed")?;
        }
    }
    Ok(())
}
