//! Carrying an annotation set from one release of a library to the next.
//!
//! The maintainer's changes come from diffing the two extracted models;
//! renames are only recognized through explicit hints.

mod diff;
mod migrate;

pub use diff::{diff_api, element_map, ApiDiff, DiffError, ElementChange, FieldChange, HintError, RenameHint};
pub use migrate::{migrate_annotations, resolve_conflict, Conflict, ConflictKind, Dropped, MergeResult, MigrateError, Resolution, ResolveError};
