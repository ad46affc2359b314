//! Text formats: circuit source programs, canonical build artifacts and
//! buildinfo files.
//!
//! The artifact and buildinfo serializers are the reproducibility surface
//! of the toolchain: identical inputs must produce identical bytes on any
//! platform, so angles are written as the hex of their binary64 bit
//! pattern and every file uses LF endings with a fixed section order.

mod artifact;
mod buildinfo;
mod source;

pub use artifact::{parse_artifact, serialize_artifact, Artifact, ArtifactError, ARTIFACT_HEADER};
pub use buildinfo::{BuildInfo, BuildInfoError, StagePluginInfo, SCHEMA_VERSION};
pub use source::{parse_source, write_source, SourceError};
