//! The deterministic six-stage transpilation pipeline.
//!
//! Stage order is fixed: init, layout, routing, translation, optimization,
//! scheduling. Every source of randomness is derived from the recorded
//! master seed, so a pipeline run is a pure function of
//! `(source, backend, config)` and two runs produce byte-identical
//! artifacts.
//!
//! Stage behavior is selected by plugin. The honest plugins implement the
//! default deterministic passes; the leaky plugins (covert exfiltration
//! channels) live in [`crate::stego`] and masquerade as the honest plugin
//! in the emitted buildinfo, which is exactly what makes them detectable
//! only by rebuild-and-compare.

mod init;
mod layout;
mod optimization;
mod routing;
mod scheduling;
mod translation;

pub use init::stage_init;
pub use layout::{apply_layout, random_layout_stage, stage_layout, trivial_layout_stage};
pub use optimization::stage_optimization;
pub use routing::stage_routing;
pub use scheduling::stage_scheduling;
pub use translation::stage_translation;

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backend::BackendModel;
use crate::circuit::{validate_circuit, CircuitError};
use crate::hash::sha256_hex;
use crate::qasm::{
    parse_source, serialize_artifact, Artifact, ArtifactError, BuildInfo, SourceError,
    StagePluginInfo,
};
use crate::stego::{StealthLevel, StegoError};

/// Toolchain version recorded in buildinfo files.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pipeline stages in execution order.
pub const STAGE_NAMES: [&str; 6] = [
    "init",
    "layout",
    "routing",
    "translation",
    "optimization",
    "scheduling",
];

/// Stage seed: first 8 big-endian bytes of
/// `SHA-256(master_seed as 8 big-endian bytes || stage_name UTF-8)`.
pub fn derive_stage_seed(master_seed: u64, stage_name: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_be_bytes());
    hasher.update(stage_name.as_bytes());
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().unwrap())
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitPlugin {
    Honest,
    Leaky { payload: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayoutPlugin {
    /// Greedy lowest-error connected subgraph.
    Honest,
    /// `map[v] = v`.
    Trivial,
    /// Uniform random permutation drawn from the stage seed.
    Random,
    Leaky { payload: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchedulingPlugin {
    Honest,
    Leaky { payload: Vec<u8>, stealth: StealthLevel },
}

impl InitPlugin {
    /// Identity recorded in buildinfo. Leaky plugins claim to be the honest
    /// one: a covert attacker does not announce itself.
    fn reported_id(&self) -> &'static str {
        "honest"
    }
}

impl LayoutPlugin {
    fn reported_id(&self) -> &'static str {
        match self {
            LayoutPlugin::Honest | LayoutPlugin::Leaky { .. } => "honest",
            LayoutPlugin::Trivial => "trivial",
            LayoutPlugin::Random => "random",
        }
    }
}

impl SchedulingPlugin {
    fn reported_id(&self) -> &'static str {
        "honest"
    }
}

/// Everything that determines a build besides the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub backend: BackendModel,
    pub master_seed: u64,
    pub init: InitPlugin,
    pub layout: LayoutPlugin,
    pub scheduling: SchedulingPlugin,
    /// Free-form options recorded verbatim in buildinfo.
    pub options: BTreeMap<String, String>,
}

impl PipelineConfig {
    pub fn honest(backend: BackendModel, master_seed: u64) -> Self {
        PipelineConfig {
            backend,
            master_seed,
            init: InitPlugin::Honest,
            layout: LayoutPlugin::Honest,
            scheduling: SchedulingPlugin::Honest,
            options: BTreeMap::new(),
        }
    }

    /// Buildinfo stage list for this configuration.
    pub fn stage_plugin_info(&self) -> Vec<StagePluginInfo> {
        let ids = [
            self.init.reported_id(),
            self.layout.reported_id(),
            "honest",
            "honest",
            "honest",
            self.scheduling.reported_id(),
        ];
        STAGE_NAMES
            .iter()
            .zip(ids)
            .map(|(&stage_name, plugin_id)| StagePluginInfo {
                stage_name: stage_name.to_string(),
                plugin_id: plugin_id.to_string(),
                plugin_version: TOOL_VERSION.to_string(),
            })
            .collect()
    }
}

/// Honest pipeline configuration named by a buildinfo plugin list.
///
/// Returns an error for any plugin identity that is not one of the locally
/// available honest plugins; in particular the leaky plugins are never
/// accepted for verification rebuilds.
pub fn honest_config_from_plugins(
    backend: BackendModel,
    master_seed: u64,
    options: BTreeMap<String, String>,
    plugins: &[StagePluginInfo],
) -> Result<PipelineConfig, TranspileError> {
    let unknown = |info: &StagePluginInfo| TranspileError::UnknownPlugin {
        stage: info.stage_name.clone(),
        plugin: format!("{} {}", info.plugin_id, info.plugin_version),
    };
    if plugins.len() != STAGE_NAMES.len() {
        return Err(TranspileError::UnknownPlugin {
            stage: "<pipeline>".to_string(),
            plugin: format!("{} stage entries", plugins.len()),
        });
    }
    let mut layout = LayoutPlugin::Honest;
    for (info, &expected_stage) in plugins.iter().zip(STAGE_NAMES.iter()) {
        if info.stage_name != expected_stage || info.plugin_version != TOOL_VERSION {
            return Err(unknown(info));
        }
        match (expected_stage, info.plugin_id.as_str()) {
            ("layout", "honest") => layout = LayoutPlugin::Honest,
            ("layout", "trivial") => layout = LayoutPlugin::Trivial,
            ("layout", "random") => layout = LayoutPlugin::Random,
            (_, "honest") => {}
            _ => return Err(unknown(info)),
        }
    }
    Ok(PipelineConfig {
        backend,
        master_seed,
        init: InitPlugin::Honest,
        layout,
        scheduling: SchedulingPlugin::Honest,
        options,
    })
}

#[derive(Debug, Error, PartialEq)]
pub enum TranspileError {
    #[error("circuit uses {qubits} qubits but the backend has only {available}")]
    CircuitTooLarge { qubits: usize, available: usize },
    #[error("instruction {position}: arity {arity} gates must be expanded before this stage")]
    UnexpandedMultiQubit { position: usize, arity: usize },
    #[error("backend coupling graph is disconnected")]
    DisconnectedBackend,
    #[error("gate `{0}` cannot be translated to the backend basis")]
    UntranslatableGate(&'static str),
    #[error("no duration entry for `{kind}` on qubits {qubits:?}")]
    MissingDuration { kind: &'static str, qubits: Vec<usize> },
    #[error("unknown plugin for stage {stage}: {plugin}")]
    UnknownPlugin { stage: String, plugin: String },
}

/// Pipeline failure: any stage error plus source and serialization issues.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Stage(#[from] TranspileError),
    #[error(transparent)]
    Stego(#[from] StegoError),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error("buildinfo: {0}")]
    BuildInfo(String),
}

/// Runs the six stages in order and serializes the result.
///
/// Identical `(source, config)` inputs give identical artifact and
/// buildinfo bytes.
pub fn run_pipeline(
    source: &str,
    config: &PipelineConfig,
) -> Result<(Artifact, BuildInfo), PipelineError> {
    let backend = &config.backend;
    let circuit = parse_source(source)?;
    validate_circuit(&circuit)?;

    let circuit = match &config.init {
        InitPlugin::Honest => stage_init(&circuit),
        InitPlugin::Leaky { payload } => {
            crate::stego::leaky_init_stage(&circuit, backend, payload)?
        }
    };

    let layout_seed = derive_stage_seed(config.master_seed, "layout");
    let (circuit, layout) = match &config.layout {
        LayoutPlugin::Honest => stage_layout(&circuit, backend, layout_seed)?,
        LayoutPlugin::Trivial => trivial_layout_stage(&circuit, backend)?,
        LayoutPlugin::Random => random_layout_stage(&circuit, backend, layout_seed)?,
        LayoutPlugin::Leaky { payload } => {
            crate::stego::leaky_layout_stage(&circuit, backend, payload)?
        }
    };

    let routing_seed = derive_stage_seed(config.master_seed, "routing");
    let (circuit, layout) = stage_routing(&circuit, &layout, backend, routing_seed)?;
    let circuit = stage_translation(&circuit, backend)?;
    let circuit = stage_optimization(&circuit);

    let circuit = match &config.scheduling {
        SchedulingPlugin::Honest => stage_scheduling(&circuit, backend)?,
        SchedulingPlugin::Leaky { payload, stealth } => {
            crate::stego::leaky_scheduling_stage(&circuit, backend, payload, *stealth)?
        }
    };

    let artifact = serialize_artifact(&circuit, &layout, backend)?;
    let buildinfo = BuildInfo {
        schema_version: crate::qasm::SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        source_sha256: sha256_hex(source.as_bytes()),
        backend_sha256: backend.sha256.clone(),
        master_seed: config.master_seed,
        stage_plugins: config.stage_plugin_info(),
        options: config.options.clone(),
        artifact_sha256: sha256_hex(artifact.bytes.as_bytes()),
    };
    Ok((artifact, buildinfo))
}
