//! JSON witness files and search checkpoints.
//!
//! Every witness carries a SHA-256 digest of its canonical payload and is
//! re-validated against the engine when loaded.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::search::Checkpoint;
use crate::engine::{BoundKind, ConstantKind, ConstantResult, SearchCertificate};
use crate::error::{Error, Result};
use crate::extraction::{validate_system, ZeroSumSystem};
use crate::group::AbelianGroup;
use crate::sequence::Sequence;
use crate::TOOL_VERSION;

pub const WITNESS_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessBody {
    /// A sequence avoiding the pattern of `constant_name`, of length `value_or_bound - 1`.
    Constant {
        constant_name: String,
        value_or_bound: u64,
        certificate: SearchCertificate,
        sequence: Vec<Vec<u64>>,
    },
    /// Disjoint zero-sum blocks of `parent`, each of length `<= cap`.
    System {
        parent: Vec<Vec<u64>>,
        blocks: Vec<Vec<Vec<u64>>>,
        cap: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub schema_version: u32,
    pub tool_version: String,
    pub group: String,
    #[serde(flatten)]
    pub body: WitnessBody,
    pub digest: String,
}

#[derive(Serialize)]
struct Payload<'a> {
    schema_version: u32,
    tool_version: &'a str,
    group: &'a str,
    #[serde(flatten)]
    body: &'a WitnessBody,
}

fn digest_of(schema_version: u32, tool_version: &str, group: &str, body: &WitnessBody) -> String {
    let payload = Payload { schema_version, tool_version, group, body };
    let bytes = serde_json::to_vec(&payload).expect("payload serializes");
    hex::encode(Sha256::digest(&bytes))
}

impl WitnessRecord {
    pub fn new(group: &AbelianGroup, body: WitnessBody) -> Self {
        let group = group.to_string();
        let digest = digest_of(WITNESS_SCHEMA, TOOL_VERSION, &group, &body);
        WitnessRecord { schema_version: WITNESS_SCHEMA, tool_version: TOOL_VERSION.to_string(), group, body, digest }
    }

    pub fn from_constant(r: &ConstantResult) -> Self {
        WitnessRecord::new(
            &r.group,
            WitnessBody::Constant {
                constant_name: r.constant.to_string(),
                value_or_bound: r.value,
                certificate: r.certificate,
                sequence: r.witness.coords(),
            },
        )
    }

    pub fn from_system(sys: &ZeroSumSystem, cap: Option<u64>) -> Self {
        WitnessRecord::new(
            sys.parent().group(),
            WitnessBody::System {
                parent: sys.parent().coords(),
                blocks: sys.blocks().iter().map(Sequence::coords).collect(),
                cap,
            },
        )
    }

    pub fn recompute_digest(&mut self) {
        self.digest = digest_of(self.schema_version, &self.tool_version, &self.group, &self.body);
    }

    pub fn digest_matches(&self) -> bool {
        self.digest == digest_of(self.schema_version, &self.tool_version, &self.group, &self.body)
    }

    /// Checks the mathematical content independently of how it was produced.
    pub fn validate(&self) -> Result<()> {
        let reject = |m: String| Error::WitnessRejected(m);
        let group: AbelianGroup = self.group.parse()?;
        match &self.body {
            WitnessBody::Constant { constant_name, value_or_bound, certificate, sequence } => {
                let kind: ConstantKind = constant_name.parse()?;
                let seq = Sequence::from_coords(&group, sequence)?;
                if !certificate.is_consistent() {
                    return Err(reject("certificate status and bound kind disagree".into()));
                }
                if certificate.bound_kind != BoundKind::UpperVerified && seq.len() as u64 + 1 != *value_or_bound {
                    return Err(reject(format!(
                        "witness length {} does not match value {value_or_bound}",
                        seq.len()
                    )));
                }
                if !kind.is_avoiding(&seq) {
                    return Err(reject(format!("sequence contains the zero-sum pattern of {kind}")));
                }
            }
            WitnessBody::System { parent, blocks, cap } => {
                let parent = Sequence::from_coords(&group, parent)?;
                let blocks = blocks
                    .iter()
                    .map(|b| Sequence::from_coords(&group, b))
                    .collect::<Result<Vec<_>>>()?;
                let sys = ZeroSumSystem::from_blocks(&parent, blocks).map_err(|e| reject(e.to_string()))?;
                validate_system(&sys, *cap).map_err(|e| reject(e.to_string()))?;
            }
        }
        Ok(())
    }

    fn label(&self) -> String {
        match &self.body {
            WitnessBody::Constant { constant_name, .. } => constant_name.replace(':', "-"),
            WitnessBody::System { .. } => "system".to_string(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}_{}_{}.json", self.group, self.label(), &self.digest[..8])
    }
}

/// Writes the record into `dir` as `{group}_{constant}_{hash8}.json`.
pub fn store_witness(dir: &Path, record: &WitnessRecord) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(record.file_name());
    let mut text = serde_json::to_string_pretty(record)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Reads and re-validates a record; a schema mismatch is returned as a warning.
pub fn load_witness(path: &Path) -> Result<(WitnessRecord, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    let record: WitnessRecord = serde_json::from_str(&text)?;
    let mut warnings = Vec::new();
    if record.schema_version != WITNESS_SCHEMA {
        let w = format!("witness schema {} differs from {WITNESS_SCHEMA}", record.schema_version);
        log::warn!("{w}");
        warnings.push(w);
    }
    if !record.digest_matches() {
        return Err(Error::WitnessRejected("digest does not match contents".into()));
    }
    record.validate()?;
    Ok((record, warnings))
}

pub fn store_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string(cp)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if cp.schema_version != crate::engine::search::CHECKPOINT_SCHEMA {
        return Err(Error::Checkpoint(format!("unsupported checkpoint schema {}", cp.schema_version)));
    }
    Ok(cp)
}
