//! On-disk artifacts: checksummed files, field binaries with JSON headers and
//! the partition header.

use super::RunError;
use crate::ac::DoubleWell;
use crate::digest::sha256_hex;
use crate::group::{Backend, CayleyBall, GroupSpec};
use crate::plateau::PlateauPartition;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Relative to the run directory.
    pub path: String,
    pub kind: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Writes files below a run directory and records their checksums.
#[derive(Debug)]
pub struct ArtifactWriter {
    pub dir: PathBuf,
    pub records: Vec<ArtifactRecord>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self, RunError> {
        std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            records: Vec::new(),
        })
    }

    pub fn write(&mut self, rel: &str, kind: &str, bytes: &[u8]) -> Result<PathBuf, RunError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| RunError::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| RunError::io(&path, e))?;
        self.records.retain(|r| r.path != rel);
        self.records.push(ArtifactRecord {
            path: rel.to_string(),
            kind: kind.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, kind: &str, value: &T) -> Result<PathBuf, RunError> {
        let text = serde_json::to_string_pretty(value).expect("artifact serializes");
        self.write(rel, kind, text.as_bytes())
    }
}

pub const FIELD_FORMAT: &str = "hyperac-field-v1";

/// Sidecar of a field binary: little-endian `f64` values in ball index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub group: Backend,
    pub d0: Vec<String>,
    pub potential: DoubleWell,
    pub rho: f64,
    pub sigma0: f64,
    /// Dirichlet radius `N`; the ball has radius `N + 1` and free sites `B_{N-1}`.
    pub n: usize,
    pub radius: usize,
    pub sites: usize,
    pub ball_hash: String,
    pub sha256: String,
}

pub fn field_bytes(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn header_path(field: &Path) -> PathBuf {
    field.with_extension("json")
}

/// Reads a field binary and its header, checking size and checksum.
pub fn read_field(path: &Path) -> Result<(FieldHeader, Vec<f64>), RunError> {
    let hp = header_path(path);
    let text = std::fs::read_to_string(&hp).map_err(|e| RunError::io(&hp, e))?;
    let header: FieldHeader =
        serde_json::from_str(&text).map_err(|e| RunError::Format(format!("{}: {e}", hp.display())))?;
    if header.format != FIELD_FORMAT {
        return Err(RunError::Format(format!("unknown field format {}", header.format)));
    }
    let bytes = std::fs::read(path).map_err(|e| RunError::io(path, e))?;
    let got = sha256_hex(&bytes);
    if got != header.sha256 {
        return Err(RunError::ChecksumMismatch {
            path: path.display().to_string(),
            expected: header.sha256.clone(),
            got,
        });
    }
    if bytes.len() != 8 * header.sites {
        return Err(RunError::Format(format!(
            "{} has {} bytes, expected {}",
            path.display(),
            bytes.len(),
            8 * header.sites
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

/// Sidecar of the partition label CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionHeader {
    pub group: Backend,
    pub d0: Vec<String>,
    pub radius: usize,
    pub ladder: Vec<f64>,
    pub labels: String,
    pub labels_sha256: String,
}

/// Loads a partition from its header, checking the label checksum.
pub fn read_partition(header: &Path) -> Result<(PartitionHeader, PlateauPartition), RunError> {
    let text = std::fs::read_to_string(header).map_err(|e| RunError::io(header, e))?;
    let h: PartitionHeader =
        serde_json::from_str(&text).map_err(|e| RunError::Format(format!("{}: {e}", header.display())))?;
    let lp = header.parent().unwrap_or(Path::new(".")).join(&h.labels);
    let labels = std::fs::read(&lp).map_err(|e| RunError::io(&lp, e))?;
    let got = sha256_hex(&labels);
    if got != h.labels_sha256 {
        return Err(RunError::ChecksumMismatch {
            path: lp.display().to_string(),
            expected: h.labels_sha256.clone(),
            got,
        });
    }
    let group = GroupSpec::new(h.group.clone())?;
    let ball = CayleyBall::build(&group, h.radius)?;
    let text = String::from_utf8(labels).map_err(|e| RunError::Format(e.to_string()))?;
    let mut p = PlateauPartition::parse_label_csv(ball, &text)?;
    p.ladder = h.ladder.clone();
    Ok((h, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path()).unwrap();
        let values = vec![-1.0, 0.5, f64::MIN_POSITIVE, 1.0];
        let bytes = field_bytes(&values);
        let header = FieldHeader {
            format: FIELD_FORMAT.into(),
            group: Backend::Free { rank: 2 },
            d0: vec!["a".into()],
            potential: DoubleWell::default(),
            rho: 0.1,
            sigma0: 0.04,
            n: 1,
            radius: 2,
            sites: 4,
            ball_hash: String::new(),
            sha256: sha256_hex(&bytes),
        };
        let p = w.write("fields/f.bin", "field", &bytes).unwrap();
        w.write_json("fields/f.json", "field_header", &header).unwrap();
        let (h, v) = read_field(&p).unwrap();
        assert_eq!(h, header);
        assert_eq!(v, values);
        assert_eq!(w.records.len(), 2);
        let mut corrupt = bytes.clone();
        corrupt[3] ^= 1;
        std::fs::write(&p, corrupt).unwrap();
        assert!(matches!(read_field(&p), Err(RunError::ChecksumMismatch { .. })));
    }
}
