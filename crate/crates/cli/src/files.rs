//! On-disk JSON formats.
//!
//! Every floating-point number is written as a decimal string with 17
//! significant digits (`{:.16e}`), which parses back to the identical double.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sic_core::etf::EtfFamily;
use sic_core::linalg::{CMat, CVec};
use sic_core::sic::{Fiducial, FiducialMetadata};
use sic_core::Complex64;

use crate::CliError;

/// `[re, im]` as decimal strings.
pub type Pair = [String; 2];

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_num(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
}

pub fn pair(z: Complex64) -> Pair {
    [num(z.re), num(z.im)]
}

pub fn parse_pair(p: &Pair) -> Result<Complex64, String> {
    Ok(Complex64::new(parse_num(&p[0])?, parse_num(&p[1])?))
}

fn vector_pairs(v: &CVec) -> Vec<Pair> {
    v.iter().map(|z| pair(*z)).collect()
}

fn parse_vector(v: &[Pair]) -> Result<CVec, String> {
    Ok(CVec::from_vec(v.iter().map(parse_pair).collect::<Result<_, _>>()?))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<String>,
    #[serde(default)]
    pub symmetry_tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiducialFile {
    pub d: u64,
    pub vector: Vec<Pair>,
    #[serde(default)]
    pub metadata: MetadataFile,
}

impl FiducialFile {
    pub fn from_fiducial(f: &Fiducial) -> Self {
        let m = &f.metadata;
        Self {
            d: f.d,
            vector: vector_pairs(&f.vector),
            metadata: MetadataFile {
                seed: m.seed,
                restart: m.restart,
                potential: m.potential.map(num),
                residual: m.residual.map(num),
                iterations: m.iterations,
                subspace: m.subspace.clone(),
                symmetry_tags: m.symmetry_tags.clone(),
            },
        }
    }

    pub fn to_fiducial(&self) -> Result<Fiducial, String> {
        let v = parse_vector(&self.vector)?;
        let mut f = Fiducial::new(self.d, v).map_err(|e| e.to_string())?;
        let m = &self.metadata;
        let opt = |s: &Option<String>| s.as_deref().map(parse_num).transpose();
        f.metadata = FiducialMetadata {
            seed: m.seed,
            restart: m.restart,
            potential: opt(&m.potential)?,
            residual: opt(&m.residual)?,
            iterations: m.iterations,
            subspace: m.subspace.clone(),
            symmetry_tags: m.symmetry_tags.clone(),
        };
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub ambient_dim: usize,
    pub count: usize,
    pub vectors: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl FamilyFile {
    pub fn from_family(f: &EtfFamily, metadata: BTreeMap<String, String>) -> Self {
        Self { ambient_dim: f.ambient_dim, count: f.count, vectors: f.vectors.iter().map(vector_pairs).collect(), metadata }
    }

    pub fn to_family(&self) -> Result<EtfFamily, String> {
        if self.vectors.len() != self.count {
            return Err(format!("count is {} but {} vectors are listed", self.count, self.vectors.len()));
        }
        let vs = self.vectors.iter().map(|v| parse_vector(v)).collect::<Result<Vec<_>, _>>()?;
        EtfFamily::new(self.ambient_dim, vs).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    /// Row-major entries.
    pub rows: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat, metadata: BTreeMap<String, String>) -> Self {
        Self { dim: m.nrows(), rows: m.row_iter().map(|r| r.iter().map(|z| pair(*z)).collect()).collect(), metadata }
    }

    pub fn to_matrix(&self) -> Result<CMat, String> {
        if self.rows.len() != self.dim || self.rows.iter().any(|r| r.len() != self.dim) {
            return Err(format!("expected a {0}x{0} matrix", self.dim));
        }
        let mut m = CMat::zeros(self.dim, self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, p) in row.iter().enumerate() {
                m[(r, c)] = parse_pair(p)?;
            }
        }
        Ok(m)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

/// Writes `bytes` to a temporary file in the target directory, then renames
/// it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io { path: path.to_path_buf(), message: e.to_string() };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io)?;
    let nanos = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    let tmp = dir.join(format!(".tmp-{}-{nanos}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

pub fn read_fiducial(path: &Path) -> Result<Fiducial, CliError> {
    let file: FiducialFile = read_json(path)?;
    file.to_fiducial().map_err(|message| CliError::Parse { path: path.to_path_buf(), message })
}

pub fn read_family(path: &Path) -> Result<EtfFamily, CliError> {
    let file: FamilyFile = read_json(path)?;
    file.to_family().map_err(|message| CliError::Parse { path: path.to_path_buf(), message })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, f64::MIN_POSITIVE, 0.0, -0.0, std::f64::consts::PI] {
            assert_eq!(parse_num(&num(x)).unwrap().to_bits(), x.to_bits());
        }
        assert!(parse_num("abc").is_err());
    }

    #[test]
    fn fiducial_round_trip_is_byte_identical() {
        let s = 1.0 / 2f64.sqrt();
        let mut f = Fiducial::from_slice(3, &[Complex64::from(0.0), s.into(), (-s).into()]).unwrap();
        f.metadata.seed = Some(7);
        f.metadata.potential = Some(1.5);
        let text = to_json(&FiducialFile::from_fiducial(&f));
        let back: FiducialFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_fiducial().unwrap(), f);
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn matrix_round_trip() {
        let m = CMat::from_fn(3, 3, |r, c| Complex64::new(r as f64 / 7.0, c as f64 * 1e-17));
        let file = MatrixFile::from_matrix(&m, BTreeMap::new());
        assert_eq!(file.to_matrix().unwrap(), m);
        let mut bad = file.clone();
        bad.rows.pop();
        assert!(bad.to_matrix().is_err());
    }
}
