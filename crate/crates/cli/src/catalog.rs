//! Fiducial catalog: `<root>/d<d>/<sha256 of file>.json`.
//!
//! Files are written atomically and never modified; a file whose content no
//! longer hashes to its name is reported as corrupt and skipped.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sic_core::sic::{self, Fiducial, SicReport};

use crate::files::{self, num, parse_num, FiducialFile};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationSummary {
    pub is_sic: bool,
    pub max_modulus_deviation: String,
    pub frame_potential: String,
    pub tight_frame_residual: String,
    pub tol: String,
}

impl VerificationSummary {
    pub fn from_report(r: &SicReport) -> Self {
        Self {
            is_sic: r.is_sic,
            max_modulus_deviation: num(r.max_modulus_deviation),
            frame_potential: num(r.frame_potential),
            tight_frame_residual: num(r.tight_frame_residual),
            tol: num(r.tol),
        }
    }

    pub fn residual(&self) -> f64 {
        parse_num(&self.max_modulus_deviation).unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub d: u64,
    /// Milliseconds since the Unix epoch.
    pub created: u64,
    pub verification: VerificationSummary,
    /// Search settings the fiducial came from, as recorded in its metadata.
    pub seed_provenance: files::MetadataFile,
    pub fiducial: FiducialFile,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok(Box<CatalogEntry>),
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Listed {
    pub d: u64,
    pub hash: String,
    pub path: PathBuf,
    pub status: Status,
}

impl Listed {
    pub fn entry(&self) -> Option<&CatalogEntry> {
        match &self.status {
            Status::Ok(e) => Some(e),
            Status::Corrupt(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PutOutcome {
    pub stored: bool,
    pub hash: Option<String>,
    pub path: Option<PathBuf>,
    pub report: SicReport,
}

pub struct Catalog {
    root: PathBuf,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn now_ms() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

impl Catalog {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Verifies `fid` at `tol` and stores it only if it passes.
    pub fn put(&self, fid: &Fiducial, tol: f64) -> Result<PutOutcome, CliError> {
        let report = sic::verify_sic(fid, tol);
        if !report.is_sic {
            return Ok(PutOutcome { stored: false, hash: None, path: None, report });
        }
        let file = FiducialFile::from_fiducial(fid);
        let entry = CatalogEntry {
            d: fid.d,
            created: now_ms(),
            verification: VerificationSummary::from_report(&report),
            seed_provenance: file.metadata.clone(),
            fiducial: file,
        };
        let text = files::to_json(&entry);
        let hash = sha256_hex(text.as_bytes());
        let path = self.root.join(format!("d{}", fid.d)).join(format!("{hash}.json"));
        files::write_atomic(&path, text.as_bytes())?;
        Ok(PutOutcome { stored: true, hash: Some(hash), path: Some(path), report })
    }

    /// Every entry, sorted by `(d, created, hash)`; corrupt files sort last
    /// within their dimension.
    pub fn list(&self) -> Result<Vec<Listed>, CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Io { path: p.to_path_buf(), message: e.to_string() };
        let mut out = Vec::new();
        if !self.root.exists() {
            return Ok(out);
        }
        for dir in fs::read_dir(&self.root).map_err(|e| io(&self.root, e))? {
            let dir = dir.map_err(|e| io(&self.root, e))?.path();
            let Some(d) = dir.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_prefix('d')).and_then(|n| n.parse::<u64>().ok())
            else {
                continue;
            };
            if !dir.is_dir() {
                continue;
            }
            for file in fs::read_dir(&dir).map_err(|e| io(&dir, e))? {
                let path = file.map_err(|e| io(&dir, e))?.path();
                let Some(hash) = path.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_suffix(".json")).map(str::to_string) else {
                    continue;
                };
                let status = Self::load(&path, &hash, d);
                out.push(Listed { d, hash, path, status });
            }
        }
        out.sort_by(|a, b| {
            let key = |l: &Listed| (l.d, l.entry().map_or(u64::MAX, |e| e.created), l.hash.clone());
            key(a).cmp(&key(b))
        });
        Ok(out)
    }

    fn load(path: &Path, hash: &str, d: u64) -> Status {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) => return Status::Corrupt(e.to_string()),
        };
        if sha256_hex(&bytes) != hash {
            return Status::Corrupt("content hash does not match file name".into());
        }
        match serde_json::from_slice::<CatalogEntry>(&bytes) {
            Ok(e) if e.d == d && e.fiducial.d == d => Status::Ok(Box::new(e)),
            Ok(_) => Status::Corrupt("dimension does not match directory".into()),
            Err(e) => Status::Corrupt(e.to_string()),
        }
    }

    /// Lowest-residual intact entry for `d`; ties go to the earliest listed.
    pub fn get(&self, d: u64) -> Result<Option<Listed>, CliError> {
        Ok(self.list()?.into_iter().filter(|l| l.d == d && l.entry().is_some()).min_by(|a, b| {
            let r = |l: &Listed| l.entry().map_or(f64::INFINITY, |e| e.verification.residual());
            r(a).total_cmp(&r(b))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sic_core::Complex64;

    fn hesse(phase: f64) -> Fiducial {
        let s = 1.0 / 2f64.sqrt();
        let z = Complex64::from_polar(1.0, phase);
        Fiducial::from_slice(3, &[Complex64::from(0.0), z * s, -z * s]).unwrap()
    }

    #[test]
    fn put_get_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cat = Catalog::new(dir.path());
        let f = hesse(0.3);
        let out = cat.put(&f, 1e-10).unwrap();
        assert!(out.stored);
        let got = cat.get(3).unwrap().unwrap();
        let back = got.entry().unwrap().fiducial.to_fiducial().unwrap();
        assert_eq!(back.vector, f.vector);
        assert!(cat.get(5).unwrap().is_none());
    }

    #[test]
    fn rejects_non_sic() {
        let dir = tempfile::tempdir().unwrap();
        let cat = Catalog::new(dir.path());
        let e0 = Fiducial::from_slice(3, &[Complex64::from(1.0), 0.0.into(), 0.0.into()]).unwrap();
        assert!(!cat.put(&e0, 1e-10).unwrap().stored);
        assert!(cat.list().unwrap().is_empty());
    }

    #[test]
    fn tampered_file_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let cat = Catalog::new(dir.path());
        let path = cat.put(&hesse(0.0), 1e-10).unwrap().path.unwrap();
        let text = fs::read_to_string(&path).unwrap().replacen("\"d\": 3", "\"d\": 3 ", 1);
        fs::write(&path, text).unwrap();
        let list = cat.list().unwrap();
        assert_eq!(list.len(), 1);
        assert!(matches!(list[0].status, Status::Corrupt(_)));
        assert!(cat.get(3).unwrap().is_none());
    }
}
