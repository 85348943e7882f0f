//! SIC fiducials: overlaps, verification and numerical search.
//!
//! A fiducial `psi` generates the orbit `{D_p psi}`. It is a SIC fiducial when
//! `|<psi|D_p|psi>|^2 = 1/(d+1)` for every `p != 0`. The search minimises the
//! frame potential `sum_p |<psi|D_p|psi>|^4`, whose minimum `2d/(d+1)` over
//! unit vectors is attained exactly at SIC fiducials, then polishes the
//! squared-overlap residuals with Levenberg-Marquardt.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::clifford::{self, Eigenspace};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, root_of_unity, CMat, CVec};
use crate::optim::{self, LbfgsOptions, LmOptions};
use crate::wh::{apply_displacement, check_odd, tau_power, DisplacementIndex};

/// Normalisation tolerance for fiducials.
pub const NORM_TOL: f64 = 1e-12;
/// Default SIC verification tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Largest supported dimension.
pub const MAX_DIM: u64 = 200;

/// Search provenance and verification summary carried with a fiducial.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FiducialMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<f64>,
    /// Largest deviation of `|overlap|^2` from `1/(d+1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<String>,
    #[serde(default)]
    pub symmetry_tags: Vec<String>,
}

/// A unit vector in `C^d`, candidate generator of a SIC orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiducial {
    pub d: u64,
    pub vector: CVec,
    pub metadata: FiducialMetadata,
}

impl Fiducial {
    /// Wraps a vector that must already have unit norm.
    pub fn new(d: u64, vector: CVec) -> Result<Self> {
        check_odd(d)?;
        if vector.len() != d as usize {
            return Err(Error::DimensionMismatch { expected: d as usize, found: vector.len() });
        }
        let n2 = vector.norm_squared();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { d, vector, metadata: FiducialMetadata::default() })
    }

    /// Normalises `vector` first.
    pub fn normalized(d: u64, vector: CVec) -> Result<Self> {
        let n = vector.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(d, vector / Complex64::from(n))
    }

    pub fn from_slice(d: u64, v: &[Complex64]) -> Result<Self> {
        Self::normalized(d, CVec::from_column_slice(v))
    }
}

/// All `d^2` overlaps `<psi|D_p|psi>` in linear index order.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    pub d: u64,
    pub overlaps: Vec<Complex64>,
    /// `theta_p = arg <psi|D_p|psi>` for `p != 0` with modulus above `1e-14`.
    pub phases: Vec<Option<f64>>,
}

impl OverlapTable {
    pub fn get(&self, p: DisplacementIndex) -> Complex64 {
        self.overlaps[p.linear()]
    }

    pub fn phase(&self, p: DisplacementIndex) -> Option<f64> {
        self.phases[p.linear()]
    }
}

/// Powers `w^k`, `k = 0..d`.
fn omega_table(d: u64) -> Vec<Complex64> {
    (0..d as i64).map(|k| root_of_unity(k, d)).collect()
}

/// `<v|D_{ij}|v> = tau^{ij} sum_k conj(v_{k+i}) w^{jk} v_k` for all `(i, j)`.
/// Works for any vector, normalised or not.
fn raw_overlaps(v: &CVec, w: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let d = n as u64;
    let mut out = vec![Complex64::default(); n * n];
    let mut a = vec![Complex64::default(); n];
    for i in 0..n {
        for k in 0..n {
            a[k] = v[(k + i) % n].conj() * v[k];
        }
        for j in 0..n {
            let mut s = Complex64::default();
            for (k, ak) in a.iter().enumerate() {
                s += ak * w[(j * k) % n];
            }
            out[i * n + j] = s * tau_power(d, (i * j) as i64);
        }
    }
    out
}

pub fn overlaps(psi: &Fiducial) -> Result<OverlapTable> {
    let n2 = psi.vector.norm_squared();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n2));
    }
    let overlaps = raw_overlaps(&psi.vector, &omega_table(psi.d));
    let phases = overlaps.iter().enumerate().map(|(k, z)| if k != 0 && z.norm() > 1e-14 { Some(z.arg()) } else { None }).collect();
    Ok(OverlapTable { d: psi.d, overlaps, phases })
}

/// `sum_p |<psi|D_p|psi>|^4`.
pub fn frame_potential(psi: &Fiducial) -> f64 {
    raw_overlaps(&psi.vector, &omega_table(psi.d)).iter().map(|c| c.norm_sqr().powi(2)).sum()
}

/// Minimum of the frame potential over unit vectors, `2d/(d+1)`.
pub fn potential_minimum(d: u64) -> f64 {
    2.0 * d as f64 / (d as f64 + 1.0)
}

/// Frame potential of an arbitrary (unnormalised) vector and its Wirtinger
/// gradient `df/d conj(v) = 4 sum_p |c_p|^2 conj(c_p) D_p v`.
///
/// The real gradient with respect to `(Re v, Im v)` is `2 Re g`, `2 Im g`.
pub fn potential_and_gradient(v: &CVec) -> (f64, CVec) {
    let n = v.len();
    let d = n as u64;
    let w = omega_table(d);
    let c = raw_overlaps(v, &w);
    let f = c.iter().map(|z| z.norm_sqr().powi(2)).sum();

    // (D_{ij} v)_m = tau^{ij} w^{j(m-i)} v_{m-i}; with k = m - i,
    // g_m = 4 sum_i v_k sum_j b_ij w^{jk},  b_ij = |c_ij|^2 conj(c_ij) tau^{ij}.
    let mut g = CVec::zeros(n);
    for i in 0..n {
        let b: Vec<Complex64> = (0..n)
            .map(|j| {
                let z = c[i * n + j];
                z.conj() * z.norm_sqr() * tau_power(d, (i * j) as i64)
            })
            .collect();
        for k in 0..n {
            let mut s = Complex64::default();
            for (j, bj) in b.iter().enumerate() {
                s += bj * w[(j * k) % n];
            }
            g[(k + i) % n] += v[k] * s * 4.0;
        }
    }
    (f, g)
}

/// Verification summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SicReport {
    pub d: u64,
    pub is_sic: bool,
    pub max_modulus_deviation: f64,
    pub frame_potential: f64,
    /// `max |sum_p D_p|psi><psi|D_p^dag - d 1|`.
    pub tight_frame_residual: f64,
    pub tol: f64,
}

/// The frame operator of the orbit is diagonal with entries
/// `S_ab = sum_i psi_{a-i} conj(psi_{b-i}) sum_j w^{j(a-b)}`; this evaluates it
/// entrywise in `O(d^3)`.
fn tight_frame_residual(v: &CVec, w: &[Complex64]) -> f64 {
    let n = v.len();
    let col: Vec<Complex64> = (0..n).map(|delta| (0..n).map(|j| w[(j * delta) % n]).sum()).collect();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut s = Complex64::default();
            for i in 0..n {
                s += v[(a + n - i) % n] * v[(b + n - i) % n].conj();
            }
            s *= col[(a + n - b) % n];
            let target = if a == b { n as f64 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Checks equiangularity of the orbit and the tight-frame condition with
/// `c1 = d`. Failure is reported, never raised.
pub fn verify_sic(psi: &Fiducial, tol: f64) -> SicReport {
    let w = omega_table(psi.d);
    let c = raw_overlaps(&psi.vector, &w);
    let target = 1.0 / (psi.d as f64 + 1.0);
    let max_modulus_deviation = c[1..].iter().fold(0.0f64, |m, z| m.max((z.norm_sqr() - target).abs()));
    let frame_potential = c.iter().map(|z| z.norm_sqr().powi(2)).sum();
    let tight_frame_residual = tight_frame_residual(&psi.vector, &w);
    SicReport { d: psi.d, is_sic: max_modulus_deviation < tol, max_modulus_deviation, frame_potential, tight_frame_residual, tol }
}

/// The `d^2` orbit vectors `D_p psi` in linear index order.
pub fn orbit(psi: &Fiducial) -> Vec<CVec> {
    DisplacementIndex::all(psi.d).map(|p| apply_displacement(p, &psi.vector)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// `lambda` with `U psi ~ lambda psi`.
    pub phase: Complex64,
    /// `|U psi - lambda psi|`.
    pub residual: f64,
}

/// Whether `U psi = lambda psi` for a unit-modulus `lambda`, within `tol`.
pub fn check_projective_symmetry(psi: &Fiducial, u: &CMat, tol: f64) -> Result<SymmetryReport> {
    if u.nrows() != psi.vector.len() || u.ncols() != psi.vector.len() {
        return Err(Error::DimensionMismatch { expected: psi.vector.len(), found: u.nrows() });
    }
    let image = u * &psi.vector;
    let phase = psi.vector.dotc(&image);
    let residual = (&image - &psi.vector * phase).norm();
    Ok(SymmetryReport { symmetric: residual < tol && (phase.norm() - 1.0).abs() < tol, phase, residual })
}

/// Which part of `C^d` the search explores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subspace {
    /// Zauner eigenspaces for `d >= 7`, the full space below.
    #[default]
    Auto,
    /// Eigenspaces of the Zauner unitary, falling back to the full space when
    /// every restricted restart fails.
    Zauner,
    Full,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchOptions {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub subspace: Subspace,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { seed: 1, restarts: 32, max_iters: 3000, tol: DEFAULT_TOL, subspace: Subspace::Auto, exec: Exec::default() }
    }
}

/// Restarts are run in waves of this many; the outcome does not depend on
/// the thread count.
pub const WAVE: usize = 8;

/// Per-restart seed: one SplitMix64 output from state
/// `seed + (k + 1) * 0x9E3779B97F4A7C15` (wrapping).
pub fn restart_seed(seed: u64, k: usize) -> u64 {
    let mut z = seed.wrapping_add((k as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Parameterisation `psi = B z` over an orthonormal basis `B`; `None` is the
/// full space.
#[derive(Debug, Clone)]
struct Param {
    basis: Option<CMat>,
    label: String,
    zauner: bool,
}

impl Param {
    fn dim(&self, d: usize) -> usize {
        self.basis.as_ref().map_or(d, |b| b.ncols())
    }

    fn embed(&self, z: &CVec) -> CVec {
        match &self.basis {
            Some(b) => b * z,
            None => z.clone(),
        }
    }

    fn pull_back(&self, g: &CVec) -> CVec {
        match &self.basis {
            Some(b) => b.adjoint() * g,
            None => g.clone(),
        }
    }
}

fn to_complex(x: &DVector<f64>) -> CVec {
    let m = x.len() / 2;
    CVec::from_fn(m, |k, _| Complex64::new(x[k], x[k + m]))
}

fn to_real(z: &CVec) -> DVector<f64> {
    let m = z.len();
    DVector::from_fn(2 * m, |k, _| if k < m { z[k].re } else { z[k - m].im })
}

/// Scale-invariant frame potential `f(Bz)/|z|^8` and its real gradient.
fn sphere_objective(param: &Param, x: &DVector<f64>) -> (f64, DVector<f64>) {
    let z = to_complex(x);
    let nn = z.norm_squared();
    let (f, g) = potential_and_gradient(&param.embed(&z));
    let gz = to_real(&param.pull_back(&g)) * 2.0;
    let value = f / nn.powi(4);
    let grad = gz / nn.powi(4) - x * (8.0 * f / nn.powi(5));
    (value, grad)
}

/// Residuals `|c_p|^2/|z|^4 - 1/(d+1)` for `p != 0` and their real Jacobian.
fn overlap_residuals(param: &Param, d: u64, x: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let z = to_complex(x);
    let nn = z.norm_squared();
    let v = param.embed(&z);
    let c = raw_overlaps(&v, &omega_table(d));
    let n = (d * d) as usize;
    let target = 1.0 / (d as f64 + 1.0);
    let mut r = DVector::zeros(n - 1);
    let mut jac = DMatrix::zeros(n - 1, x.len());
    for k in 1..n {
        let p = DisplacementIndex::from_linear(k, d);
        let c2 = c[k].norm_sqr();
        r[k - 1] = c2 / (nn * nn) - target;
        // d|c_p|^2 / d conj(v) = conj(c_p) D_p v + c_p D_{-p} v
        let wv = apply_displacement(p, &v) * c[k].conj() + apply_displacement(p.neg(), &v) * c[k];
        let row = to_real(&param.pull_back(&wv)) * (2.0 / (nn * nn)) - x * (4.0 * c2 / (nn * nn * nn));
        jac.row_mut(k - 1).copy_from(&row.transpose());
    }
    (r, jac)
}

/// Result of one restart.
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub index: usize,
    pub seed: u64,
    pub subspace: String,
    pub potential_gap: f64,
    pub report: Option<SicReport>,
    pub fiducial: Option<Fiducial>,
    pub iterations: usize,
}

fn normalize_real(x: &mut DVector<f64>) {
    let n = x.norm();
    if n > 0.0 {
        *x /= n;
    }
}

fn run_restart(d: u64, param: &Param, index: usize, opts: &SearchOptions) -> RestartOutcome {
    let seed = restart_seed(opts.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = param.dim(d as usize);
    let x0 = DVector::from_fn(2 * m, |_, _| StandardNormal.sample(&mut rng));
    let target = potential_minimum(d);

    let lb = LbfgsOptions { max_iters: opts.max_iters, f_target: target, f_tol: 1e-14, ..Default::default() };
    let out = optim::lbfgs(x0, |x| sphere_objective(param, x), normalize_real, &lb);
    let gap = out.value - target;
    let mut outcome = RestartOutcome {
        index,
        seed,
        subspace: param.label.clone(),
        potential_gap: gap,
        report: None,
        fiducial: None,
        iterations: out.iterations,
    };
    // Not in a SIC basin: polishing cannot help.
    if gap > 1e-6 {
        return outcome;
    }
    let lm = optim::levenberg_marquardt(out.x, |x| overlap_residuals(param, d, x), normalize_real, &LmOptions::default());
    outcome.iterations += lm.iterations;

    let mut v = param.embed(&to_complex(&lm.x));
    v /= Complex64::from(v.norm());
    linalg::canonical_phase_largest(&mut v);
    let Ok(mut fid) = Fiducial::new(d, v) else {
        return outcome;
    };
    let report = verify_sic(&fid, opts.tol);
    outcome.potential_gap = report.frame_potential - target;
    fid.metadata = FiducialMetadata {
        seed: Some(opts.seed),
        restart: Some(index),
        potential: Some(report.frame_potential),
        residual: Some(report.max_modulus_deviation),
        iterations: Some(outcome.iterations),
        subspace: Some(param.label.clone()),
        symmetry_tags: if param.zauner { vec!["zauner".to_string()] } else { Vec::new() },
    };
    outcome.report = Some(report);
    if report.is_sic {
        outcome.fiducial = Some(fid);
    }
    outcome
}

fn zauner_params(d: u64) -> Result<Vec<Param>> {
    let u = clifford::zauner(d)?;
    Ok(clifford::order3_eigenspaces(&u.matrix)
        .into_iter()
        .filter(|e: &Eigenspace| e.dim() >= 1)
        .map(|e| Param { label: format!("zauner:k={},dim={}", e.k, e.dim()), basis: Some(e.basis), zauner: true })
        .collect())
}

fn full_param() -> Param {
    Param { basis: None, label: "full".to_string(), zauner: false }
}

/// Runs restarts `first..first+count`, cycling through `params`, and returns
/// the best verified fiducial (smallest modulus deviation, then lowest
/// restart index) together with every outcome.
fn run_restarts(d: u64, params: &[Param], first: usize, count: usize, opts: &SearchOptions) -> (Option<Fiducial>, Vec<RestartOutcome>) {
    let mut all = Vec::new();
    let mut start = 0;
    while start < count {
        let len = WAVE.min(count - start);
        let wave = opts.exec.map(len, |k| {
            let index = first + start + k;
            run_restart(d, &params[(start + k) % params.len()], index, opts)
        });
        let best = wave
            .iter()
            .filter_map(|o| o.fiducial.as_ref().map(|f| (o.index, f)))
            .min_by(|a, b| {
                let ra = a.1.metadata.residual.unwrap_or(f64::INFINITY);
                let rb = b.1.metadata.residual.unwrap_or(f64::INFINITY);
                ra.total_cmp(&rb).then(a.0.cmp(&b.0))
            })
            .map(|(_, f)| f.clone());
        all.extend(wave);
        if best.is_some() {
            return (best, all);
        }
        start += len;
    }
    (None, all)
}

/// Searches for a SIC fiducial in dimension `d`.
///
/// Deterministic in `(d, opts)` apart from `opts.exec`, which only changes
/// the wall-clock time.
pub fn search_fiducial(d: u64, opts: &SearchOptions) -> Result<Fiducial> {
    search_fiducial_with_log(d, opts).0
}

/// As [`search_fiducial`], also returning every restart outcome.
pub fn search_fiducial_with_log(d: u64, opts: &SearchOptions) -> (Result<Fiducial>, Vec<RestartOutcome>) {
    if let Err(e) = check_odd(d) {
        return (Err(e), Vec::new());
    }
    if d > MAX_DIM {
        return (Err(Error::UnsupportedDimension(d)), Vec::new());
    }
    if opts.restarts == 0 || opts.tol.is_nan() || opts.tol <= 0.0 {
        return (Err(Error::InvalidOption("restarts must be positive and tol > 0".into())), Vec::new());
    }
    let restricted = match opts.subspace {
        Subspace::Full => false,
        Subspace::Zauner => true,
        Subspace::Auto => d >= 7,
    };
    let mut log = Vec::new();
    if restricted {
        let params = match zauner_params(d) {
            Ok(p) => p,
            Err(e) => return (Err(e), log),
        };
        let (found, outcomes) = run_restarts(d, &params, 0, opts.restarts, opts);
        log.extend(outcomes);
        if let Some(f) = found {
            return (Ok(f), log);
        }
    }
    let first = if restricted { opts.restarts } else { 0 };
    let (found, outcomes) = run_restarts(d, &[full_param()], first, opts.restarts, opts);
    log.extend(outcomes);
    match found {
        Some(f) => (Ok(f), log),
        None => {
            let best_gap = log.iter().map(|o| o.potential_gap).fold(f64::INFINITY, f64::min);
            (Err(Error::NotFound { restarts: log.len(), best_gap }), log)
        }
    }
}

/// Searches only inside the span of the orthonormal columns of `basis`, with
/// no fallback. `label` is recorded as the subspace in the metadata and
/// `tag` is appended to the symmetry tags of a found fiducial.
pub fn search_in_subspace(d: u64, basis: &CMat, tag: &str, opts: &SearchOptions) -> (Result<Fiducial>, Vec<RestartOutcome>) {
    if let Err(e) = check_odd(d) {
        return (Err(e), Vec::new());
    }
    if basis.nrows() != d as usize || basis.ncols() == 0 {
        return (Err(Error::DimensionMismatch { expected: d as usize, found: basis.nrows() }), Vec::new());
    }
    if opts.restarts == 0 || opts.tol.is_nan() || opts.tol <= 0.0 {
        return (Err(Error::InvalidOption("restarts must be positive and tol > 0".into())), Vec::new());
    }
    let param = Param { basis: Some(basis.clone()), label: format!("{tag}:dim={}", basis.ncols()), zauner: false };
    let (found, log) = run_restarts(d, &[param], 0, opts.restarts, opts);
    match found {
        Some(mut f) => {
            f.metadata.symmetry_tags.push(tag.to_string());
            (Ok(f), log)
        }
        None => {
            let best_gap = log.iter().map(|o| o.potential_gap).fold(f64::INFINITY, f64::min);
            (Err(Error::NotFound { restarts: log.len(), best_gap }), log)
        }
    }
}
