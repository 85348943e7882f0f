//! Equiangular tight frames built from SICs.
//!
//! A SIC in `C^d` lifts to `d^2` vectors in the symmetric subspace of
//! `C^d (x) C^d`, which form an ETF; its Naimark complement is an ETF of
//! `d^2` vectors in dimension `d(d-1)/2`. The same space reappears inside
//! `C^{d-2} (x) C^d` as a parity eigenspace, which is where a SIC one ladder
//! rung up is compared with the original through its restricted overlaps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{self, SymplecticMatrix};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, max_abs, root_of_unity, CMat, CVec, ONE};
use crate::sic::{self, Fiducial};
use crate::wh::{self, check_odd, tau_power, DisplacementIndex, TensorSplit};

/// Norm tolerance for family members.
pub const UNIT_TOL: f64 = 1e-9;

/// `N` unit vectors in `C^ambient_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtfFamily {
    pub ambient_dim: usize,
    pub count: usize,
    pub vectors: Vec<CVec>,
    /// Tight-frame constant `N/ambient_dim`.
    pub c1: f64,
    /// Welch value `(N - d)/(d(N - 1))` of the squared overlaps.
    pub c2: f64,
}

impl EtfFamily {
    pub fn new(ambient_dim: usize, vectors: Vec<CVec>) -> Result<Self> {
        if vectors.is_empty() || ambient_dim == 0 {
            return Err(Error::EmptyInput);
        }
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.len() });
            }
            let n2 = v.norm_squared();
            if (n2 - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotNormalized(n2));
            }
        }
        let count = vectors.len();
        let (n, d) = (count as f64, ambient_dim as f64);
        let c2 = if count > 1 { (n - d).max(0.0) / (d * (n - 1.0)) } else { 0.0 };
        Ok(Self { ambient_dim, count, vectors, c1: n / d, c2 })
    }

    /// Columns are the family vectors.
    pub fn synthesis(&self) -> CMat {
        CMat::from_columns(&self.vectors)
    }

    pub fn gram(&self) -> CMat {
        let v = self.synthesis();
        v.adjoint() * v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtfReport {
    pub ambient_dim: usize,
    pub count: usize,
    pub c1: f64,
    pub c2: f64,
    pub is_etf: bool,
    /// `max |sum |v><v| - c1 1|`.
    pub tight_residual: f64,
    /// `max - min` of off-diagonal `|Gram|^2`.
    pub equiangular_spread: f64,
    /// `max |(|Gram|^2 - c2)|` off the diagonal.
    pub c2_deviation: f64,
    pub tol: f64,
}

pub fn verify_etf(family: &EtfFamily, tol: f64) -> EtfReport {
    let v = family.synthesis();
    let n = family.ambient_dim;
    let frame = &v * v.adjoint() - CMat::identity(n, n) * Complex64::from(family.c1);
    let tight_residual = max_abs(&frame);
    let g = v.adjoint() * &v;
    let (mut lo, mut hi, mut dev) = (f64::INFINITY, 0.0f64, 0.0f64);
    for a in 0..family.count {
        for b in 0..family.count {
            if a != b {
                let m = g[(a, b)].norm_sqr();
                lo = lo.min(m);
                hi = hi.max(m);
                dev = dev.max((m - family.c2).abs());
            }
        }
    }
    let equiangular_spread = if family.count > 1 { hi - lo } else { 0.0 };
    EtfReport {
        ambient_dim: family.ambient_dim,
        count: family.count,
        c1: family.c1,
        c2: family.c2,
        is_etf: tight_residual < tol && dev < tol,
        tight_residual,
        equiangular_spread,
        c2_deviation: dev,
        tol,
    }
}

/// Position of `|(k,l)>` in the symmetric basis: `|kk>` first, then `k < l`
/// in lexicographic order. The pair vector is `(|kl> + |lk>)/sqrt 2`.
pub fn sym_index(k: u64, l: u64, d: u64) -> usize {
    let (k, l) = if k <= l { (k, l) } else { (l, k) };
    if k == l {
        return k as usize;
    }
    (d + k * (2 * d - k - 1) / 2 + (l - k - 1)) as usize
}

pub fn sym_dim(d: u64) -> usize {
    (d * (d + 1) / 2) as usize
}

/// Symmetric-basis coordinates of `phi (x) phi`.
pub fn sym_square(phi: &CVec) -> CVec {
    let d = phi.len() as u64;
    let mut out = CVec::zeros(sym_dim(d));
    let r2 = std::f64::consts::SQRT_2;
    for k in 0..d {
        out[sym_index(k, k, d)] = phi[k as usize] * phi[k as usize];
        for l in k + 1..d {
            out[sym_index(k, l, d)] = phi[k as usize] * phi[l as usize] * r2;
        }
    }
    out
}

/// `tau^{ij} (X (x) X)^i (Z^h (x) Z^h)^j` on the symmetric subspace, with
/// `h = (d+1)/2`.
pub fn lifted_displacement(p: DisplacementIndex) -> CMat {
    let d = p.d;
    let h = d.div_ceil(2);
    let n = sym_dim(d);
    let mut m = CMat::zeros(n, n);
    let pre = tau_power(d, (p.i * p.j) as i64);
    for a in 0..d {
        for b in a..d {
            let phase = pre * root_of_unity((h * p.j % d * ((a + b) % d)) as i64, d);
            m[(sym_index((a + p.i) % d, (b + p.i) % d, d), sym_index(a, b, d))] = phase;
        }
    }
    m
}

/// Permutation taking the symmetric basis to the block basis
/// `b_{k,s} = |(s - hk, s + hk)>`, `k = 0..(d-1)/2`, at position `k d + s`.
/// In the block basis every lifted displacement is `1 (x) D_p`.
pub fn block_permutation(d: u64) -> CMat {
    let h = d.div_ceil(2);
    let n = sym_dim(d);
    let mut w = CMat::zeros(n, n);
    for k in 0..=(d - 1) / 2 {
        for s in 0..d {
            let a = (s + d - h * k % d) % d;
            let b = (s + h * k) % d;
            w[((k * d + s) as usize, sym_index(a, b, d))] = ONE;
        }
    }
    w
}

/// A lifted family together with whether the input verified as a SIC.
#[derive(Debug, Clone)]
pub struct SymLift {
    pub family: EtfFamily,
    pub input_is_sic: bool,
}

/// Lifts the orbit of `psi` into the symmetric subspace.
///
/// Vector `p = (i, j)` is `tau^{ij} phi (x) phi` with `phi = X^i Z^{hj} psi`;
/// its overlap with vector `0` is `<psi|D_{(i, hj)}|psi>^2`.
pub fn sym_lift(psi: &Fiducial) -> Result<SymLift> {
    let d = psi.d;
    check_odd(d)?;
    let h = d.div_ceil(2);
    let input_is_sic = sic::verify_sic(psi, 1e-9).is_sic;
    let vectors = DisplacementIndex::all(d)
        .map(|p| {
            // X^i Z^{hj} = tau^{-i hj} D_{(i, hj)}
            let q = DisplacementIndex { i: p.i, j: h * p.j % d, d };
            let phi = wh::apply_displacement(q, &psi.vector) * tau_power(d, -((p.i * q.j) as i64));
            sym_square(&phi) * tau_power(d, (p.i * p.j) as i64)
        })
        .collect();
    Ok(SymLift { family: EtfFamily::new(sym_dim(d), vectors)?, input_is_sic })
}

/// Naimark complement: `N` vectors in dimension `N - m` whose synthesis rows
/// complete those of the input to a unitary.
///
/// The completion is an orthonormal basis of the range of `1 - M^dag M`
/// (`M` the normalised synthesis matrix) from pivoted Gram-Schmidt, each
/// basis vector with its first significant coordinate positive real.
pub fn naimark_complement(family: &EtfFamily) -> Result<EtfFamily> {
    let (n, m) = (family.count, family.ambient_dim);
    if n <= m {
        return Err(Error::NoComplement { count: n, dim: m });
    }
    let report = verify_etf(family, 1e-9);
    if report.tight_residual > 1e-9 {
        return Err(Error::NotTight(report.tight_residual));
    }
    let syn = family.synthesis() * Complex64::from((m as f64 / n as f64).sqrt());
    let proj = CMat::identity(n, n) - syn.adjoint() * &syn;
    let q = linalg::column_space_basis(&proj, 1e-6);
    if q.ncols() != n - m {
        return Err(Error::NotTight(report.tight_residual));
    }
    let scale = Complex64::from((n as f64 / (n - m) as f64).sqrt());
    let vectors = (0..n).map(|i| q.row(i).adjoint() * scale).collect();
    EtfFamily::new(n - m, vectors)
}

/// Coordinates in which a Weyl-Heisenberg covariant family is standard.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub d: u64,
    /// Number of copies of the `d`-dimensional representation.
    pub multiplicity: usize,
    /// Orthonormal columns `e_{a,s} = W_X^s f_a`, `a` major.
    pub basis: CMat,
    /// Vector `0` of the family in the new coordinates.
    pub fiducial: CVec,
    /// `max_{p,q} |W_q v_p - tau^{sigma(q,p)} v_{q+p}|`.
    pub covariance_residual: f64,
}

/// For a tight family indexed by `Z_d^2` (linear order) that is covariant
/// under some representation `W` with the Weyl-Heisenberg cocycle, builds
/// `W_q = (1/c1) sum_p tau^{sigma(q,p)} |v_{q+p}><v_p|` and a basis in which
/// `W_q = 1 (x) D_q`.
pub fn covariant_standard_form(family: &EtfFamily, d: u64) -> Result<StandardForm> {
    check_odd(d)?;
    if family.count != (d * d) as usize {
        return Err(Error::DimensionMismatch { expected: (d * d) as usize, found: family.count });
    }
    let n = family.ambient_dim;
    if !n.is_multiple_of(d as usize) {
        return Err(Error::NotCovariant(f64::INFINITY));
    }
    let rep = |q: DisplacementIndex| -> CMat {
        let mut w = CMat::zeros(n, n);
        for p in DisplacementIndex::all(d) {
            let sigma = wh::symplectic_form(q, p).expect("same d");
            let phase = tau_power(d, sigma as i64);
            w += &family.vectors[q.add(&p).linear()] * family.vectors[p.linear()].adjoint() * phase;
        }
        w / Complex64::from(family.c1)
    };
    let mut covariance_residual = 0.0f64;
    for q in DisplacementIndex::all(d) {
        let w = rep(q);
        for p in DisplacementIndex::all(d) {
            let sigma = wh::symplectic_form(q, p).expect("same d");
            let r = &w * &family.vectors[p.linear()] - &family.vectors[q.add(&p).linear()] * tau_power(d, sigma as i64);
            covariance_residual = covariance_residual.max(linalg::max_abs_vec(&r));
        }
    }
    if covariance_residual > 1e-8 {
        return Err(Error::NotCovariant(covariance_residual));
    }
    let wx = rep(DisplacementIndex { i: 1, j: 0, d });
    let wz = rep(DisplacementIndex { i: 0, j: 1, d });
    // projector onto the eigenvalue-1 space of W_Z
    let mut proj = CMat::zeros(n, n);
    let mut pw = CMat::identity(n, n);
    for _ in 0..d {
        proj += &pw;
        pw = &pw * &wz;
    }
    proj /= Complex64::from(d as f64);
    let f = linalg::column_space_basis(&proj, 1e-6);
    let multiplicity = f.ncols();
    if multiplicity * d as usize != n {
        return Err(Error::NotCovariant(covariance_residual));
    }
    let mut cols = Vec::with_capacity(n);
    for a in 0..multiplicity {
        let mut e = f.column(a).into_owned();
        for _ in 0..d {
            cols.push(e.clone());
            e = &wx * e;
        }
    }
    let basis = CMat::from_columns(&cols);
    let fiducial = basis.adjoint() * &family.vectors[0];
    Ok(StandardForm { d, multiplicity, basis, fiducial, covariance_residual })
}

/// Reads a family with multiplicity one as a fiducial in standard
/// coordinates.
pub fn family_fiducial(family: &EtfFamily, d: u64) -> Result<Fiducial> {
    let form = covariant_standard_form(family, d)?;
    if form.multiplicity != 1 {
        return Err(Error::DimensionMismatch { expected: d as usize, found: family.ambient_dim });
    }
    Fiducial::normalized(d, form.fiducial)
}

/// Parity operator `U_P (x) 1_d` on `C^{d-2} (x) C^d`.
pub fn split_parity(d: u64) -> Result<CMat> {
    check_odd(d)?;
    let m = d - 2;
    let up = if m == 1 { CMat::identity(1, 1) } else { wh::parity(m)? };
    Ok(linalg::kron(&up, &CMat::identity(d as usize, d as usize)))
}

/// The same operator in the standard basis of `C^{d(d-2)}`.
pub fn split_parity_standard(d: u64) -> Result<CMat> {
    let split = TensorSplit::new(d - 2, d)?;
    let w = split.permutation();
    Ok(w.adjoint() * split_parity(d)? * w)
}

/// Orthonormal basis of the `+1` eigenspace of [`split_parity_standard`],
/// of dimension `d(d-1)/2`.
pub fn parity_subspace(d: u64) -> Result<CMat> {
    let p = split_parity_standard(d)?;
    let n = p.nrows();
    let proj = (CMat::identity(n, n) + p) * Complex64::from(0.5);
    Ok(linalg::column_space_basis(&proj, 1e-9))
}

/// SIC search in dimension `d(d-2)` restricted to fiducials fixed by
/// `U_P (x) 1`.
pub fn search_parity_symmetric(d: u64, opts: &sic::SearchOptions) -> Result<Fiducial> {
    check_odd(d)?;
    if d < 5 {
        return Err(Error::InvalidOption(format!("d(d-2) must be at least 3, got d = {d}")));
    }
    sic::search_in_subspace(d * (d - 2), &parity_subspace(d)?, "parity", opts).0
}

/// Maps `C^{(d-1)/2} (x) C^d` (first factor major) isometrically onto the
/// `+1` eigenspace of `U_P (x) 1` in `C^{d-2} (x) C^d`, using the parity
/// eigenbasis `|0>`, `(|k> + |m-k>)/sqrt 2` of `C^m`, `m = d - 2`.
pub fn parity_eigenspace_embed(v: &CVec, d: u64) -> Result<CVec> {
    check_odd(d)?;
    let half = ((d - 1) / 2) as usize;
    let n = d as usize;
    if v.len() != half * n {
        return Err(Error::DimensionMismatch { expected: half * n, found: v.len() });
    }
    let m = (d - 2) as usize;
    let mut out = CVec::zeros(m * n);
    let r = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    for s in 0..n {
        out[s] = v[s];
        for k in 1..half {
            let z = v[k * n + s] * r;
            out[k * n + s] += z;
            out[(m - k) * n + s] += z;
        }
    }
    Ok(out)
}

/// Comparison of a SIC in dimension `d` with one in `d(d-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub d: u64,
    pub high_dim: u64,
    pub parity_symmetric: bool,
    /// `lambda` in `(U_P (x) 1) Psi = lambda Psi`.
    pub parity_eigenvalue: Complex64,
    pub parity_residual: f64,
    /// `max_{p != 0} |<Psi|1 (x) D_p|Psi> + e^{2i theta_{i,j'}}/(d-1)|`.
    pub squared_phase_residual: f64,
    /// Same comparison on unit-modulus phases only.
    pub phase_match_residual: f64,
    /// Largest SIC modulus deviation of `Psi` over all displacements of
    /// `C^{d(d-2)}`, when requested.
    pub full_sic_residual: Option<f64>,
}

/// Targets `-(c_{(i,hj)}/|c_{(i,hj)}|)^2/(d-1)` from the low SIC overlaps.
fn alignment_targets(low: &Fiducial) -> Result<Vec<Complex64>> {
    let d = low.d;
    let h = d.div_ceil(2);
    let table = sic::overlaps(low)?;
    Ok(DisplacementIndex::all(d)
        .map(|p| {
            let c = table.get(DisplacementIndex { i: p.i, j: h * p.j % d, d });
            let u = c / c.norm();
            -(u * u) / (d as f64 - 1.0)
        })
        .collect())
}

/// Restricted overlaps `<Psi|1 (x) D_p|Psi>` for `Psi` in tensor coordinates.
fn restricted_overlaps(psi: &CVec, d: u64) -> Vec<Complex64> {
    let n = d as usize;
    let m = psi.len() / n;
    DisplacementIndex::all(d)
        .map(|p| {
            let mut s = Complex64::default();
            for a in 0..m {
                let block = psi.rows(a * n, n).into_owned();
                s += block.dotc(&wh::apply_displacement(p, &block));
            }
            s
        })
        .collect()
}

fn compare(obs: &[Complex64], targets: &[Complex64]) -> (f64, f64) {
    let mut res = 0.0f64;
    let mut phase = 0.0f64;
    for (o, t) in obs.iter().zip(targets).skip(1) {
        res = res.max((o - t).norm());
        if o.norm() > 1e-10 {
            phase = phase.max((o / o.norm() - t / t.norm()).norm());
        } else {
            phase = phase.max(2.0);
        }
    }
    (res, phase)
}

fn check_pair(low: &Fiducial, high: &Fiducial) -> Result<TensorSplit> {
    let d = low.d;
    check_odd(d)?;
    if d < 3 || high.d != d * (d - 2) {
        return Err(Error::DimensionMismatch { expected: (d * (d.max(2) - 2)) as usize, found: high.d as usize });
    }
    TensorSplit::new(d - 2, d)
}

/// Checks the parity symmetry of `psi_high` and its restricted overlaps
/// against the squared overlap phases of `psi_low`.
///
/// `C^{d(d-2)}` is factored as `C^{d-2} (x) C^d` by [`TensorSplit`], the
/// `(d-2)` factor major.
pub fn alignment_check(psi_low: &Fiducial, psi_high: &Fiducial, full: bool) -> Result<AlignmentReport> {
    let split = check_pair(psi_low, psi_high)?;
    let d = psi_low.d;
    let psi = split.to_tensor(&psi_high.vector);
    let image = split_parity(d)? * &psi;
    let lambda = psi.dotc(&image);
    let parity_residual = (&image - &psi * lambda).norm();
    let (squared_phase_residual, phase_match_residual) = compare(&restricted_overlaps(&psi, d), &alignment_targets(psi_low)?);
    let full_sic_residual = full.then(|| sic::verify_sic(psi_high, 1.0).max_modulus_deviation);
    Ok(AlignmentReport {
        d,
        high_dim: psi_high.d,
        parity_symmetric: parity_residual < 1e-8,
        parity_eigenvalue: lambda,
        parity_residual,
        squared_phase_residual,
        phase_match_residual,
        full_sic_residual,
    })
}

/// Best alignment found by relabelling the `d` factor of the high fiducial.
#[derive(Debug, Clone)]
pub struct AlignmentScan {
    pub report: AlignmentReport,
    pub symplectic: SymplecticMatrix,
    pub shift: DisplacementIndex,
    /// Whether `Psi` was complex conjugated (in standard coordinates) first.
    pub conjugated: bool,
    /// The relabelled high fiducial, `(1 (x) D_q U_F) Psi` in standard
    /// coordinates.
    pub aligned: Fiducial,
    pub candidates: usize,
}

/// Scans `1 (x) D_q U_F` over all `F` in `SL(2, Z_d)` and all `q`, applied to
/// `Psi` and to its complex conjugate. Each candidate is again a SIC with the
/// parity symmetry. Keeps the smallest squared-phase residual, ties going to the
/// earliest candidate (unconjugated first).
pub fn alignment_scan(psi_low: &Fiducial, psi_high: &Fiducial, exec: Exec) -> Result<AlignmentScan> {
    let split = check_pair(psi_low, psi_high)?;
    let d = psi_low.d;
    let sources = [split.to_tensor(&psi_high.vector), split.to_tensor(&psi_high.vector.map(|z| z.conj()))];
    let targets = alignment_targets(psi_low)?;
    let group = clifford::enumerate_sl2(d)?;
    let unitaries = group.iter().map(|f| clifford::weil_representative(f).map(|u| u.matrix)).collect::<Result<Vec<_>>>()?;
    let m = (d - 2) as usize;
    let n = d as usize;
    let nq = n * n;
    let per_source = group.len() * nq;
    let total = 2 * per_source;
    let apply = |c: usize| -> CVec {
        let psi = &sources[c / per_source];
        let c = c % per_source;
        let (fi, qi) = (c / nq, c % nq);
        let q = DisplacementIndex::from_linear(qi, d);
        let mut out = CVec::zeros(m * n);
        for a in 0..m {
            let block = psi.rows(a * n, n).into_owned();
            let moved = wh::apply_displacement(q, &(&unitaries[fi] * block));
            out.rows_mut(a * n, n).copy_from(&moved);
        }
        out
    };
    let scores = exec.map(total, |c| compare(&restricted_overlaps(&apply(c), d), &targets).0);
    let best = (0..total).min_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b))).ok_or(Error::EmptyInput)?;
    let mut aligned = Fiducial::normalized(psi_high.d, split.from_tensor(&apply(best)))?;
    aligned.metadata = psi_high.metadata.clone();
    let report = alignment_check(psi_low, &aligned, false)?;
    Ok(AlignmentScan {
        report,
        symplectic: group[(best % per_source) / nq],
        shift: DisplacementIndex::from_linear(best % nq, d),
        conjugated: best >= per_source,
        aligned,
        candidates: total,
    })
}
