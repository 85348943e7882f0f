//! The Weyl-Heisenberg group in odd dimension `d`.
//!
//! Conventions: `Z|k> = w^k |k>`, `X|k> = |k+1>`, `w = exp(2 pi i/d)`,
//! `tau = -exp(pi i/d)` and `D_{i,j} = tau^{ij} X^i Z^j`. For odd `d`,
//! `tau = w^{(d+1)/2}`, so every phase is an exact power of `w` and is built
//! from a reduced rational angle.
//!
//! With these conventions the realised group law is
//! `D_p D_q = tau^{sigma(p,q)} D_{p+q}` with `sigma(p,q) = p_2 q_1 - p_1 q_2`,
//! and `D_p^dag = D_{-p}` exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::mod_inverse;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, max_abs, root_of_unity, CMat, CVec, ONE, ZERO};

/// Default tolerance for structural checks.
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Odd `d >= 3`.
pub fn check_odd(d: u64) -> Result<()> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::EvenOrSmallDimension(d));
    }
    Ok(())
}

/// A point `(i, j)` of `Z_d x Z_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DisplacementIndex {
    pub i: u64,
    pub j: u64,
    pub d: u64,
}

impl DisplacementIndex {
    /// Reduces `(i, j)` mod `d`. Fails for even or small `d`.
    pub fn new(i: i64, j: i64, d: u64) -> Result<Self> {
        check_odd(d)?;
        Ok(Self::reduced(i, j, d))
    }

    pub(crate) fn reduced(i: i64, j: i64, d: u64) -> Self {
        let n = d as i64;
        Self { i: i.rem_euclid(n) as u64, j: j.rem_euclid(n) as u64, d }
    }

    pub fn zero(d: u64) -> Self {
        Self { i: 0, j: 0, d }
    }

    pub fn is_zero(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    /// Row-major linear index `i*d + j`; the order used for overlap tables
    /// and orbits.
    pub fn linear(&self) -> usize {
        (self.i * self.d + self.j) as usize
    }

    pub fn from_linear(k: usize, d: u64) -> Self {
        Self { i: k as u64 / d, j: k as u64 % d, d }
    }

    /// All `d^2` indices in linear order.
    pub fn all(d: u64) -> impl Iterator<Item = Self> {
        (0..(d * d) as usize).map(move |k| Self::from_linear(k, d))
    }

    pub fn neg(&self) -> Self {
        Self::reduced(-(self.i as i64), -(self.j as i64), self.d)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::reduced((self.i + other.i) as i64, (self.j + other.j) as i64, self.d)
    }
}

/// `(w, tau)` for odd `d`.
pub fn roots(d: u64) -> Result<(Complex64, Complex64)> {
    check_odd(d)?;
    Ok((root_of_unity(1, d), tau_power(d, 1)))
}

/// `tau^k`, computed as `w^{k(d+1)/2}` with the exponent reduced mod `d`.
pub fn tau_power(d: u64, k: i64) -> Complex64 {
    let h = d.div_ceil(2) as i128;
    let e = (k as i128 * h).rem_euclid(d as i128) as i64;
    root_of_unity(e, d)
}

/// The shift `X` and clock `Z`.
pub fn clock_shift(d: u64) -> Result<(CMat, CMat)> {
    check_odd(d)?;
    let n = d as usize;
    let x = CMat::from_fn(n, n, |r, c| if r == (c + 1) % n { ONE } else { ZERO });
    let z = CMat::from_fn(n, n, |r, c| if r == c { root_of_unity(r as i64, d) } else { ZERO });
    Ok((x, z))
}

/// `D_p` as a dense matrix. Column `k` holds `tau^{ij + 2jk}` in row `k+i`.
pub fn displacement(p: DisplacementIndex) -> CMat {
    let n = p.d as usize;
    let mut m = CMat::zeros(n, n);
    for k in 0..n {
        let e = (p.i * p.j) as i64 + 2 * (p.j as i64) * (k as i64);
        m[((k + p.i as usize) % n, k)] = tau_power(p.d, e);
    }
    m
}

/// `D_p psi` without forming the matrix.
pub fn apply_displacement(p: DisplacementIndex, psi: &CVec) -> CVec {
    let n = p.d as usize;
    let mut out = CVec::zeros(n);
    for k in 0..n {
        let e = (p.i * p.j) as i64 + 2 * (p.j as i64) * (k as i64);
        out[(k + p.i as usize) % n] = tau_power(p.d, e) * psi[k];
    }
    out
}

/// `sigma(p, q) = p_2 q_1 - p_1 q_2 mod d`, the exponent in
/// `D_p D_q = tau^{sigma} D_{p+q}`.
pub fn symplectic_form(p: DisplacementIndex, q: DisplacementIndex) -> Result<u64> {
    if p.d != q.d {
        return Err(Error::DimensionMismatch { expected: p.d as usize, found: q.d as usize });
    }
    let d = p.d as i128;
    let s = (p.j as i128 * q.i as i128 - p.i as i128 * q.j as i128).rem_euclid(d);
    Ok(s as u64)
}

/// The parity operator `<i|U_P|j> = delta_{0, i+j}`.
pub fn parity(d: u64) -> Result<CMat> {
    check_odd(d)?;
    let n = d as usize;
    Ok(CMat::from_fn(n, n, |r, c| if (r + c) % n == 0 { ONE } else { ZERO }))
}

/// Phase-point operator `A_p = D_p U_P D_p^dag` and its projector
/// `(1 + A_p)/2` onto the `+1` eigenspace.
#[derive(Debug, Clone)]
pub struct PhasePointOperator {
    pub p: DisplacementIndex,
    pub matrix: CMat,
    pub projector: CMat,
}

pub fn phase_point(p: DisplacementIndex) -> Result<PhasePointOperator> {
    let up = parity(p.d)?;
    let dp = displacement(p);
    let matrix = &dp * up * dp.adjoint();
    let n = p.d as usize;
    let projector = (CMat::identity(n, n) + &matrix) * Complex64::from(0.5);
    Ok(PhasePointOperator { p, matrix, projector })
}

impl PhasePointOperator {
    /// Eigenvalues of `A_p`, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    /// Multiplicities of `+1` and `-1` in the spectrum, within `tol`.
    pub fn multiplicities(&self, tol: f64) -> (usize, usize) {
        let spec = self.spectrum();
        let plus = spec.iter().filter(|&&x| (x - 1.0).abs() < tol).count();
        let minus = spec.iter().filter(|&&x| (x + 1.0).abs() < tol).count();
        (plus, minus)
    }
}

/// `max |P^2 - P|` and `max |P - P^dag|`, whichever is larger.
pub fn projector_residual(p: &CMat) -> f64 {
    max_abs(&(p * p - p)).max(linalg::hermiticity_residual(p))
}

/// Squared chordal distance `Tr (P - Q)^2` between two projectors.
pub fn chordal_distance(p: &CMat, q: &CMat) -> Result<f64> {
    if p.shape() != q.shape() {
        return Err(Error::DimensionMismatch { expected: p.nrows(), found: q.nrows() });
    }
    for m in [p, q] {
        let r = projector_residual(m);
        if r > STRUCTURAL_TOL {
            return Err(Error::NotProjector(r));
        }
    }
    Ok(chordal_distance_unchecked(p, q))
}

/// For Hermitian inputs `Tr (P-Q)^2` is the squared Frobenius norm of `P-Q`.
fn chordal_distance_unchecked(p: &CMat, q: &CMat) -> f64 {
    (p - q).iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrassmannReport {
    pub d: u64,
    pub equidistant: bool,
    pub common_distance_sq: f64,
    pub max_deviation: f64,
}

/// Pairwise chordal distances among the `d^2` projectors `Pi_p`.
///
/// `common_distance_sq` is the mean over pairs; `max_deviation` the largest
/// distance from that mean.
pub fn grassmann_equidistance_check(d: u64, tol: f64, exec: Exec) -> Result<GrassmannReport> {
    check_odd(d)?;
    let projectors: Vec<CMat> = DisplacementIndex::all(d).map(|p| phase_point(p).map(|a| a.projector)).collect::<Result<_>>()?;
    let n = projectors.len();
    let rows: Vec<Vec<f64>> = exec.map(n, |a| ((a + 1)..n).map(|b| chordal_distance_unchecked(&projectors[a], &projectors[b])).collect());
    let all: Vec<f64> = rows.into_iter().flatten().collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let max_deviation = all.iter().fold(0.0f64, |m, x| m.max((x - mean).abs()));
    Ok(GrassmannReport { d, equidistant: max_deviation < tol, common_distance_sq: mean, max_deviation })
}

/// Residual of the group law `D_p D_q = tau^{sigma(p,q)} D_{p+q}`, maximised
/// over all `d^4` pairs.
pub fn group_law_residual(d: u64, exec: Exec) -> Result<f64> {
    check_odd(d)?;
    let ops: Vec<CMat> = DisplacementIndex::all(d).map(displacement).collect();
    let n = ops.len();
    Ok(exec.max(n, |a| {
        let p = DisplacementIndex::from_linear(a, d);
        (0..n).fold(0.0, |acc, b| {
            let q = DisplacementIndex::from_linear(b, d);
            let s = symplectic_form(p, q).expect("same d") as i64;
            let rhs = &ops[p.add(&q).linear()] * tau_power(d, s);
            acc.max(max_abs(&(&ops[a] * &ops[b] - rhs)))
        })
    }))
}

/// Residual of `Tr(D_p^dag D_q) = d delta_{pq}` over all pairs.
pub fn operator_basis_residual(d: u64, exec: Exec) -> Result<f64> {
    check_odd(d)?;
    let ops: Vec<CMat> = DisplacementIndex::all(d).map(displacement).collect();
    let n = ops.len();
    Ok(exec.max(n, |a| {
        (0..n).fold(0.0, |acc, b| {
            // Tr(A^dag B) = sum conj(A_rc) B_rc
            let t: Complex64 = ops[a].iter().zip(ops[b].iter()).map(|(x, y)| x.conj() * y).sum();
            let target = if a == b { d as f64 } else { 0.0 };
            acc.max((t - target).norm())
        })
    }))
}

/// Residual of `Tr(A_p A_q) = d delta_{pq}` over all pairs.
pub fn phase_point_orthogonality_residual(d: u64, exec: Exec) -> Result<f64> {
    let ops: Vec<CMat> = DisplacementIndex::all(d).map(|p| phase_point(p).map(|a| a.matrix)).collect::<Result<_>>()?;
    let n = ops.len();
    Ok(exec.max(n, |a| {
        (0..n).fold(0.0, |acc, b| {
            let t = linalg::trace(&(&ops[a] * &ops[b]));
            let target = if a == b { d as f64 } else { 0.0 };
            acc.max((t - target).norm())
        })
    }))
}

/// Identification `C^d = C^{m1} (x) C^{m2}` for coprime `d = m1 m2`,
/// sending `|k>` to `|k mod m1>|k mod m2>` (`m1` factor major).
///
/// Under this basis change `X_d -> X (x) X` and `Z_d -> Z^{e1} (x) Z^{e2}`
/// with `e1 = m2^{-1} mod m1`, `e2 = m1^{-1} mod m2`, and
/// `D_{(i,j)} -> D_{(i, e1 j)} (x) D_{(i, e2 j)}` with no extra phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSplit {
    pub d: u64,
    pub m1: u64,
    pub m2: u64,
    e1: u64,
    e2: u64,
}

impl TensorSplit {
    pub fn new(m1: u64, m2: u64) -> Result<Self> {
        if m1 == 0 || m2 == 0 || m1.is_multiple_of(2) || m2.is_multiple_of(2) {
            return Err(Error::InvalidOption(format!("odd factors required, got {m1} x {m2}")));
        }
        let e1 =
            if m1 == 1 { 0 } else { mod_inverse(m2, m1).ok_or_else(|| Error::InvalidOption(format!("{m1} and {m2} are not coprime")))? };
        let e2 =
            if m2 == 1 { 0 } else { mod_inverse(m1, m2).ok_or_else(|| Error::InvalidOption(format!("{m1} and {m2} are not coprime")))? };
        Ok(Self { d: m1 * m2, m1, m2, e1, e2 })
    }

    /// Position of standard basis vector `|k>` in the tensor basis.
    pub fn tensor_position(&self, k: u64) -> usize {
        ((k % self.m1) * self.m2 + k % self.m2) as usize
    }

    /// Re-expresses a standard-basis vector in the tensor basis.
    pub fn to_tensor(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(v.len());
        for k in 0..self.d {
            out[self.tensor_position(k)] = v[k as usize];
        }
        out
    }

    pub fn from_tensor(&self, v: &CVec) -> CVec {
        CVec::from_fn(self.d as usize, |k, _| v[self.tensor_position(k as u64)])
    }

    /// The permutation matrix `W` with `W |k> = |k mod m1, k mod m2>`.
    pub fn permutation(&self) -> CMat {
        let n = self.d as usize;
        let mut w = CMat::zeros(n, n);
        for k in 0..self.d {
            w[(self.tensor_position(k), k as usize)] = ONE;
        }
        w
    }

    /// Image of a displacement index of `H(d)` in `H(m1) x H(m2)`.
    /// Factors of size 1 are represented by index `(0, 0)` with `d = 1`.
    pub fn split_index(&self, p: DisplacementIndex) -> ((u64, u64), (u64, u64)) {
        ((p.i % self.m1, (self.e1 * p.j) % self.m1), (p.i % self.m2, (self.e2 * p.j) % self.m2))
    }
}

/// Displacement operator for a factor that may be trivial (`m = 1`).
pub fn displacement_any(i: u64, j: u64, m: u64) -> CMat {
    if m == 1 {
        return CMat::identity(1, 1);
    }
    displacement(DisplacementIndex { i, j, d: m })
}

/// Residual of `W D_p W^dag = D_{p1} (x) D_{p2}` over all `p`.
pub fn tensor_split_residual(split: &TensorSplit) -> f64 {
    let w = split.permutation();
    DisplacementIndex::all(split.d).fold(0.0, |acc, p| {
        let ((i1, j1), (i2, j2)) = split.split_index(p);
        let lhs = &w * displacement(p) * w.adjoint();
        let rhs = linalg::kron(&displacement_any(i1, j1, split.m1), &displacement_any(i2, j2, split.m2));
        acc.max(max_abs(&(lhs - rhs)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_power, unitarity_residual};

    fn idx(i: i64, j: i64, d: u64) -> DisplacementIndex {
        DisplacementIndex::new(i, j, d).unwrap()
    }

    #[test]
    fn root_properties() {
        let (_, tau) = roots(3).unwrap();
        assert!((tau * tau * tau - ONE).norm() < 1e-15);
        assert_eq!(tau_power(3, 3), ONE);
        let (w, tau) = roots(5).unwrap();
        assert!((w.powu(5) - ONE).norm() < 1e-14);
        assert!((tau * tau - w).norm() < 1e-15);
        let (_, tau) = roots(7).unwrap();
        let expect = -Complex64::from_polar(1.0, std::f64::consts::PI / 7.0);
        assert!((tau - expect).norm() < 1e-15);
        assert!((tau.norm() - 1.0).abs() < 1e-15);
        assert_eq!(roots(4), Err(Error::EvenOrSmallDimension(4)));
        assert_eq!(roots(1), Err(Error::EvenOrSmallDimension(1)));
    }

    #[test]
    fn tau_phases_do_not_drift_at_large_d() {
        let d = 199;
        let (_, tau) = roots(d).unwrap();
        let mut acc = ONE;
        for k in 1..=(3 * d as i64) {
            acc *= tau;
            assert!((acc - tau_power(d, k)).norm() < 1e-12);
        }
        assert!((tau_power(d, d as i64) - ONE).norm() < 1e-14);
    }

    #[test]
    fn clock_and_shift() {
        let (x, z) = clock_shift(3).unwrap();
        let (w, _) = roots(3).unwrap();
        assert_eq!(z[(0, 0)], ONE);
        assert!((z[(1, 1)] - w).norm() < 1e-15);
        assert!((z[(2, 2)] - w * w).norm() < 1e-15);
        // X e_2 = e_0
        assert_eq!(x[(0, 2)], ONE);

        let (x, z) = clock_shift(5).unwrap();
        let (w, _) = roots(5).unwrap();
        assert!(max_abs(&(&z * &x - &x * &z * w)) < 1e-12);
        assert!(max_abs(&(matrix_power(&x, 5) - CMat::identity(5, 5))) < 1e-12);
        assert!(max_abs(&(matrix_power(&z, 5) - CMat::identity(5, 5))) < 1e-12);
    }

    #[test]
    fn displacement_examples() {
        assert_eq!(displacement(idx(0, 0, 5)), CMat::identity(5, 5));
        let (x, z) = clock_shift(3).unwrap();
        assert_eq!(displacement(idx(1, 0, 3)), x);
        let (_, tau) = roots(3).unwrap();
        assert!(max_abs(&(displacement(idx(1, 1, 3)) - &x * &z * tau)) < 1e-15);
        for d in [3u64, 5, 9] {
            for p in DisplacementIndex::all(d) {
                let dp = displacement(p);
                assert!(unitarity_residual(&dp) < 1e-13);
                assert!(max_abs(&(dp.adjoint() - displacement(p.neg()))) < 1e-13);
                let (x, z) = clock_shift(d).unwrap();
                let naive = matrix_power(&x, p.i as u32) * matrix_power(&z, p.j as u32) * tau_power(d, (p.i * p.j) as i64);
                assert!(max_abs(&(dp - naive)) < 1e-12);
            }
        }
    }

    #[test]
    fn apply_matches_matrix() {
        let psi = CVec::from_fn(7, |k, _| Complex64::new(k as f64, 1.0 / (k as f64 + 1.0)));
        for p in DisplacementIndex::all(7) {
            let a = apply_displacement(p, &psi);
            let b = displacement(p) * &psi;
            assert!(linalg::max_abs_vec(&(a - b)) < 1e-13);
        }
    }

    #[test]
    fn symplectic_form_is_antisymmetric() {
        for p in DisplacementIndex::all(5) {
            assert_eq!(symplectic_form(p, p).unwrap(), 0);
        }
        for p in DisplacementIndex::all(7) {
            for q in DisplacementIndex::all(7) {
                let a = symplectic_form(p, q).unwrap();
                let b = symplectic_form(q, p).unwrap();
                assert_eq!((a + b) % 7, 0);
            }
        }
        assert!(symplectic_form(idx(1, 0, 3), idx(1, 0, 5)).is_err());
    }

    #[test]
    fn group_law_exhaustive_small() {
        for d in [3u64, 5, 7, 9] {
            assert!(group_law_residual(d, Exec::Parallel).unwrap() < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn operator_basis() {
        for d in [3u64, 5, 7] {
            assert!(operator_basis_residual(d, Exec::Parallel).unwrap() < 1e-12);
        }
    }

    #[test]
    fn parity_examples() {
        let up = parity(3).unwrap();
        assert_eq!(up[(2, 1)], ONE);
        assert_eq!(up[(1, 2)], ONE);
        assert_eq!(up[(0, 0)], ONE);
        let up = parity(5).unwrap();
        assert_eq!(&up * &up, CMat::identity(5, 5));
        let (x, z) = clock_shift(5).unwrap();
        assert!(max_abs(&(&up * &x * &up - x.adjoint())) < 1e-15);
        assert!(max_abs(&(&up * &z * &up - z.adjoint())) < 1e-15);
        let up = parity(7).unwrap();
        let p = idx(1, 2, 7);
        assert!(max_abs(&(&up * displacement(p) * &up - displacement(p.neg()))) < 1e-13);
        assert!(parity(6).is_err());
    }

    #[test]
    fn phase_points() {
        assert_eq!(phase_point(idx(0, 0, 5)).unwrap().matrix, parity(5).unwrap());
        for d in [3u64, 5, 7] {
            for p in DisplacementIndex::all(d) {
                let a = phase_point(p).unwrap();
                assert!((linalg::trace(&a.matrix) - ONE).norm() < 1e-12);
                assert!(linalg::hermiticity_residual(&a.matrix) < 1e-13);
                assert!(max_abs(&(&a.matrix * &a.matrix - CMat::identity(d as usize, d as usize))) < 1e-12);
                let (plus, minus) = a.multiplicities(1e-9);
                assert_eq!((plus, minus), (d.div_ceil(2) as usize, ((d - 1) / 2) as usize));
                let up = parity(d).unwrap();
                let mirrored = phase_point(p.neg()).unwrap();
                assert!(max_abs(&(&up * &a.projector * &up - &mirrored.projector)) < 1e-12);
            }
        }
        for d in [3u64, 5, 7] {
            assert!(phase_point_orthogonality_residual(d, Exec::Parallel).unwrap() < 1e-11);
        }
    }

    #[test]
    fn chordal_examples() {
        let a = phase_point(idx(1, 2, 3)).unwrap().projector;
        assert!(chordal_distance(&a, &a).unwrap().abs() < 1e-14);
        let b = phase_point(idx(0, 1, 3)).unwrap().projector;
        assert!((chordal_distance(&a, &b).unwrap() - 1.5).abs() < 1e-12);
        let e0 = CMat::from_fn(2, 2, |r, c| if r == 0 && c == 0 { ONE } else { ZERO });
        let e1 = CMat::from_fn(2, 2, |r, c| if r == 1 && c == 1 { ONE } else { ZERO });
        assert!((chordal_distance(&e0, &e1).unwrap() - 2.0).abs() < 1e-15);
        let not_proj = CMat::identity(2, 2) * Complex64::from(0.5);
        assert!(matches!(chordal_distance(&not_proj, &e0), Err(Error::NotProjector(_))));
        assert!(chordal_distance(&e0, &a).is_err());
    }

    #[test]
    fn grassmann_multiplets() {
        for (d, expect) in [(3u64, 1.5), (5, 2.5), (7, 3.5)] {
            let r = grassmann_equidistance_check(d, 1e-10, Exec::Parallel).unwrap();
            assert!(r.equidistant, "{r:?}");
            assert!((r.common_distance_sq - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn crt_tensor_split_of_fifteen() {
        let s = TensorSplit::new(3, 5).unwrap();
        assert!(tensor_split_residual(&s) < 1e-12);
        // the index map is a bijection onto Z_3^2 x Z_5^2
        let mut seen = std::collections::HashSet::new();
        for p in DisplacementIndex::all(15) {
            assert!(seen.insert(s.split_index(p)));
        }
        assert_eq!(seen.len(), 225);
        let v = CVec::from_fn(15, |k, _| Complex64::from(k as f64));
        assert_eq!(s.from_tensor(&s.to_tensor(&v)), v);
        assert!(TensorSplit::new(3, 9).is_err());
        let trivial = TensorSplit::new(1, 3).unwrap();
        assert!(tensor_split_residual(&trivial) < 1e-14);
    }
}
