//! `SL(2, Z_d)` and its unitary representatives.
//!
//! A symplectic matrix `F` acts on displacement indices as column vectors,
//! `F (i, j) = (alpha i + beta j, gamma i + delta j)`, and its representative
//! satisfies `U_F D_p U_F^dag = D_{Fp}`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, mod_inverse};
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, CMat};
use crate::wh::{check_odd, displacement, tau_power, DisplacementIndex};

/// Tolerance above which a constructed representative is rejected.
pub const CONSTRUCTION_TOL: f64 = 1e-9;

/// `[[alpha, beta], [gamma, delta]]` mod `d` with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    pub alpha: u64,
    pub beta: u64,
    pub gamma: u64,
    pub delta: u64,
    pub d: u64,
}

impl SymplecticMatrix {
    pub fn new(alpha: i64, beta: i64, gamma: i64, delta: i64, d: u64) -> Result<Self> {
        check_odd(d)?;
        let r = |x: i64| x.rem_euclid(d as i64) as u64;
        let f = Self { alpha: r(alpha), beta: r(beta), gamma: r(gamma), delta: r(delta), d };
        if f.det() != 1 {
            return Err(Error::NotSymplectic { alpha: f.alpha, beta: f.beta, gamma: f.gamma, delta: f.delta, d });
        }
        Ok(f)
    }

    fn det(&self) -> u64 {
        let d = self.d as i128;
        let v = self.alpha as i128 * self.delta as i128 - self.beta as i128 * self.gamma as i128;
        v.rem_euclid(d) as u64
    }

    pub fn identity(d: u64) -> Result<Self> {
        Self::new(1, 0, 0, 1, d)
    }

    pub fn minus_identity(d: u64) -> Result<Self> {
        Self::new(-1, 0, 0, -1, d)
    }

    /// The Zauner element `[[0, -1], [1, -1]]`.
    pub fn zauner(d: u64) -> Result<Self> {
        Self::new(0, -1, 1, -1, d)
    }

    pub fn is_identity(&self) -> bool {
        self.alpha == 1 && self.beta == 0 && self.gamma == 0 && self.delta == 1
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d as usize, found: other.d as usize });
        }
        let d = self.d as u128;
        let m = |a: u64, b: u64, c: u64, e: u64| ((a as u128 * b as u128 + c as u128 * e as u128) % d) as u64;
        Ok(Self {
            alpha: m(self.alpha, other.alpha, self.beta, other.gamma),
            beta: m(self.alpha, other.beta, self.beta, other.delta),
            gamma: m(self.gamma, other.alpha, self.delta, other.gamma),
            delta: m(self.gamma, other.beta, self.delta, other.delta),
            d: self.d,
        })
    }

    pub fn inverse(&self) -> Self {
        let d = self.d;
        Self { alpha: self.delta, beta: (d - self.beta) % d, gamma: (d - self.gamma) % d, delta: self.alpha, d }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self { alpha: 1, beta: 0, gamma: 0, delta: 1, d: self.d };
        for _ in 0..k {
            acc = acc.multiply(self).expect("same d");
        }
        acc
    }

    /// `F p`.
    pub fn apply(&self, p: DisplacementIndex) -> DisplacementIndex {
        let d = self.d as u128;
        DisplacementIndex {
            i: ((self.alpha as u128 * p.i as u128 + self.beta as u128 * p.j as u128) % d) as u64,
            j: ((self.gamma as u128 * p.i as u128 + self.delta as u128 * p.j as u128) % d) as u64,
            d: self.d,
        }
    }

    /// Uniform sample from `SL(2, Z_d)` by rejection.
    pub fn random<R: Rng + ?Sized>(d: u64, rng: &mut R) -> Result<Self> {
        check_odd(d)?;
        loop {
            let c = [0; 4].map(|_: u8| rng.random_range(0..d) as i64);
            if let Ok(f) = Self::new(c[0], c[1], c[2], c[3], d) {
                return Ok(f);
            }
        }
    }
}

/// Least `k >= 1` with `F^k = 1`.
pub fn element_order(f: &SymplecticMatrix) -> u64 {
    let bound = f.d.pow(3);
    let mut acc = *f;
    for k in 1..=bound {
        if acc.is_identity() {
            return k;
        }
        acc = acc.multiply(f).expect("same d");
    }
    unreachable!("element order exceeds |SL(2, Z_d)|")
}

/// All of `SL(2, Z_d)`.
pub fn enumerate_sl2(d: u64) -> Result<Vec<SymplecticMatrix>> {
    check_odd(d)?;
    let n = d as i64;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    if let Ok(f) = SymplecticMatrix::new(a, b, c, e, d) {
                        out.push(f);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorGroupReport {
    pub d: u64,
    pub group_order: usize,
    pub quotient_order: usize,
    /// Order of the polyhedral group expected for `SL(2, Z_d)/{+-1}`.
    pub expected_quotient: usize,
    /// Largest element order found.
    pub max_element_order: u64,
    pub ok: bool,
}

/// Checks `|SL(2,Z_3)/+-1| = 12` (tetrahedral) and `|SL(2,Z_5)/+-1| = 60`
/// (icosahedral) by enumeration.
pub fn factor_group_order_check(d: u64) -> Result<FactorGroupReport> {
    let expected_quotient = match d {
        3 => 12,
        5 => 60,
        _ => return Err(Error::UnsupportedDimension(d)),
    };
    let group = enumerate_sl2(d)?;
    let group_order = group.len();
    let quotient_order = group_order / 2;
    let orders: Vec<u64> = group.iter().map(element_order).collect();
    let max_element_order = orders.iter().copied().max().unwrap_or(1);
    let ok = quotient_order == expected_quotient && orders.iter().all(|&k| (group_order as u64).is_multiple_of(k));
    Ok(FactorGroupReport { d, group_order, quotient_order, expected_quotient, max_element_order, ok })
}

/// How the free global phase of a representative was fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// First nonzero entry in a row-major scan is positive real.
    FirstEntryReal,
    /// Rescaled by a cube root so that `U^3 = 1`.
    CubeRootOfUnity,
}

#[derive(Debug, Clone)]
pub struct CliffordUnitary {
    pub f: SymplecticMatrix,
    pub matrix: CMat,
    pub phase_convention: PhaseConvention,
}

/// Gauss-sum representative for invertible `beta`:
/// `<u|U|v> = tau^{beta^{-1}(alpha v^2 - 2uv + delta u^2)} / sqrt(d)`.
fn gauss_representative(f: &SymplecticMatrix, beta_inv: u64) -> CMat {
    let d = f.d;
    let n = d as usize;
    let scale = Complex64::from(1.0 / (d as f64).sqrt());
    let di = d as i128;
    CMat::from_fn(n, n, |u, v| {
        let (u, v) = (u as i128, v as i128);
        let q = (f.alpha as i128 * v * v - 2 * u * v + f.delta as i128 * u * u).rem_euclid(di);
        let e = (beta_inv as i128 * q).rem_euclid(di) as i64;
        tau_power(d, e) * scale
    })
}

fn unnormalised_representative(f: &SymplecticMatrix) -> Result<CMat> {
    if let Some(beta_inv) = mod_inverse(f.beta, f.d) {
        return Ok(gauss_representative(f, beta_inv));
    }
    // F = F1 F2 with F1 = [[0,-1],[1,-k]] and beta(F2) = delta - k beta a unit.
    let d = f.d;
    let k = (0..d)
        .find(|&k| {
            let b2 = (f.delta as i128 - k as i128 * f.beta as i128).rem_euclid(d as i128) as u64;
            gcd(b2, d) == 1
        })
        .expect("some shear makes beta invertible for odd d");
    let f1 = SymplecticMatrix::new(0, -1, 1, -(k as i64), d)?;
    let f2 = f1.inverse().multiply(f)?;
    let u1 = gauss_representative(&f1, mod_inverse(f1.beta, d).expect("beta = -1"));
    let u2 = gauss_representative(&f2, mod_inverse(f2.beta, d).expect("chosen invertible"));
    Ok(u1 * u2)
}

fn first_entry_real(m: &mut CMat) {
    let (rows, cols) = m.shape();
    for r in 0..rows {
        for c in 0..cols {
            let z = m[(r, c)];
            if z.norm() > 1e-9 {
                let rot = z.conj() / z.norm();
                m.iter_mut().for_each(|x| *x *= rot);
                return;
            }
        }
    }
}

/// `max_p |U D_p U^dag - D_{Fp}|` over all `d^2` indices.
pub fn defining_relation_residual(u: &CMat, f: &SymplecticMatrix) -> f64 {
    let ud = u.adjoint();
    DisplacementIndex::all(f.d).fold(0.0, |acc, p| acc.max(max_abs(&(u * displacement(p) * &ud - displacement(f.apply(p))))))
}

/// The defining relation on the generators `X = D_{(1,0)}` and `Z = D_{(0,1)}`
/// only; this implies it for every `p` because `F` preserves the group law.
fn generator_residual(u: &CMat, f: &SymplecticMatrix) -> f64 {
    let ud = u.adjoint();
    [(1, 0), (0, 1)]
        .into_iter()
        .map(|(i, j)| DisplacementIndex { i, j, d: f.d })
        .fold(0.0, |acc, p| acc.max(max_abs(&(u * displacement(p) * &ud - displacement(f.apply(p))))))
}

/// Unitary representative `U_F`, phase fixed so the first nonzero entry is
/// positive real.
pub fn weil_representative(f: &SymplecticMatrix) -> Result<CliffordUnitary> {
    let mut matrix = unnormalised_representative(f)?;
    first_entry_real(&mut matrix);
    let residual = generator_residual(&matrix, f).max(linalg::unitarity_residual(&matrix));
    if residual > CONSTRUCTION_TOL {
        return Err(Error::CliffordConstruction(residual));
    }
    Ok(CliffordUnitary { f: *f, matrix, phase_convention: PhaseConvention::FirstEntryReal })
}

/// Representative of the Zauner element, rescaled so that `U^3 = 1`.
///
/// Of the three cube roots of the scalar `U^3`, the one with the smallest
/// absolute principal argument is divided out.
pub fn zauner(d: u64) -> Result<CliffordUnitary> {
    let f = SymplecticMatrix::zauner(d)?;
    let mut u = weil_representative(&f)?;
    let cube = linalg::matrix_power(&u.matrix, 3);
    let c = cube[(0, 0)];
    let base = Complex64::from_polar(1.0, c.arg() / 3.0);
    let root =
        (0..3).map(|k| base * linalg::root_of_unity(k, 3)).min_by(|a, b| a.arg().abs().total_cmp(&b.arg().abs())).expect("three roots");
    u.matrix /= root;
    u.phase_convention = PhaseConvention::CubeRootOfUnity;
    Ok(u)
}

/// An eigenspace of an order-3 unitary.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    /// `k` such that the eigenvalue is `exp(2 pi i k/3)`.
    pub k: u32,
    pub eigenvalue: Complex64,
    /// Orthonormal basis as columns.
    pub basis: CMat,
}

impl Eigenspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Eigenspaces of a unitary with `U^3 = 1`, from the projectors
/// `P_k = (1 + w3^{-k} U + w3^{-2k} U^2)/3`. Sorted by dimension, largest
/// first; ties keep increasing `k`. Empty eigenspaces are dropped.
pub fn order3_eigenspaces(u: &CMat) -> Vec<Eigenspace> {
    let n = u.nrows();
    let u2 = u * u;
    let mut spaces: Vec<Eigenspace> = (0..3u32)
        .map(|k| {
            let w = linalg::root_of_unity(-(k as i64), 3);
            let p = (CMat::identity(n, n) + u * w + &u2 * (w * w)) / Complex64::from(3.0);
            Eigenspace { k, eigenvalue: linalg::root_of_unity(k as i64, 3), basis: linalg::column_space_basis(&p, 1e-8) }
        })
        .filter(|e| e.dim() > 0)
        .collect();
    spaces.sort_by(|a, b| b.dim().cmp(&a.dim()).then(a.k.cmp(&b.k)));
    spaces
}

/// Largest distance of `arg(z) d / pi` from an integer over the entries of
/// `u` with modulus above `1e-9`.
pub fn cyclotomic_phase_residual(u: &CMat, d: u64) -> f64 {
    u.iter()
        .filter(|z| z.norm() > 1e-9)
        .map(|z| {
            let x = z.arg() * d as f64 / std::f64::consts::PI;
            (x - x.round()).abs()
        })
        .fold(0.0, f64::max)
}

/// Residual of `U_F U_G U_{FG}^dag` being a scalar: its distance from
/// `c 1` with `c` its `(0,0)` entry.
pub fn representation_residual(f: &SymplecticMatrix, g: &SymplecticMatrix) -> Result<f64> {
    let uf = weil_representative(f)?;
    let ug = weil_representative(g)?;
    let ufg = weil_representative(&f.multiply(g)?)?;
    let m = uf.matrix * ug.matrix * ufg.matrix.adjoint();
    let c = m[(0, 0)];
    let n = m.nrows();
    Ok(max_abs(&(m - CMat::identity(n, n) * c)).max((c.norm() - 1.0).abs()))
}

/// `max |U - c V|` minimised over unit `c` (taken from the largest entry of `V`).
pub fn equal_up_to_phase(u: &CMat, v: &CMat) -> f64 {
    let (mut best, mut at) = (0.0, (0, 0));
    for r in 0..v.nrows() {
        for c in 0..v.ncols() {
            if v[(r, c)].norm() > best {
                best = v[(r, c)].norm();
                at = (r, c);
            }
        }
    }
    let ratio = u[at] / v[at];
    let c = ratio / ratio.norm();
    max_abs(&(u - v * c))
}

pub fn parity_representative(d: u64) -> Result<CliffordUnitary> {
    weil_representative(&SymplecticMatrix::minus_identity(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wh;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn multiply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = SymplecticMatrix::random(7, &mut rng).unwrap();
        assert!(f.multiply(&f.inverse()).unwrap().is_identity());
        let z = SymplecticMatrix::zauner(3).unwrap();
        let z2 = z.multiply(&z).unwrap();
        assert_eq!((z2.alpha, z2.beta, z2.gamma, z2.delta), (2, 1, 2, 0));
        for _ in 0..100 {
            let a = SymplecticMatrix::random(5, &mut rng).unwrap();
            let b = SymplecticMatrix::random(5, &mut rng).unwrap();
            assert_eq!(a.multiply(&b).unwrap().det(), 1);
        }
        let other = SymplecticMatrix::identity(5).unwrap();
        assert!(f.multiply(&other).is_err());
        assert!(SymplecticMatrix::new(1, 1, 1, 1, 5).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(element_order(&SymplecticMatrix::identity(5).unwrap()), 1);
        assert_eq!(element_order(&SymplecticMatrix::minus_identity(5).unwrap()), 2);
        assert_eq!(element_order(&SymplecticMatrix::zauner(7).unwrap()), 3);
        for d in (3..=51).step_by(2) {
            let z = SymplecticMatrix::zauner(d).unwrap();
            assert_eq!(element_order(&z), 3, "d = {d}");
            assert!(z.pow(3).is_identity());
        }
    }

    #[test]
    fn polyhedral_quotients() {
        let t = factor_group_order_check(3).unwrap();
        assert_eq!((t.group_order, t.quotient_order), (24, 12));
        assert!(t.ok);
        let group = enumerate_sl2(3).unwrap();
        assert!(group.iter().all(|f| 12 % element_order(f) == 0));
        let i = factor_group_order_check(5).unwrap();
        assert_eq!((i.group_order, i.quotient_order), (120, 60));
        assert!(i.ok);
        assert_eq!(factor_group_order_check(7), Err(Error::UnsupportedDimension(7)));
    }

    #[test]
    fn identity_and_parity_representatives() {
        let u = weil_representative(&SymplecticMatrix::identity(5).unwrap()).unwrap();
        assert!(max_abs(&(u.matrix - CMat::identity(5, 5))) < 1e-12);
        let u = parity_representative(5).unwrap();
        assert!(equal_up_to_phase(&u.matrix, &wh::parity(5).unwrap()) < 1e-12);
    }

    #[test]
    fn lower_shear_is_diagonal() {
        let f = SymplecticMatrix::new(1, 0, 1, 1, 3).unwrap();
        let u = weil_representative(&f).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    assert!(u.matrix[(r, c)].norm() < 1e-12);
                }
            }
        }
        assert!(defining_relation_residual(&u.matrix, &f) < 1e-12);
    }

    #[test]
    fn defining_relation_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [3u64, 5, 7, 9, 15] {
            for _ in 0..10 {
                let f = SymplecticMatrix::random(d, &mut rng).unwrap();
                let u = weil_representative(&f).unwrap();
                assert!(defining_relation_residual(&u.matrix, &f) < 1e-10, "d = {d}, {f:?}");
            }
        }
        // non-invertible beta, composite d
        let f = SymplecticMatrix::new(1, 3, 0, 1, 15).unwrap();
        let u = weil_representative(&f).unwrap();
        assert!(defining_relation_residual(&u.matrix, &f) < 1e-10);
        let f = SymplecticMatrix::new(2, 0, 5, 8, 15).unwrap();
        let u = weil_representative(&f).unwrap();
        assert!(defining_relation_residual(&u.matrix, &f) < 1e-10);
    }

    #[test]
    fn representation_up_to_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [3u64, 5, 7, 15] {
            for _ in 0..10 {
                let f = SymplecticMatrix::random(d, &mut rng).unwrap();
                let g = SymplecticMatrix::random(d, &mut rng).unwrap();
                assert!(representation_residual(&f, &g).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn entries_on_the_cyclotomic_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [3u64, 5, 7, 15] {
            for _ in 0..10 {
                let f = SymplecticMatrix::random(d, &mut rng).unwrap();
                let u = weil_representative(&f).unwrap();
                assert!(cyclotomic_phase_residual(&u.matrix, d) < 1e-10, "d = {d}, {f:?}");
            }
        }
    }

    #[test]
    fn zauner_unitary() {
        for d in [3u64, 5, 7, 9, 15] {
            let u = zauner(d).unwrap();
            let n = d as usize;
            assert!(max_abs(&(linalg::matrix_power(&u.matrix, 3) - CMat::identity(n, n))) < 1e-12);
            let dims: usize = order3_eigenspaces(&u.matrix).iter().map(Eigenspace::dim).sum();
            assert_eq!(dims, n);
        }
        let mut dims: Vec<usize> = order3_eigenspaces(&zauner(5).unwrap().matrix).iter().map(Eigenspace::dim).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 2, 2]);
    }

    #[test]
    fn eigenspace_bases_are_invariant() {
        let u = zauner(7).unwrap().matrix;
        for e in order3_eigenspaces(&u) {
            let image = &u * &e.basis;
            assert!(max_abs(&(image - &e.basis * e.eigenvalue)) < 1e-10);
            assert!(linalg::unitarity_residual(&e.basis) < 1e-12);
        }
    }
}
