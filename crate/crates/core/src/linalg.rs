//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Dense column-major complex matrix.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `exp(2 pi i k / n)`, with `k` reduced to the symmetric range
/// `(-n/2, n/2]` before the angle is formed.
pub fn root_of_unity(k: i64, n: u64) -> Complex64 {
    let n = n as i64;
    let mut r = k.rem_euclid(n);
    if 2 * r > n {
        r -= n;
    }
    let theta = 2.0 * std::f64::consts::PI * r as f64 / n as f64;
    Complex64::from_polar(1.0, theta)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |M^dag M - 1|`.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.ncols();
    max_abs(&(m.adjoint() * m - CMat::identity(n, n)))
}

pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
///
/// Columns of the returned matrix are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

/// Kronecker product `a (x) b`, with `a`'s index major.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    CVec::from_fn(a.len() * b.len(), |r, _| a[r / b.len()] * b[r % b.len()])
}

/// Rotates the global phase so the first coordinate with modulus above `tol`
/// is positive real.
pub fn canonical_phase_first(v: &mut CVec, tol: f64) {
    if let Some(z) = v.iter().find(|z| z.norm() > tol).copied() {
        let rot = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= rot);
    }
}

/// Rotates the global phase so the largest-modulus coordinate is positive real.
/// Ties go to the lowest index.
pub fn canonical_phase_largest(v: &mut CVec) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let rot = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= rot);
    }
}

/// Orthonormal basis of the column space of `a`, by modified Gram-Schmidt with
/// column pivoting (largest remaining norm first) and one reorthogonalisation
/// pass. Columns whose residual norm falls below `tol` are dropped. Each basis
/// vector has its first significant coordinate made positive real.
pub fn column_space_basis(a: &CMat, tol: f64) -> CMat {
    let n = a.nrows();
    let mut remaining: Vec<CVec> = a.column_iter().map(|c| c.into_owned()).collect();
    let mut basis: Vec<CVec> = Vec::new();
    while !remaining.is_empty() && basis.len() < n {
        let (best, norm) =
            remaining.iter().enumerate().map(|(i, c)| (i, c.norm())).fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm <= tol {
            break;
        }
        let mut q = remaining.swap_remove(best) / Complex64::from(norm);
        for b in &basis {
            let proj = b.dotc(&q);
            q -= b * proj;
        }
        q /= Complex64::from(q.norm());
        for c in remaining.iter_mut() {
            let proj = q.dotc(c);
            *c -= &q * proj;
        }
        basis.push(q);
    }
    for b in basis.iter_mut() {
        canonical_phase_first(b, 1e-9);
    }
    if basis.is_empty() {
        return CMat::zeros(n, 0);
    }
    CMat::from_columns(&basis)
}

/// `m^k` by repeated multiplication.
pub fn matrix_power(m: &CMat, k: u32) -> CMat {
    let n = m.nrows();
    (0..k).fold(CMat::identity(n, n), |acc, _| acc * m)
}
