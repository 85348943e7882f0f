//! Integer arithmetic for dimension towers.
//!
//! A tower collects the dimensions `d` for which `(d+1)(d-3) = m^2 * d0` with a
//! fixed square-free `d0`. Within a tower the substitution `d -> d(d-2)` keeps
//! `d0` fixed, which produces the ladders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One dimension of a tower together with its ladder position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerEntry {
    pub d: u64,
    pub m: u64,
    pub d0: u64,
    pub rung: u32,
    /// The odd-indexed tower entry that starts this entry's ladder.
    pub ladder_base: u64,
}

impl TowerEntry {
    /// `(d+1)(d-3)` recomputed from `m^2 * d0`.
    pub fn discriminant(&self) -> u128 {
        (self.m as u128) * (self.m as u128) * (self.d0 as u128)
    }
}

/// Prime-power factorization of `d`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerSplit {
    pub d: u64,
    pub factors: Vec<(u64, u32)>,
}

impl PrimePowerSplit {
    /// The coprime prime-power atoms `p^n`.
    pub fn atoms(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, n)| p.pow(n)).collect()
    }

    pub fn product(&self) -> u64 {
        self.atoms().into_iter().product()
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_square_free(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Writes `n = m^2 * d0` with `d0` square-free. Trial division up to `sqrt(n)`.
pub fn squarefree_decompose(n: u64) -> (u64, u64) {
    assert!(n >= 1, "squarefree_decompose needs n >= 1");
    let mut m = 1u64;
    let mut d0 = 1u64;
    for (p, e) in factorize(n) {
        m *= p.pow(e / 2);
        if e % 2 == 1 {
            d0 *= p;
        }
    }
    (m, d0)
}

/// `(d+1)(d-3)`; zero at `d = 3`.
pub fn tower_discriminant(d: u64) -> u128 {
    assert!(d >= 3);
    (d as u128 + 1) * (d as u128 - 3)
}

/// One ladder step `d -> d(d-2)`.
pub fn ladder_next(d: u64) -> Result<u64> {
    if d < 3 {
        return Err(Error::InvalidOption(format!("ladder needs d >= 3, got {d}")));
    }
    d.checked_mul(d - 2).ok_or(Error::Overflow(d))
}

/// `steps` successive ladder lifts starting at `d` (the start included).
pub fn ladder(d: u64, steps: usize) -> Result<Vec<u64>> {
    let mut out = vec![d];
    let mut cur = d;
    for _ in 0..steps {
        cur = ladder_next(cur)?;
        out.push(cur);
    }
    Ok(out)
}

/// All `d` in `[4, bound]` whose `(d+1)(d-3)` has square-free part `d0`.
///
/// Entries carry their rung, read off the 1-based tower index `i = 2^r (2n+1)`,
/// and the ladder base `d_{2n+1}`. Every rung is cross-checked by lifting the
/// base `r` times; a disagreement is an error.
pub fn tower_enumerate(d0: u64, bound: u64) -> Result<Vec<TowerEntry>> {
    if !is_square_free(d0) {
        return Err(Error::NotSquareFree(d0));
    }
    if bound < 4 {
        return Err(Error::BoundTooSmall(bound));
    }
    let d0w = d0 as u128;
    let mut dims = Vec::new();
    for d in 4..=bound {
        let n = tower_discriminant(d);
        if !n.is_multiple_of(d0w) {
            continue;
        }
        let q = n / d0w;
        let m = q.isqrt();
        if m * m == q {
            let m = u64::try_from(m).map_err(|_| Error::Overflow(d))?;
            dims.push((d, m));
        }
    }

    let mut out: Vec<TowerEntry> = Vec::with_capacity(dims.len());
    for (k, &(d, m)) in dims.iter().enumerate() {
        let index = k as u64 + 1;
        let rung = index.trailing_zeros();
        let base_index = index >> rung;
        let ladder_base = dims[(base_index - 1) as usize].0;
        let mut lifted = ladder_base;
        for _ in 0..rung {
            lifted = ladder_next(lifted)?;
        }
        if lifted != d {
            return Err(Error::RungMismatch(d));
        }
        out.push(TowerEntry { d, m, d0, rung, ladder_base });
    }
    Ok(out)
}

/// Complete prime-power factorization of `d`.
pub fn crt_split(d: u64) -> PrimePowerSplit {
    assert!(d >= 2, "crt_split needs d >= 2");
    PrimePowerSplit { d, factors: factorize(d) }
}

/// Modular inverse of `a` mod `n`, if it exists.
pub fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(n as i128) as u64)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Divisor-to-multiple edges among odd dimensions.
///
/// With `reduce` set, only edges not implied by a chain through a third entry
/// are kept (the Hasse diagram of divisibility).
pub fn divisibility_graph(dims: &[u64], reduce: bool) -> Result<Vec<(u64, u64)>> {
    if dims.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&e) = dims.iter().find(|&&x| x % 2 == 0 || x == 0) {
        return Err(Error::EvenGraphEntry(e));
    }
    let mut nodes = dims.to_vec();
    nodes.sort_unstable();
    nodes.dedup();

    let mut edges = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if b % a != 0 {
                continue;
            }
            let implied = reduce && nodes.iter().any(|&c| c != a && c != b && c % a == 0 && b % c == 0);
            if !implied {
                edges.push((a, b));
            }
        }
    }
    Ok(edges)
}

/// Graphviz rendering of a divisibility graph.
pub fn graph_to_dot(dims: &[u64], edges: &[(u64, u64)]) -> String {
    let mut nodes = dims.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let mut s = String::from("digraph divisibility {\n");
    for d in &nodes {
        s.push_str(&format!("  n{d} [label=\"d={d}\"];\n"));
    }
    for (a, b) in edges {
        s.push_str(&format!("  n{a} -> n{b};\n"));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(v: &[TowerEntry]) -> Vec<u64> {
        v.iter().map(|e| e.d).collect()
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_decompose(45), (3, 5));
        assert_eq!(squarefree_decompose(12), (2, 3));
        assert_eq!(squarefree_decompose(1), (1, 1));
        assert_eq!(squarefree_decompose(320), (8, 5));
    }

    #[test]
    fn squarefree_matches_brute_force() {
        // largest square dividing n, found by scanning k downward
        for n in 1..3000u64 {
            let m = (1..=n.isqrt()).rev().find(|k| n % (k * k) == 0).unwrap();
            assert_eq!(squarefree_decompose(n), (m, n / (m * m)), "n = {n}");
        }
    }

    #[test]
    fn known_towers() {
        assert_eq!(dims(&tower_enumerate(5, 1000).unwrap()), vec![4, 8, 19, 48, 124, 323, 844]);
        assert_eq!(dims(&tower_enumerate(3, 10).unwrap()), vec![5]);
    }

    #[test]
    fn tower_rejects_bad_input() {
        assert_eq!(tower_enumerate(12, 100), Err(Error::NotSquareFree(12)));
        assert_eq!(tower_enumerate(5, 3), Err(Error::BoundTooSmall(3)));
    }

    #[test]
    fn tower_entries_reconstruct() {
        for e in tower_enumerate(5, 20000).unwrap() {
            assert_eq!(e.discriminant(), tower_discriminant(e.d));
            assert!(is_square_free(e.d0));
        }
    }

    #[test]
    fn ladder_steps() {
        assert_eq!(ladder_next(5).unwrap(), 15);
        assert_eq!(ladder_next(15).unwrap(), 195);
        assert_eq!(ladder_next(3).unwrap(), 3);
        assert!(ladder_next(2).is_err());
        assert_eq!(ladder(19, 2).unwrap(), vec![19, 323, 323 * 321]);
        assert!(matches!(ladder_next(u64::MAX / 2), Err(Error::Overflow(_))));
    }

    #[test]
    fn ladder_preserves_squarefree_part() {
        for d in (5..=10_000u64).step_by(2) {
            let lifted = ladder_next(d).unwrap();
            let a = tower_discriminant(d) as u64;
            let b = u64::try_from(tower_discriminant(lifted)).unwrap();
            assert_eq!(squarefree_decompose(a).1, squarefree_decompose(b).1, "d = {d}");
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_split(15).factors, vec![(3, 1), (5, 1)]);
        assert_eq!(crt_split(323).factors, vec![(17, 1), (19, 1)]);
        assert_eq!(crt_split(9).factors, vec![(3, 2)]);
        assert_eq!(crt_split(2).factors, vec![(2, 1)]);
    }

    #[test]
    fn graph_examples() {
        assert_eq!(divisibility_graph(&[5, 15, 195], false).unwrap(), vec![(5, 15), (5, 195), (15, 195)]);
        assert_eq!(divisibility_graph(&[5, 15, 195], true).unwrap(), vec![(5, 15), (15, 195)]);
        assert!(divisibility_graph(&[53], false).unwrap().is_empty());
        assert!(divisibility_graph(&[5, 53], false).unwrap().is_empty());
        assert_eq!(divisibility_graph(&[5, 8], false), Err(Error::EvenGraphEntry(8)));
        assert_eq!(divisibility_graph(&[], false), Err(Error::EmptyInput));
    }

    #[test]
    fn dot_output() {
        let dot = graph_to_dot(&[5, 15], &[(5, 15)]);
        assert!(dot.contains("label=\"d=5\""));
        assert!(dot.contains("n5 -> n15"));
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(2, 5), Some(3));
        assert_eq!(mod_inverse(3, 15), None);
        assert_eq!(mod_inverse(14, 15), Some(14));
    }
}
