//! Adjacency spectra, the Cheeger constant and the classical Poincaré constant.

use serde::Serialize;

use crate::error::{param, resource, Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DENSE_CAP: usize = 2000;
pub const CHEEGER_CAP: usize = 22;

/// Tolerance for treating `λ2` as equal to the degree.
const GAP_TOL: f64 = 1e-9;

/// Eigenvalues of the adjacency matrix, sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Second largest eigenvalue (the largest when `n == 1`).
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues.get(1).or_else(|| self.eigenvalues.first()).copied().unwrap_or(0.0)
    }
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius norm drops below `tol`; gives up
/// after `100·n²` rotations with a numeric error carrying the residual.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize, tol: f64) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };
    let cap = 100 * n * n;
    let mut rotations = 0usize;
    let mut residual = off_norm(&a);
    while residual >= tol {
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                if rotations >= cap {
                    return Err(Error::Numeric {
                        msg: format!("Jacobi did not converge within {cap} rotations"),
                        residual: off_norm(&a),
                    });
                }
                rotations += 1;
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[r * n + p];
                    let h = a[r * n + q];
                    let new_p = g - s * (h + g * tau);
                    let new_q = h + s * (g - h * tau);
                    a[r * n + p] = new_p;
                    a[p * n + r] = new_p;
                    a[r * n + q] = new_q;
                    a[q * n + r] = new_q;
                }
            }
        }
        residual = off_norm(&a);
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

pub fn adjacency_spectrum(g: &Graph, tol: f64) -> Result<Spectrum> {
    let n = g.n();
    if n > DENSE_CAP {
        return resource("dense eigensolver (n)", n as f64, DENSE_CAP as f64);
    }
    let mut a = vec![0.0; n * n];
    for (u, v) in g.edges() {
        a[u * n + v] = 1.0;
        a[v * n + u] = 1.0;
    }
    Ok(Spectrum { eigenvalues: symmetric_eigenvalues(a, n, tol)? })
}

pub fn lambda2(g: &Graph, tol: f64) -> Result<f64> {
    Ok(adjacency_spectrum(g, tol)?.lambda2())
}

/// A minimizing set of the Cheeger ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheegerCut {
    pub value: f64,
    pub cut_edges: usize,
    pub size: usize,
    /// Bitmask of the minimizing set.
    pub set: u64,
}

/// Exact `h(G)` by scanning all subsets in Gray-code order.
///
/// Each step toggles one vertex and updates the cut count in O(1) with a
/// popcount against the neighborhood mask. Ties keep the first set found.
pub fn cheeger_scan(g: &Graph) -> Result<CheegerCut> {
    let n = g.n();
    if n > CHEEGER_CAP {
        return resource("Cheeger subset scan (n)", n as f64, CHEEGER_CAP as f64);
    }
    if n < 2 {
        return Err(Error::Degenerate("Cheeger constant needs at least two vertices".into()));
    }
    let masks = g.adjacency_masks().expect("n <= 22");
    let half = n / 2;
    let mut set = 0u64;
    let mut cut: i64 = 0;
    let mut size = 0usize;
    let mut best: Option<(usize, usize, u64)> = None;
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let deg = masks[v].count_ones() as i64;
        if set & bit == 0 {
            cut += deg - 2 * (masks[v] & set).count_ones() as i64;
            set |= bit;
            size += 1;
        } else {
            set &= !bit;
            cut -= deg - 2 * (masks[v] & set).count_ones() as i64;
            size -= 1;
        }
        if size == 0 || size > half {
            continue;
        }
        let c = cut as usize;
        let better = match best {
            None => true,
            Some((bc, bs, _)) => c * bs < bc * size,
        };
        if better {
            best = Some((c, size, set));
        }
    }
    let (cut_edges, size, set) = best.expect("n >= 2 has a set of size 1");
    Ok(CheegerCut { value: cut_edges as f64 / size as f64, cut_edges, size, set })
}

pub fn cheeger_exact(g: &Graph) -> Result<f64> {
    Ok(cheeger_scan(g)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheegerSandwich {
    pub lambda2: f64,
    pub lower: f64,
    pub h: f64,
    pub upper: f64,
    pub pass: bool,
}

/// Checks `(d − λ2)/2 <= h(G) <= sqrt(2d(d − λ2))` to within `1e-9`.
pub fn cheeger_sandwich_check(g: &Graph) -> Result<CheegerSandwich> {
    let d = g.require_regular()? as f64;
    let lambda2 = lambda2(g, DEFAULT_TOL)?;
    let h = cheeger_exact(g)?;
    let gap = (d - lambda2).max(0.0);
    let lower = gap / 2.0;
    let upper = (2.0 * d * gap).sqrt();
    let pass = lower <= h + 1e-9 && h <= upper + 1e-9;
    Ok(CheegerSandwich { lambda2, lower, h, upper, pass })
}

/// `d / (2(d − λ2))`, the Poincaré constant of squared Euclidean maps.
pub fn classical_gamma(g: &Graph) -> Result<f64> {
    let d = g.require_regular()? as f64;
    classical_gamma_from(d, lambda2(g, DEFAULT_TOL)?)
}

pub(crate) fn classical_gamma_from(d: f64, lambda2: f64) -> Result<f64> {
    if d <= 0.0 {
        return param("classical gamma needs positive degree");
    }
    if d - lambda2 <= GAP_TOL {
        return Err(Error::Degenerate(format!(
            "λ2 = {lambda2} equals the degree {d}; the graph is disconnected and γ is infinite"
        )));
    }
    Ok(d / (2.0 * (d - lambda2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_spectrum(g: &Graph, expected: &[f64]) {
        let s = adjacency_spectrum(g, DEFAULT_TOL).unwrap();
        assert_eq!(s.eigenvalues.len(), expected.len());
        for (a, b) in s.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", s.eigenvalues, expected);
        }
    }

    #[test]
    fn named_spectra() {
        assert_spectrum(&Graph::complete(4), &[3.0, -1.0, -1.0, -1.0]);
        assert_spectrum(&Graph::cycle(4), &[2.0, 0.0, 0.0, -2.0]);
        assert_spectrum(&Graph::complete_bipartite(3, 3), &[3.0, 0.0, 0.0, 0.0, 0.0, -3.0]);
        assert_spectrum(&Graph::hypercube(3), &[3.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -3.0]);
        // Petersen: 3, 1 (x5), -2 (x4)
        let mut pet = vec![3.0];
        pet.extend([1.0; 5]);
        pet.extend([-2.0; 4]);
        assert_spectrum(&Graph::petersen(), &pet);
    }

    #[test]
    fn lambda2_examples() {
        assert!((lambda2(&Graph::complete(4), DEFAULT_TOL).unwrap() + 1.0).abs() < 1e-9);
        assert!(lambda2(&Graph::complete_bipartite(3, 3), DEFAULT_TOL).unwrap().abs() < 1e-9);
        assert!((lambda2(&Graph::hypercube(3), DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cheeger_examples() {
        assert_eq!(cheeger_exact(&Graph::complete(4)).unwrap(), 2.0);
        assert!((cheeger_exact(&Graph::cycle(6)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let two = Graph::complete(4).disjoint_union(&Graph::complete(4));
        assert_eq!(cheeger_exact(&two).unwrap(), 0.0);
        // a face of Q3: 4 cut edges over 4 vertices
        assert_eq!(cheeger_exact(&Graph::hypercube(3)).unwrap(), 1.0);
        assert!(matches!(cheeger_exact(&Graph::cycle(23)), Err(Error::Resource { .. })));
    }

    #[test]
    fn sandwich_examples() {
        let s = cheeger_sandwich_check(&Graph::complete(4)).unwrap();
        assert!(s.pass);
        assert!((s.lower - 2.0).abs() < 1e-9 && s.h == 2.0);
        assert!((s.upper - 24f64.sqrt()).abs() < 1e-9);
        let s = cheeger_sandwich_check(&Graph::hypercube(3)).unwrap();
        assert!(s.pass && (s.lower - 1.0).abs() < 1e-9 && (s.upper - 12f64.sqrt()).abs() < 1e-9);
        let path = Graph::path(4);
        assert!(matches!(cheeger_sandwich_check(&path), Err(Error::Parameter(_))));
    }

    #[test]
    fn classical_gamma_examples() {
        assert!((classical_gamma(&Graph::complete(4)).unwrap() - 0.375).abs() < 1e-12);
        assert!((classical_gamma(&Graph::petersen()).unwrap() - 0.75).abs() < 1e-12);
        let tri = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
        assert!(matches!(classical_gamma(&tri), Err(Error::Degenerate(_))));
    }
}
