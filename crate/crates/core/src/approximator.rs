//! Universal approximators: multigraphs `U` on `[k]` for which one scale `s`
//! gives
//!
//! ```text
//! k^{-2} Σ_{i,j} ϱ(x_i,x_j)^p  <=  s/|E_U| Σ_{{i,j} ∈ E_U} ϱ(x_i,x_j)^p  <=  D · k^{-2} Σ_{i,j} ϱ(x_i,x_j)^p
//! ```
//!
//! for every tuple `x`. Such an `s` exists iff `max A/B <= D · min A/B`,
//! where `A` and `B` are the two averages, so the verifier measures the
//! spread `max A/B / min A/B` over a family of tuples.
//!
//! The construction pairs the vertices of a 3-regular graph on `2k` vertices
//! into blocks and keeps one quotient edge per source edge.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants;
use crate::error::{param, Error, Result};
use crate::graph::{pow, sample_regular_graph, Graph, MetricMatrix, Multigraph};
use crate::rng;

/// Largest tuple space that is enumerated instead of sampled.
pub const EXHAUSTIVE_CAP: f64 = 1e6;
const REL_TOL: f64 = 1e-12;

/// A partition of `[2k]` into `k` blocks of size two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pairing(Vec<[usize; 2]>);

impl Pairing {
    pub fn new(blocks: Vec<[usize; 2]>) -> Result<Self> {
        let n = 2 * blocks.len();
        let mut seen = vec![false; n];
        for b in &blocks {
            for &v in b {
                if v >= n || seen[v] {
                    return param(format!("pairing {blocks:?} is not a partition of [{n}]"));
                }
                seen[v] = true;
            }
        }
        Ok(Pairing(blocks))
    }

    /// `{0,1}, {2,3}, …`
    pub fn consecutive(k: usize) -> Self {
        Pairing((0..k).map(|i| [2 * i, 2 * i + 1]).collect())
    }

    pub fn random(k: usize, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..2 * k).collect();
        order.shuffle(&mut rng::seeded(seed));
        Pairing(order.chunks(2).map(|c| [c[0], c[1]]).collect())
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn blocks(&self) -> &[[usize; 2]] {
        &self.0
    }

    /// Block index of every vertex.
    pub fn block_of(&self) -> Vec<usize> {
        let mut b = vec![0; 2 * self.k()];
        for (i, pair) in self.0.iter().enumerate() {
            b[pair[0]] = i;
            b[pair[1]] = i;
        }
        b
    }
}

/// Quotient of a 3-regular graph on `2k` vertices by a pairing; one
/// multigraph edge (or loop) per source edge, so `|E_U| = 3k`.
pub fn build_universal_approximator(g2k: &Graph, pairing: Option<&Pairing>) -> Result<(Multigraph, Pairing)> {
    let d = g2k.require_regular()?;
    if d != 3 || !g2k.n().is_multiple_of(2) || g2k.n() == 0 {
        return param(format!("source must be 3-regular on an even number of vertices, got d = {d}, n = {}", g2k.n()));
    }
    let k = g2k.n() / 2;
    let pairing = match pairing {
        Some(p) if p.k() != k => return param(format!("pairing has {} blocks, expected {k}", p.k())),
        Some(p) => p.clone(),
        None => Pairing::consecutive(k),
    };
    let block = pairing.block_of();
    let edges = g2k.edges().iter().map(|&(u, v)| (block[u], block[v])).collect();
    Ok((Multigraph::new(k, edges)?, pairing))
}

/// `U_k`: the complete graph when `k < k0`, else the quotient of a seeded
/// sample from `G(2k, 3)` with the consecutive pairing.
pub fn select_approximator(k: usize, k0: usize, seed: u64) -> Result<Multigraph> {
    if k < k0 {
        return Ok(Multigraph::complete(k));
    }
    let g = sample_regular_graph(2 * k, 3, seed)?;
    Ok(build_universal_approximator(&g, None)?.0)
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuotientCheck {
    /// `Σ_{{v,u} ∈ E_G} ϱ(f(v),f(u))^p` for the lift `f(v) = x_{block(v)}`
    pub lhs: f64,
    /// `Σ_{{i,j} ∈ E_U} ϱ(x_i,x_j)^p`
    pub rhs: f64,
    pub pass: bool,
}

/// Both edge sums, each over its sorted terms, so equal multisets give
/// bit-identical sums.
pub fn quotient_identity_check(
    g2k: &Graph,
    u: &Multigraph,
    pairing: &Pairing,
    points: &[usize],
    metric: &MetricMatrix,
    p: f64,
) -> Result<QuotientCheck> {
    if points.len() != u.k() || pairing.k() != u.k() || g2k.n() != 2 * u.k() {
        return param("graph, multigraph, pairing and points disagree in size");
    }
    if points.iter().any(|&x| x >= metric.k()) {
        return param("point outside the metric");
    }
    let block = pairing.block_of();
    let lift = |v: usize| points[block[v]];
    let lhs = sorted_sum(g2k.edges().iter().map(|&(a, b)| pow(metric.get(lift(a), lift(b)), p)).collect());
    let rhs = sorted_sum(u.edges().iter().map(|&(i, j)| pow(metric.get(points[i], points[j]), p)).collect());
    Ok(QuotientCheck { lhs, rhs, pass: lhs == rhs })
}

/// `(A, B)` for one tuple.
fn averages(u: &Multigraph, table: &[f64], m: usize, x: &[usize]) -> (f64, f64) {
    let k = x.len();
    let mut a = 0.0;
    for &xi in x {
        for &xj in x {
            a += table[xi * m + xj];
        }
    }
    let b: f64 = u.edges().iter().map(|&(i, j)| table[x[i] * m + x[j]]).sum();
    (a / (k * k) as f64, b / u.edge_count() as f64)
}

#[derive(Clone, Copy, Debug, Default)]
struct Acc {
    tuples: u64,
    degenerate: u64,
    unbounded: u64,
    min: f64,
    max: f64,
}

impl Acc {
    fn empty() -> Self {
        Acc { min: f64::INFINITY, max: 0.0, ..Default::default() }
    }

    fn push(&mut self, a: f64, b: f64) {
        self.tuples += 1;
        if b == 0.0 {
            if a == 0.0 {
                self.degenerate += 1;
            } else {
                self.unbounded += 1;
            }
            return;
        }
        let r = a / b;
        self.min = self.min.min(r);
        self.max = self.max.max(r);
    }

    fn merge(self, o: Acc) -> Acc {
        Acc {
            tuples: self.tuples + o.tuples,
            degenerate: self.degenerate + o.degenerate,
            unbounded: self.unbounded + o.unbounded,
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximatorReport {
    pub k: usize,
    pub edge_count: usize,
    pub p: f64,
    /// `"exhaustive"` over all of `M^k`, or `"sampled"`.
    pub scope: &'static str,
    pub tuples: u64,
    /// Tuples with `A = B = 0`, left out of the spread.
    pub degenerate: u64,
    /// Tuples with `B = 0 < A`; no scale works for them.
    pub unbounded: u64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max A/B / min A/B`, infinite when some tuple is unbounded.
    pub spread: f64,
    /// `ln D` of the bound judged against, if any.
    pub ln_d: Option<f64>,
    /// `[max A/B, D · min A/B]`, present when nonempty.
    pub s_interval: Option<(f64, f64)>,
    pub verdict: Option<bool>,
}

impl ApproximatorReport {
    fn from_acc(u: &Multigraph, p: f64, scope: &'static str, acc: Acc, ln_d: Option<f64>) -> Result<Self> {
        if acc.tuples == acc.degenerate {
            return Err(Error::Degenerate("every tested tuple has A = B = 0".into()));
        }
        let spread = if acc.unbounded > 0 || acc.min == f64::INFINITY { f64::INFINITY } else { acc.max / acc.min };
        let mut report = ApproximatorReport {
            k: u.k(),
            edge_count: u.edge_count(),
            p,
            scope,
            tuples: acc.tuples,
            degenerate: acc.degenerate,
            unbounded: acc.unbounded,
            min_ratio: acc.min,
            max_ratio: acc.max,
            spread,
            ln_d: None,
            s_interval: None,
            verdict: None,
        };
        if let Some(ln_d) = ln_d {
            report.judge(ln_d);
        }
        Ok(report)
    }

    /// Sets the verdict `spread <= D` and the admissible scales.
    pub fn judge(&mut self, ln_d: f64) {
        let pass = self.spread.is_finite() && self.spread.ln() <= ln_d + REL_TOL;
        self.ln_d = Some(ln_d);
        self.verdict = Some(pass);
        self.s_interval = pass.then(|| (self.max_ratio, (ln_d + self.min_ratio.ln()).exp()));
    }
}

/// `ln(2^p Γ(3,p))`, the bound the construction is shown to meet.
pub fn ln_construction_d(p: f64) -> f64 {
    p * 2f64.ln() + constants::ln_gamma_dp(3.0, p)
}

fn check_inputs(u: &Multigraph, metric: &MetricMatrix, p: f64) -> Result<()> {
    if u.k() == 0 {
        return param("multigraph has no vertices");
    }
    if u.edge_count() == 0 {
        return Err(Error::Degenerate("multigraph has no edges".into()));
    }
    if !metric.is_finite() {
        return param("metric has infinite distances");
    }
    if !(p >= 1.0 && p.is_finite()) {
        return param(format!("p = {p} must be finite and >= 1"));
    }
    Ok(())
}

/// Spread over every tuple of `M^k`.
pub fn approximator_spread_exhaustive(
    u: &Multigraph,
    metric: &MetricMatrix,
    p: f64,
    ln_d: Option<f64>,
) -> Result<ApproximatorReport> {
    check_inputs(u, metric, p)?;
    let (k, m) = (u.k(), metric.k());
    let total = (m as f64).powi(k as i32);
    if total > EXHAUSTIVE_CAP {
        return crate::error::resource("tuple enumeration", total, EXHAUSTIVE_CAP);
    }
    let table = metric.powered(p);
    let acc = (0..total as u64)
        .into_par_iter()
        .fold(Acc::empty, |mut acc, mut idx| {
            let mut x = vec![0; k];
            for slot in x.iter_mut().rev() {
                *slot = (idx % m as u64) as usize;
                idx /= m as u64;
            }
            let (a, b) = averages(u, &table, m, &x);
            acc.push(a, b);
            acc
        })
        .reduce(Acc::empty, Acc::merge);
    ApproximatorReport::from_acc(u, p, "exhaustive", acc, ln_d)
}

/// Spread over `trials` uniform tuples plus an all-distinct tuple (when
/// `m >= k`) and the two-value tuples on a diametral pair; enumerates all of
/// `M^k` instead when it has at most [`EXHAUSTIVE_CAP`] tuples.
pub fn approximator_spread(
    u: &Multigraph,
    metric: &MetricMatrix,
    p: f64,
    trials: usize,
    seed: u64,
    ln_d: Option<f64>,
) -> Result<ApproximatorReport> {
    check_inputs(u, metric, p)?;
    if trials == 0 {
        return param("trials must be at least 1");
    }
    let (k, m) = (u.k(), metric.k());
    if (m as f64).powi(k as i32) <= EXHAUSTIVE_CAP {
        return approximator_spread_exhaustive(u, metric, p, ln_d);
    }
    let table = metric.powered(p);
    let mut fixed: Vec<Vec<usize>> = Vec::new();
    if m >= k {
        let mut r = rng::stream(seed, u64::MAX);
        fixed.push(rand::seq::index::sample(&mut r, m, k).into_vec());
    }
    let (mut a, mut b) = (0, 0);
    for i in 0..m {
        for j in 0..m {
            if metric.get(i, j) > metric.get(a, b) {
                (a, b) = (i, j);
            }
        }
    }
    for i in 0..k {
        let mut x = vec![a; k];
        x[i] = b;
        fixed.push(x);
    }
    fixed.push((0..k).map(|i| if i % 2 == 0 { a } else { b }).collect());
    let mut acc = Acc::empty();
    for x in &fixed {
        let (a, b) = averages(u, &table, m, x);
        acc.push(a, b);
    }
    let sampled = (0..trials as u64)
        .into_par_iter()
        .fold(Acc::empty, |mut acc, t| {
            let mut r = rng::stream(seed, t);
            let x: Vec<usize> = (0..k).map(|_| r.random_range(0..m)).collect();
            let (a, b) = averages(u, &table, m, &x);
            acc.push(a, b);
            acc
        })
        .reduce(Acc::empty, Acc::merge);
    ApproximatorReport::from_acc(u, p, "sampled", acc.merge(sampled), ln_d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSided {
    pub a: f64,
    pub b: f64,
    /// `A <= s·B`
    pub left: bool,
    /// `s·B <= D·A`
    pub right: bool,
    pub pass: bool,
}

/// `A <= s·B <= D·A` for one tuple, with `D` given by its natural log.
pub fn two_sided_check(
    u: &Multigraph,
    metric: &MetricMatrix,
    p: f64,
    ln_d: f64,
    s: f64,
    points: &[usize],
) -> Result<TwoSided> {
    check_inputs(u, metric, p)?;
    if points.len() != u.k() || points.iter().any(|&x| x >= metric.k()) {
        return param("points must be k indices into the metric");
    }
    let (a, b) = averages(u, &metric.powered(p), metric.k(), points);
    let sb = s * b;
    let left = a <= sb * (1.0 + REL_TOL);
    let right = sb == 0.0 || (a > 0.0 && sb.ln() <= ln_d + a.ln() + REL_TOL);
    Ok(TwoSided { a, b, left, right, pass: left && right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_pairs_distances;

    fn prism() -> Graph {
        let e = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (0, 3), (1, 5), (2, 4)];
        Graph::from_edges(6, &e).unwrap()
    }

    #[test]
    fn prism_quotient() {
        let (u, pairing) = build_universal_approximator(&prism(), None).unwrap();
        assert_eq!(pairing, Pairing::consecutive(3));
        assert_eq!(u.edge_count(), 9);
        assert_eq!(u.multiplicity(0, 0), 1);
        assert_eq!(u.multiplicity(2, 2), 1);
        assert_eq!(u.multiplicity(1, 1), 0);
        assert_eq!(u.multiplicity(0, 1), 3);
        assert_eq!(u.multiplicity(1, 2), 3);
        assert_eq!(u.multiplicity(0, 2), 1);
    }

    #[test]
    fn k4_quotient() {
        let (u, _) = build_universal_approximator(&Graph::complete(4), None).unwrap();
        assert_eq!(u.edge_count(), 6);
        assert_eq!(u.loop_count(), 2);
        assert_eq!(u.multiplicity(0, 1), 4);
    }

    #[test]
    fn edge_count_is_3k() {
        for k in [2, 5, 10, 25, 50] {
            let g = sample_regular_graph(2 * k, 3, k as u64).unwrap();
            let (u, _) = build_universal_approximator(&g, Some(&Pairing::random(k, 3))).unwrap();
            assert_eq!(u.edge_count(), 3 * k);
        }
        assert!(build_universal_approximator(&Graph::cycle(6), None).is_err());
        assert!(Pairing::new(vec![[0, 1], [1, 2]]).is_err());
    }

    #[test]
    fn quotient_identity_on_petersen() {
        let g = prism();
        let metric = all_pairs_distances(&Graph::petersen());
        for pairing in [Pairing::consecutive(3), Pairing::random(3, 9)] {
            let (u, pairing) = build_universal_approximator(&g, Some(&pairing)).unwrap();
            for points in [[0, 1, 7], [3, 3, 9], [5, 2, 2]] {
                for p in [1.0, 2.5] {
                    let c = quotient_identity_check(&g, &u, &pairing, &points, &metric, p).unwrap();
                    assert!(c.pass, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn complete_graph_has_unit_spread() {
        let metric = all_pairs_distances(&Graph::petersen());
        for k in [3, 5, 8] {
            let u = Multigraph::complete(k);
            let r = approximator_spread(&u, &metric, 1.0, 200, 1, Some(0.0)).unwrap();
            assert!((r.spread - 1.0).abs() < 1e-12);
            assert!((r.max_ratio - (k as f64 - 1.0) / k as f64).abs() < 1e-12);
            assert_eq!(r.verdict, Some(true));
        }
        let r = approximator_spread(&Multigraph::complete(3), &metric, 1.0, 1, 1, None).unwrap();
        assert_eq!(r.scope, "exhaustive");
        assert_eq!(r.tuples, 1000);
        assert_eq!(r.degenerate, 10);
    }

    #[test]
    fn isolated_vertex_is_unbounded() {
        let u = Multigraph::new(3, vec![(0, 1)]).unwrap();
        let metric = all_pairs_distances(&Graph::cycle(5));
        let r = approximator_spread(&u, &metric, 1.0, 1, 0, Some(50.0)).unwrap();
        assert!(r.unbounded > 0);
        assert!(r.spread.is_infinite());
        assert_eq!(r.verdict, Some(false));
    }

    #[test]
    fn spread_is_scale_invariant() {
        let (u, _) = build_universal_approximator(&prism(), None).unwrap();
        let metric = all_pairs_distances(&Graph::petersen());
        let a = approximator_spread(&u, &metric, 1.5, 1, 0, None).unwrap();
        let b = approximator_spread(&u, &metric.scaled(3.0), 1.5, 1, 0, None).unwrap();
        assert!((a.spread - b.spread).abs() < 1e-9 * a.spread);
        assert!(a.spread >= 1.0);
    }

    #[test]
    fn sampled_scope() {
        let g = sample_regular_graph(20, 3, 4).unwrap();
        let (u, _) = build_universal_approximator(&g, None).unwrap();
        let metric = all_pairs_distances(&sample_regular_graph(16, 3, 5).unwrap());
        let r = approximator_spread(&u, &metric, 1.0, 500, 7, Some(ln_construction_d(1.0))).unwrap();
        assert_eq!(r.scope, "sampled");
        assert_eq!(r.tuples, 500 + 1 + 10 + 1);
        assert_eq!(r.verdict, Some(true));
        let again = approximator_spread(&u, &metric, 1.0, 500, 7, None).unwrap();
        assert_eq!((r.min_ratio, r.max_ratio), (again.min_ratio, again.max_ratio));
    }

    #[test]
    fn two_sided() {
        let metric = all_pairs_distances(&Graph::petersen());
        let u = Multigraph::complete(4);
        let s = 0.75;
        for points in [[0, 1, 2, 3], [0, 0, 5, 9], [4, 4, 4, 4]] {
            assert!(two_sided_check(&u, &metric, 1.0, 0.0, s, &points).unwrap().pass);
        }
        let c = two_sided_check(&u, &metric, 1.0, 0.0, 0.5, &[0, 1, 2, 3]).unwrap();
        assert!(!c.left && c.right);
    }

    #[test]
    fn threshold_selection() {
        assert_eq!(select_approximator(4, 5, 0).unwrap(), Multigraph::complete(4));
        assert_eq!(select_approximator(4, 1, 0).unwrap().edge_count(), 12);
    }
}
