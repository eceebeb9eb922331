//! The nonlinear Poincaré ratio and estimates of `γ(G, ϱ^p)`.
//!
//! For `f: V_G → M` the ratio is
//!
//! ```text
//! [n^-2 Σ_{v,u} ϱ(f(v),f(u))^p] / [|E|^-1 Σ_{uv ∈ E} ϱ(f(u),f(v))^p]
//! ```
//!
//! with the pair sum over ordered pairs, diagonal included. `γ` is its
//! supremum over maps with a positive edge sum.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use std::ops::Range;

use crate::constants::decimal;
use crate::cut_embed::min_l1_distortion;
use crate::error::{param, resource, Error, Result};
use crate::graph::{all_pairs_distances, metric_summary, Graph, MetricMatrix};
use crate::rng;
use crate::spectral::{classical_gamma_from, lambda2, DEFAULT_TOL};

pub const BRUTE_CAP: u64 = 100_000_000;
pub const INJECTION_CAP: u64 = 10_000_000;
const CHUNK: u64 = 1 << 16;
const MAX_SWEEPS: usize = 10_000;
/// Relative gain a local-search move must beat.
const MOVE_TOL: f64 = 1e-12;

/// A map `f: {0..n} → {0..m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexMap {
    pub m: usize,
    pub values: Vec<usize>,
}

impl VertexMap {
    pub fn new(values: Vec<usize>, m: usize) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v >= m) {
            return param(format!("map value {v} out of range for m = {m}"));
        }
        Ok(VertexMap { m, values })
    }

    pub fn identity(n: usize) -> Self {
        VertexMap { m: n, values: (0..n).collect() }
    }

    pub fn constant(n: usize, m: usize, value: usize) -> Self {
        VertexMap { m, values: vec![value; n] }
    }

    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        let mut r = rng::seeded(seed);
        VertexMap { m, values: (0..n).map(|_| r.random_range(0..m)).collect() }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sorted image.
    pub fn image(&self) -> Vec<usize> {
        let mut seen = vec![false; self.m];
        for &v in &self.values {
            seen[v] = true;
        }
        (0..self.m).filter(|&t| seen[t]).collect()
    }

    /// `|f^{-1}(t)|` for every target `t`.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut c = vec![0; self.m];
        for &v in &self.values {
            c[v] += 1;
        }
        c
    }

    /// Mixed-radix index, vertex 0 most significant.
    pub fn index(&self) -> u64 {
        self.values.iter().fold(0u64, |acc, &v| acc * self.m as u64 + v as u64)
    }

    pub fn from_index(mut index: u64, n: usize, m: usize) -> Self {
        let mut values = vec![0; n];
        for slot in values.iter_mut().rev() {
            *slot = (index % m as u64) as usize;
            index /= m as u64;
        }
        VertexMap { m, values }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        param(format!("exponent p = {p} must be finite and >= 1"))
    }
}

/// Pair sum `Σ_{v,u} ϱ(f(v),f(u))^p` and edge sum for one map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioParts {
    pub pair_sum: f64,
    pub edge_sum: f64,
    pub ratio: f64,
}

pub fn ratio_parts(g: &Graph, metric: &MetricMatrix, f: &VertexMap, p: f64) -> Result<RatioParts> {
    check_p(p)?;
    if f.n() != g.n() {
        return param(format!("map has {} values for a graph on {} vertices", f.n(), g.n()));
    }
    if f.m > metric.k() {
        return param(format!("map targets {} points, metric has {}", f.m, metric.k()));
    }
    if g.edge_count() == 0 {
        return param("graph has no edges");
    }
    let image = f.image();
    for &s in &image {
        for &t in &image {
            if !metric.get(s, t).is_finite() {
                return Err(Error::Degenerate(format!("infinite distance between image points {s} and {t}")));
            }
        }
    }
    let table = metric.powered(p);
    let ev = Evaluator::new(g, &table, metric.k(), f.values.clone());
    match ev.ratio() {
        Some(ratio) => Ok(RatioParts { pair_sum: ev.pair_sum, edge_sum: ev.edge_sum, ratio }),
        None => Err(Error::Degenerate("edge sum is zero; the map is constant along every edge".into())),
    }
}

pub fn ratio(g: &Graph, metric: &MetricMatrix, f: &VertexMap, p: f64) -> Result<f64> {
    Ok(ratio_parts(g, metric, f, p)?.ratio)
}

/// Incremental evaluator of the ratio under single-vertex moves.
struct Evaluator<'a> {
    g: &'a Graph,
    m: usize,
    table: &'a [f64],
    values: Vec<usize>,
    /// `col[t] = Σ_u T[t, f(u)]`
    col: Vec<f64>,
    pair_sum: f64,
    edge_sum: f64,
    /// Edges whose powered distance is positive; decides degeneracy exactly.
    moving: usize,
}

impl<'a> Evaluator<'a> {
    fn new(g: &'a Graph, table: &'a [f64], m: usize, values: Vec<usize>) -> Self {
        let mut counts = vec![0usize; m];
        for &v in &values {
            counts[v] += 1;
        }
        let col: Vec<f64> = (0..m).map(|t| (0..m).map(|s| counts[s] as f64 * table[t * m + s]).sum()).collect();
        let pair_sum = (0..m).map(|t| counts[t] as f64 * col[t]).sum();
        let mut edge_sum = 0.0;
        let mut moving = 0;
        for (u, v) in g.edges() {
            let w = table[values[u] * m + values[v]];
            edge_sum += w;
            moving += (w > 0.0) as usize;
        }
        Evaluator { g, m, table, values, col, pair_sum, edge_sum, moving }
    }

    fn ratio(&self) -> Option<f64> {
        if self.moving == 0 {
            return None;
        }
        let n = self.values.len() as f64;
        Some(self.pair_sum * self.g.edge_count() as f64 / (self.edge_sum * n * n))
    }

    fn ratio_of(&self, pair_sum: f64, edge_sum: f64, moving: usize) -> Option<f64> {
        if moving == 0 {
            return None;
        }
        let n = self.values.len() as f64;
        Some(pair_sum * self.g.edge_count() as f64 / (edge_sum * n * n))
    }

    /// Sums after moving `v` to `t`, without applying the move.
    fn preview(&self, v: usize, t: usize) -> (f64, f64, usize) {
        let a = self.values[v];
        if a == t {
            return (self.pair_sum, self.edge_sum, self.moving);
        }
        let m = self.m;
        let pair = self.pair_sum - 2.0 * self.col[a] + 2.0 * (self.col[t] - self.table[t * m + a]);
        let mut edge = self.edge_sum;
        let mut moving = self.moving as isize;
        for &w in self.g.neighbors(v) {
            let fw = self.values[w];
            let old = self.table[a * m + fw];
            let new = self.table[t * m + fw];
            edge += new - old;
            moving += (new > 0.0) as isize - (old > 0.0) as isize;
        }
        (pair, edge, moving as usize)
    }

    fn set(&mut self, v: usize, t: usize) {
        let a = self.values[v];
        if a == t {
            return;
        }
        let (pair, edge, moving) = self.preview(v, t);
        let m = self.m;
        for s in 0..m {
            self.col[s] += self.table[s * m + t] - self.table[s * m + a];
        }
        self.values[v] = t;
        self.pair_sum = pair;
        self.edge_sum = edge;
        self.moving = moving;
    }
}

/// Where an upper bound on `γ` comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    BruteForce,
    /// `c_L1(dist_H) · d/(d − λ2(G))`. `stated` is the same product with
    /// `d/(2(d − λ2))`, which is the Euclidean constant only when the edge
    /// sum runs over ordered pairs.
    L1Certificate {
        distortion: f64,
        classical_gamma: f64,
        lambda2: f64,
        stated: f64,
    },
    Extrapolation {
        ln_value: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub witness: VertexMap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperBound {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub lower: Option<LowerBound>,
    pub upper: Option<UpperBound>,
    /// Set when `lower == upper` by construction.
    pub exact: bool,
    /// Maps (brute force) or restarts (search) evaluated.
    pub evaluated: u64,
    /// Maps with zero edge sum, excluded from the supremum.
    pub degenerate: u64,
}

/// Result of a brute-force scan over a range of map indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteChunk {
    pub range: Range<u64>,
    pub best: Option<(f64, u64)>,
    pub evaluated: u64,
    pub degenerate: u64,
}

impl BruteChunk {
    /// Max by value, ties to the smaller index; the result covers both ranges.
    pub fn merge(self, other: BruteChunk) -> BruteChunk {
        let best = match (self.best, other.best) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        };
        BruteChunk {
            range: self.range.start.min(other.range.start)..self.range.end.max(other.range.end),
            best,
            evaluated: self.evaluated + other.evaluated,
            degenerate: self.degenerate + other.degenerate,
        }
    }
}

fn require_finite(metric: &MetricMatrix) -> Result<()> {
    if metric.is_finite() {
        Ok(())
    } else {
        Err(Error::Degenerate("metric has infinite distances".into()))
    }
}

fn map_count(n: usize, m: usize) -> Option<u64> {
    (m as u64).checked_pow(n as u32)
}

/// Scans map indices in `range` sequentially. Chunks can be run separately
/// and combined with [`BruteChunk::merge`] to resume an interrupted scan.
pub fn gamma_bruteforce_range(g: &Graph, metric: &MetricMatrix, p: f64, range: Range<u64>) -> Result<BruteChunk> {
    check_p(p)?;
    require_finite(metric)?;
    if g.edge_count() == 0 {
        return param("graph has no edges");
    }
    let (n, m) = (g.n(), metric.k());
    let total = map_count(n, m).ok_or_else(|| Error::Parameter("map count overflows u64".into()))?;
    if range.end > total || range.start > range.end {
        return param(format!("range {range:?} outside 0..{total}"));
    }
    let table = metric.powered(p);
    Ok(scan_range(g, &table, n, m, range))
}

fn scan_range(g: &Graph, table: &[f64], n: usize, m: usize, range: Range<u64>) -> BruteChunk {
    let mut chunk = BruteChunk { range: range.clone(), best: None, evaluated: 0, degenerate: 0 };
    if range.is_empty() {
        return chunk;
    }
    let mut ev = Evaluator::new(g, table, m, VertexMap::from_index(range.start, n, m).values);
    let mut best = f64::NEG_INFINITY;
    for index in range.clone() {
        chunk.evaluated += 1;
        match ev.ratio() {
            None => chunk.degenerate += 1,
            Some(r) if r >= best - 1e-9 * best.abs() => {
                let exact = Evaluator::new(g, table, m, ev.values.clone()).ratio().expect("nondegenerate");
                if exact > best {
                    best = exact;
                    chunk.best = Some((exact, index));
                }
            }
            Some(_) => {}
        }
        if index + 1 == range.end {
            break;
        }
        let mut v = n - 1;
        loop {
            let next = ev.values[v] + 1;
            if next < m {
                ev.set(v, next);
                break;
            }
            ev.set(v, 0);
            v -= 1;
        }
    }
    chunk
}

pub fn gamma_bruteforce(g: &Graph, metric: &MetricMatrix, p: f64) -> Result<GammaEstimate> {
    gamma_bruteforce_capped(g, metric, p, BRUTE_CAP)
}

/// Exact `γ(G, ϱ^p)` over all `m^n` maps, in parallel chunks.
pub fn gamma_bruteforce_capped(g: &Graph, metric: &MetricMatrix, p: f64, cap: u64) -> Result<GammaEstimate> {
    check_p(p)?;
    require_finite(metric)?;
    let (n, m) = (g.n(), metric.k());
    let total = match map_count(n, m) {
        Some(t) if t <= cap => t,
        _ => return resource("brute-force maps (m^n)", (m as f64).powf(n as f64), cap as f64),
    };
    if g.edge_count() == 0 {
        return param("graph has no edges");
    }
    let table = metric.powered(p);
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let merged = chunks
        .par_iter()
        .map(|&c| scan_range(g, &table, n, m, c * CHUNK..((c + 1) * CHUNK).min(total)))
        .reduce_with(BruteChunk::merge)
        .expect("at least one map");
    let (value, index) = merged.best.ok_or_else(|| Error::Degenerate("every map has zero edge sum".into()))?;
    Ok(GammaEstimate {
        lower: Some(LowerBound { value, witness: VertexMap::from_index(index, n, m) }),
        upper: Some(UpperBound { value, provenance: Provenance::BruteForce }),
        exact: true,
        evaluated: merged.evaluated,
        degenerate: merged.degenerate,
    })
}

/// Best-improvement coordinate ascent from one start map. Returns the final
/// map, or `None` if every reachable map stayed degenerate.
fn ascend(g: &Graph, table: &[f64], m: usize, start: Vec<usize>) -> Option<(f64, Vec<usize>)> {
    let n = start.len();
    let mut ev = Evaluator::new(g, table, m, start);
    let mut current = ev.ratio().unwrap_or(f64::NEG_INFINITY);
    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for v in 0..n {
            let mut best: Option<(f64, usize)> = None;
            for t in 0..m {
                let (pair, edge, moving) = ev.preview(v, t);
                if let Some(r) = ev.ratio_of(pair, edge, moving) {
                    if best.is_none_or(|(b, _)| r > b) {
                        best = Some((r, t));
                    }
                }
            }
            if let Some((r, t)) = best {
                if t != ev.values[v] && r > current + MOVE_TOL * current.abs().max(1.0) {
                    ev.set(v, t);
                    current = r;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    let exact = Evaluator::new(g, table, m, ev.values.clone()).ratio()?;
    Some((exact, ev.values))
}

/// Lower bound on `γ` by coordinate ascent from `restarts` uniform maps.
///
/// Each sweep visits vertices in order and moves `f(v)` to the target with
/// the largest ratio (smallest index on ties) when that strictly improves.
pub fn gamma_local_search(
    g: &Graph,
    metric: &MetricMatrix,
    p: f64,
    restarts: usize,
    seed: u64,
) -> Result<GammaEstimate> {
    check_p(p)?;
    require_finite(metric)?;
    if restarts == 0 {
        return param("need at least one restart");
    }
    if g.edge_count() == 0 {
        return param("graph has no edges");
    }
    let (n, m) = (g.n(), metric.k());
    let table = metric.powered(p);
    let results: Vec<Option<(f64, Vec<usize>)>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, r as u64);
            let start = (0..n).map(|_| rng.random_range(0..m)).collect();
            ascend(g, &table, m, start)
        })
        .collect();
    let mut degenerate = 0;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for res in results {
        match res {
            None => degenerate += 1,
            Some((r, values)) => {
                if best.as_ref().is_none_or(|(b, _)| r > *b) {
                    best = Some((r, values));
                }
            }
        }
    }
    Ok(GammaEstimate {
        lower: best.map(|(value, values)| LowerBound { value, witness: VertexMap { m, values } }),
        upper: None,
        exact: false,
        evaluated: restarts as u64,
        degenerate,
    })
}

/// Upper bound on `γ(G, dist_H)` from an optimal L1 embedding of the host.
///
/// With ordered vertex pairs against unordered edges, real-valued maps
/// satisfy the Poincaré inequality with constant `d/(d − λ2)`, twice
/// [`classical_gamma`](crate::spectral::classical_gamma). On `K_4` both the
/// complete-graph law and this constant give 3/4.
pub fn gamma_upper_certificate(g: &Graph, h: &Graph, tol: f64) -> Result<GammaEstimate> {
    let d = g.require_regular()? as f64;
    if !h.is_connected() {
        return Err(Error::Degenerate("host graph is disconnected".into()));
    }
    let (distortion, _) = min_l1_distortion(&all_pairs_distances(h))?;
    let l2 = lambda2(g, tol)?;
    let classical = classical_gamma_from(d, l2)?;
    Ok(GammaEstimate {
        lower: None,
        upper: Some(UpperBound {
            value: distortion * 2.0 * classical,
            provenance: Provenance::L1Certificate {
                distortion,
                classical_gamma: classical,
                lambda2: l2,
                stated: distortion * classical,
            },
        }),
        exact: false,
        evaluated: 0,
        degenerate: 0,
    })
}

/// The specialized bound used for maps with a small image.
///
/// If `λ2(G) <= 2.1√(d−1)`, every host subset whose induced metric embeds in
/// L1 with distortion `216/ε` gives `γ <= (216/ε)·d/(2(d−λ2))`, and that is
/// at most `10746/ε` for every `d >= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpecializedBound {
    pub lambda2: f64,
    pub part_b: bool,
    pub classical_gamma: f64,
    pub via_distortion: f64,
    pub constant: f64,
    pub within_constant: bool,
}

pub fn specialized_bound(g: &Graph, eps: f64) -> Result<SpecializedBound> {
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("ε = {eps} must lie in (0, 1)"));
    }
    let d = g.require_regular()? as f64;
    let l2 = lambda2(g, DEFAULT_TOL)?;
    let part_b = l2 <= 2.1 * (d - 1.0).sqrt() + 1e-12;
    let classical = classical_gamma_from(d, l2)?;
    let via_distortion = 216.0 / eps * classical;
    let constant = 10746.0 / eps;
    Ok(SpecializedBound {
        lambda2: l2,
        part_b,
        classical_gamma: classical,
        via_distortion,
        constant,
        within_constant: via_distortion <= constant * (1.0 + 1e-12),
    })
}

/// `max_{d >= 3} 216·d/(2(d − 2.1√(d−1)))`, located by scanning `d` up to
/// `d_max`; the function decreases for large `d`.
pub fn specialized_constant(d_max: usize) -> (usize, f64) {
    (3..=d_max.max(3))
        .map(|d| {
            let d = d as f64;
            (d as usize, 216.0 * d / (2.0 * (d - 2.1 * (d - 1.0).sqrt())))
        })
        .fold((3, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
}

/// `max{exp(12·2^q·(d/h)·ln d), 5^q·2^{q/p}·γ_p^{q/p}}`, kept in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtrapolationBound {
    pub ln_exp_branch: f64,
    pub ln_power_branch: f64,
    pub ln_value: f64,
    /// `exp(ln_value)`, infinite when not representable.
    pub value: f64,
}

pub fn extrapolation_bound(gamma_p: f64, p: f64, q: f64, d: f64, h: f64) -> Result<ExtrapolationBound> {
    check_extrapolation(gamma_p, p, q, d, h)?;
    let ln_exp_branch = 12.0 * q.exp2() * (d / h) * d.ln();
    let ln_power_branch = q * 5f64.ln() + (q / p) * 2f64.ln() + (q / p) * gamma_p.ln();
    let ln_value = ln_exp_branch.max(ln_power_branch);
    Ok(ExtrapolationBound { ln_exp_branch, ln_power_branch, ln_value, value: ln_value.exp() })
}

fn check_extrapolation(gamma_p: f64, p: f64, q: f64, d: f64, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return param(format!("Cheeger constant h = {h} must be positive"));
    }
    check_p(p)?;
    if !(q >= p && q.is_finite()) {
        return param(format!("need p <= q, got p = {p}, q = {q}"));
    }
    if !(d > 1.0 && d.is_finite()) {
        return param(format!("degree d = {d} must exceed 1"));
    }
    if !(gamma_p >= 0.0 && gamma_p.is_finite()) {
        return param(format!("γ_p = {gamma_p} must be finite and nonnegative"));
    }
    Ok(())
}

/// `ln` of [`extrapolation_bound`] recomputed in decimal arithmetic with
/// `digits` significant digits.
pub fn extrapolation_ln_decimal(gamma_p: f64, p: f64, q: f64, d: f64, h: f64, digits: usize) -> Result<f64> {
    check_extrapolation(gamma_p, p, q, d, h)?;
    let (gp, pp, qq, dd, hh) =
        (decimal(gamma_p, digits), decimal(p, digits), decimal(q, digits), decimal(d, digits), decimal(h, digits));
    let two = decimal(2.0, digits);
    let five = decimal(5.0, digits);
    let exp_branch = decimal(12.0, digits) * (&qq * two.ln()).exp() * (&dd / &hh) * dd.ln();
    let ratio = &qq / &pp;
    let mut ln = exp_branch.to_f64().value();
    if gamma_p > 0.0 {
        let power = &qq * five.ln() + &ratio * two.ln() + &ratio * gp.ln();
        ln = ln.max(power.to_f64().value());
    }
    Ok(ln)
}

/// `avg_{u,v} dist_G(u,v) / γ_upper`: any embedding of `G` into `H` has
/// distortion at least this when `γ_upper >= γ(G, dist_H)`.
pub fn distortion_lower_bound(g: &Graph, gamma_upper: f64) -> Result<f64> {
    if gamma_upper.is_nan() || gamma_upper <= 0.0 {
        return param(format!("γ upper bound {gamma_upper} must be positive"));
    }
    let s = metric_summary(g);
    if !s.connected {
        return Err(Error::Degenerate("graph is disconnected".into()));
    }
    Ok(s.average_distance / gamma_upper)
}

/// Exact bi-Lipschitz distortion of `dist_G` into `dist_H` over all
/// injections, with branch and bound on the running stretch ratio.
pub fn min_distortion_bruteforce(g: &Graph, h: &Graph) -> Result<f64> {
    min_distortion_bruteforce_capped(g, h, INJECTION_CAP)
}

pub fn min_distortion_bruteforce_capped(g: &Graph, h: &Graph, cap: u64) -> Result<f64> {
    let (n, m) = (g.n(), h.n());
    if n > m {
        return param(format!("no injection from {n} vertices into {m}"));
    }
    let count: f64 = (0..n).map(|i| (m - i) as f64).product();
    if count > cap as f64 {
        return resource("injections m!/(m-n)!", count, cap as f64);
    }
    let dg = all_pairs_distances(g);
    let dh = all_pairs_distances(h);
    if !dg.is_finite() {
        return Err(Error::Degenerate("source graph is disconnected".into()));
    }
    if n < 2 {
        return Ok(1.0);
    }

    struct Search<'a> {
        n: usize,
        dg: &'a MetricMatrix,
        dh: &'a MetricMatrix,
        image: Vec<usize>,
        used: Vec<bool>,
        best: f64,
    }
    impl Search<'_> {
        fn go(&mut self, i: usize, lo: f64, hi: f64) {
            if i == self.n {
                self.best = self.best.min(hi / lo);
                return;
            }
            for t in 0..self.used.len() {
                if self.used[t] {
                    continue;
                }
                let (mut lo2, mut hi2) = (lo, hi);
                for j in 0..i {
                    let r = self.dh.get(self.image[j], t) / self.dg.get(j, i);
                    lo2 = lo2.min(r);
                    hi2 = hi2.max(r);
                }
                if !hi2.is_finite() || (lo2 > 0.0 && hi2 / lo2 >= self.best) {
                    continue;
                }
                self.used[t] = true;
                self.image.push(t);
                self.go(i + 1, lo2, hi2);
                self.image.pop();
                self.used[t] = false;
            }
        }
    }
    let mut s = Search { n, dg: &dg, dh: &dh, image: Vec::with_capacity(n), used: vec![false; m], best: f64::INFINITY };
    s.go(0, f64::INFINITY, 0.0);
    if s.best.is_finite() {
        Ok(s.best)
    } else {
        Err(Error::Degenerate("every injection stretches some pair infinitely".into()))
    }
}
