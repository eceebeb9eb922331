//! Checkers for the vertex-expansion property D(α), the embedding property
//! R(ε), the edge-density condition on small induced subgraphs, and the two
//! expansion lemmas derived from D(α).

use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::ln_alpha_tilde;
use crate::cut_embed::{min_l1_distortion, CUT_CAP};
use crate::error::{param, resource, Error, Result};
use crate::graph::{all_pairs_distances, ball, induced_subgraph, metric_summary, Graph};
use crate::rng;
use crate::spectral::{lambda2, DEFAULT_TOL};

/// Largest `n` for an exhaustive D(α) scan.
pub const EXACT_D_CAP: usize = 20;
/// Most subsets an exhaustive R(ε) or edge-density scan may visit.
pub const SUBSET_CAP: u64 = 2_000_000;
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Relative slack on every inequality comparison.
pub const REL_TOL: f64 = 1e-12;
/// Upper end of the exploration range for ε.
pub const EPS_MAX: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    Exact,
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    PassSampled,
}

/// A violated inequality: `lhs < rhs` (or `lhs > rhs` for upper bounds).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub part: &'static str,
    pub set: Vec<usize>,
    pub radius: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: &'static str,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub coverage: CheckMode,
    /// Subsets (or subset/radius families) examined.
    pub tested: u64,
    pub margins: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

impl PropertyReport {
    fn new(property: &'static str, coverage: CheckMode) -> Self {
        PropertyReport {
            property,
            verdict: Verdict::Pass,
            witness: None,
            coverage,
            tested: 0,
            margins: BTreeMap::new(),
            flags: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    fn fail(&mut self, w: Witness) {
        self.verdict = Verdict::Fail;
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    fn margin(&mut self, name: &str, v: f64) {
        self.margins.insert(name.to_string(), v);
    }

    fn flag(&mut self, name: &str, v: bool) {
        self.flags.insert(name.to_string(), v);
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        param(format!("α = {alpha} must lie in (0, 1]"))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < EPS_MAX {
        Ok(())
    } else {
        param(format!("ε = {eps} must lie in (0, {EPS_MAX})"))
    }
}

/// Outcome of the ball inequality for one set over all radii.
#[derive(Clone, Copy, Debug)]
struct SetOutcome {
    min_slack: f64,
    violation: Option<(usize, f64, f64)>,
}

/// Checks `|B(S,ℓ)| >= min{cap, α(d−1)^ℓ|S|}` for every `ℓ >= 1`, where
/// `sizes[ℓ]` is the ball size and the last entry is the stable size.
///
/// Past stabilization the right side keeps growing until it reaches `cap`,
/// so the scan runs until both have happened.
fn scan_sizes(sizes: &[usize], s: usize, cap: f64, ln_alpha: f64, growth: f64) -> SetOutcome {
    let last = sizes.len() - 1;
    let mut out = SetOutcome { min_slack: f64::INFINITY, violation: None };
    let mut l = 1usize;
    loop {
        let size = sizes[l.min(last)] as f64;
        let rhs = cap.min((ln_alpha + l as f64 * growth.ln() + (s as f64).ln()).exp());
        out.min_slack = out.min_slack.min(size / rhs);
        if out.violation.is_none() && size < rhs * (1.0 - REL_TOL) {
            out.violation = Some((l, size, rhs));
        }
        if l >= last && (rhs >= cap || growth <= 1.0) {
            return out;
        }
        l += 1;
    }
}

fn ball_sizes_mask(masks: &[u64], set: u64) -> Vec<usize> {
    let mut sizes = vec![set.count_ones() as usize];
    let mut cur = set;
    let mut frontier = set;
    loop {
        let mut next = cur;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            next |= masks[v];
            f &= f - 1;
        }
        if next == cur {
            return sizes;
        }
        frontier = next & !cur;
        cur = next;
        sizes.push(cur.count_ones() as usize);
    }
}

fn ball_sizes_bfs(g: &Graph, set: &[usize]) -> Vec<usize> {
    let levels = g.bfs_levels(set);
    let max = levels.iter().filter(|&&l| l != u32::MAX).max().copied().unwrap_or(0) as usize;
    let mut hist = vec![0usize; max + 1];
    for &l in &levels {
        if l != u32::MAX {
            hist[l as usize] += 1;
        }
    }
    let mut acc = 0;
    hist.iter()
        .map(|h| {
            acc += h;
            acc
        })
        .collect()
}

fn mask_to_set(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Property D(α): part A by ball growth over all (exact) or sampled sets,
/// part B by `λ2 <= 2.1√(d−1)`.
///
/// Exact mode needs `n <= 20`; the reported witness is the violating set
/// with the smallest bitmask, at its smallest radius.
/// `(mask, radius, lhs, rhs)` of a failing set.
type Violator = (u64, usize, f64, f64);

pub fn check_property_d(g: &Graph, alpha: f64, mode: CheckMode) -> Result<PropertyReport> {
    let d = g.require_regular()?;
    check_alpha(alpha)?;
    let n = g.n();
    let cap = 0.75 * n as f64;
    let growth = d as f64 - 1.0;
    let ln_alpha = alpha.ln();
    let mut report = PropertyReport::new("D", mode);
    report.margin("alpha", alpha);

    match mode {
        CheckMode::Exact => {
            if n > EXACT_D_CAP {
                return resource("exact D(α) scan (n)", n as f64, EXACT_D_CAP as f64);
            }
            let masks = g.adjacency_masks().expect("n <= 20");
            let total = 1u64 << n;
            let chunk = 1u64 << 12;
            let outcomes: Vec<(f64, Option<Violator>)> = (0..total.div_ceil(chunk))
                .into_par_iter()
                .map(|c| {
                    let mut min_slack = f64::INFINITY;
                    let mut first = None;
                    for set in (c * chunk).max(1)..((c + 1) * chunk).min(total) {
                        let o =
                            scan_sizes(&ball_sizes_mask(&masks, set), set.count_ones() as usize, cap, ln_alpha, growth);
                        min_slack = min_slack.min(o.min_slack);
                        if first.is_none() {
                            first = o.violation.map(|(l, a, b)| (set, l, a, b));
                        }
                    }
                    (min_slack, first)
                })
                .collect();
            let mut min_slack = f64::INFINITY;
            for (s, v) in outcomes {
                min_slack = min_slack.min(s);
                if let Some((set, l, lhs, rhs)) = v {
                    report.fail(Witness { part: "A", set: mask_to_set(set), radius: Some(l), lhs, rhs });
                }
            }
            report.tested = total - 1;
            report.margin("min_slack_a", min_slack);
        }
        CheckMode::Sampled { seed, samples } => {
            let mut sets: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
            for u in 0..n {
                for v in u + 1..n {
                    sets.push(vec![u, v]);
                }
            }
            let mut r = rng::seeded(seed);
            for _ in 0..samples {
                let size = (((n as f64).ln() * r.random::<f64>()).exp().floor() as usize).clamp(1, n);
                let mut s = sample(&mut r, n, size).into_vec();
                s.sort_unstable();
                sets.push(s);
            }
            let outcomes: Vec<SetOutcome> =
                sets.par_iter().map(|s| scan_sizes(&ball_sizes_bfs(g, s), s.len(), cap, ln_alpha, growth)).collect();
            let mut min_slack = f64::INFINITY;
            for (s, o) in sets.iter().zip(&outcomes) {
                min_slack = min_slack.min(o.min_slack);
                if let Some((l, lhs, rhs)) = o.violation {
                    report.fail(Witness { part: "A", set: s.clone(), radius: Some(l), lhs, rhs });
                }
            }
            report.tested = sets.len() as u64;
            report.margin("min_slack_a", min_slack);
            if report.verdict == Verdict::Pass {
                report.verdict = Verdict::PassSampled;
            }
            report.notes.push("singletons and pairs exhaustively, then log-uniform random sets".into());
        }
    }

    let l2 = lambda2(g, DEFAULT_TOL)?;
    let bound = 2.1 * growth.sqrt();
    report.margin("lambda2", l2);
    report.margin("lambda2_bound", bound);
    let part_b = l2 <= bound + 1e-9;
    report.flag("part_a", report.witness.is_none());
    report.flag("part_b", part_b);
    if !part_b {
        report.fail(Witness { part: "B", set: Vec::new(), radius: None, lhs: l2, rhs: bound });
    }
    Ok(report)
}

/// Largest `α <= 1` for which part A of D(α) holds: the minimum of
/// `|B(S,ℓ)|/((d−1)^ℓ|S|)` over radii whose ball is below `3n/4`.
pub fn max_alpha(g: &Graph) -> Result<f64> {
    let d = g.require_regular()?;
    let n = g.n();
    if n > EXACT_D_CAP {
        return resource("exact D(α) scan (n)", n as f64, EXACT_D_CAP as f64);
    }
    let masks = g.adjacency_masks().expect("n <= 20");
    let cap = 0.75 * n as f64;
    let growth = d as f64 - 1.0;
    let best = (1u64..1u64 << n)
        .into_par_iter()
        .map(|set| {
            let sizes = ball_sizes_mask(&masks, set);
            let s = set.count_ones() as f64;
            let last = sizes.len() - 1;
            let mut best = f64::INFINITY;
            for (l, &size) in sizes.iter().enumerate().skip(1) {
                if size as f64 >= cap {
                    return best;
                }
                best = best.min(size as f64 / (growth.powi(l as i32) * s));
            }
            if (sizes[last] as f64) < cap {
                if growth > 1.0 {
                    return 0.0;
                }
                best = best.min(sizes[last] as f64 / s);
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best.min(1.0))
}

/// Every subset of `0..n` with size in `1..=max_size`, by size then
/// lexicographically.
fn subsets_up_to(n: usize, max_size: usize, mut f: impl FnMut(&[usize])) {
    for k in 1..=max_size.min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            f(&idx);
            let mut i = k;
            while i > 0 && idx[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

fn binomial_sum(n: usize, max_size: usize) -> f64 {
    let mut total = 0.0;
    let mut c = 1.0;
    for k in 1..=max_size.min(n) {
        c = c * (n - k + 1) as f64 / k as f64;
        total += c;
    }
    total
}

/// `⌊m^{1−ε}⌋`, guarded against rounding just below an integer.
fn small_set_limit(m: usize, eps: f64) -> usize {
    ((m as f64).powf(1.0 - eps) * (1.0 + 1e-12)).floor() as usize
}

fn random_subsets(n: usize, max_size: usize, seed: u64, samples: usize) -> Vec<Vec<usize>> {
    let mut r = rng::seeded(seed);
    (0..samples)
        .map(|_| {
            let size = (((max_size as f64).ln() * r.random::<f64>()).exp().floor() as usize).clamp(1, max_size);
            let mut s = sample(&mut r, n, size).into_vec();
            s.sort_unstable();
            s
        })
        .collect()
}

fn tested_sets(n: usize, max_size: usize, mode: CheckMode) -> Result<Vec<Vec<usize>>> {
    match mode {
        CheckMode::Exact => {
            let count = binomial_sum(n, max_size);
            if count > SUBSET_CAP as f64 {
                return resource("exhaustive subsets", count, SUBSET_CAP as f64);
            }
            let mut sets = Vec::with_capacity(count as usize);
            subsets_up_to(n, max_size, |s| sets.push(s.to_vec()));
            Ok(sets)
        }
        CheckMode::Sampled { seed, samples } => Ok(random_subsets(n, max_size.max(1), seed, samples)),
    }
}

/// Property R(ε): part B exactly, part A on subsets of size at most
/// `min(m^{1−ε}, size_cap, 12)`.
///
/// An induced subgraph `H[S]` with several components has an infinite
/// metric; each component is embedded separately and the report flags it.
/// The verdict is `Pass` only when the whole size range up to `m^{1−ε}`
/// was enumerated.
pub fn check_property_r(h: &Graph, eps: f64, size_cap: usize, mode: CheckMode) -> Result<PropertyReport> {
    check_eps(eps)?;
    let delta = h.require_regular()?;
    let m = h.n();
    let mut report = PropertyReport::new("R", mode);
    report.flag("outside_asymptotic_regime", eps > crate::constants::ASYMPTOTIC_EPS);

    let summary = metric_summary(h);
    let diam_bound = 3.0 * (m as f64).ln() / (delta as f64 - 1.0).ln();
    report.margin("diameter", summary.diameter);
    report.margin("diameter_bound", diam_bound);
    let part_b = summary.connected && summary.diameter <= diam_bound * (1.0 + REL_TOL);
    report.flag("part_b", part_b);

    let limit = small_set_limit(m, eps);
    let max_size = limit.min(size_cap).min(CUT_CAP);
    let exhaustive = matches!(mode, CheckMode::Exact) && max_size == limit;
    let bound = 216.0 / eps;
    report.margin("distortion_bound", bound);
    report.margin("size_limit", limit as f64);
    report.margin("sizes_tested_up_to", max_size as f64);
    report.flag("exhaustive", exhaustive);

    let sets = if max_size == 0 { Vec::new() } else { tested_sets(m, max_size, mode)? };
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut max_distortion: f64 = 1.0;
    let mut multi = 0u64;
    let mut violation = None;
    for s in &sets {
        let (sub, relabel) = induced_subgraph(h, s)?;
        let (comp, count) = sub.components();
        if count > 1 {
            multi += 1;
        }
        let mut worst: f64 = 1.0;
        for c in 0..count {
            let members: Vec<usize> = (0..sub.n()).filter(|&v| comp[v] == c).collect();
            if members.len() < 2 {
                continue;
            }
            let key: Vec<usize> = members.iter().map(|&v| relabel[v]).collect();
            let dist = match cache.get(&key) {
                Some(&v) => v,
                None => {
                    let (csub, _) = induced_subgraph(h, &key)?;
                    let (v, _) = min_l1_distortion(&all_pairs_distances(&csub))?;
                    cache.insert(key, v);
                    v
                }
            };
            worst = worst.max(dist);
        }
        max_distortion = max_distortion.max(worst);
        if violation.is_none() && worst > bound * (1.0 + REL_TOL) {
            violation = Some(Witness { part: "A", set: s.clone(), radius: None, lhs: worst, rhs: bound });
        }
    }
    report.tested = sets.len() as u64;
    report.margin("max_distortion", max_distortion);
    report.margin("multi_component_subsets", multi as f64);
    report.flag("components_tested_separately", multi > 0);
    if multi > 0 {
        report.notes.push(format!(
            "{multi} tested subsets induce a disconnected subgraph; their components were embedded separately"
        ));
    }
    if max_size < limit {
        report.notes.push(format!("sizes above {max_size} (up to {limit}) not tested"));
    }
    if let Some(w) = violation {
        report.fail(w);
    }
    if !part_b {
        report.fail(Witness { part: "B", set: Vec::new(), radius: None, lhs: summary.diameter, rhs: diam_bound });
    }
    if report.verdict == Verdict::Pass && !exhaustive {
        report.verdict = Verdict::PassSampled;
    }
    Ok(report)
}

/// Checks `|E(H[S])| <= factor·|S|` on subsets of size at most `max_size`.
pub fn edge_density_with_factor(h: &Graph, factor: f64, max_size: usize, mode: CheckMode) -> Result<PropertyReport> {
    if factor.is_nan() || factor <= 0.0 {
        return param(format!("factor {factor} must be positive"));
    }
    let m = h.n();
    let max_size = max_size.min(m);
    let mut report = PropertyReport::new("edge_density", mode);
    report.margin("factor", factor);
    let sets = if max_size == 0 { Vec::new() } else { tested_sets(m, max_size, mode)? };
    let results: Vec<usize> = sets
        .par_iter()
        .map(|s| {
            let mut inside = vec![false; m];
            for &v in s {
                inside[v] = true;
            }
            s.iter().map(|&v| h.neighbors(v).iter().filter(|&&w| inside[w]).count()).sum::<usize>() / 2
        })
        .collect();
    let mut max_ratio: f64 = 0.0;
    for (s, &e) in sets.iter().zip(&results) {
        let rhs = factor * s.len() as f64;
        max_ratio = max_ratio.max(e as f64 / s.len() as f64);
        if e as f64 > rhs * (1.0 + REL_TOL) {
            report.fail(Witness { part: "A", set: s.clone(), radius: None, lhs: e as f64, rhs });
        }
    }
    report.tested = sets.len() as u64;
    report.margin("max_edges_per_vertex", max_ratio);
    if report.verdict == Verdict::Pass && matches!(mode, CheckMode::Sampled { .. }) {
        report.verdict = Verdict::PassSampled;
    }
    Ok(report)
}

/// The edge-density condition `|E(H[S])| <= (1 + 7/(ε log_Δ m))|S|` for
/// `|S| <= m^{1−ε}`, tested up to `size_cap`.
pub fn edge_density_check(h: &Graph, eps: f64, size_cap: usize, mode: CheckMode) -> Result<PropertyReport> {
    check_eps(eps)?;
    let delta = h.require_regular()?;
    let m = h.n();
    let factor = 1.0 + 7.0 / (eps * (m as f64).ln() / (delta as f64).ln());
    let limit = small_set_limit(m, eps);
    let max_size = limit.min(size_cap);
    let mut report = edge_density_with_factor(h, factor, max_size, mode)?;
    let exhaustive = matches!(mode, CheckMode::Exact) && max_size == limit;
    report.flag("outside_asymptotic_regime", eps > crate::constants::ASYMPTOTIC_EPS);
    report.flag("exhaustive", exhaustive);
    report.margin("size_limit", limit as f64);
    if report.verdict == Verdict::Pass && !exhaustive {
        report.verdict = Verdict::PassSampled;
    }
    Ok(report)
}

/// Both sides of the cut-edge and boundary-vertex bounds for one set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub cut_edges: usize,
    pub cut_bound: f64,
    pub boundary: usize,
    pub boundary_bound: f64,
    pub holds: bool,
}

/// Cut edges `>= ξ/(1−ξ)·d/200·|A|` and vertices at distance one
/// `>= ξ/(1−ξ)/200·|A|`, for `|A| <= (1−ξ)n` and `λ2 <= 2.1√(d−1)`.
pub fn expansion_lemma_check(g: &Graph, xi: f64, a: &[usize]) -> Result<ExpansionReport> {
    if !(xi > 0.0 && xi < 1.0) {
        return param(format!("ξ = {xi} must lie in (0, 1)"));
    }
    let d = g.require_regular()?;
    let n = g.n();
    let mut inside = vec![false; n];
    for &v in a {
        if v >= n {
            return param(format!("vertex {v} out of range"));
        }
        inside[v] = true;
    }
    let size = inside.iter().filter(|&&b| b).count();
    let l2 = lambda2(g, DEFAULT_TOL)?;
    let bound = 2.1 * (d as f64 - 1.0).sqrt();
    if l2 > bound + 1e-9 {
        return Err(Error::Precondition(format!("λ2 = {l2} exceeds 2.1√(d−1) = {bound}")));
    }
    if size as f64 > (1.0 - xi) * n as f64 * (1.0 + REL_TOL) {
        return Err(Error::Precondition(format!("|A| = {size} exceeds (1−ξ)n = {}", (1.0 - xi) * n as f64)));
    }
    let cut_edges = g.edges().iter().filter(|&&(u, v)| inside[u] != inside[v]).count();
    let boundary = (0..n).filter(|&v| !inside[v] && g.neighbors(v).iter().any(|&w| inside[w])).count();
    let k = xi / (1.0 - xi);
    let cut_bound = k * d as f64 / 200.0 * size as f64;
    let boundary_bound = k / 200.0 * size as f64;
    Ok(ExpansionReport {
        cut_edges,
        cut_bound,
        boundary,
        boundary_bound,
        holds: cut_edges as f64 >= cut_bound * (1.0 - REL_TOL) && boundary as f64 >= boundary_bound * (1.0 - REL_TOL),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrengthenedReport {
    pub ball: usize,
    pub ln_alpha_tilde: f64,
    /// `ln(α̃ (d−1)^ℓ |S|)`
    pub ln_growth_term: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|B(S,ℓ)| >= min{15n/16, α̃(d−1)^ℓ|S|}` for a graph with property D(α).
pub fn strengthened_expansion_check(g: &Graph, alpha: f64, set: &[usize], radius: usize) -> Result<StrengthenedReport> {
    check_alpha(alpha)?;
    let d = g.require_regular()?;
    if set.is_empty() {
        return param("S must be nonempty");
    }
    if radius == 0 {
        return param("ℓ must be a positive integer");
    }
    let pre = check_property_d(g, alpha, CheckMode::Exact)?;
    if !pre.passed() {
        return Err(Error::Precondition(format!("graph does not satisfy D({alpha}): {:?}", pre.witness)));
    }
    let b = ball(g, set, radius)?;
    let s = {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let lat = ln_alpha_tilde(alpha.ln(), d);
    let ln_growth_term = lat + radius as f64 * (d as f64 - 1.0).ln() + (s as f64).ln();
    let rhs = (15.0 * g.n() as f64 / 16.0).min(ln_growth_term.exp());
    Ok(StrengthenedReport {
        ball: b.len(),
        ln_alpha_tilde: lat,
        ln_growth_term,
        rhs,
        holds: b.len() as f64 >= rhs * (1.0 - REL_TOL),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recheck_d(g: &Graph, alpha: f64, w: &Witness) -> bool {
        let d = g.degree().unwrap() as f64;
        let l = w.radius.unwrap();
        let b = ball(g, &w.set, l).unwrap().len() as f64;
        b < (0.75 * g.n() as f64).min(alpha * (d - 1.0).powi(l as i32) * w.set.len() as f64)
    }

    #[test]
    fn d_on_small_graphs() {
        let r = check_property_d(&Graph::complete(4), 1.0, CheckMode::Exact).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.tested, 15);
        let r = check_property_d(&Graph::hypercube(3), 1.0, CheckMode::Exact).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.margins["min_slack_a"] >= 1.0);
    }

    #[test]
    fn d_fails_on_disconnected_graph() {
        let g = Graph::complete(4).disjoint_union(&Graph::complete(4));
        let r = check_property_d(&g, 1e-3, CheckMode::Exact).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.set, vec![0]);
        assert!(recheck_d(&g, 1e-3, &w));
        assert_eq!(max_alpha(&g).unwrap(), 0.0);
    }

    #[test]
    fn sampled_mode_labels_its_verdict() {
        let g = Graph::petersen();
        let r = check_property_d(&g, 0.5, CheckMode::Sampled { seed: 3, samples: 200 }).unwrap();
        assert_eq!(r.verdict, Verdict::PassSampled);
        assert_eq!(r.tested, 10 + 45 + 200);
        let bad = Graph::complete(4).disjoint_union(&Graph::complete(4));
        let r = check_property_d(&bad, 0.5, CheckMode::Sampled { seed: 3, samples: 10 }).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(recheck_d(&bad, 0.5, r.witness.as_ref().unwrap()));
    }

    #[test]
    fn max_alpha_is_the_threshold() {
        assert_eq!(max_alpha(&Graph::complete(4)).unwrap(), 1.0);
        assert_eq!(max_alpha(&Graph::hypercube(3)).unwrap(), 1.0);
        let g = Graph::petersen();
        let a = max_alpha(&g).unwrap();
        if a < 1.0 {
            assert!(check_property_d(&g, a, CheckMode::Exact).unwrap().flags["part_a"]);
            let r = check_property_d(&g, a * (1.0 + 1e-6), CheckMode::Exact).unwrap();
            assert!(!r.flags["part_a"]);
        }
        // prism over C10: five consecutive rungs reach only 14 < 15 vertices at radius 1
        let mut edges = Vec::new();
        for i in 0..10 {
            edges.extend([(i, (i + 1) % 10), (10 + i, 10 + (i + 1) % 10), (i, 10 + i)]);
        }
        let c = Graph::from_edges(20, &edges).unwrap();
        let a = max_alpha(&c).unwrap();
        assert!(a <= 0.7);
        assert!(a < 1.0);
        assert!(check_property_d(&c, a, CheckMode::Exact).unwrap().flags["part_a"]);
        assert!(!check_property_d(&c, a * (1.0 + 1e-6), CheckMode::Exact).unwrap().flags["part_a"]);
    }

    #[test]
    fn irregular_graph_is_rejected() {
        assert!(matches!(check_property_d(&Graph::path(4), 1.0, CheckMode::Exact), Err(Error::Parameter(_))));
    }

    #[test]
    fn r_on_petersen() {
        let r = check_property_r(&Graph::petersen(), 0.2, 6, CheckMode::Exact).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.flags["exhaustive"] && r.flags["outside_asymptotic_regime"]);
        assert_eq!(r.tested, 10 + 45 + 120 + 210 + 252 + 210);
        assert!(r.margins["max_distortion"] < 2.0);
        let capped = check_property_r(&Graph::petersen(), 0.2, 4, CheckMode::Exact).unwrap();
        assert_eq!(capped.verdict, Verdict::PassSampled);
    }

    #[test]
    fn r_fails_part_b_when_disconnected() {
        let g = Graph::complete(4).disjoint_union(&Graph::complete(4));
        let r = check_property_r(&g, 0.1, 3, CheckMode::Exact).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness.unwrap().part, "B");
        assert!(check_property_r(&Graph::petersen(), 0.3, 6, CheckMode::Exact).is_err());
    }

    #[test]
    fn edge_density_examples() {
        let r = edge_density_check(&Graph::petersen(), 0.2, 6, CheckMode::Exact).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        // two K4 joined by a perfect matching: each K4 has 6 edges on 4 vertices
        let mut edges: Vec<(usize, usize)> = Graph::complete(4).disjoint_union(&Graph::complete(4)).edges();
        edges.extend((0..4).map(|i| (i, i + 4)));
        let host = Graph::from_edges(8, &edges).unwrap();
        let r = edge_density_with_factor(&host, 1.2, 4, CheckMode::Exact).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.set, vec![0, 1, 2, 3]);
        assert_eq!(w.lhs, 6.0);
        let forest = edge_density_with_factor(&Graph::path(6), 1.0, 6, CheckMode::Exact).unwrap();
        assert_eq!(forest.verdict, Verdict::Pass);
    }

    #[test]
    fn expansion_lemma_examples() {
        let q3 = Graph::hypercube(3);
        let r = expansion_lemma_check(&q3, 0.5, &[0, 1, 2, 3]).unwrap();
        assert!(r.holds && r.cut_edges == 4);
        let r = expansion_lemma_check(&Graph::petersen(), 0.125, &[0, 1, 2, 3, 4]).unwrap();
        assert!(r.holds);
        assert!(matches!(expansion_lemma_check(&q3, 0.5, &[0, 1, 2, 3, 4]), Err(Error::Precondition(_))));
    }

    #[test]
    fn strengthened_expansion_examples() {
        let r = strengthened_expansion_check(&Graph::complete(4), 1.0, &[0], 1).unwrap();
        assert!(r.holds && r.ball == 4);
        assert!(r.ln_alpha_tilde < -1000.0);
        assert!(strengthened_expansion_check(&Graph::hypercube(3), 1.0, &[0], 2).unwrap().holds);
        assert!(strengthened_expansion_check(&Graph::complete(4), 1.0, &[], 1).is_err());
        let bad = Graph::complete(4).disjoint_union(&Graph::complete(4));
        assert!(matches!(strengthened_expansion_check(&bad, 0.5, &[0], 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn subset_enumeration_order() {
        let mut seen = Vec::new();
        subsets_up_to(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[4], vec![0, 1]);
        assert_eq!(seen[9], vec![2, 3]);
        assert_eq!(binomial_sum(4, 2), 10.0);
    }
}
