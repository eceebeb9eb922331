//! Exact minimal L1 distortion of a small finite metric.
//!
//! A finite metric embeds into L1 with distortion `D` exactly when some
//! nonnegative combination `σ = Σ w_C δ_C` of cut semimetrics satisfies
//! `ϱ <= σ <= D·ϱ` on every pair. The lower side is normalized to 1, so the
//! optimum is the linear program
//!
//! ```text
//! minimize D  s.t.  Σ_C w_C δ_C(i,j) >= ϱ(i,j),  Σ_C w_C δ_C(i,j) - D·ϱ(i,j) <= 0,  w >= 0.
//! ```
//!
//! Cuts are enumerated with point 0 always inside `C`, since `δ_C = δ_{C^c}`.

use serde::Serialize;

use crate::error::{param, resource, Result};
use crate::graph::MetricMatrix;
use crate::lp::{simplex_solve, LinearProgram, Relation};

pub const CUT_CAP: usize = 12;
pub const PIVOT_TOL: f64 = 1e-9;
pub const CERTIFICATE_TOL: f64 = 1e-6;

/// Nonnegative cut weights plus the distortion they certify.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutEmbedding {
    pub k: usize,
    /// Weight of cut `i`, whose member mask is [`CutEmbedding::cut_mask`]`(i)`.
    pub weights: Vec<f64>,
    pub distortion: f64,
}

impl CutEmbedding {
    pub fn cut_count(k: usize) -> usize {
        if k < 2 {
            0
        } else {
            (1usize << (k - 1)) - 1
        }
    }

    /// Members of cut `index` as a bitmask; always contains point 0.
    pub fn cut_mask(index: usize) -> u32 {
        1 | ((index as u32) << 1)
    }

    /// Builds weights from `(member mask, weight)` pairs; a cut and its
    /// complement are the same cut.
    pub fn from_cuts(k: usize, cuts: &[(u32, f64)], distortion: f64) -> Result<Self> {
        let full = if k >= 32 { u32::MAX } else { (1u32 << k) - 1 };
        let mut weights = vec![0.0; Self::cut_count(k)];
        for &(mask, w) in cuts {
            let mask = if mask & 1 == 0 { !mask & full } else { mask & full };
            if mask == full {
                return param("a cut must be a nonempty proper subset");
            }
            weights[(mask >> 1) as usize] += w;
        }
        Ok(CutEmbedding { k, weights, distortion })
    }

    /// `Σ_C w_C δ_C(i, j)`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let sep = (1u32 << i) | (1u32 << j);
        self.weights
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                let mask = Self::cut_mask(*idx) & sep;
                mask != 0 && mask != sep
            })
            .map(|(_, w)| w)
            .sum()
    }
}

/// Which side of the certificate chain a pair violates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Violation {
    NegativeWeight { cut: usize },
    Lower { i: usize, j: usize, metric: f64, embedded: f64 },
    Upper { i: usize, j: usize, metric: f64, embedded: f64 },
    DimensionMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmbeddingCheck {
    pub valid: bool,
    pub witness: Option<Violation>,
}

/// Checks `ϱ <= σ <= D·ϱ` pairwise, with relative slack `tol`.
pub fn verify_embedding(m: &MetricMatrix, emb: &CutEmbedding, tol: f64) -> EmbeddingCheck {
    let fail = |v| EmbeddingCheck { valid: false, witness: Some(v) };
    if emb.k != m.k() || emb.weights.len() != CutEmbedding::cut_count(emb.k) {
        return fail(Violation::DimensionMismatch);
    }
    if let Some(cut) = emb.weights.iter().position(|&w| w < 0.0 || w.is_nan()) {
        return fail(Violation::NegativeWeight { cut });
    }
    for i in 0..m.k() {
        for j in i + 1..m.k() {
            let metric = m.get(i, j);
            let embedded = emb.distance(i, j);
            let slack = tol * metric.max(1.0);
            if embedded < metric - slack {
                return fail(Violation::Lower { i, j, metric, embedded });
            }
            if embedded > emb.distortion * metric + slack * emb.distortion.max(1.0) {
                return fail(Violation::Upper { i, j, metric, embedded });
            }
        }
    }
    EmbeddingCheck { valid: true, witness: None }
}

/// `c_{L1}` of a finite metric on at most [`CUT_CAP`] points, with a
/// certificate that has been re-verified at [`CERTIFICATE_TOL`].
pub fn min_l1_distortion(m: &MetricMatrix) -> Result<(f64, CutEmbedding)> {
    let k = m.k();
    if k > CUT_CAP {
        return resource("cut-cone LP (points)", k as f64, CUT_CAP as f64);
    }
    for i in 0..k {
        for j in i + 1..k {
            let d = m.get(i, j);
            if !d.is_finite() {
                return param(format!("distance ({i}, {j}) is infinite"));
            }
            if d <= 0.0 {
                return param(format!("distance ({i}, {j}) is zero; not a metric"));
            }
        }
    }
    if k < 2 {
        return Ok((1.0, CutEmbedding { k, weights: Vec::new(), distortion: 1.0 }));
    }

    let scale = m.diameter();
    let cuts = CutEmbedding::cut_count(k);
    let d_var = cuts;
    let mut objective = vec![0.0; cuts + 1];
    objective[d_var] = 1.0;
    let mut lp = LinearProgram::new(objective);
    for i in 0..k {
        for j in i + 1..k {
            let rho = m.get(i, j) / scale;
            let sep = (1u32 << i) | (1u32 << j);
            let delta: Vec<f64> = (0..cuts)
                .map(|c| {
                    let s = CutEmbedding::cut_mask(c) & sep;
                    if s != 0 && s != sep {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let mut lower = delta.clone();
            lower.push(0.0);
            lp.constrain(lower, Relation::Ge, rho);
            let mut upper = delta;
            upper.push(-rho);
            lp.constrain(upper, Relation::Le, 0.0);
        }
    }
    let sol = simplex_solve(&lp, PIVOT_TOL)?;

    // Rescale so the tightest lower constraint holds with equality; the
    // certified distortion is then max σ/ϱ over pairs.
    let mut weights: Vec<f64> = sol.x[..cuts].iter().map(|&w| w.max(0.0) * scale).collect();
    let mut emb = CutEmbedding { k, weights: weights.clone(), distortion: 1.0 };
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..k {
        for j in i + 1..k {
            let r = emb.distance(i, j) / m.get(i, j);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if lo <= 0.0 {
        return Err(crate::error::Error::Numeric { msg: "LP solution leaves a pair uncovered".into(), residual: lo });
    }
    for w in weights.iter_mut() {
        *w /= lo;
    }
    emb.weights = weights;
    emb.distortion = (hi / lo).max(1.0);
    let check = verify_embedding(m, &emb, CERTIFICATE_TOL);
    if !check.valid {
        return Err(crate::error::Error::Numeric {
            msg: format!("certificate failed re-verification: {:?}", check.witness),
            residual: hi / lo - sol.x[d_var],
        });
    }
    Ok((emb.distortion, emb))
}
