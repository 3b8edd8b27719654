//! Binary detection metrics: error-rate curves, DCF, EER, and Cllr.
//!
//! Everything here treats the bona fide class as the positive class and
//! applies the shared decision rule: a trial is accepted exactly when its
//! score is at or above the threshold. Curves are swept in a single merge
//! pass over the sorted class scores, so building one is `O(n log n)` and
//! every metric after that is linear in the number of distinct scores.

use serde::{Deserialize, Serialize};

use crate::cost::CmCostModel;
use crate::error::MetricError;

/// Numerically safe `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Logistic sigmoid.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn check_class(scores: &[f64], class: &'static str) -> Result<(), MetricError> {
    if scores.is_empty() {
        Err(MetricError::EmptyClass { class })
    } else {
        Ok(())
    }
}

/// Linear interpolation between two thresholds, falling back to the finite
/// endpoint when the segment touches a sentinel.
fn interpolate_threshold(lo: f64, hi: f64, t: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + t * (hi - lo),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    }
}

/// Empirical miss / false-alarm trade-off of one score partition.
///
/// Row `i` holds the rates of the decision rule `accept iff score >=
/// thresholds[i]`. The first row is the `-inf` accept-everything sentinel
/// `(p_miss, p_fa) = (0, 1)` and the last is the `+inf` reject-everything
/// sentinel `(1, 0)`; between them there is one row per distinct score, in
/// increasing order. Rates are constant between consecutive thresholds, so
/// the rows describe the rule at every real threshold, not only the stored
/// ones (see [`ErrorRateCurve::rates_at`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRateCurve {
    thresholds: Vec<f64>,
    p_miss: Vec<f64>,
    p_fa: Vec<f64>,
}

impl ErrorRateCurve {
    /// Sweeps the curve for `bona_fide` (positive) vs `spoof` (negative)
    /// scores. Scores must be finite; [`crate::ScoreSet`] construction
    /// already guarantees that for submission data.
    pub fn from_scores(bona_fide: &[f64], spoof: &[f64]) -> Result<Self, MetricError> {
        check_class(bona_fide, "bona fide")?;
        check_class(spoof, "spoof")?;
        let mut bona = bona_fide.to_vec();
        let mut spf = spoof.to_vec();
        bona.sort_unstable_by(f64::total_cmp);
        spf.sort_unstable_by(f64::total_cmp);
        let nb = bona.len() as f64;
        let ns = spf.len() as f64;

        let mut thresholds = Vec::with_capacity(bona.len() + spf.len() + 2);
        let mut p_miss = Vec::with_capacity(bona.len() + spf.len() + 2);
        let mut p_fa = Vec::with_capacity(bona.len() + spf.len() + 2);
        thresholds.push(f64::NEG_INFINITY);
        p_miss.push(0.0);
        p_fa.push(1.0);

        // Merge the two sorted lists over their distinct values. When a
        // value is selected every smaller score has already been consumed,
        // so `bi`/`sj` are exactly the strict-below counts at that value.
        let (mut bi, mut sj) = (0usize, 0usize);
        loop {
            let value = match (bona.get(bi), spf.get(sj)) {
                (Some(&b), Some(&s)) => b.min(s),
                (Some(&b), None) => b,
                (None, Some(&s)) => s,
                (None, None) => break,
            };
            thresholds.push(value);
            p_miss.push(bi as f64 / nb);
            p_fa.push((spf.len() - sj) as f64 / ns);
            while bi < bona.len() && bona[bi] == value {
                bi += 1;
            }
            while sj < spf.len() && spf[sj] == value {
                sj += 1;
            }
        }

        thresholds.push(f64::INFINITY);
        p_miss.push(1.0);
        p_fa.push(0.0);
        Ok(ErrorRateCurve {
            thresholds,
            p_miss,
            p_fa,
        })
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    /// Always `false`: a curve carries at least its two sentinel rows.
    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn p_miss(&self) -> &[f64] {
        &self.p_miss
    }

    pub fn p_fa(&self) -> &[f64] {
        &self.p_fa
    }

    /// `(p_miss, p_fa)` of the rule `accept iff score >= threshold` for an
    /// arbitrary real threshold, via lookup of the first stored row at or
    /// above it. The rates are right-continuous in this direction: every
    /// threshold in `(s_i, s_{i+1}]` makes the same decisions as `s_{i+1}`.
    pub fn rates_at(&self, threshold: f64) -> (f64, f64) {
        let idx = self.thresholds.partition_point(|t| *t < threshold);
        (self.p_miss[idx], self.p_fa[idx])
    }
}

/// Normalized detection cost `beta * p_miss + p_fa` at one operating point.
pub fn compute_dcf(model: &CmCostModel, p_miss: f64, p_fa: f64) -> f64 {
    model.beta * p_miss + p_fa
}

/// Minimum DCF over the curve and the threshold attaining it. Ties break
/// toward the smallest threshold.
pub fn compute_min_dcf(curve: &ErrorRateCurve, model: &CmCostModel) -> (f64, f64) {
    let mut best = f64::INFINITY;
    let mut best_threshold = f64::NEG_INFINITY;
    for i in 0..curve.len() {
        let value = compute_dcf(model, curve.p_miss[i], curve.p_fa[i]);
        if value < best {
            best = value;
            best_threshold = curve.thresholds[i];
        }
    }
    (best, best_threshold)
}

/// Actual DCF of the hard decisions taken at the Bayes threshold
/// `-ln(beta)`, by direct counting on the raw scores.
pub fn compute_act_dcf(
    bona_fide: &[f64],
    spoof: &[f64],
    model: &CmCostModel,
) -> Result<f64, MetricError> {
    check_class(bona_fide, "bona fide")?;
    check_class(spoof, "spoof")?;
    let tau = model.tau_bayes;
    let p_miss = bona_fide.iter().filter(|s| **s < tau).count() as f64 / bona_fide.len() as f64;
    let p_fa = spoof.iter().filter(|s| **s >= tau).count() as f64 / spoof.len() as f64;
    Ok(compute_dcf(model, p_miss, p_fa))
}

/// How the equal error rate is read off the trade-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EerMethod {
    /// Scan the empirical step curve and linearly interpolate between the
    /// two rows where `p_miss - p_fa` changes sign.
    Step,
    /// Intersect the convex hull of the ROC with the diagonal, which lower
    /// bounds the step value.
    Rocch,
}

/// Equal error rate by the given method; returns `(eer, threshold)`.
pub fn compute_eer_with(curve: &ErrorRateCurve, method: EerMethod) -> (f64, f64) {
    match method {
        EerMethod::Step => compute_eer(curve),
        EerMethod::Rocch => compute_eer_rocch(curve),
    }
}

/// Equal error rate of the empirical step curve; returns `(eer,
/// threshold)`.
///
/// `p_miss - p_fa` is nondecreasing along the curve, starting at `-1` and
/// ending at `+1`. The first row where it reaches zero exactly is returned
/// as is; otherwise the crossing is interpolated linearly between the last
/// negative row and the first positive one. A crossing segment that touches
/// a sentinel reports the finite endpoint's threshold.
pub fn compute_eer(curve: &ErrorRateCurve) -> (f64, f64) {
    for i in 0..curve.len() {
        let d = curve.p_miss[i] - curve.p_fa[i];
        if d == 0.0 {
            return (curve.p_miss[i], curve.thresholds[i]);
        }
        if d > 0.0 {
            let pd = curve.p_miss[i - 1] - curve.p_fa[i - 1];
            let t = pd / (pd - d);
            let eer = curve.p_miss[i - 1] + t * (curve.p_miss[i] - curve.p_miss[i - 1]);
            let threshold = interpolate_threshold(curve.thresholds[i - 1], curve.thresholds[i], t);
            return (eer, threshold);
        }
    }
    unreachable!("p_miss - p_fa reaches +1 at the +inf sentinel")
}

/// Equal error rate of the ROC convex hull; returns `(eer, threshold)`.
///
/// The hull is taken over the curve's `(p_fa, p_miss)` points (keeping, for
/// each false-alarm rate, the smallest miss rate) and intersected with the
/// `p_miss = p_fa` diagonal. Its value never exceeds the step EER.
pub fn compute_eer_rocch(curve: &ErrorRateCurve) -> (f64, f64) {
    // One point per distinct p_fa, keeping the lowest p_miss. Walking rows
    // from the +inf sentinel backwards visits p_fa in nondecreasing order.
    let mut points: Vec<(f64, f64, f64)> = Vec::with_capacity(curve.len());
    for i in (0..curve.len()).rev() {
        let (pf, pm, tau) = (curve.p_fa[i], curve.p_miss[i], curve.thresholds[i]);
        match points.last_mut() {
            Some(last) if last.0 == pf => {
                if pm < last.1 {
                    *last = (pf, pm, tau);
                }
            }
            _ => points.push((pf, pm, tau)),
        }
    }

    // Lower convex hull in (p_fa, p_miss), Andrew's monotone chain.
    let cross = |o: &(f64, f64, f64), a: &(f64, f64, f64), b: &(f64, f64, f64)| -> f64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }

    // The gap p_miss - p_fa starts at or above zero (p_fa = 0 column) and
    // ends at -1 (the accept-everything corner), so a sign change exists.
    let mut prev = hull[0];
    let mut prev_gap = prev.1 - prev.0;
    if prev_gap == 0.0 {
        return (prev.1, prev.2);
    }
    for &point in &hull[1..] {
        let gap = point.1 - point.0;
        if gap == 0.0 {
            return (point.1, point.2);
        }
        if (gap > 0.0) != (prev_gap > 0.0) {
            let t = prev_gap / (prev_gap - gap);
            let eer = prev.1 + t * (point.1 - prev.1);
            let threshold = interpolate_threshold(prev.2, point.2, t);
            return (eer, threshold);
        }
        prev = point;
        prev_gap = gap;
    }
    unreachable!("the hull ends at (1, 0) where the gap is negative")
}

/// Log-likelihood-ratio cost: the binary cross-entropy of the scores read
/// as natural-log LLRs, normalized so an uninformative system scores 1.
pub fn compute_cllr(bona_fide: &[f64], spoof: &[f64]) -> Result<f64, MetricError> {
    check_class(bona_fide, "bona fide")?;
    check_class(spoof, "spoof")?;
    let bona_sum: f64 = bona_fide.iter().map(|s| softplus(-s)).sum();
    let spoof_sum: f64 = spoof.iter().map(|s| softplus(*s)).sum();
    let mean = bona_sum / bona_fide.len() as f64 + spoof_sum / spoof.len() as f64;
    Ok(mean / (2.0 * std::f64::consts::LN_2))
}

/// Standard-normal quantile of `p`, or `None` outside `(0, 1)`. DET plots
/// draw error rates on this scale.
pub fn probit(p: f64) -> Option<f64> {
    use statrs::distribution::ContinuousCDF;
    if p > 0.0 && p < 1.0 {
        let normal = statrs::distribution::Normal::new(0.0, 1.0).expect("unit normal");
        Some(normal.inverse_cdf(p))
    } else {
        None
    }
}
