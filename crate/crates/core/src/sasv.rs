//! Track 2 metrics: a-DCF on fused scores, plus the tandem metrics
//! (t-DCF and concurrent t-EER) that judge an ASV and a countermeasure
//! operating together.
//!
//! A tandem system accepts a trial only when both subsystems do: `asv >=
//! tau_asv && cm >= tau_cm`. All rates below follow the shared decision
//! rule (accept at or above the threshold), so they agree exactly with the
//! binary machinery in [`crate::detection`].

use serde::{Deserialize, Serialize};

use crate::cost::SasvCostModel;
use crate::detection::{compute_eer, ErrorRateCurve};
use crate::error::MetricError;
use crate::model::{SasvPartition, TandemPartition};

fn check_class(len: usize, class: &'static str) -> Result<(), MetricError> {
    if len == 0 {
        Err(MetricError::EmptyClass { class })
    } else {
        Ok(())
    }
}

/// Linear interpolation that falls back to the finite endpoint when the
/// segment touches a sentinel.
fn interpolate_threshold(lo: f64, hi: f64, t: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + t * (hi - lo),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    }
}

fn weighted(model: &SasvCostModel, p_miss: f64, p_fa_nontarget: f64, p_fa_spoof: f64) -> f64 {
    model.alpha * p_miss + (1.0 - model.gamma) * p_fa_nontarget + model.gamma * p_fa_spoof
}

/// a-DCF of the rule `accept iff score >= threshold`, by direct counting.
pub fn compute_a_dcf(
    partition: &SasvPartition,
    model: &SasvCostModel,
    threshold: f64,
) -> Result<f64, MetricError> {
    check_class(partition.target.len(), "target")?;
    check_class(partition.nontarget.len(), "nontarget")?;
    check_class(partition.spoof.len(), "spoof")?;
    // Rates are single-rounded count/total quotients so that a sweep and a
    // recount at its reported threshold agree bit for bit.
    let below = |scores: &[f64]| scores.iter().filter(|s| **s < threshold).count() as f64;
    let accepted = |scores: &[f64]| scores.iter().filter(|s| **s >= threshold).count() as f64;
    let p_miss = below(&partition.target) / partition.target.len() as f64;
    let p_fa_non = accepted(&partition.nontarget) / partition.nontarget.len() as f64;
    let p_fa_spf = accepted(&partition.spoof) / partition.spoof.len() as f64;
    Ok(weighted(model, p_miss, p_fa_non, p_fa_spf))
}

/// Minimum a-DCF over all thresholds; returns `(value, threshold)` with
/// ties broken toward the smallest threshold.
///
/// The sweep covers the `-inf` sentinel (accept everything, cost exactly
/// 1), every distinct score, and the `+inf` sentinel (reject everything,
/// cost `alpha`).
///
/// ```
/// use spoofeval::{SasvCostModel, SasvPartition};
/// use spoofeval::sasv::compute_min_a_dcf;
///
/// // alpha = 0.4 and gamma = 0.5 under these costs and priors.
/// let model = SasvCostModel::new(1.0, 10.0, 10.0, 0.8, 0.1, 0.1).unwrap();
/// let partition = SasvPartition {
///     target: vec![2.0, 3.0],
///     nontarget: vec![0.0],
///     spoof: vec![-1.0],
/// };
/// let (value, threshold) = compute_min_a_dcf(&partition, &model).unwrap();
/// assert_eq!(value, 0.0);
/// assert_eq!(threshold, 2.0);
/// ```
pub fn compute_min_a_dcf(
    partition: &SasvPartition,
    model: &SasvCostModel,
) -> Result<(f64, f64), MetricError> {
    check_class(partition.target.len(), "target")?;
    check_class(partition.nontarget.len(), "nontarget")?;
    check_class(partition.spoof.len(), "spoof")?;
    let mut tar = partition.target.clone();
    let mut non = partition.nontarget.clone();
    let mut spf = partition.spoof.clone();
    tar.sort_unstable_by(f64::total_cmp);
    non.sort_unstable_by(f64::total_cmp);
    spf.sort_unstable_by(f64::total_cmp);
    let (nt, nn, ns) = (tar.len() as f64, non.len() as f64, spf.len() as f64);

    let mut best = weighted(model, 0.0, 1.0, 1.0);
    let mut best_threshold = f64::NEG_INFINITY;
    let consider = |value: f64, threshold: f64, best: &mut f64, best_thr: &mut f64| {
        if value < *best {
            *best = value;
            *best_thr = threshold;
        }
    };

    // Merge the three sorted lists over their distinct values; the pointer
    // positions when a value is selected are exactly the strict-below
    // counts at that value.
    let (mut ti, mut nj, mut sk) = (0usize, 0usize, 0usize);
    while let Some(value) = [tar.get(ti), non.get(nj), spf.get(sk)]
        .into_iter()
        .flatten()
        .copied()
        .reduce(f64::min)
    {
        let p_miss = ti as f64 / nt;
        let p_fa_non = (non.len() - nj) as f64 / nn;
        let p_fa_spf = (spf.len() - sk) as f64 / ns;
        consider(
            weighted(model, p_miss, p_fa_non, p_fa_spf),
            value,
            &mut best,
            &mut best_threshold,
        );
        while ti < tar.len() && tar[ti] == value {
            ti += 1;
        }
        while nj < non.len() && non[nj] == value {
            nj += 1;
        }
        while sk < spf.len() && spf[sk] == value {
            sk += 1;
        }
    }
    consider(
        weighted(model, 1.0, 0.0, 0.0),
        f64::INFINITY,
        &mut best,
        &mut best_threshold,
    );
    Ok((best, best_threshold))
}

/// Empirical ASV rates at the target/nontarget equal-error threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsvOperatingPoint {
    /// Fraction of target trials the ASV rejects.
    pub p_miss: f64,
    /// Fraction of nontarget trials the ASV accepts.
    pub p_fa: f64,
    /// Fraction of spoofed trials the ASV rejects.
    pub p_miss_spoof: f64,
    /// The (possibly interpolated) equal-error threshold used.
    pub threshold: f64,
}

/// Fixes the ASV operating point at its target/nontarget EER threshold and
/// counts the empirical rates of all three classes there.
///
/// Because the threshold may be interpolated between two scores, the
/// counted `p_miss` and `p_fa` are close to, but not necessarily exactly,
/// the interpolated EER value.
pub fn compute_asv_operating_point(
    target: &[f64],
    nontarget: &[f64],
    spoof: &[f64],
) -> Result<AsvOperatingPoint, MetricError> {
    check_class(spoof.len(), "spoof")?;
    let curve = ErrorRateCurve::from_scores(target, nontarget)?;
    let (_, threshold) = compute_eer(&curve);
    let below = |scores: &[f64]| scores.iter().filter(|s| **s < threshold).count() as f64;
    let accepted = |scores: &[f64]| scores.iter().filter(|s| **s >= threshold).count() as f64;
    Ok(AsvOperatingPoint {
        p_miss: below(target) / target.len() as f64,
        p_fa: accepted(nontarget) / nontarget.len() as f64,
        p_miss_spoof: below(spoof) / spoof.len() as f64,
        threshold,
    })
}

/// Choice of t-DCF normalization denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TdcfNormalization {
    /// Divide the unnormalized cost by the best trivial countermeasure's
    /// cost, `min(miss, false_alarm)`.
    Original,
    /// Include the fixed ASV floor on both sides of the division, so the
    /// value reaches 1 exactly for trivial countermeasures and never drops
    /// below `fixed / (fixed + min(miss, false_alarm))`.
    Revised,
}

/// t-DCF cost coefficients at a fixed ASV operating point.
///
/// With the countermeasure's miss and false-alarm rates `pm` and `pf`, the
/// unnormalized tandem cost is `fixed + miss * pm + false_alarm * pf`.
///
/// For the challenge costs and priors, an ASV fixed at `p_miss = p_fa =
/// 0.02` and `p_miss_spoof = 0.7` gives `fixed = 0.9405 * 0.02 + 0.0095 *
/// 10 * 0.02 = 0.02071`, `miss = 0.9405 - 0.02071 = 0.91979`, and
/// `false_alarm = 0.05 * 10 * 0.3 = 0.15`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdcfCoefficients {
    /// Cost already incurred by ASV decisions alone, independent of the
    /// countermeasure threshold.
    pub fixed: f64,
    /// Weight of the countermeasure miss rate.
    pub miss: f64,
    /// Weight of the countermeasure false-alarm rate.
    pub false_alarm: f64,
}

impl TdcfCoefficients {
    /// The normalization denominator for `norm`.
    pub fn denominator(&self, norm: TdcfNormalization) -> f64 {
        let trivial = self.miss.min(self.false_alarm);
        match norm {
            TdcfNormalization::Original => trivial,
            TdcfNormalization::Revised => self.fixed + trivial,
        }
    }

    /// Normalized t-DCF at countermeasure rates `(p_miss, p_fa)`.
    pub fn normalized(
        &self,
        norm: TdcfNormalization,
        p_miss: f64,
        p_fa: f64,
    ) -> Result<f64, MetricError> {
        let denominator = self.denominator(norm);
        if denominator <= 0.0 {
            return Err(MetricError::Degenerate {
                reason: format!(
                    "t-DCF normalization denominator is {denominator}; \
                     a trivial countermeasure already costs nothing"
                ),
            });
        }
        let numerator = match norm {
            TdcfNormalization::Original => self.miss * p_miss + self.false_alarm * p_fa,
            TdcfNormalization::Revised => self.fixed + self.miss * p_miss + self.false_alarm * p_fa,
        };
        Ok(numerator / denominator)
    }
}

/// Derives the t-DCF coefficients from the cost model and a fixed ASV
/// operating point.
///
/// Fails when the miss weight is not positive, which happens when the ASV
/// operating point is so poor that rejecting every trial outright would
/// already cost no more than running the tandem.
pub fn tdcf_coefficients(
    model: &SasvCostModel,
    operating_point: &AsvOperatingPoint,
) -> Result<TdcfCoefficients, MetricError> {
    let fixed = model.prior_target * model.c_miss * operating_point.p_miss
        + model.prior_nontarget * model.c_fa_nontarget * operating_point.p_fa;
    let miss = model.prior_target * model.c_miss - fixed;
    let false_alarm = model.prior_spoof * model.c_fa_spoof * (1.0 - operating_point.p_miss_spoof);
    if miss <= 0.0 {
        return Err(MetricError::Degenerate {
            reason: format!(
                "ASV operating point (p_miss {:.6}, p_fa {:.6}) leaves a \
                 non-positive miss weight {miss:.6}",
                operating_point.p_miss, operating_point.p_fa
            ),
        });
    }
    Ok(TdcfCoefficients {
        fixed,
        miss,
        false_alarm,
    })
}

/// Minimum normalized t-DCF over countermeasure thresholds at a fixed ASV
/// operating point; returns `(value, threshold)`.
pub fn compute_min_tdcf_at(
    cm_bona_fide: &[f64],
    cm_spoof: &[f64],
    operating_point: &AsvOperatingPoint,
    model: &SasvCostModel,
    norm: TdcfNormalization,
) -> Result<(f64, f64), MetricError> {
    let coefficients = tdcf_coefficients(model, operating_point)?;
    // Surface a degenerate denominator before sweeping anything.
    coefficients.normalized(norm, 0.0, 0.0)?;
    let curve = ErrorRateCurve::from_scores(cm_bona_fide, cm_spoof)?;
    let mut best = f64::INFINITY;
    let mut best_threshold = f64::NEG_INFINITY;
    for i in 0..curve.len() {
        let value = coefficients.normalized(norm, curve.p_miss()[i], curve.p_fa()[i])?;
        if value < best {
            best = value;
            best_threshold = curve.thresholds()[i];
        }
    }
    Ok((best, best_threshold))
}

/// Minimum normalized t-DCF of a tandem partition.
///
/// The ASV operating point is fixed at the partition's own target/nontarget
/// EER threshold; the countermeasure threshold is then swept with bona fide
/// trials (target and nontarget alike) as the positive class.
pub fn compute_min_tdcf(
    partition: &TandemPartition,
    model: &SasvCostModel,
    norm: TdcfNormalization,
) -> Result<(f64, f64), MetricError> {
    let operating_point = partition_operating_point(partition)?;
    let cm_bona: Vec<f64> = partition
        .target
        .iter()
        .chain(&partition.nontarget)
        .map(|&(_, cm)| cm)
        .collect();
    let cm_spoof: Vec<f64> = partition.spoof.iter().map(|&(_, cm)| cm).collect();
    compute_min_tdcf_at(&cm_bona, &cm_spoof, &operating_point, model, norm)
}

/// ASV operating point of a tandem partition's verification scores.
pub fn partition_operating_point(
    partition: &TandemPartition,
) -> Result<AsvOperatingPoint, MetricError> {
    let asv = |pairs: &[(f64, f64)]| pairs.iter().map(|&(a, _)| a).collect::<Vec<f64>>();
    compute_asv_operating_point(
        &asv(&partition.target),
        &asv(&partition.nontarget),
        &asv(&partition.spoof),
    )
}

/// The threshold pair where the tandem miss rate, nontarget false-alarm
/// rate, and spoof false-alarm rate coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TandemThresholdPair {
    pub tau_asv: f64,
    pub tau_cm: f64,
    /// The shared value of the three error rates.
    pub common_error: f64,
}

/// One point of the equal-error path traced by the tandem solver.
///
/// For a fixed countermeasure threshold `tau_cm`, `tau_asv` is the
/// verification threshold equalizing the tandem miss rate and the
/// nontarget false-alarm rate at the value `error`; `p_fa_spoof` is the
/// spoof false-alarm rate there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TandemPathPoint {
    pub tau_cm: f64,
    pub tau_asv: f64,
    pub error: f64,
    pub p_fa_spoof: f64,
}

/// Counts over an indexed universe with prefix sums in `O(log n)`.
struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    fn new(slots: usize) -> Self {
        Fenwick {
            tree: vec![0; slots + 1],
        }
    }

    fn add(&mut self, slot: usize, delta: i64) {
        let mut i = slot + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over slots `0..count`.
    fn prefix(&self, count: usize) -> i64 {
        let mut sum = 0;
        let mut i = count;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }
}

/// One class's state in the tandem sweep: its trials sorted by
/// countermeasure score, a removal cursor, and surviving counts bucketed
/// by verification-score rank.
struct ClassSweep {
    by_cm: Vec<(f64, usize)>,
    cursor: usize,
    surviving: usize,
    counts: Fenwick,
    total: f64,
}

impl ClassSweep {
    fn new(pairs: &[(f64, f64)], asv_grid: &[f64]) -> Self {
        let mut by_cm: Vec<(f64, usize)> = pairs
            .iter()
            .map(|&(asv, cm)| (cm, asv_grid.partition_point(|g| *g < asv)))
            .collect();
        by_cm.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut counts = Fenwick::new(asv_grid.len());
        for &(_, rank) in &by_cm {
            counts.add(rank, 1);
        }
        ClassSweep {
            surviving: by_cm.len(),
            total: by_cm.len() as f64,
            by_cm,
            cursor: 0,
            counts,
        }
    }

    /// Removes trials whose countermeasure score falls below `tau_cm`.
    fn advance(&mut self, tau_cm: f64) {
        while self.cursor < self.by_cm.len() && self.by_cm[self.cursor].0 < tau_cm {
            self.counts.add(self.by_cm[self.cursor].1, -1);
            self.cursor += 1;
            self.surviving -= 1;
        }
    }

    /// Surviving trials accepted by the verification rule at vertex
    /// `vertex` (0 is the `-inf` sentinel; `grid_len + 1` is `+inf`).
    fn accepted_at(&self, vertex: usize, grid_len: usize) -> usize {
        if vertex == 0 {
            self.surviving
        } else if vertex > grid_len {
            0
        } else {
            self.surviving - self.counts.prefix(vertex - 1) as usize
        }
    }
}

/// Traces the tandem equal-error path.
///
/// Countermeasure threshold candidates are the `-inf` sentinel followed by
/// every distinct countermeasure score in increasing order. For each
/// candidate the solver finds, by binary search over verification-score
/// vertices, the point where the tandem miss rate overtakes the nontarget
/// false-alarm rate, and linearly interpolates the exact balance. The path
/// ends at the first candidate where the countermeasure alone already
/// misses more targets than the nontarget trials it passes, because no
/// verification threshold can balance the rates beyond that point.
pub fn tandem_path(partition: &TandemPartition) -> Result<Vec<TandemPathPoint>, MetricError> {
    check_class(partition.target.len(), "target")?;
    check_class(partition.nontarget.len(), "nontarget")?;
    check_class(partition.spoof.len(), "spoof")?;

    let mut asv_grid: Vec<f64> = partition
        .target
        .iter()
        .chain(&partition.nontarget)
        .chain(&partition.spoof)
        .map(|&(asv, _)| asv)
        .collect();
    asv_grid.sort_unstable_by(f64::total_cmp);
    asv_grid.dedup();
    let grid_len = asv_grid.len();
    let vertex_tau = |vertex: usize| -> f64 {
        if vertex == 0 {
            f64::NEG_INFINITY
        } else if vertex > grid_len {
            f64::INFINITY
        } else {
            asv_grid[vertex - 1]
        }
    };

    let mut cm_candidates: Vec<f64> = partition
        .target
        .iter()
        .chain(&partition.nontarget)
        .chain(&partition.spoof)
        .map(|&(_, cm)| cm)
        .collect();
    cm_candidates.sort_unstable_by(f64::total_cmp);
    cm_candidates.dedup();

    let mut target = ClassSweep::new(&partition.target, &asv_grid);
    let mut nontarget = ClassSweep::new(&partition.nontarget, &asv_grid);
    let mut spoof = ClassSweep::new(&partition.spoof, &asv_grid);

    let mut path = Vec::with_capacity(cm_candidates.len() + 1);
    for step in 0..=cm_candidates.len() {
        let tau_cm = if step == 0 {
            f64::NEG_INFINITY
        } else {
            cm_candidates[step - 1]
        };
        target.advance(tau_cm);
        nontarget.advance(tau_cm);
        spoof.advance(tau_cm);

        let miss_at = |vertex: usize| -> f64 {
            (target.total - target.accepted_at(vertex, grid_len) as f64) / target.total
        };
        let fa_non_at = |vertex: usize| -> f64 {
            nontarget.accepted_at(vertex, grid_len) as f64 / nontarget.total
        };
        let fa_spoof_at =
            |vertex: usize| -> f64 { spoof.accepted_at(vertex, grid_len) as f64 / spoof.total };
        let gap_at = |vertex: usize| -> f64 { miss_at(vertex) - fa_non_at(vertex) };

        // The gap is nondecreasing in the vertex index. Once it is already
        // positive with the verification gate wide open, no threshold can
        // balance the two rates, now or at any later candidate.
        if gap_at(0) > 0.0 {
            break;
        }
        let (mut lo, mut hi) = (0usize, grid_len + 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if gap_at(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let vertex = lo;
        let gap = gap_at(vertex);
        let point = if gap == 0.0 {
            TandemPathPoint {
                tau_cm,
                tau_asv: vertex_tau(vertex),
                error: miss_at(vertex),
                p_fa_spoof: fa_spoof_at(vertex),
            }
        } else {
            let previous_gap = gap_at(vertex - 1);
            let t = previous_gap / (previous_gap - gap);
            let error = miss_at(vertex - 1) + t * (miss_at(vertex) - miss_at(vertex - 1));
            let p_fa_spoof =
                fa_spoof_at(vertex - 1) + t * (fa_spoof_at(vertex) - fa_spoof_at(vertex - 1));
            TandemPathPoint {
                tau_cm,
                tau_asv: interpolate_threshold(vertex_tau(vertex - 1), vertex_tau(vertex), t),
                error,
                p_fa_spoof,
            }
        };
        path.push(point);
    }
    Ok(path)
}

/// Concurrent tandem EER: the threshold pair where the tandem miss rate,
/// nontarget false-alarm rate, and spoof false-alarm rate all coincide.
///
/// The solver walks the equal-error path from [`tandem_path`] and finds
/// where the spoof false-alarm rate crosses the common miss/nontarget
/// value, interpolating linearly between adjacent path points. Reported
/// thresholds are clamped into the observed score range.
pub fn compute_concurrent_teer(
    partition: &TandemPartition,
) -> Result<TandemThresholdPair, MetricError> {
    let path = tandem_path(partition)?;

    let mut asv_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut cm_range = (f64::INFINITY, f64::NEG_INFINITY);
    for &(asv, cm) in partition
        .target
        .iter()
        .chain(&partition.nontarget)
        .chain(&partition.spoof)
    {
        asv_range = (asv_range.0.min(asv), asv_range.1.max(asv));
        cm_range = (cm_range.0.min(cm), cm_range.1.max(cm));
    }
    let clamp = |tau: f64, range: (f64, f64)| -> f64 {
        if tau.is_finite() {
            tau
        } else if tau == f64::NEG_INFINITY {
            range.0
        } else {
            range.1
        }
    };

    let mut previous: Option<(TandemPathPoint, f64)> = None;
    for &point in &path {
        let gap = point.p_fa_spoof - point.error;
        if gap == 0.0 {
            return Ok(TandemThresholdPair {
                tau_asv: clamp(point.tau_asv, asv_range),
                tau_cm: clamp(point.tau_cm, cm_range),
                common_error: point.error,
            });
        }
        if let Some((last, last_gap)) = previous {
            if (gap > 0.0) != (last_gap > 0.0) {
                let t = last_gap / (last_gap - gap);
                return Ok(TandemThresholdPair {
                    tau_asv: clamp(
                        interpolate_threshold(last.tau_asv, point.tau_asv, t),
                        asv_range,
                    ),
                    tau_cm: clamp(
                        interpolate_threshold(last.tau_cm, point.tau_cm, t),
                        cm_range,
                    ),
                    common_error: last.error + t * (point.error - last.error),
                });
            }
        }
        previous = Some((point, gap));
    }
    Err(MetricError::NoCrossing {
        reason: format!(
            "the spoof false-alarm rate stays on one side of the balanced \
             miss/nontarget rate along all {} path points",
            path.len()
        ),
    })
}
