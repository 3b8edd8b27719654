//! Quadratic-time reference metrics computed by direct counting.
//!
//! Shared conventions (kept deliberately explicit in every function):
//! accept-as-positive means `score >= threshold`; candidate thresholds are
//! the observed scores plus `-inf`/`+inf` sentinels; cost minima break ties
//! toward the smallest threshold; equal-error points interpolate linearly
//! between the two adjacent thresholds where the sign of
//! `p_miss - p_fa` changes.

use spoofeval::sasv::TdcfNormalization;

/// Natural-log softplus `ln(1 + e^x)`, branch form for large magnitudes.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Candidate thresholds: sorted distinct scores framed by sentinels.
fn candidate_thresholds(groups: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    all.dedup();
    let mut t = Vec::with_capacity(all.len() + 2);
    t.push(f64::NEG_INFINITY);
    t.extend(all);
    t.push(f64::INFINITY);
    t
}

fn count_below(scores: &[f64], tau: f64) -> usize {
    scores.iter().filter(|&&s| s < tau).count()
}

fn count_at_or_above(scores: &[f64], tau: f64) -> usize {
    scores.iter().filter(|&&s| s >= tau).count()
}

/// Miss rate of `positives` and false-alarm rate of `negatives` at `tau`.
fn rates_at(positives: &[f64], negatives: &[f64], tau: f64) -> (f64, f64) {
    let p_miss = count_below(positives, tau) as f64 / positives.len() as f64;
    let p_fa = count_at_or_above(negatives, tau) as f64 / negatives.len() as f64;
    (p_miss, p_fa)
}

/// Equal error rate of `positives` vs `negatives` by threshold scan plus
/// linear interpolation. Returns `(eer, threshold)`.
pub fn eer(positives: &[f64], negatives: &[f64]) -> (f64, f64) {
    let taus = candidate_thresholds(&[positives, negatives]);
    let mut prev: Option<(f64, f64, f64, f64)> = None; // (tau, pm, pf, d)
    for &tau in &taus {
        let (pm, pf) = rates_at(positives, negatives, tau);
        let d = pm - pf;
        if d == 0.0 {
            return (pm, tau);
        }
        if d > 0.0 {
            let (ptau, ppm, ppf, pd) = prev.expect("sign change cannot happen at -inf");
            let t = pd / (pd - d);
            let value = ppm + t * (pm - ppm);
            let thr = if ptau.is_finite() && tau.is_finite() {
                ptau + t * (tau - ptau)
            } else if ptau.is_finite() {
                ptau
            } else {
                tau
            };
            let _ = ppf;
            return (value, thr);
        }
        prev = Some((tau, pm, pf, d));
    }
    unreachable!("p_miss - p_fa reaches +1 at +inf")
}

/// Reference Track 1 metrics at one cost model.
#[derive(Debug, Clone, Copy)]
pub struct BruteTrack1 {
    pub min_dcf: f64,
    pub min_dcf_threshold: f64,
    pub act_dcf: f64,
    pub eer: f64,
    pub eer_threshold: f64,
    pub cllr: f64,
}

/// Computes every Track 1 metric by exhaustive threshold enumeration.
///
/// `beta` is re-derived from the raw costs here, independently of the
/// engine's cost-model type.
pub fn track1_metrics(
    bona_fide: &[f64],
    spoof: &[f64],
    c_miss: f64,
    c_fa: f64,
    prior_spoof: f64,
) -> BruteTrack1 {
    assert!(!bona_fide.is_empty() && !spoof.is_empty());
    let beta = (c_miss / c_fa) * ((1.0 - prior_spoof) / prior_spoof);
    let tau_bayes = -beta.ln();

    let mut min_dcf = f64::INFINITY;
    let mut min_dcf_threshold = f64::NEG_INFINITY;
    for &tau in &candidate_thresholds(&[bona_fide, spoof]) {
        let (pm, pf) = rates_at(bona_fide, spoof, tau);
        let dcf = beta * pm + pf;
        if dcf < min_dcf {
            min_dcf = dcf;
            min_dcf_threshold = tau;
        }
    }

    let (pm_act, pf_act) = rates_at(bona_fide, spoof, tau_bayes);
    let act_dcf = beta * pm_act + pf_act;

    let (eer_value, eer_threshold) = eer(bona_fide, spoof);

    let mut sum_bona = 0.0;
    for &s in bona_fide {
        sum_bona += softplus(-s);
    }
    let mut sum_spoof = 0.0;
    for &s in spoof {
        sum_spoof += softplus(s);
    }
    let cllr = (sum_bona / bona_fide.len() as f64 + sum_spoof / spoof.len() as f64)
        / (2.0 * std::f64::consts::LN_2);

    BruteTrack1 {
        min_dcf,
        min_dcf_threshold,
        act_dcf,
        eer: eer_value,
        eer_threshold,
        cllr,
    }
}

/// Minimum a-DCF by exhaustive threshold enumeration; returns
/// `(value, threshold)`. Weights are re-derived from raw costs and priors.
#[allow(clippy::too_many_arguments)]
pub fn min_a_dcf(
    target: &[f64],
    nontarget: &[f64],
    spoof: &[f64],
    c_miss: f64,
    c_fa_nontarget: f64,
    c_fa_spoof: f64,
    prior_target: f64,
    prior_nontarget: f64,
    prior_spoof: f64,
) -> (f64, f64) {
    assert!(!target.is_empty() && !nontarget.is_empty() && !spoof.is_empty());
    let denom = c_fa_nontarget * prior_nontarget + c_fa_spoof * prior_spoof;
    let alpha = c_miss * prior_target / denom;
    let gamma = c_fa_spoof * prior_spoof / denom;

    let mut best = f64::INFINITY;
    let mut best_tau = f64::NEG_INFINITY;
    for &tau in &candidate_thresholds(&[target, nontarget, spoof]) {
        let p_miss = count_below(target, tau) as f64 / target.len() as f64;
        let p_fa_non = count_at_or_above(nontarget, tau) as f64 / nontarget.len() as f64;
        let p_fa_spf = count_at_or_above(spoof, tau) as f64 / spoof.len() as f64;
        let value = alpha * p_miss + (1.0 - gamma) * p_fa_non + gamma * p_fa_spf;
        if value < best {
            best = value;
            best_tau = tau;
        }
    }
    (best, best_tau)
}

/// Reference ASV operating point at the target/nontarget EER threshold:
/// `(p_miss, p_fa, p_miss_spoof, threshold)`.
pub fn asv_operating_point(
    target: &[f64],
    nontarget: &[f64],
    spoof: &[f64],
) -> (f64, f64, f64, f64) {
    let (_, tau) = eer(target, nontarget);
    let p_miss = count_below(target, tau) as f64 / target.len() as f64;
    let p_fa = count_at_or_above(nontarget, tau) as f64 / nontarget.len() as f64;
    let p_miss_spoof = count_below(spoof, tau) as f64 / spoof.len() as f64;
    (p_miss, p_fa, p_miss_spoof, tau)
}

/// Minimum normalized t-DCF over CM thresholds by direct counting, at a
/// fixed ASV operating point. Returns `(value, threshold)`, or `None` when
/// the coefficients degenerate (`c1 <= 0` or a zero default cost).
#[allow(clippy::too_many_arguments)]
pub fn min_tdcf(
    cm_bona_fide: &[f64],
    cm_spoof: &[f64],
    p_miss_asv: f64,
    p_fa_asv: f64,
    p_miss_spoof_asv: f64,
    c_miss: f64,
    c_fa_nontarget: f64,
    c_fa_spoof: f64,
    prior_target: f64,
    prior_nontarget: f64,
    prior_spoof: f64,
    norm: TdcfNormalization,
) -> Option<(f64, f64)> {
    let c0 = prior_target * c_miss * p_miss_asv + prior_nontarget * c_fa_nontarget * p_fa_asv;
    let c1 = prior_target * c_miss - c0;
    let c2 = prior_spoof * c_fa_spoof * (1.0 - p_miss_spoof_asv);
    if c1 <= 0.0 {
        return None;
    }
    let evaluate = |pm: f64, pf: f64| -> Option<f64> {
        match norm {
            TdcfNormalization::Original => {
                let d = c1.min(c2);
                if d <= 0.0 {
                    None
                } else {
                    Some((c1 * pm + c2 * pf) / d)
                }
            }
            TdcfNormalization::Revised => {
                let d = c0 + c1.min(c2);
                if d <= 0.0 {
                    None
                } else {
                    Some((c0 + c1 * pm + c2 * pf) / d)
                }
            }
        }
    };
    let mut best = f64::INFINITY;
    let mut best_tau = f64::NEG_INFINITY;
    for &tau in &candidate_thresholds(&[cm_bona_fide, cm_spoof]) {
        let (pm, pf) = rates_at(cm_bona_fide, cm_spoof, tau);
        let value = evaluate(pm, pf)?;
        if value < best {
            best = value;
            best_tau = tau;
        }
    }
    Some((best, best_tau))
}

/// Result of the dense-grid tandem EER search.
#[derive(Debug, Clone, Copy)]
pub struct GridTeer {
    /// Common error rate where the balanced miss/nontarget profile meets
    /// the spoof false-alarm rate, or `None` when they never cross.
    pub common: Option<f64>,
    /// Verification threshold at the crossing (grid-valued, best effort).
    pub tau_asv: f64,
    /// Countermeasure threshold at the crossing (grid-valued, best effort).
    pub tau_cm: f64,
}

/// Dense-grid estimate of the concurrent tandem EER.
///
/// Threshold grids are `grid_n` quantiles of the pooled per-axis scores
/// (duplicate quantiles evaluate identically, so they are collapsed);
/// acceptance means `asv >= tau_asv && cm >= tau_cm`. For each
/// countermeasure grid value the column is swept bottom-up by brute
/// recounting: every class is re-filtered from scratch and the row where
/// the tandem miss rate overtakes the nontarget false-alarm rate is
/// located by linear scan, interpolating between adjacent rows for the
/// exact balance (a virtual reject-all row closes the top of the column).
/// Columns whose miss rate already exceeds the nontarget rate with the
/// verification gate wide open admit no balance and end the sweep. The
/// crossing of the balanced profile with the spoof false-alarm rate is
/// then interpolated between adjacent columns.
pub fn grid_teer(
    target: &[(f64, f64)],
    nontarget: &[(f64, f64)],
    spoof: &[(f64, f64)],
    grid_n: usize,
) -> GridTeer {
    assert!(grid_n >= 2);
    assert!(!target.is_empty() && !nontarget.is_empty() && !spoof.is_empty());

    let quantiles = |values: &mut Vec<f64>| -> Vec<f64> {
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
        let mut grid: Vec<f64> = (0..grid_n)
            .map(|i| values[i * (values.len() - 1) / (grid_n - 1)])
            .collect();
        grid.dedup();
        grid
    };
    let mut asv_all: Vec<f64> = target
        .iter()
        .chain(nontarget)
        .chain(spoof)
        .map(|p| p.0)
        .collect();
    let mut cm_all: Vec<f64> = target
        .iter()
        .chain(nontarget)
        .chain(spoof)
        .map(|p| p.1)
        .collect();
    let grid_a = quantiles(&mut asv_all);
    let grid_c = quantiles(&mut cm_all);

    let (nt, nn, ns) = (
        target.len() as f64,
        nontarget.len() as f64,
        spoof.len() as f64,
    );

    // One balanced point per countermeasure column: (tau_cm, tau_asv,
    // common miss/nontarget error, spoof false-alarm rate there).
    let mut previous: Option<(f64, f64, f64, f64)> = None;
    let mut last_tau = (grid_a[0], grid_c[0]);
    for &tau_cm in &grid_c {
        let survivors = |pairs: &[(f64, f64)]| -> Vec<f64> {
            let mut kept: Vec<f64> = pairs
                .iter()
                .filter(|p| p.1 >= tau_cm)
                .map(|p| p.0)
                .collect();
            kept.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
            kept
        };
        let kept_t = survivors(target);
        let kept_n = survivors(nontarget);
        let kept_s = survivors(spoof);

        // Row `grid_a.len()` is the virtual reject-all row.
        let rates = |row: usize| -> (f64, f64, f64) {
            if row == grid_a.len() {
                return (1.0, 0.0, 0.0);
            }
            let tau_asv = grid_a[row];
            let accepted = |kept: &[f64]| kept.len() - kept.partition_point(|&s| s < tau_asv);
            (
                (nt - accepted(&kept_t) as f64) / nt,
                accepted(&kept_n) as f64 / nn,
                accepted(&kept_s) as f64 / ns,
            )
        };

        let (miss_bottom, fa_non_bottom, _) = rates(0);
        if miss_bottom - fa_non_bottom > 0.0 {
            break;
        }
        let mut row = 0;
        let (error, p_fa_spoof, tau_asv) = loop {
            let (miss, fa_non, fa_spoof) = rates(row);
            let balance = miss - fa_non;
            if balance == 0.0 {
                break (miss, fa_spoof, grid_a[row.min(grid_a.len() - 1)]);
            }
            if balance > 0.0 {
                let (miss_below, fa_non_below, fa_spoof_below) = rates(row - 1);
                let below = miss_below - fa_non_below;
                let t = below / (below - balance);
                let error = miss_below + t * (miss - miss_below);
                let fa_spoof = fa_spoof_below + t * (fa_spoof - fa_spoof_below);
                // Against the virtual reject-all row the threshold stays
                // at the last real grid line.
                let tau_asv = if row == grid_a.len() {
                    grid_a[row - 1]
                } else {
                    grid_a[row - 1] + t * (grid_a[row] - grid_a[row - 1])
                };
                break (error, fa_spoof, tau_asv);
            }
            row += 1;
        };

        let gap = p_fa_spoof - error;
        if gap == 0.0 {
            return GridTeer {
                common: Some(error),
                tau_asv,
                tau_cm,
            };
        }
        if let Some((prev_tau_cm, prev_tau_asv, prev_error, prev_gap)) = previous {
            if (gap > 0.0) != (prev_gap > 0.0) {
                let u = prev_gap / (prev_gap - gap);
                return GridTeer {
                    common: Some(prev_error + u * (error - prev_error)),
                    tau_asv: prev_tau_asv + u * (tau_asv - prev_tau_asv),
                    tau_cm: prev_tau_cm + u * (tau_cm - prev_tau_cm),
                };
            }
        }
        previous = Some((tau_cm, tau_asv, error, gap));
        last_tau = (tau_asv, tau_cm);
    }
    GridTeer {
        common: None,
        tau_asv: last_tau.0,
        tau_cm: last_tau.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for x in [-20.0, -1.0, 0.0, 0.5, 20.0] {
            assert!((softplus(x) - (1.0 + x.exp()).ln()).abs() < 1e-12);
        }
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-12);
        assert!(softplus(-1000.0) >= 0.0);
    }

    #[test]
    fn eer_of_separable_data_is_zero() {
        let (value, tau) = eer(&[1.0, 2.0], &[-2.0, -1.0]);
        assert_eq!(value, 0.0);
        assert_eq!(tau, 1.0);
    }

    #[test]
    fn eer_of_identical_distributions_is_half() {
        let (value, _) = eer(&[0.0, 0.0], &[0.0, 0.0]);
        assert!((value - 0.5).abs() < 1e-12);
    }
}
