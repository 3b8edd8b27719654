//! Score calibration: maps that turn raw detection scores into natural-log
//! likelihood ratios.
//!
//! Two families are supported. [`fit_affine`] fits `llr = scale * score +
//! offset` by minimizing the prior-weighted logistic loss with a damped
//! Newton method. [`fit_monotone`] pools adjacent scores into blocks of
//! nondecreasing empirical odds (the classic pool-adjacent-violators
//! sweep) and assigns each block its empirical log odds, yielding the
//! nonparametric monotone map that makes hard decisions at the Bayes
//! threshold match the best single-threshold decision.

use serde::{Deserialize, Serialize};

use crate::detection::sigmoid;
use crate::error::{CalibrationError, DomainError, MetricError};

/// Largest scale [`fit_affine`] will report. Reaching it means the classes
/// are separable and the unconstrained optimum is unbounded.
pub const MAX_AFFINE_SCALE: f64 = 1e3;

/// Scale assigned when every input score is identical and no slope is
/// identifiable.
const DEGENERATE_SCALE: f64 = 1e-12;

const GRADIENT_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200;

/// Blocks with a zero count on either side get this added to both counts
/// before taking log odds, keeping their LLR finite.
const SMOOTHING: f64 = 0.5;

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn check_class(scores: &[f64], class: &'static str) -> Result<(), MetricError> {
    if scores.is_empty() {
        Err(MetricError::EmptyClass { class })
    } else {
        Ok(())
    }
}

fn check_prior(prior: f64) -> Result<(), DomainError> {
    if prior.is_finite() && prior > 0.0 && prior < 1.0 {
        Ok(())
    } else {
        Err(DomainError::new(
            "prior",
            format!("prior must lie strictly inside (0, 1), got {prior}"),
        ))
    }
}

/// One vertex of a monotone piecewise-linear map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub score: f64,
    pub llr: f64,
}

/// A fitted score-to-LLR map.
///
/// Serializes with a `kind` tag so saved maps are self-describing:
/// `{"kind":"affine","scale":...,"offset":...}` or
/// `{"kind":"monotone","breakpoints":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CalibrationMap {
    Affine { scale: f64, offset: f64 },
    Monotone { breakpoints: Vec<Breakpoint> },
}

impl CalibrationMap {
    pub fn identity() -> Self {
        CalibrationMap::Affine {
            scale: 1.0,
            offset: 0.0,
        }
    }

    /// Maps one raw score to an LLR.
    ///
    /// Monotone maps interpolate linearly between breakpoints and extend
    /// the outermost LLR values as constants beyond the fitted score
    /// range.
    pub fn apply(&self, score: f64) -> f64 {
        match self {
            CalibrationMap::Affine { scale, offset } => scale * score + offset,
            CalibrationMap::Monotone { breakpoints } => {
                let first = breakpoints.first().expect("fitted maps are non-empty");
                let last = breakpoints.last().expect("fitted maps are non-empty");
                if score <= first.score {
                    return first.llr;
                }
                if score >= last.score {
                    return last.llr;
                }
                let hi = breakpoints.partition_point(|b| b.score < score);
                let (a, b) = (breakpoints[hi - 1], breakpoints[hi]);
                if b.score == score {
                    return b.llr;
                }
                let t = (score - a.score) / (b.score - a.score);
                a.llr + t * (b.llr - a.llr)
            }
        }
    }

    pub fn apply_all(&self, scores: &[f64]) -> Vec<f64> {
        scores.iter().map(|s| self.apply(*s)).collect()
    }
}

/// Prior-weighted logistic loss of scores interpreted as natural-log LLRs.
///
/// Each LLR is shifted by the prior log odds to form a posterior log odds
/// and charged its proper-scoring-rule cost: `softplus(-z)` for bona fide
/// trials, `softplus(z)` for spoofed ones, class means weighted by `prior`
/// and `1 - prior`. At `prior = 0.5` this equals `Cllr * ln 2`.
pub fn weighted_logistic_loss(
    bona_fide_llr: &[f64],
    spoof_llr: &[f64],
    prior: f64,
) -> Result<f64, CalibrationError> {
    check_class(bona_fide_llr, "bona fide")?;
    check_class(spoof_llr, "spoof")?;
    check_prior(prior)?;
    let shift = logit(prior);
    let bona: f64 = bona_fide_llr.iter().map(|s| softplus(-(s + shift))).sum();
    let spoof: f64 = spoof_llr.iter().map(|s| softplus(s + shift)).sum();
    Ok(prior * bona / bona_fide_llr.len() as f64 + (1.0 - prior) * spoof / spoof_llr.len() as f64)
}

/// Outcome of an affine calibration fit.
#[derive(Debug, Clone)]
pub struct AffineFit {
    pub map: CalibrationMap,
    /// Newton steps actually taken.
    pub iterations: usize,
    /// Whether the gradient norm fell below tolerance.
    pub converged: bool,
    /// The scale hit [`MAX_AFFINE_SCALE`]: the classes are separable and
    /// the reported map is the capped one.
    pub separable: bool,
    /// Every input score was identical; the map collapses to a near-zero
    /// LLR and calibration cannot help.
    pub degenerate: bool,
    /// Loss at the start of each iteration, in order.
    pub objective_trace: Vec<f64>,
}

struct LossState {
    loss: f64,
    grad: [f64; 2],
    hessian: [f64; 3],
}

fn affine_loss_state(
    bona_fide: &[f64],
    spoof: &[f64],
    scale: f64,
    offset: f64,
    shift: f64,
    prior: f64,
) -> LossState {
    let wb = prior / bona_fide.len() as f64;
    let ws = (1.0 - prior) / spoof.len() as f64;
    let mut loss = 0.0;
    let mut grad = [0.0f64; 2];
    let mut hessian = [0.0f64; 3];
    let mut accumulate = |score: f64, weight: f64, bona: bool| {
        let z = scale * score + offset + shift;
        let p = sigmoid(z);
        loss += weight * if bona { softplus(-z) } else { softplus(z) };
        let g = weight * if bona { p - 1.0 } else { p };
        grad[0] += g * score;
        grad[1] += g;
        let h = weight * p * (1.0 - p);
        hessian[0] += h * score * score;
        hessian[1] += h * score;
        hessian[2] += h;
    };
    for &s in bona_fide {
        accumulate(s, wb, true);
    }
    for &s in spoof {
        accumulate(s, ws, false);
    }
    LossState {
        loss,
        grad,
        hessian,
    }
}

/// Fits `llr = scale * score + offset` by prior-weighted logistic
/// regression, starting from the identity map.
///
/// The solver is a damped Newton iteration on the strictly convex loss: a
/// ridge-stabilized 2x2 solve proposes a step, which is halved until the
/// loss decreases and the scale stays positive. Fitting at `prior = 0.5`
/// therefore never leaves the dev-set Cllr above its identity-map value.
pub fn fit_affine(
    bona_fide: &[f64],
    spoof: &[f64],
    prior: f64,
) -> Result<AffineFit, CalibrationError> {
    check_class(bona_fide, "bona fide")?;
    check_class(spoof, "spoof")?;
    check_prior(prior)?;
    let shift = logit(prior);

    let first = bona_fide[0];
    if bona_fide.iter().chain(spoof).all(|s| *s == first) {
        let map = CalibrationMap::Affine {
            scale: DEGENERATE_SCALE,
            offset: -DEGENERATE_SCALE * first,
        };
        let loss = affine_loss_state(
            bona_fide,
            spoof,
            DEGENERATE_SCALE,
            -DEGENERATE_SCALE * first,
            shift,
            prior,
        )
        .loss;
        return Ok(AffineFit {
            map,
            iterations: 0,
            converged: true,
            separable: false,
            degenerate: true,
            objective_trace: vec![loss],
        });
    }

    let (mut scale, mut offset) = (1.0f64, 0.0f64);
    let mut iterations = 0;
    let mut converged = false;
    let mut separable = false;
    let mut trace = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        let state = affine_loss_state(bona_fide, spoof, scale, offset, shift, prior);
        trace.push(state.loss);
        let grad_norm = (state.grad[0] * state.grad[0] + state.grad[1] * state.grad[1]).sqrt();
        if grad_norm < GRADIENT_TOLERANCE {
            converged = true;
            break;
        }

        let [haa, hab, hbb] = state.hessian;
        let ridge = 1e-12 * (haa + hbb + 1.0);
        let (haa, hbb) = (haa + ridge, hbb + ridge);
        let det = haa * hbb - hab * hab;
        let step_scale = -(hbb * state.grad[0] - hab * state.grad[1]) / det;
        let step_offset = -(haa * state.grad[1] - hab * state.grad[0]) / det;

        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let next_scale = scale + damping * step_scale;
            let next_offset = offset + damping * step_offset;
            if next_scale > 0.0 {
                let next =
                    affine_loss_state(bona_fide, spoof, next_scale, next_offset, shift, prior);
                if next.loss < state.loss {
                    scale = next_scale;
                    offset = next_offset;
                    accepted = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations += 1;
        if scale >= MAX_AFFINE_SCALE {
            scale = MAX_AFFINE_SCALE;
            separable = true;
            break;
        }
    }

    Ok(AffineFit {
        map: CalibrationMap::Affine { scale, offset },
        iterations,
        converged,
        separable,
        degenerate: false,
        objective_trace: trace,
    })
}

#[derive(Debug, Clone, Copy)]
struct Block {
    score_lo: f64,
    score_hi: f64,
    bona_fide: u64,
    spoof: u64,
}

impl Block {
    /// `true` when this block's bona fide proportion is at or below the
    /// next one's, compared exactly in integers.
    fn ordered_before(&self, next: &Block) -> bool {
        let this_total = self.bona_fide + self.spoof;
        let next_total = next.bona_fide + next.spoof;
        self.bona_fide * next_total < next.bona_fide * this_total
    }

    fn merge(&mut self, other: &Block) {
        self.score_hi = other.score_hi;
        self.bona_fide += other.bona_fide;
        self.spoof += other.spoof;
    }
}

/// Fits the pool-adjacent-violators monotone LLR map.
///
/// Scores are grouped by distinct value and pooled while adjacent groups
/// violate monotone bona fide odds, leaving blocks of strictly increasing
/// empirical odds. Interior blocks (which always contain both classes) get
/// their exact log odds minus the global prior log odds; a leading
/// pure-spoof or trailing pure-bona-fide block gets add-half smoothing to
/// stay finite, nudged when necessary so the block LLRs remain strictly
/// increasing. Each block contributes its score range at a constant LLR;
/// [`CalibrationMap::apply`] interpolates between blocks and clamps beyond
/// the fitted range.
pub fn fit_monotone(bona_fide: &[f64], spoof: &[f64]) -> Result<CalibrationMap, CalibrationError> {
    check_class(bona_fide, "bona fide")?;
    check_class(spoof, "spoof")?;
    let mut labeled: Vec<(f64, bool)> = bona_fide
        .iter()
        .map(|&s| (s, true))
        .chain(spoof.iter().map(|&s| (s, false)))
        .collect();
    labeled.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    // Pool by distinct score first: equal scores must share one LLR, so
    // they form a single pre-block regardless of their labels.
    let mut pre_blocks: Vec<Block> = Vec::new();
    for (score, is_bona) in labeled {
        match pre_blocks.last_mut() {
            Some(last) if last.score_lo == score => {
                last.bona_fide += is_bona as u64;
                last.spoof += !is_bona as u64;
            }
            _ => pre_blocks.push(Block {
                score_lo: score,
                score_hi: score,
                bona_fide: is_bona as u64,
                spoof: !is_bona as u64,
            }),
        }
    }

    let mut blocks: Vec<Block> = Vec::new();
    for pre in pre_blocks {
        blocks.push(pre);
        while blocks.len() >= 2
            && !blocks[blocks.len() - 2].ordered_before(&blocks[blocks.len() - 1])
        {
            let merged = blocks.pop().expect("stack has two blocks");
            blocks
                .last_mut()
                .expect("stack has one block left")
                .merge(&merged);
        }
    }

    let total_bona = bona_fide.len() as f64;
    let total_spoof = spoof.len() as f64;
    let prior_offset = total_bona.ln() - total_spoof.ln();
    let block_llr = |block: &Block| -> f64 {
        if block.bona_fide == 0 || block.spoof == 0 {
            (block.bona_fide as f64 + SMOOTHING).ln()
                - (block.spoof as f64 + SMOOTHING).ln()
                - prior_offset
        } else {
            (block.bona_fide as f64).ln() - (block.spoof as f64).ln() - prior_offset
        }
    };
    let mut llrs: Vec<f64> = blocks.iter().map(block_llr).collect();

    // Interior block LLRs are strictly increasing by construction; only
    // the smoothed end blocks can step out of line, and nudging them keeps
    // every threshold between adjacent blocks representable.
    if llrs.len() >= 2 {
        let last = llrs.len() - 1;
        if llrs[0] >= llrs[1] {
            llrs[0] = llrs[1].next_down();
        }
        if llrs[last] <= llrs[last - 1] {
            llrs[last] = llrs[last - 1].next_up();
        }
    }

    let mut breakpoints = Vec::with_capacity(2 * blocks.len());
    for (block, llr) in blocks.iter().zip(&llrs) {
        breakpoints.push(Breakpoint {
            score: block.score_lo,
            llr: *llr,
        });
        if block.score_hi > block.score_lo {
            breakpoints.push(Breakpoint {
                score: block.score_hi,
                llr: *llr,
            });
        }
    }
    Ok(CalibrationMap::Monotone { breakpoints })
}
