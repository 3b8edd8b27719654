//! Cost models for the two evaluation tracks.
//!
//! Both models pre-derive the handful of constants the metrics need, so a
//! model value can be logged or serialized and later re-derived bit-for-bit
//! from its stored fields.

use crate::error::DomainError;
use serde::{Deserialize, Serialize};

fn check_cost(field: &'static str, v: f64) -> Result<(), DomainError> {
    if !v.is_finite() || v <= 0.0 {
        return Err(DomainError::new(
            field,
            format!("cost must be finite and > 0, got {v}"),
        ));
    }
    Ok(())
}

fn check_prior(field: &'static str, v: f64) -> Result<(), DomainError> {
    if !v.is_finite() || v <= 0.0 || v >= 1.0 {
        return Err(DomainError::new(
            field,
            format!("prior must lie strictly inside (0, 1), got {v}"),
        ));
    }
    Ok(())
}

/// Cost model for the binary bona fide / spoof detection task (Track 1).
///
/// `beta` folds the miss/false-alarm costs and the spoof prior into a single
/// effective miss weight:
///
/// ```text
/// beta = (c_miss / c_fa) * ((1 - prior_spoof) / prior_spoof)
/// DCF(tau) = beta * p_miss(tau) + p_fa(tau)
/// ```
///
/// `tau_bayes = -ln(beta)` is the threshold a Bayes decision rule applies to
/// calibrated log-likelihood-ratio scores; `act_dcf` evaluates there.
///
/// The challenge operating point (`c_miss = 1`, `c_fa = 10`,
/// `prior_spoof = 0.05`) gives `beta = 1.9` and `tau_bayes = -ln 1.9`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmCostModel {
    pub c_miss: f64,
    pub c_fa: f64,
    pub prior_spoof: f64,
    /// Effective miss weight derived from the three fields above.
    pub beta: f64,
    /// Bayes decision threshold `-ln(beta)` for LLR-scaled scores.
    pub tau_bayes: f64,
}

impl CmCostModel {
    /// Derives the model from raw costs and the spoof prior.
    ///
    /// `beta` is computed as `(c_miss * (1 - prior_spoof)) / (c_fa *
    /// prior_spoof)`, algebraically identical to the ratio form above but
    /// numerically exact for the challenge constants.
    pub fn new(c_miss: f64, c_fa: f64, prior_spoof: f64) -> Result<Self, DomainError> {
        check_cost("c_miss", c_miss)?;
        check_cost("c_fa", c_fa)?;
        check_prior("prior_spoof", prior_spoof)?;
        let beta = (c_miss * (1.0 - prior_spoof)) / (c_fa * prior_spoof);
        if !beta.is_finite() || beta <= 0.0 {
            return Err(DomainError::new(
                "beta",
                format!("derived beta must be finite and > 0, got {beta}"),
            ));
        }
        Ok(CmCostModel {
            c_miss,
            c_fa,
            prior_spoof,
            beta,
            tau_bayes: -beta.ln(),
        })
    }

    /// The Track 1 challenge operating point: `(1, 10, 0.05)`.
    pub fn challenge_default() -> Self {
        CmCostModel::new(1.0, 10.0, 0.05).expect("challenge constants are valid")
    }

    /// The effective bona fide prior implied by `beta`; the prior at which
    /// a Bayes decision on calibrated LLRs lands exactly on `tau_bayes`.
    pub fn effective_prior(&self) -> f64 {
        self.beta / (1.0 + self.beta)
    }
}

/// Cost model for the three-class SASV task (Track 2).
///
/// Targets should be accepted; nontargets and spoofs rejected. The a-DCF
/// collapses the costs and priors into two derived weights:
///
/// ```text
/// denom = c_fa_nontarget * prior_nontarget + c_fa_spoof * prior_spoof
/// alpha = c_miss * prior_target / denom
/// gamma = c_fa_spoof * prior_spoof / denom
/// a-DCF(tau) = alpha * p_miss(tau)
///            + (1 - gamma) * p_fa_nontarget(tau)
///            + gamma * p_fa_spoof(tau)
/// ```
///
/// The normalization makes the accept-everything policy cost exactly 1 and
/// the reject-everything policy cost `alpha`. The challenge constants
/// (`c_miss = 1`, both false-alarm costs `10`, priors
/// `0.9405 / 0.0095 / 0.05`) give `alpha ~= 1.58` and `gamma ~= 0.84`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SasvCostModel {
    pub c_miss: f64,
    pub c_fa_nontarget: f64,
    pub c_fa_spoof: f64,
    pub prior_target: f64,
    pub prior_nontarget: f64,
    pub prior_spoof: f64,
    /// Miss weight `c_miss * prior_target / denom`.
    pub alpha: f64,
    /// Spoof share of the false-alarm weight, in `(0, 1)`.
    pub gamma: f64,
}

impl SasvCostModel {
    pub fn new(
        c_miss: f64,
        c_fa_nontarget: f64,
        c_fa_spoof: f64,
        prior_target: f64,
        prior_nontarget: f64,
        prior_spoof: f64,
    ) -> Result<Self, DomainError> {
        check_cost("c_miss", c_miss)?;
        check_cost("c_fa_nontarget", c_fa_nontarget)?;
        check_cost("c_fa_spoof", c_fa_spoof)?;
        check_prior("prior_target", prior_target)?;
        check_prior("prior_nontarget", prior_nontarget)?;
        check_prior("prior_spoof", prior_spoof)?;
        let sum = prior_target + prior_nontarget + prior_spoof;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DomainError::new(
                "priors",
                format!("priors must sum to 1 within 1e-9, got {sum}"),
            ));
        }
        let denom = c_fa_nontarget * prior_nontarget + c_fa_spoof * prior_spoof;
        let alpha = c_miss * prior_target / denom;
        let gamma = c_fa_spoof * prior_spoof / denom;
        Ok(SasvCostModel {
            c_miss,
            c_fa_nontarget,
            c_fa_spoof,
            prior_target,
            prior_nontarget,
            prior_spoof,
            alpha,
            gamma,
        })
    }

    /// The Track 2 challenge operating point:
    /// costs `(1, 10, 10)`, priors `(0.9405, 0.0095, 0.05)`.
    pub fn challenge_default() -> Self {
        SasvCostModel::new(1.0, 10.0, 10.0, 0.9405, 0.0095, 0.05)
            .expect("challenge constants are valid")
    }
}
