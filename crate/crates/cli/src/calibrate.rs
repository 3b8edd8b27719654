//! `spoofeval calibrate`: fit a score-to-LLR map on a keyed dev set.
//!
//! Calibration always fits the detection direction: bona fide (for track 2
//! keys, target plus nontarget) against spoof, on one chosen score channel.
//! The command prints the challenge detection metrics before and after the
//! map so the effect is visible at a glance, and can save the map itself
//! and a mapped copy of a score file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use spoofeval::calibration::{fit_affine, fit_monotone, CalibrationMap};
use spoofeval::detection::{
    compute_act_dcf, compute_cllr, compute_eer_with, compute_min_dcf, EerMethod, ErrorRateCurve,
};
use spoofeval::io::scores::{read_scores, write_scores, ScoreLayout};
use spoofeval::io::write_calibration_map;
use spoofeval::model::partition_binary;
use spoofeval::{CmCostModel, ScoreChannel, ScoreSet};

use crate::common::{file_error, require_valid, ChannelArg, CliError, InputArgs, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Affine map fitted by prior-weighted logistic regression.
    Affine,
    /// Monotone step map fitted by isotonic regression.
    Pav,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Fitting method
    #[arg(long, value_enum, default_value = "affine")]
    pub method: MethodArg,

    /// Bona fide prior of the calibration loss (default: the effective
    /// prior of the challenge detection cost model)
    #[arg(long, value_name = "P")]
    pub prior: Option<f64>,

    /// Channel to calibrate (default: the score file's single channel, or
    /// cm for a triplet file)
    #[arg(long, value_enum)]
    pub channel: Option<ChannelArg>,

    /// Write the fitted map as JSON here
    #[arg(long, value_name = "PATH")]
    pub map_out: Option<PathBuf>,

    /// Score file to push through the fitted map (default: --scores)
    #[arg(long, value_name = "FILE", requires = "out")]
    pub apply_to: Option<PathBuf>,

    /// Where the mapped copy of the scores is written
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Challenge-model detection metrics: min DCF, actual DCF, Cllr, EER.
fn detection_summary(bona_fide: &[f64], spoof: &[f64]) -> Result<[f64; 4], CliError> {
    let model = CmCostModel::challenge_default();
    let to_data = |e: &dyn std::fmt::Display| CliError::Data(e.to_string());
    let curve = ErrorRateCurve::from_scores(bona_fide, spoof).map_err(|e| to_data(&e))?;
    let (min_dcf, _) = compute_min_dcf(&curve, &model);
    let act_dcf = compute_act_dcf(bona_fide, spoof, &model).map_err(|e| to_data(&e))?;
    let cllr = compute_cllr(bona_fide, spoof).map_err(|e| to_data(&e))?;
    let (eer, _) = compute_eer_with(&curve, EerMethod::Step);
    Ok([min_dcf, act_dcf, cllr, eer])
}

/// Replaces `channel` with its mapped values, leaving other channels alone.
fn map_channel(
    set: &ScoreSet,
    channel: ScoreChannel,
    map: &CalibrationMap,
) -> Result<ScoreSet, CliError> {
    let raw = set.channel(channel).ok_or_else(|| {
        CliError::Data(format!(
            "the scores to map carry no {} channel",
            channel.name()
        ))
    })?;
    let mapped = map.apply_all(raw);
    let pick = |c: ScoreChannel| -> Option<Vec<f64>> {
        if c == channel {
            Some(mapped.clone())
        } else {
            set.channel(c).map(<[f64]>::to_vec)
        }
    };
    ScoreSet::new(
        set.trial_ids().to_vec(),
        pick(ScoreChannel::Cm),
        pick(ScoreChannel::Asv),
        pick(ScoreChannel::Sasv),
    )
    .map_err(|e| CliError::Data(e.to_string()))
}

pub fn run(args: &CalibrateArgs) -> Result<u8, CliError> {
    let prior = args
        .prior
        .unwrap_or_else(|| CmCostModel::challenge_default().effective_prior());
    if !(prior > 0.0 && prior < 1.0) {
        return Err(CliError::Usage(format!(
            "--prior {prior} is outside the open interval (0, 1)"
        )));
    }

    let inputs = args.input.load()?;
    if let Err(code) = require_valid(&inputs, false) {
        return Ok(code);
    }

    let channel: ScoreChannel = match (args.channel, inputs.layout) {
        (Some(arg), _) => arg.into(),
        (None, ScoreLayout::Single(single)) => single,
        (None, ScoreLayout::Triplet) => ScoreChannel::Cm,
    };
    let partition = partition_binary(&inputs.scores, &inputs.records, channel)
        .map_err(|e| CliError::Data(e.to_string()))?;

    let map = match args.method {
        MethodArg::Affine => {
            let fit = fit_affine(&partition.bona_fide, &partition.spoof, prior)
                .map_err(|e| CliError::Data(e.to_string()))?;
            if fit.degenerate {
                eprintln!("note: every input score is identical; the map is a near-zero constant");
            }
            if fit.separable {
                eprintln!("note: the classes are linearly separable; the scale was capped");
            }
            if !fit.converged {
                eprintln!(
                    "note: the fit stopped before convergence after {} iterations",
                    fit.iterations
                );
            }
            match &fit.map {
                CalibrationMap::Affine { scale, offset } => {
                    println!(
                        "fit: affine, scale {scale:.6}, offset {offset:.6}, {} iterations",
                        fit.iterations
                    );
                }
                CalibrationMap::Monotone { .. } => unreachable!("affine fit returns affine maps"),
            }
            fit.map
        }
        MethodArg::Pav => {
            let map = fit_monotone(&partition.bona_fide, &partition.spoof)
                .map_err(|e| CliError::Data(e.to_string()))?;
            match &map {
                CalibrationMap::Monotone { breakpoints } => {
                    println!("fit: pav, {} breakpoints", breakpoints.len());
                }
                CalibrationMap::Affine { .. } => unreachable!("pav fit returns monotone maps"),
            }
            map
        }
    };

    let before = detection_summary(&partition.bona_fide, &partition.spoof)?;
    let after = detection_summary(
        &map.apply_all(&partition.bona_fide),
        &map.apply_all(&partition.spoof),
    )?;
    println!("metric\tbefore\tafter");
    for (name, i) in [("min_dcf", 0), ("act_dcf", 1), ("cllr", 2), ("eer", 3)] {
        println!("{name}\t{:.6}\t{:.6}", before[i], after[i]);
    }

    if let Some(path) = &args.map_out {
        write_calibration_map(path, &map).map_err(|e| file_error(path, e))?;
    }

    if let Some(out) = &args.out {
        let (target_set, target_layout) = match &args.apply_to {
            Some(target) => {
                let layout = args.input.resolve_layout_as(target, channel)?;
                let set = read_scores(target, layout, &args.input.read_options())
                    .map_err(|e| file_error(target, e))?;
                (set, layout)
            }
            None => (inputs.scores.clone(), inputs.layout),
        };
        let mapped = map_channel(&target_set, channel, &map)?;
        write_scores(out, &mapped, target_layout).map_err(|e| file_error(out, e))?;
    }

    Ok(EXIT_OK)
}
