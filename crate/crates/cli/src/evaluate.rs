//! `spoofeval evaluate`: score a submission and emit a metric report.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use spoofeval::detection::EerMethod;
use spoofeval::io::report_fmt::{render_report, write_report, ReportFormat};
use spoofeval::io::scores::{read_scores, ScoreLayout};
use spoofeval::report::{
    evaluate_track1, evaluate_track2, ConditionBreakdown, EvaluationReport, Track1Options,
    Track2Options,
};
use spoofeval::sasv::TdcfNormalization;
use spoofeval::{ScoreChannel, Track};

use crate::common::{
    file_error, input_digest, require_valid, restrict_to_key, CliError, InputArgs, EXIT_OK,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BreakdownArg {
    None,
    Attack,
    Codec,
    Both,
}

impl From<BreakdownArg> for ConditionBreakdown {
    fn from(arg: BreakdownArg) -> ConditionBreakdown {
        match arg {
            BreakdownArg::None => ConditionBreakdown::None,
            BreakdownArg::Attack => ConditionBreakdown::Attack,
            BreakdownArg::Codec => ConditionBreakdown::Codec,
            BreakdownArg::Both => ConditionBreakdown::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EerMethodArg {
    Step,
    Rocch,
}

impl From<EerMethodArg> for EerMethod {
    fn from(arg: EerMethodArg) -> EerMethod {
        match arg {
            EerMethodArg::Step => EerMethod::Step,
            EerMethodArg::Rocch => EerMethod::Rocch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TdcfNormArg {
    Original,
    Revised,
}

impl From<TdcfNormArg> for TdcfNormalization {
    fn from(arg: TdcfNormArg) -> TdcfNormalization {
        match arg {
            TdcfNormArg::Original => TdcfNormalization::Original,
            TdcfNormArg::Revised => TdcfNormalization::Revised,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Tsv,
    Json,
    /// Write both renderings; needs --out to name the files.
    Both,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Separate ASV score file overriding the submission's asv column
    #[arg(long, value_name = "FILE")]
    pub asv_scores: Option<PathBuf>,

    /// Condition tables to compute besides the pooled row
    #[arg(long, value_enum, default_value = "both")]
    pub breakdown: BreakdownArg,

    /// Also tabulate every observed attack x codec pair
    #[arg(long)]
    pub cross_conditions: bool,

    /// How the EER is read off the error tradeoff (track 1)
    #[arg(long, value_enum, default_value = "step")]
    pub eer_method: EerMethodArg,

    /// t-DCF normalization (track 2)
    #[arg(long, value_enum, default_value = "revised")]
    pub tdcf_norm: TdcfNormArg,

    /// Report rendering
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: FormatArg,

    /// Write the report here instead of stdout ("both" appends .tsv/.json)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// The key lists only a subset of the scored trials (progress phase):
    /// accept scores for unknown trial ids and drop them before evaluating
    #[arg(long)]
    pub progress_subset: bool,
}

fn appended_extension(path: &Path, extension: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".");
    name.push(extension);
    PathBuf::from(name)
}

pub fn run(args: &EvaluateArgs) -> Result<u8, CliError> {
    if args.format == FormatArg::Both && args.out.is_none() {
        return Err(CliError::Usage(
            "--format both writes two files and needs --out to name them".to_owned(),
        ));
    }

    let mut inputs = args.input.load()?;
    if let Some(asv_path) = &args.asv_scores {
        let asv = read_scores(
            asv_path,
            ScoreLayout::Single(ScoreChannel::Asv),
            &args.input.read_options(),
        )
        .map_err(|e| file_error(asv_path, e))?;
        inputs.scores = inputs
            .scores
            .with_asv_override(&asv)
            .map_err(|e| CliError::Data(format!("--asv-scores: {e}")))?;
    }

    if let Err(code) = require_valid(&inputs, args.progress_subset) {
        return Ok(code);
    }
    if args.progress_subset {
        inputs.scores = restrict_to_key(&inputs.scores, &inputs.records)?;
    }

    let mut report: EvaluationReport = match inputs.track {
        Track::One => {
            let options = Track1Options {
                eer_method: args.eer_method.into(),
                breakdown: args.breakdown.into(),
                cross_conditions: args.cross_conditions,
                ..Default::default()
            };
            evaluate_track1(&inputs.scores, &inputs.records, &options)
        }
        Track::Two => {
            let options = Track2Options {
                tdcf_norm: args.tdcf_norm.into(),
                breakdown: args.breakdown.into(),
                cross_conditions: args.cross_conditions,
                ..Default::default()
            };
            evaluate_track2(&inputs.scores, &inputs.records, &options)
        }
    }
    .map_err(|e| CliError::Data(format!("evaluation failed: {e}")))?;

    report.inputs.push(input_digest(&args.input.scores)?);
    report.inputs.push(input_digest(&args.input.keys)?);
    if let Some(asv_path) = &args.asv_scores {
        report.inputs.push(input_digest(asv_path)?);
    }

    match (&args.out, args.format) {
        (None, FormatArg::Tsv) => print!("{}", render_report(&report, ReportFormat::Tsv)),
        (None, FormatArg::Json) => print!("{}", render_report(&report, ReportFormat::Json)),
        (None, FormatArg::Both) => unreachable!("rejected before loading inputs"),
        (Some(path), FormatArg::Tsv) => {
            write_report(path, &report, ReportFormat::Tsv).map_err(|e| file_error(path, e))?;
        }
        (Some(path), FormatArg::Json) => {
            write_report(path, &report, ReportFormat::Json).map_err(|e| file_error(path, e))?;
        }
        (Some(path), FormatArg::Both) => {
            for (extension, format) in [("tsv", ReportFormat::Tsv), ("json", ReportFormat::Json)] {
                let target = appended_extension(path, extension);
                write_report(&target, &report, format).map_err(|e| file_error(&target, e))?;
            }
        }
    }
    Ok(EXIT_OK)
}
