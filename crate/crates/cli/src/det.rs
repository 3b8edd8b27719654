//! `spoofeval det`: dump a detection error tradeoff table.
//!
//! One row per swept threshold (the `-inf`/`+inf` sentinels included), with
//! the miss and false-alarm rates and their probit transforms. The probit of
//! an exact 0 or 1 rate does not exist and prints as `-`.

use std::path::PathBuf;

use clap::Args;

use spoofeval::detection::{probit, ErrorRateCurve};
use spoofeval::model::{partition_binary, partition_ternary};
use spoofeval::{ScoreChannel, Track};

use crate::common::{file_error, require_valid, ChannelArg, CliError, InputArgs, EXIT_OK};

#[derive(Debug, Args)]
pub struct DetArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Score channel to sweep: cm (bona fide vs spoof), asv (target vs
    /// nontarget), or sasv (target vs nontarget plus spoof)
    #[arg(long, value_enum, default_value = "cm")]
    pub channel: ChannelArg,

    /// Write the table here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn run(args: &DetArgs) -> Result<u8, CliError> {
    let inputs = args.input.load()?;
    if inputs.track == Track::One && args.channel != ChannelArg::Cm {
        return Err(CliError::Usage(
            "--channel asv/sasv needs --track 2 keys with target and nontarget trials".to_owned(),
        ));
    }
    if let Err(code) = require_valid(&inputs, false) {
        return Ok(code);
    }

    let data_error = |e: &dyn std::fmt::Display| CliError::Data(e.to_string());
    let (positives, negatives) = match args.channel {
        ChannelArg::Cm => {
            let p = partition_binary(&inputs.scores, &inputs.records, ScoreChannel::Cm)
                .map_err(|e| data_error(&e))?;
            (p.bona_fide, p.spoof)
        }
        ChannelArg::Asv => {
            let p = partition_ternary(&inputs.scores, &inputs.records, ScoreChannel::Asv)
                .map_err(|e| data_error(&e))?;
            (p.target, p.nontarget)
        }
        ChannelArg::Sasv => {
            let p = partition_ternary(&inputs.scores, &inputs.records, ScoreChannel::Sasv)
                .map_err(|e| data_error(&e))?;
            let mut rejectable = p.nontarget;
            rejectable.extend(p.spoof);
            (p.target, rejectable)
        }
    };

    let curve = ErrorRateCurve::from_scores(&positives, &negatives).map_err(|e| data_error(&e))?;
    let mut table = String::from("threshold\tp_miss\tp_fa\tprobit_miss\tprobit_fa\n");
    let cell = |rate: f64| probit(rate).map_or_else(|| "-".to_owned(), |q| q.to_string());
    for i in 0..curve.len() {
        let threshold = curve.thresholds()[i];
        let p_miss = curve.p_miss()[i];
        let p_fa = curve.p_fa()[i];
        table.push_str(&format!(
            "{threshold}\t{p_miss}\t{p_fa}\t{}\t{}\n",
            cell(p_miss),
            cell(p_fa)
        ));
    }

    match &args.out {
        Some(path) => std::fs::write(path, table).map_err(|e| file_error(path, e))?,
        None => print!("{table}"),
    }
    Ok(EXIT_OK)
}
