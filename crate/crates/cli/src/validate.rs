//! `spoofeval validate`: check key coverage without computing metrics.

use clap::Args;

use crate::common::{CliError, InputArgs, EXIT_OK, EXIT_VALIDATION};

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Tolerate scores for trials the key does not list
    #[arg(long)]
    pub allow_extra: bool,
}

pub fn run(args: &ValidateArgs) -> Result<u8, CliError> {
    let inputs = args.input.load()?;
    let report = inputs.validation();
    print!("{}", report.render_text(args.allow_extra));
    Ok(if report.passed(args.allow_extra) {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}
