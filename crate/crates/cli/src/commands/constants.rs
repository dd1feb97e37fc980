use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use smallball::{constants_report, ConstantsReport64};

use super::tracked;
use crate::error::CliResult;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Positive subordinator instead of a symmetric law.
    #[arg(long)]
    pub subordinator: bool,
    /// Known upper bound for the Brownian Hölder constant, if any.
    #[arg(long)]
    pub holder_upper: Option<f64>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub fn report(args: &ConstantsArgs) -> CliResult<ConstantsReport64> {
    Ok(constants_report(args.alpha, args.p, args.kappa, args.subordinator, args.holder_upper)?)
}

pub fn run(args: &ConstantsArgs) -> CliResult<()> {
    tracked("constants", args, None, args.out.as_deref(), |run| {
        let r = report(args)?;
        run.write_json("constants.json", &r)?;
        println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
        Ok(())
    })
}
