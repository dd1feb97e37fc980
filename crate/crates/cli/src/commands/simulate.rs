use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use smallball::path::{simulate_grid, simulate_jumps, simulate_subordinated, step_path_from_jumps};
use smallball::{PathGrid64, RngStream, StreamDomain};

use super::tracked;
use crate::error::{CliError, CliResult};
use crate::law::LawArgs;
use crate::table::{csv_bytes, fmt_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathRoute {
    Grid,
    Jumps,
    Subordination,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Number of grid steps on [0, 1].
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PathRoute::Grid)]
    pub route: PathRoute,
    /// Jump truncation level for the jumps route.
    #[arg(long, default_value_t = 1e-3)]
    pub eta: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub fn path_csv(path: &PathGrid64) -> Vec<u8> {
    csv_bytes(
        &["t", "value"],
        path.values()
            .iter()
            .enumerate()
            .map(|(k, &v)| vec![fmt_f64(path.time(k)), fmt_f64(v)]),
    )
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let law = args.law.build()?;
    if args.n == 0 {
        return Err(CliError::Domain("--n must be at least 1".into()));
    }
    tracked("simulate", args, Some(args.seed), args.out.as_deref(), |run| {
        let mut rng = RngStream::replicate(args.seed, StreamDomain::Main, 0);
        let path = match args.route {
            PathRoute::Grid => simulate_grid(&law, args.n, &mut rng)?,
            PathRoute::Jumps => {
                let jumps = simulate_jumps(&law, args.eta, &mut rng)?;
                let rows = jumps
                    .times()
                    .iter()
                    .zip(jumps.sizes())
                    .map(|(&t, &z)| vec![fmt_f64(t), fmt_f64(z)]);
                run.write_output("jumps.csv", &csv_bytes(&["t", "size"], rows))?;
                step_path_from_jumps(&jumps, args.n)?
            }
            PathRoute::Subordination => {
                let kappa = match law.kappa() {
                    Some(k) if law.is_symmetric() && !law.is_gaussian() => k,
                    _ => {
                        return Err(CliError::Domain(
                            "the subordination route needs a symmetric law with alpha < 2".into(),
                        ))
                    }
                };
                let sub = simulate_subordinated(law.alpha(), kappa, args.n, &mut rng)?;
                let rows = sub
                    .clock
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| vec![fmt_f64(k as f64 / args.n as f64), fmt_f64(s)]);
                run.write_output("clock.csv", &csv_bytes(&["t", "clock"], rows))?;
                sub.to_grid()
            }
        };
        run.write_output("path.csv", &path_csv(&path))?;
        println!("{}", run.dir().join("path.csv").display());
        Ok(())
    })
}
