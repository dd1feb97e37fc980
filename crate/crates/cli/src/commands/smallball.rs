use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use smallball::estimator::{MCConfig, SmallBallPoint};
use smallball::{estimate_smallball, Route, SemiNorm, SmallBallEstimate};

use super::tracked;
use crate::error::{CliError, CliResult};
use crate::law::LawArgs;
use crate::table::{csv_bytes, fmt_f64, fmt_opt};

pub const TABLE_HEADER: [&str; 9] = ["epsilon", "hits", "p_hat", "se", "p_lo", "p_hi", "k_hat", "k_lo", "k_hi"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Pvar,
    Sup,
    Oscillation,
    L2,
    Holder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteKind {
    Grid,
    Subordination,
    Jumps,
    Endpoint,
}

impl From<RouteKind> for Route {
    fn from(r: RouteKind) -> Self {
        match r {
            RouteKind::Grid => Route::Grid,
            RouteKind::Subordination => Route::Subordination,
            RouteKind::Jumps => Route::Jumps,
            RouteKind::Endpoint => Route::Endpoint,
        }
    }
}

/// Every flag can also be given as a key of the JSON config file; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallballParams {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub subordinator: Option<bool>,
    #[arg(long)]
    pub c_minus: Option<f64>,
    #[arg(long)]
    pub c_plus: Option<f64>,
    /// Semi-norm (default pvar).
    #[arg(long, value_enum)]
    pub norm: Option<NormKind>,
    /// Exponent for pvar and holder.
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub n_paths: Option<usize>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long, value_enum)]
    pub route: Option<RouteKind>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub pilot: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub refine_check: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub bridge_correction: Option<bool>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        SmallballParams { $($field: $flags.$field.clone().or_else(|| $file.$field.clone())),* }
    };
}

impl SmallballParams {
    pub fn merged(&self, file: &SmallballParams) -> SmallballParams {
        overlay!(
            self, file, alpha, kappa, subordinator, c_minus, c_plus, norm, p, epsilons, n_paths, grid_n, seed, eta,
            threads, confidence, route, pilot, refine_check, bridge_correction
        )
    }

    pub fn law_args(&self) -> LawArgs {
        LawArgs {
            alpha: self.alpha,
            kappa: self.kappa,
            subordinator: self.subordinator,
            c_minus: self.c_minus,
            c_plus: self.c_plus,
        }
    }

    pub fn seminorm(&self) -> CliResult<SemiNorm> {
        let need_p = || self.p.ok_or_else(|| CliError::Domain("--p is required for this norm".into()));
        Ok(match self.norm.unwrap_or(NormKind::Pvar) {
            NormKind::Pvar => SemiNorm::PVariation { p: need_p()? },
            NormKind::Sup => SemiNorm::Sup,
            NormKind::Oscillation => SemiNorm::Oscillation,
            NormKind::L2 => SemiNorm::L2,
            NormKind::Holder => SemiNorm::Holder { p: need_p()? },
        })
    }

    pub fn mc_config(&self) -> MCConfig {
        let d = MCConfig::default();
        MCConfig {
            n_paths: self.n_paths.unwrap_or(d.n_paths),
            grid_n: self.grid_n.unwrap_or(d.grid_n),
            master_seed: self.seed.unwrap_or(d.master_seed),
            eta: self.eta.unwrap_or(d.eta),
            epsilons: self.epsilons.clone().unwrap_or_default(),
            lambdas: Vec::new(),
            threads: self.threads.unwrap_or(d.threads),
            confidence: self.confidence.unwrap_or(d.confidence),
            route: self.route.map(Route::from),
            pilot: self.pilot.unwrap_or(d.pilot),
            refine_check: self.refine_check.unwrap_or(d.refine_check),
            bridge_correction: self.bridge_correction.unwrap_or(d.bridge_correction),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SmallballArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: SmallballParams,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// The fully resolved run description stored in the manifest.
#[derive(Debug, Clone, Serialize)]
struct Resolved<'a> {
    law: &'a LawArgs,
    seminorm: SemiNorm,
    #[serde(flatten)]
    mc: &'a MCConfig,
}

pub fn load_params(config: Option<&Path>, flags: &SmallballParams) -> CliResult<SmallballParams> {
    let Some(path) = config else {
        return Ok(flags.clone());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: SmallballParams = serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(format!("{}: invalid config: {e}", path.display())))?;
    Ok(flags.merged(&file))
}

fn point_row(pt: &SmallBallPoint) -> Vec<String> {
    vec![
        fmt_f64(pt.epsilon),
        pt.hits.to_string(),
        fmt_f64(pt.p_hat),
        fmt_f64(pt.se),
        fmt_f64(pt.interval.0),
        fmt_f64(pt.interval.1),
        fmt_opt(pt.k_hat),
        fmt_opt(pt.k_interval.map(|i| i.0)),
        fmt_opt(pt.k_interval.map(|i| i.1)),
    ]
}

pub fn table(points: &[SmallBallPoint]) -> Vec<u8> {
    csv_bytes(&TABLE_HEADER, points.iter().map(point_row))
}

pub fn run(args: &SmallballArgs) -> CliResult<SmallBallEstimate> {
    let params = load_params(args.config.as_deref(), &args.params)?;
    let law_args = params.law_args();
    let law = law_args.build()?;
    let seminorm = params.seminorm()?;
    let mc = params.mc_config();
    let resolved = Resolved {
        law: &law_args,
        seminorm,
        mc: &mc,
    };
    tracked("smallball", &resolved, Some(mc.master_seed), args.out.as_deref(), |run| {
        let est = estimate_smallball(&law, seminorm, &mc)?;
        run.write_json("estimate.json", &est)?;
        run.write_output("table.csv", &table(&est.points))?;
        if let Some(raw) = &est.raw_grid_points {
            run.write_output("table_raw_grid.csv", &table(raw))?;
        }
        for pt in &est.points {
            println!(
                "eps {}  p_hat {}  se {}  k_hat {}",
                pt.epsilon,
                pt.p_hat,
                pt.se,
                pt.k_hat.map_or("-".into(), |k| k.to_string())
            );
        }
        if !est.dropped_epsilons.is_empty() {
            eprintln!("dropped infeasible epsilons: {:?}", est.dropped_epsilons);
        }
        Ok(est)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_fill_missing_flags() {
        let file: SmallballParams =
            serde_json::from_str(r#"{"alpha": 0.5, "subordinator": true, "p": 2, "epsilons": [0.05], "seed": 3}"#)
                .unwrap();
        let flags = SmallballParams {
            seed: Some(9),
            ..SmallballParams::default()
        };
        let m = flags.merged(&file);
        assert_eq!(m.seed, Some(9));
        assert_eq!(m.alpha, Some(0.5));
        assert_eq!(m.mc_config().epsilons, vec![0.05]);
        assert_eq!(m.seminorm().unwrap(), SemiNorm::PVariation { p: 2.0 });
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<SmallballParams>(r#"{"alpah": 0.5}"#).is_err());
    }

    #[test]
    fn table_layout() {
        let pt = SmallBallPoint {
            epsilon: 0.5,
            hits: 3,
            p_hat: 0.003,
            se: 0.001,
            interval: (0.001, 0.009),
            k_hat: None,
            k_interval: None,
            refined: None,
        };
        let text = String::from_utf8(table(&[pt])).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TABLE_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "5.0000000000000000e-1,3,3.0000000000000001e-3,1.0000000000000000e-3,1.0000000000000000e-3,8.9999999999999993e-3,,,"
        );
    }
}
