use std::fs::File;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use smallball::variation::{
    block_pvars, holder_on_times, l2_norm, oscillation, pvar_dp, pvar_mesh, sup_norm, turning_points,
};
use smallball::BlockDecomposition;

use super::tracked;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PvarArgs {
    /// CSV with header `t,value`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub p: f64,
    /// Also report the variation over partitions with index gaps ≤ this.
    #[arg(long)]
    pub mesh: Option<usize>,
    /// Also report the variation of this many equal blocks.
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvarReport {
    pub n_points: usize,
    pub p: f64,
    /// Strong p-variation (the p-th power).
    pub pvar: f64,
    /// Its p-th root.
    pub norm: f64,
    pub partition_size: usize,
    pub turning_points: usize,
    pub sup: f64,
    pub oscillation: f64,
    /// Left-endpoint L2 norm, meaningful for uniform time grids.
    pub l2: f64,
    /// (1/p)-Hölder seminorm using the time column.
    pub holder: f64,
    pub mesh: Option<MeshValue>,
    pub blocks: Option<BlockDecomposition<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshValue {
    pub max_gap: usize,
    pub pvar: f64,
}

#[derive(Debug, Deserialize)]
struct Row {
    t: f64,
    value: f64,
}

pub fn read_path(input: &PathBuf) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let file = File::open(input).map_err(|e| CliError::io(input, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| CliError::Domain(format!("{}: malformed CSV: {e}", input.display())))?;
        if !(row.t.is_finite() && row.value.is_finite()) {
            return Err(CliError::Domain(format!("{}: non-finite entry on data row {}", input.display(), line + 1)));
        }
        times.push(row.t);
        values.push(row.value);
    }
    if values.is_empty() {
        return Err(CliError::Domain(format!("{}: no data rows", input.display())));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Domain(format!("{}: times must increase strictly", input.display())));
    }
    Ok((times, values))
}

pub fn analyze(times: &[f64], values: &[f64], args: &PvarArgs) -> CliResult<PvarReport> {
    let p = args.p;
    let r = pvar_dp(values, p)?;
    let holder = if values.len() > 1 {
        holder_on_times(times, values, p)?
    } else {
        0.0
    };
    Ok(PvarReport {
        n_points: values.len(),
        p,
        pvar: r.value,
        norm: r.value.powf(p.recip()),
        partition_size: r.optimal_indices.len(),
        turning_points: turning_points(values).len(),
        sup: sup_norm(values),
        oscillation: oscillation(values),
        l2: l2_norm(values),
        holder,
        mesh: args
            .mesh
            .map(|g| pvar_mesh(values, p, g).map(|v| MeshValue { max_gap: g, pvar: v }))
            .transpose()?,
        blocks: args.blocks.map(|b| block_pvars(values, p, b)).transpose()?,
    })
}

pub fn run(args: &PvarArgs) -> CliResult<PvarReport> {
    tracked("pvar", args, None, args.out.as_deref(), |run| {
        let (times, values) = read_path(&args.input)?;
        let report = analyze(&times, &values, args)?;
        run.write_json("pvar.json", &report)?;
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        Ok(report)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(p: f64) -> PvarArgs {
        PvarArgs {
            input: PathBuf::new(),
            p,
            mesh: Some(2),
            blocks: Some(2),
            out: None,
        }
    }

    #[test]
    fn constant_path_is_zero() {
        let t = [0.0, 0.5, 1.0];
        let r = analyze(&t, &[1.0, 1.0, 1.0], &args(2.0)).unwrap();
        assert_eq!(r.pvar, 0.0);
        assert_eq!(r.holder, 0.0);
    }

    #[test]
    fn monotone_path_gives_endpoint_increment() {
        let t = [0.0, 0.25, 0.5, 0.75, 1.0];
        let r = analyze(&t, &[0.0, 0.1, 0.5, 0.6, 1.5], &args(2.0)).unwrap();
        assert_eq!(r.pvar, 2.25);
        assert_eq!(r.partition_size, 2);
    }

    #[test]
    fn sub_unit_exponent_is_rejected() {
        let t = [0.0, 1.0];
        let e = analyze(&t, &[0.0, 1.0], &args(0.5)).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("pure jump"));
    }
}
