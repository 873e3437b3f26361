use std::fmt::Write;
use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use erasure_ot::analysis::optimize::{default_depth, optimize_boot_params};
use erasure_ot::analysis::rates::{rate_boot, rate_gsfc};

use crate::parse::Branching;
use crate::{emit, read_table, PointsArgs};

pub const HEADER: &str = "p,params,rate";

#[derive(Args, Debug)]
pub struct RatesArgs {
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[command(flatten)]
    pub points: PointsArgs,
    /// Branching sequence to plot; repeatable. Without it the optimizer's
    /// best sequence at each point is reported as `best`.
    #[arg(long)]
    pub params: Vec<Branching>,
    /// Adds a `gsfc` curve for this function table.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Deepest tree the optimizer may use.
    #[arg(long)]
    pub max_u: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[command(flatten)]
    pub points: PointsArgs,
    #[arg(long)]
    pub max_u: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn check_set(set: &Branching, m: usize) -> anyhow::Result<()> {
    if set.0.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).is_none_or(|prod| prod < m) {
        bail!("branching {set} does not cover {m} strings");
    }
    Ok(())
}

pub fn rates(args: &RatesArgs) -> anyhow::Result<()> {
    if args.m < 2 {
        bail!("m must be at least 2");
    }
    let points = args.points.points()?;
    let mut sets = vec![Branching(vec![args.m])];
    for set in &args.params {
        check_set(set, args.m)?;
        if !sets.contains(set) {
            sets.push(set.clone());
        }
    }
    let mut out = format!("{HEADER}\n");
    for set in &sets {
        for &p in &points {
            writeln!(out, "{p},{set},{}", rate_boot(p, &set.0))?;
        }
    }
    if args.params.is_empty() {
        let max_u = args.max_u.unwrap_or(default_depth(args.m));
        for &p in &points {
            let best = optimize_boot_params(p, args.m, max_u)?;
            writeln!(out, "{p},best:{},{}", Branching(best.branching), best.rate)?;
        }
    }
    if let Some(path) = &args.table {
        let spec = read_table(path)?;
        for &p in &points {
            match rate_gsfc(p, &spec) {
                Some(r) => writeln!(out, "{p},gsfc,{r}")?,
                None => bail!("the function table has no computable rate"),
            }
        }
    }
    emit(args.output.as_deref(), &out)
}

pub fn optimize(args: &OptimizeArgs) -> anyhow::Result<()> {
    let points = args.points.points()?;
    let max_u = args.max_u.unwrap_or(default_depth(args.m));
    let mut out = format!("{HEADER}\n");
    for &p in &points {
        let best = optimize_boot_params(p, args.m, max_u)?;
        writeln!(out, "{p},{},{}", Branching(best.branching), best.rate)?;
    }
    emit(args.output.as_deref(), &out)
}
