use anyhow::{bail, Context};
use clap::Args;
use erasure_ot::analysis::optimize::{default_depth, optimize_boot_params};
use erasure_ot::boot::{per_round_lengths, BootParams, BootProtocol, BootResources};
use erasure_ot::gsfc::{gsfc_lengths, GsfcConfig, GsfcProtocol};
use erasure_ot::sim::{self, SimConfig, SimProtocol};
use erasure_ot::swot::{SwotConfig, SwotProtocol};

use crate::{ModelArg, ProtocolKind, SessionArgs, Verdict};

/// Standard errors tolerated between the abort rate and its exact value.
pub const GATE_SIGMAS: f64 = 4.0;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub session: SessionArgs,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value = "source")]
    pub model: ModelArg,
    /// Probability that Bob's sample follows Alice's (function computation).
    #[arg(long, default_value_t = 0.0)]
    pub correlation: f64,
}

/// Branching from `--params`, or the optimizer's choice at `p`.
pub fn branching(args: &SessionArgs) -> anyhow::Result<Vec<usize>> {
    Ok(match &args.params {
        Some(b) => b.0.clone(),
        None => optimize_boot_params(args.p, args.m, default_depth(args.m))?.branching,
    })
}

pub fn build(args: &SessionArgs, correlation: f64) -> anyhow::Result<SimProtocol> {
    let (k, m, p) = (args.k, args.m, args.p);
    Ok(match args.protocol {
        ProtocolKind::Swot => {
            let n = match args.n {
                Some(n) => n,
                None => per_round_lengths(k, &[m], p, args.slack)?[0],
            };
            let mut protocol = SwotProtocol::new(SwotConfig::new(k, m, n)?);
            protocol.variant = args.variant.into();
            SimProtocol::Swot { protocol, p }
        }
        ProtocolKind::Boot => {
            let params = BootParams::new(branching(args)?, m, k)?;
            let resources = match args.n {
                Some(n) => BootResources::Pooled(n),
                None => BootResources::PerRound(per_round_lengths(k, params.branching(), p, args.slack)?),
            };
            SimProtocol::Boot {
                protocol: BootProtocol::new(params, resources)?,
                p,
            }
        }
        ProtocolKind::Gsfc => {
            let cfg = GsfcConfig {
                spec: args.spec()?,
                k,
                p_ab: p,
                p_ba: p,
                single_ot: args.single_ot,
            };
            let lengths = match args.n {
                Some(n) => (n, n),
                None => gsfc_lengths(&cfg, args.slack)?,
            };
            SimProtocol::Gsfc {
                protocol: GsfcProtocol::new(cfg, lengths)?,
                correlation,
            }
        }
    })
}

pub fn simulate(args: &SimulateArgs) -> anyhow::Result<Verdict> {
    if !(0.0..=1.0).contains(&args.correlation) {
        bail!("correlation must lie in [0, 1]");
    }
    let protocol = build(&args.session, args.correlation)?;
    if sim::infeasible(&protocol) {
        eprintln!("warning: these sizes abort every session");
    }
    let cfg = SimConfig {
        protocol,
        model: args.model.into(),
        trials: args.trials,
        seed: args.session.seed,
    };
    let s = sim::simulate(&cfg).context("simulation failed")?;
    println!("trials {}", s.trials);
    println!("abort_rate {} se {}", s.abort_rate(), s.abort_se());
    println!("error_rate {} se {}", s.error_rate(), s.error_se());
    println!("silent_errors {}", s.silent_errors);
    println!("mean_samples {}", s.mean_samples);
    match (s.exact_abort, s.exact_se(), s.abort_z()) {
        (Some(p), Some(se), Some(z)) => println!("exact_abort {p} se {se} z {z}"),
        _ => println!("exact_abort none"),
    }
    let pass = s.passes(GATE_SIGMAS);
    println!("gate {}", if pass { "pass" } else { "FAIL" });
    Ok(if pass { Verdict::Pass } else { Verdict::Fail })
}
