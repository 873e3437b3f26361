//! Seeded Monte Carlo harness.
//!
//! Trial `t` derives its own seed with [`trial_seed`] and draws from fixed
//! streams: inputs from `Source`, each party from its local label, and
//! resource segment `i` from `Noise` index `i`. Trials run in parallel but
//! are aggregated in trial order, so a summary depends only on the config.

use rayon::prelude::*;

use crate::analysis::binomial::abort_probability_exact;
use crate::bits::BitMatrix;
use crate::boot::{BootInputs, BootProtocol, BootResources};
use crate::engine::{
    check_correctness, run_session, Direction, Protocol, Resource, ResourceSegment, SessionCoins,
    SessionResult,
};
use crate::erasure::{sample_bes, ErasureParams};
use crate::function::{eval_functions, FunctionOutputs, SourceSamples};
use crate::gsfc::GsfcProtocol;
use crate::randomness::{trial_seed, Coins, SeededCoins, StreamId, StreamLabel};
use crate::swot::{SwotInputs, SwotProtocol};
use crate::{Error, Result};

/// How the erasure resource is realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Model {
    /// Both sides are handed a BES sample sequence up front.
    #[default]
    Source,
    /// The sender transmits uniform bits over a BEC when the OT starts.
    Channel,
}

#[derive(Clone, Debug)]
pub enum SimProtocol {
    Swot { protocol: SwotProtocol, p: f64 },
    Boot { protocol: BootProtocol, p: f64 },
    /// Erasure probabilities come from the protocol config.
    Gsfc {
        protocol: GsfcProtocol,
        /// Probability that Bob's sample is tied to Alice's,
        /// `b = ((a - 1) mod m_B) + 1`, instead of drawn independently.
        correlation: f64,
    },
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub protocol: SimProtocol,
    pub model: Model,
    pub trials: u64,
    pub seed: u64,
}

/// One session with the inputs it ran on.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub result: SessionResult,
    pub truth: FunctionOutputs,
}

impl TrialRecord {
    /// Both parties' estimates equal the truth.
    pub fn correct(&self) -> Result<bool> {
        let c = check_correctness(&self.result, &self.truth)?;
        Ok(c.alice && c.bob)
    }
}

fn stream(seed: u64, label: StreamLabel, index: u32) -> SeededCoins {
    SeededCoins::new(seed, StreamId::new(label, index))
}

fn segments<P: Protocol>(protocol: &P, p: impl Fn(Direction) -> f64, model: Model, seed: u64) -> Result<Vec<ResourceSegment>> {
    protocol
        .demand()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let params = ErasureParams::new(p(d.direction))?;
            let resource = match model {
                Model::Source => Resource::Source(sample_bes(
                    params,
                    d.n,
                    &mut stream(seed, StreamLabel::Noise, i as u32),
                )),
                Model::Channel => Resource::Channel(params),
            };
            Ok(ResourceSegment {
                direction: d.direction,
                resource,
            })
        })
        .collect()
}

fn execute<P: Protocol>(protocol: &P, inputs: &P::Inputs, segments: Vec<ResourceSegment>, seed: u64) -> Result<SessionResult> {
    let mut alice = stream(seed, StreamLabel::AliceLocal, 0);
    let mut bob = stream(seed, StreamLabel::BobLocal, 0);
    // channel noise; source segments were drawn beforehand
    let mut noise = stream(seed, StreamLabel::Noise, u32::MAX);
    run_session(
        protocol,
        inputs,
        segments,
        SessionCoins {
            alice: &mut alice,
            bob: &mut bob,
            noise: &mut noise,
        },
    )
}

fn random_matrix(rows: usize, cols: usize, coins: &mut dyn Coins) -> Result<BitMatrix> {
    BitMatrix::new(rows, cols, (0..rows * cols).map(|_| coins.bit()).collect())
}

fn symbol(size: u32, coins: &mut dyn Coins) -> u32 {
    coins.below(size as usize) as u32 + 1
}

/// Runs trial `trial` of `cfg`.
pub fn run_trial(cfg: &SimConfig, trial: u64) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.seed, trial);
    let mut src = stream(seed, StreamLabel::Source, 0);
    match &cfg.protocol {
        SimProtocol::Swot { protocol, p } => {
            let (k, m) = (protocol.cfg.k, protocol.cfg.m);
            let a = random_matrix(k, m, &mut src)?;
            let b: Vec<u32> = (0..k).map(|_| symbol(m as u32, &mut src)).collect();
            let g = b.iter().enumerate().map(|(i, &j)| a.get(i, j as usize - 1) as u32).collect();
            let inputs = SwotInputs { a, b };
            let segs = segments(protocol, |_| *p, cfg.model, seed)?;
            Ok(TrialRecord {
                result: execute(protocol, &inputs, segs, seed)?,
                truth: FunctionOutputs { f: vec![0; k], g },
            })
        }
        SimProtocol::Boot { protocol, p } => {
            let (k, m) = (protocol.params.k(), protocol.params.m());
            let strings = random_matrix(k, m, &mut src)?;
            let b = symbol(m as u32, &mut src);
            let g = strings.column(b as usize)?.bits().iter().map(|&x| x as u32).collect();
            let inputs = BootInputs { strings, b };
            let segs = segments(protocol, |_| *p, cfg.model, seed)?;
            Ok(TrialRecord {
                result: execute(protocol, &inputs, segs, seed)?,
                truth: FunctionOutputs { f: vec![0; k], g },
            })
        }
        SimProtocol::Gsfc {
            protocol,
            correlation,
        } => {
            let spec = &protocol.cfg.spec;
            let (m_a, m_b) = (spec.m_a(), spec.m_b());
            let mut a = Vec::with_capacity(protocol.cfg.k);
            let mut b = Vec::with_capacity(protocol.cfg.k);
            for _ in 0..protocol.cfg.k {
                let x = symbol(m_a, &mut src);
                let y = if src.bernoulli(correlation.clamp(0.0, 1.0)) {
                    (x - 1) % m_b + 1
                } else {
                    symbol(m_b, &mut src)
                };
                a.push(x);
                b.push(y);
            }
            let inputs = SourceSamples::new(a, b)?;
            let truth = eval_functions(spec, &inputs)?;
            let (p_ab, p_ba) = (protocol.cfg.p_ab, protocol.cfg.p_ba);
            let p = |d| match d {
                Direction::AliceToBob => p_ab,
                Direction::BobToAlice => p_ba,
            };
            let segs = segments(protocol, p, cfg.model, seed)?;
            Ok(TrialRecord {
                result: execute(protocol, &inputs, segs, seed)?,
                truth,
            })
        }
    }
}

/// Exact abort probability of one session, when it has a closed form.
///
/// Independent sub-sessions abort with `1 - prod (1 - P_i)`. A pooled
/// bootstrapped session has no closed form here.
pub fn exact_abort(protocol: &SimProtocol) -> Option<f64> {
    let all = |parts: &[(f64, usize, usize, usize)]| {
        1.0 - parts
            .iter()
            .map(|&(p, n, k, m)| 1.0 - abort_probability_exact(p, n, k, m))
            .product::<f64>()
    };
    match protocol {
        SimProtocol::Swot { protocol, p } => {
            let c = protocol.cfg;
            Some(abort_probability_exact(*p, c.n, c.k, c.m))
        }
        SimProtocol::Boot { protocol, p } => match &protocol.resources {
            BootResources::PerRound(n) => {
                let k = protocol.params.k();
                let parts: Vec<_> = if protocol.params.u() == 1 {
                    vec![(*p, n[0], k, protocol.params.m())]
                } else {
                    protocol.params.branching().iter().zip(n).map(|(&s, &n)| (*p, n, k, s)).collect()
                };
                Some(all(&parts))
            }
            BootResources::Pooled(_) => None,
        },
        SimProtocol::Gsfc { protocol, .. } => {
            let cfg = &protocol.cfg;
            let (n_ab, n_ba) = protocol.lengths();
            let parts: Vec<_> = protocol
                .directions()
                .into_iter()
                .map(|d| match d {
                    Direction::AliceToBob => (cfg.p_ab, n_ab, cfg.k * cfg.spec.h_b() as usize, cfg.spec.m_b() as usize),
                    Direction::BobToAlice => (cfg.p_ba, n_ba, cfg.k * cfg.spec.h_a() as usize, cfg.spec.m_a() as usize),
                })
                .collect();
            Some(all(&parts))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimSummary {
    pub trials: u64,
    pub aborts: u64,
    /// Sessions where some estimate differs from the truth.
    pub errors: u64,
    /// Errors in sessions that did not abort. Zero for a correct protocol.
    pub silent_errors: u64,
    pub mean_samples: f64,
    pub exact_abort: Option<f64>,
}

fn se(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials.max(1) as f64).sqrt()
}

impl SimSummary {
    pub fn abort_rate(&self) -> f64 {
        self.aborts as f64 / self.trials.max(1) as f64
    }

    pub fn error_rate(&self) -> f64 {
        self.errors as f64 / self.trials.max(1) as f64
    }

    /// Empirical standard error of the abort rate.
    pub fn abort_se(&self) -> f64 {
        se(self.abort_rate(), self.trials)
    }

    pub fn error_se(&self) -> f64 {
        se(self.error_rate(), self.trials)
    }

    /// Standard error implied by the exact abort probability.
    pub fn exact_se(&self) -> Option<f64> {
        self.exact_abort.map(|p| se(p, self.trials))
    }

    /// Distance of the abort rate from the exact value, in exact standard
    /// errors. Infinite if the exact law is degenerate and missed.
    pub fn abort_z(&self) -> Option<f64> {
        let (p, s) = (self.exact_abort?, self.exact_se()?);
        let gap = (self.abort_rate() - p).abs();
        Some(if s > 0.0 {
            gap / s
        } else if gap < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        })
    }

    /// The abort rate is within `sigmas` standard errors of the exact value
    /// (vacuous when there is none) and no completed session erred.
    pub fn passes(&self, sigmas: f64) -> bool {
        self.silent_errors == 0 && self.abort_z().is_none_or(|z| z <= sigmas)
    }
}

pub fn simulate(cfg: &SimConfig) -> Result<SimSummary> {
    if cfg.trials == 0 {
        return Err(Error::Parameter("at least one trial is needed".into()));
    }
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<(bool, bool, usize)> {
            let rec = run_trial(cfg, t)?;
            Ok((rec.result.aborted(), !rec.correct()?, rec.result.transcript.resource_usage))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut s = SimSummary {
        trials: cfg.trials,
        aborts: 0,
        errors: 0,
        silent_errors: 0,
        mean_samples: 0.0,
        exact_abort: exact_abort(&cfg.protocol),
    };
    let mut used = 0u128;
    for (aborted, wrong, n) in outcomes {
        s.aborts += aborted as u64;
        s.errors += wrong as u64;
        s.silent_errors += (wrong && !aborted) as u64;
        used += n as u128;
    }
    s.mean_samples = used as f64 / cfg.trials as f64;
    Ok(s)
}

/// Every session of this configuration aborts.
pub fn infeasible(protocol: &SimProtocol) -> bool {
    exact_abort(protocol) == Some(1.0)
}
