//! Privacy auditors.
//!
//! [`audit_exact_mi`] enumerates every branch of every random decision in a
//! session (erasure pattern, source bits, both parties' local coins) for each
//! input realization, builds the exact law of a party's view, and computes a
//! conditional mutual information between a secret and that view. Inputs are
//! weighted uniformly. Because perfect privacy must hold for every input law,
//! the result also reports the largest total-variation distance between view
//! laws that share the conditioning value but differ in the secret; that is
//! zero exactly when the privacy claim holds for all input distributions.
//!
//! [`audit_disjoint_gf2`] is the structural check for the bootstrapped
//! protocol: which strings, or XORs of strings, Bob can compute.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::analysis::enumerate::{enumerate, EnumCoins};
use crate::bits::BitMatrix;
use crate::boot::{boot_assign, boot_knowledge_span, BootInputs, BootParams, BootProtocol, BootResources};
use crate::engine::{
    run_session, PartyView, Protocol, Resource, ResourceSegment, SessionCoins, SessionResult,
};
use crate::erasure::{sample_bes, ErasureParams};
use crate::function::{eval_functions, FunctionOutputs, FunctionSpec, SourceSamples};
use crate::gsfc::{GsfcConfig, GsfcProtocol};
use crate::swot::{SwotConfig, SwotInputs, SwotProtocol, SwotVariant};
use crate::{Error, Result};

pub const DEFAULT_ATOM_CAP: u128 = 1 << 24;

/// A small protocol instance to audit. Resources are erasure sources.
#[derive(Clone, Debug)]
pub enum AuditInstance {
    Swot {
        cfg: SwotConfig,
        p: f64,
        variant: SwotVariant,
    },
    Boot {
        params: BootParams,
        resources: BootResources,
        p: f64,
    },
    Gsfc {
        spec: FunctionSpec,
        k: usize,
        lengths: (usize, usize),
        p: f64,
    },
}

/// Which privacy statement to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditTarget {
    /// Alice's inputs against Bob's view, given Bob's inputs and output.
    JointBob,
    /// Bob's inputs against Alice's view, given Alice's inputs and output.
    JointAlice,
    /// String `i` (1-based) of the bootstrapped protocol against Bob's view,
    /// given his choice and the chosen string.
    Disjoint(usize),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PrivacyAuditResult {
    /// `I(secret; view | conditioning)` in bits, relative-entropy form.
    pub mi_bits: Option<f64>,
    /// The same quantity as a sum and difference of joint entropies.
    pub mi_bits_entropy_form: Option<f64>,
    /// Largest total-variation distance between view laws with equal
    /// conditioning and different secrets.
    pub max_divergence: Option<f64>,
    /// 1-based strings Bob can compute.
    pub recoverable_units: Vec<usize>,
    /// Least-weight XORs of other strings Bob can compute.
    pub leak_witnesses: Vec<Vec<usize>>,
    /// Enumerated branches.
    pub atoms: u128,
}

type Key = Vec<u32>;

enum Inputs {
    Swot(SwotInputs),
    Boot(BootInputs),
    Gsfc(SourceSamples),
}

enum Built {
    Swot(SwotProtocol),
    Boot(BootProtocol),
    Gsfc(GsfcProtocol, FunctionSpec),
}

fn bits_key(m: &BitMatrix) -> Key {
    m.data().iter().map(|&b| b as u32).collect()
}

fn all_matrices(rows: usize, cols: usize) -> Result<Vec<BitMatrix>> {
    let len = rows * cols;
    if len > 20 {
        return Err(Error::Capacity {
            atoms: 1u128 << len.min(127),
            cap: 1 << 20,
        });
    }
    (0u32..1 << len)
        .map(|code| BitMatrix::new(rows, cols, (0..len).map(|i| code >> (len - 1 - i) & 1 == 1).collect()))
        .collect()
}

fn all_words(len: usize, size: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=size).map(move |x| {
                    let mut w = w.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

impl Built {
    fn new(instance: &AuditInstance) -> Result<Self> {
        Ok(match instance {
            AuditInstance::Swot { cfg, variant, .. } => Built::Swot(SwotProtocol {
                cfg: *cfg,
                variant: *variant,
            }),
            AuditInstance::Boot {
                params, resources, ..
            } => Built::Boot(BootProtocol::new(params.clone(), resources.clone())?),
            AuditInstance::Gsfc {
                spec, k, lengths, p, ..
            } => Built::Gsfc(
                GsfcProtocol::new(
                    GsfcConfig {
                        spec: spec.clone(),
                        k: *k,
                        p_ab: *p,
                        p_ba: *p,
                        single_ot: false,
                    },
                    *lengths,
                )?,
                spec.clone(),
            ),
        })
    }

    fn realizations(&self) -> Result<Vec<Inputs>> {
        Ok(match self {
            Built::Swot(proto) => {
                let SwotConfig { k, m, .. } = proto.cfg;
                let mut out = Vec::new();
                for a in all_matrices(k, m)? {
                    for b in all_words(k, m as u32) {
                        out.push(Inputs::Swot(SwotInputs { a: a.clone(), b }));
                    }
                }
                out
            }
            Built::Boot(proto) => {
                let (k, m) = (proto.params.k(), proto.params.m());
                let mut out = Vec::new();
                for strings in all_matrices(k, m)? {
                    for b in 1..=m as u32 {
                        out.push(Inputs::Boot(BootInputs {
                            strings: strings.clone(),
                            b,
                        }));
                    }
                }
                out
            }
            Built::Gsfc(proto, spec) => {
                let k = proto.cfg.k;
                let mut out = Vec::new();
                for a in all_words(k, spec.m_a()) {
                    for b in all_words(k, spec.m_b()) {
                        out.push(Inputs::Gsfc(SourceSamples::new(a.clone(), b)?));
                    }
                }
                out
            }
        })
    }

    fn demand_total(&self) -> usize {
        let d = match self {
            Built::Swot(p) => p.demand(),
            Built::Boot(p) => p.demand(),
            Built::Gsfc(p, _) => p.demand(),
        };
        d.iter().map(|s| s.n).sum()
    }

    /// `(alice inputs, bob inputs, true outputs)` as keys.
    fn keys(&self, inputs: &Inputs) -> Result<(Key, Key, FunctionOutputs)> {
        Ok(match (self, inputs) {
            (Built::Swot(_), Inputs::Swot(x)) => {
                let g = x
                    .b
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| x.a.get(i, b as usize - 1) as u32)
                    .collect();
                let k = x.b.len();
                (bits_key(&x.a), x.b.clone(), FunctionOutputs { f: vec![0; k], g })
            }
            (Built::Boot(_), Inputs::Boot(x)) => {
                let col = x.strings.column(x.b as usize)?;
                let k = col.len();
                (
                    bits_key(&x.strings),
                    vec![x.b],
                    FunctionOutputs {
                        f: vec![0; k],
                        g: col.bits().iter().map(|&b| b as u32).collect(),
                    },
                )
            }
            (Built::Gsfc(_, spec), Inputs::Gsfc(x)) => {
                (x.a().to_vec(), x.b().to_vec(), eval_functions(spec, x)?)
            }
            _ => unreachable!("inputs built for this protocol"),
        })
    }

    fn run(&self, inputs: &Inputs, p: ErasureParams, coins: &mut EnumCoins) -> Result<SessionResult> {
        match (self, inputs) {
            (Built::Swot(proto), Inputs::Swot(x)) => run_enumerated(proto, x, p, coins),
            (Built::Boot(proto), Inputs::Boot(x)) => run_enumerated(proto, x, p, coins),
            (Built::Gsfc(proto, _), Inputs::Gsfc(x)) => run_enumerated(proto, x, p, coins),
            _ => unreachable!("inputs built for this protocol"),
        }
    }
}

fn run_enumerated<P: Protocol>(
    protocol: &P,
    inputs: &P::Inputs,
    p: ErasureParams,
    coins: &mut EnumCoins,
) -> Result<SessionResult> {
    let segments = protocol
        .demand()
        .iter()
        .map(|d| ResourceSegment {
            direction: d.direction,
            resource: Resource::Source(sample_bes(p, d.n, coins)),
        })
        .collect();
    let (mut a, mut b, mut n) = (coins.clone(), coins.clone(), coins.clone());
    run_session(
        protocol,
        inputs,
        segments,
        SessionCoins {
            alice: &mut a,
            bob: &mut b,
            noise: &mut n,
        },
    )
}

/// Per-realization view law, with views merged.
struct Realized {
    secret: Key,
    cond: Key,
    views: Vec<(PartyView, f64)>,
    atoms: u128,
}

pub fn audit_exact_mi(instance: &AuditInstance, target: AuditTarget, cap: u128) -> Result<PrivacyAuditResult> {
    let p = match instance {
        AuditInstance::Swot { p, .. } | AuditInstance::Boot { p, .. } | AuditInstance::Gsfc { p, .. } => *p,
    };
    let params = ErasureParams::new(p)?;
    if let AuditTarget::Disjoint(i) = target {
        let AuditInstance::Boot { params: bp, .. } = instance else {
            return Err(Error::Parameter("the per-string target applies to the bootstrapped protocol".into()));
        };
        if i == 0 || i > bp.m() {
            return Err(Error::Domain {
                value: i as u32,
                size: bp.m() as u32,
            });
        }
    }
    let built = Built::new(instance)?;
    let realizations = built.realizations()?;

    // each sample contributes a source bit and an erasure coin
    let per_run = 4u128.saturating_pow(built.demand_total() as u32);
    let estimate = per_run.saturating_mul(realizations.len() as u128);
    if estimate > cap {
        return Err(Error::Capacity { atoms: estimate, cap });
    }
    let per_cap = cap / realizations.len().max(1) as u128;

    let realized: Vec<Realized> = realizations
        .par_iter()
        .map(|inputs| -> Result<Realized> {
            let (alice, bob, truth) = built.keys(inputs)?;
            let (secret, cond) = match target {
                AuditTarget::JointBob => (alice, [bob, truth.g].concat()),
                AuditTarget::JointAlice => (bob, [alice, truth.f].concat()),
                AuditTarget::Disjoint(i) => {
                    let Inputs::Boot(x) = inputs else { unreachable!() };
                    let col = |j: usize| -> Result<Key> {
                        Ok(x.strings.column(j)?.bits().iter().map(|&b| b as u32).collect())
                    };
                    (col(i)?, [vec![x.b], col(x.b as usize)?].concat())
                }
            };
            let outcomes = enumerate(per_cap, |coins| {
                built.run(inputs, params, coins).map(|r| match target {
                    AuditTarget::JointAlice => r.alice_view,
                    _ => r.bob_view,
                })
            })
                .map_err(|e| match e {
                    Error::Capacity { atoms, .. } => Error::Capacity {
                        atoms: atoms.saturating_mul(realizations.len() as u128),
                        cap,
                    },
                    other => other,
                })?;
            let atoms = outcomes.len() as u128;
            let mut merged: HashMap<PartyView, f64> = HashMap::new();
            let mut order: Vec<PartyView> = Vec::new();
            for (w, view) in outcomes {
                let view = view?;
                match merged.get_mut(&view) {
                    Some(acc) => *acc += w,
                    None => {
                        order.push(view.clone());
                        merged.insert(view, w);
                    }
                }
            }
            let views = order
                .into_iter()
                .map(|v| {
                    let w = merged[&v];
                    (v, w)
                })
                .collect();
            Ok(Realized {
                secret,
                cond,
                views,
                atoms,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // intern views in realization order so ids are reproducible
    let mut ids: HashMap<&PartyView, usize> = HashMap::new();
    let prior = 1.0 / realized.len() as f64;
    let mut joint: BTreeMap<(&Key, &Key, usize), f64> = BTreeMap::new();
    let mut atoms = 0u128;
    for r in &realized {
        atoms += r.atoms;
        for (view, w) in &r.views {
            let next = ids.len();
            let id = *ids.entry(view).or_insert(next);
            *joint.entry((&r.cond, &r.secret, id)).or_default() += prior * w;
        }
    }

    let (mi_kl, mi_h) = conditional_mi(&joint);
    Ok(PrivacyAuditResult {
        mi_bits: Some(mi_kl),
        mi_bits_entropy_form: Some(mi_h),
        max_divergence: Some(max_divergence(&joint)),
        atoms,
        ..Default::default()
    })
}

fn plogp_sum(values: impl Iterator<Item = f64>) -> f64 {
    values.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// `I(S; V | C)` from `P(c, s, v)`, in relative-entropy and entropy forms.
fn conditional_mi<C: Ord + Clone, S: Ord + Clone>(joint: &BTreeMap<(C, S, usize), f64>) -> (f64, f64) {
    let mut p_c: BTreeMap<C, f64> = BTreeMap::new();
    let mut p_cs: BTreeMap<(C, S), f64> = BTreeMap::new();
    let mut p_cv: BTreeMap<(C, usize), f64> = BTreeMap::new();
    for ((c, s, v), &w) in joint {
        *p_c.entry(c.clone()).or_default() += w;
        *p_cs.entry((c.clone(), s.clone())).or_default() += w;
        *p_cv.entry((c.clone(), *v)).or_default() += w;
    }
    let kl: f64 = joint
        .iter()
        .filter(|(_, &w)| w > 0.0)
        .map(|((c, s, v), &w)| {
            let num = w * p_c[c];
            let den = p_cs[&(c.clone(), s.clone())] * p_cv[&(c.clone(), *v)];
            w * (num / den).log2()
        })
        .sum();
    let h = plogp_sum(p_cs.values().copied()) + plogp_sum(p_cv.values().copied())
        - plogp_sum(p_c.values().copied())
        - plogp_sum(joint.values().copied());
    (kl, h)
}

/// Largest total-variation distance between `P(V | c, s)` and `P(V | c, s')`.
fn max_divergence<C: Ord + Clone, S: Ord + Clone>(joint: &BTreeMap<(C, S, usize), f64>) -> f64 {
    let mut laws: BTreeMap<C, BTreeMap<S, BTreeMap<usize, f64>>> = BTreeMap::new();
    for ((c, s, v), &w) in joint {
        *laws
            .entry(c.clone())
            .or_default()
            .entry(s.clone())
            .or_default()
            .entry(*v)
            .or_default() += w;
    }
    let mut worst = 0.0f64;
    for by_secret in laws.values() {
        let normalized: Vec<BTreeMap<usize, f64>> = by_secret
            .values()
            .map(|law| {
                let total: f64 = law.values().sum();
                law.iter().map(|(&v, &w)| (v, w / total)).collect()
            })
            .collect();
        for (i, a) in normalized.iter().enumerate() {
            for b in &normalized[i + 1..] {
                let mut tv = 0.0;
                for (v, &pa) in a {
                    tv += (pa - b.get(v).copied().unwrap_or(0.0)).abs();
                }
                for (v, &pb) in b {
                    if !a.contains_key(v) {
                        tv += pb;
                    }
                }
                worst = worst.max(tv / 2.0);
            }
        }
    }
    worst
}

/// GF(2) recoverability of Bob's knowledge in the bootstrapped protocol.
pub fn audit_disjoint_gf2(params: &BootParams, b: usize) -> Result<PrivacyAuditResult> {
    let span = boot_knowledge_span(&boot_assign(params), b)?;
    let leak_witnesses = match span.leak_witnesses() {
        Some(w) => w,
        // too many combinations to enumerate; report the basis instead
        None => span
            .leak_basis
            .iter()
            .map(|v| (0..span.m).filter(|&j| v[j]).map(|j| j + 1).collect())
            .collect(),
    };
    Ok(PrivacyAuditResult {
        recoverable_units: span.recoverable_units(),
        leak_witnesses,
        ..Default::default()
    })
}
