use anyhow::Context;
use clap::Args;
use erasure_ot::analysis::audit::{
    audit_disjoint_gf2, audit_exact_mi, AuditInstance, AuditTarget, PrivacyAuditResult, DEFAULT_ATOM_CAP,
};
use erasure_ot::boot::{BootParams, BootResources};
use erasure_ot::swot::SwotConfig;

use crate::simulate::branching;
use crate::{ProtocolKind, SessionArgs, Verdict};

/// Largest mutual information, in bits, still read as zero.
pub const MI_TOLERANCE: f64 = 1e-12;

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[command(flatten)]
    pub session: SessionArgs,
    /// Bob's choice for the structural check; every choice when absent.
    #[arg(long)]
    pub b: Option<usize>,
    /// Most enumeration branches to visit.
    #[arg(long, default_value_t = DEFAULT_ATOM_CAP)]
    pub cap: u128,
}

fn set(items: &[usize]) -> String {
    let parts: Vec<String> = items.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// Prints one exact audit; true if the view is independent of the secret.
fn report(label: &str, r: &PrivacyAuditResult) -> bool {
    let (kl, h, tv) = (
        r.mi_bits.unwrap_or(f64::NAN),
        r.mi_bits_entropy_form.unwrap_or(f64::NAN),
        r.max_divergence.unwrap_or(f64::NAN),
    );
    println!("{label} mi {kl:.3e} mi_h {h:.3e} tv {tv:.3e} atoms {}", r.atoms);
    kl.abs() <= MI_TOLERANCE && h.abs() <= MI_TOLERANCE && tv <= MI_TOLERANCE
}

fn exact(inst: &AuditInstance, target: AuditTarget, cap: u128) -> anyhow::Result<PrivacyAuditResult> {
    audit_exact_mi(inst, target, cap).context("exact audit")
}

pub fn audit(args: &AuditArgs) -> anyhow::Result<Verdict> {
    let s = &args.session;
    let mut pass = true;
    match s.protocol {
        ProtocolKind::Swot => {
            let inst = AuditInstance::Swot {
                cfg: SwotConfig::new(s.k, s.m, s.n.unwrap_or(4))?,
                p: s.p,
                variant: s.variant.into(),
            };
            pass &= report("bob-joint", &exact(&inst, AuditTarget::JointBob, args.cap)?);
            pass &= report("alice-joint", &exact(&inst, AuditTarget::JointAlice, args.cap)?);
        }
        ProtocolKind::Gsfc => {
            let n = s.n.unwrap_or(3);
            let inst = AuditInstance::Gsfc {
                spec: s.spec()?,
                k: s.k,
                lengths: (n, n),
                p: s.p,
            };
            pass &= report("bob-joint", &exact(&inst, AuditTarget::JointBob, args.cap)?);
            pass &= report("alice-joint", &exact(&inst, AuditTarget::JointAlice, args.cap)?);
        }
        ProtocolKind::Boot => {
            let params = BootParams::new(branching(s)?, s.m, s.k)?;
            let choices: Vec<usize> = match args.b {
                Some(b) => vec![b],
                None => (1..=s.m).collect(),
            };
            for b in choices {
                let r = audit_disjoint_gf2(&params, b)?;
                let witnesses: Vec<String> = r.leak_witnesses.iter().map(|w| set(w)).collect();
                println!(
                    "b {b} recoverable {} witnesses {}",
                    set(&r.recoverable_units),
                    if witnesses.is_empty() { "none".to_string() } else { witnesses.join(" ") }
                );
                pass &= r.recoverable_units == [b];
            }
            // exact audits need an explicit, small resource size
            if let Some(n) = s.n {
                let inst = AuditInstance::Boot {
                    params: params.clone(),
                    resources: BootResources::PerRound(vec![n; params.u()]),
                    p: s.p,
                };
                // joint privacy against Bob is not claimed for deep trees
                let joint = exact(&inst, AuditTarget::JointBob, args.cap)?;
                let ok = report("bob-joint", &joint);
                if params.u() == 1 {
                    pass &= ok;
                }
                pass &= report("alice-joint", &exact(&inst, AuditTarget::JointAlice, args.cap)?);
                for i in 1..=s.m {
                    pass &= report(&format!("string {i}"), &exact(&inst, AuditTarget::Disjoint(i), args.cap)?);
                }
            }
        }
    }
    println!("verdict {}", if pass { "pass" } else { "FAIL" });
    Ok(if pass { Verdict::Pass } else { Verdict::Fail })
}
