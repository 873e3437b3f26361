use std::fmt::Write;

use clap::Args;
use erasure_ot::boot::boot_assign;
use erasure_ot::engine::{Payload, PrivateInput, ResourceSide};
use erasure_ot::sim::{run_trial, SimConfig, SimProtocol};
use erasure_ot::BitMatrix;

use crate::simulate::build;
use crate::{ModelArg, SessionArgs};

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[command(flatten)]
    pub session: SessionArgs,
    #[arg(long, value_enum, default_value = "source")]
    pub model: ModelArg,
}

fn bits(b: impl IntoIterator<Item = bool>) -> String {
    b.into_iter().map(|x| if x { '1' } else { '0' }).collect()
}

fn rows(m: &BitMatrix) -> Vec<String> {
    (0..m.rows())
        .map(|i| bits((0..m.cols()).map(|j| m.get(i, j))))
        .collect()
}

fn symbols(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    parts.join(" ")
}

fn input(i: &PrivateInput) -> String {
    match i {
        PrivateInput::Bits(m) => rows(m).join("/"),
        PrivateInput::Symbols(v) => symbols(v),
    }
}

/// The full trace as text.
pub fn trace(args: &DemoArgs) -> anyhow::Result<String> {
    let s = &args.session;
    let protocol = build(s, 0.0)?;
    let mut out = String::new();
    writeln!(
        out,
        "# {:?} p={} m={} k={} seed={}",
        s.protocol, s.p, s.m, s.k, s.seed
    )?;
    if let SimProtocol::Boot { protocol, .. } = &protocol {
        writeln!(out, "# branching {:?} resources {:?}", protocol.params.branching(), protocol.resources)?;
        for line in boot_assign(&protocol.params).to_table().lines() {
            writeln!(out, "# {line}")?;
        }
    }
    let cfg = SimConfig {
        protocol,
        model: args.model.into(),
        trials: 1,
        seed: s.seed,
    };
    let rec = run_trial(&cfg, 0)?;
    let r = &rec.result;
    writeln!(out, "alice input {}", input(&r.alice_view.private_inputs))?;
    writeln!(out, "bob input {}", input(&r.bob_view.private_inputs))?;
    for (i, side) in r.bob_view.resource_side.iter().enumerate() {
        if let ResourceSide::Received(y) = side {
            let erased = y.iter().filter(|e| e.is_erased()).count();
            let word: String = y.iter().map(|e| e.to_string()).collect();
            writeln!(
                out,
                "segment {} bob y={word} |S|={} |S_e|={erased}",
                i + 1,
                y.len() - erased
            )?;
        }
    }
    for msg in &r.transcript.messages {
        writeln!(out, "{}", msg.log_line())?;
        match &msg.payload {
            Payload::Selection(u) => {
                for i in 0..u.rows() {
                    let row: Vec<String> = (0..u.cols()).map(|j| u.get(i, j).to_string()).collect();
                    writeln!(out, "  U[{}] = {}", i + 1, row.join(" "))?;
                }
            }
            Payload::Cipher(c) => {
                for (i, row) in rows(c).iter().enumerate() {
                    writeln!(out, "  C[{}] = {row}", i + 1)?;
                }
            }
            Payload::EncodedStrings(e) => {
                for (j, s) in e.iter().enumerate() {
                    writeln!(out, "  E[{}] = {}", j + 1, bits(s.bits().iter().copied()))?;
                }
            }
            Payload::Reveal(v) => writeln!(out, "  value = {}", bits(v.bits().iter().copied()))?,
            Payload::Abort => {}
        }
    }
    writeln!(out, "samples used {}", r.transcript.resource_usage)?;
    if r.aborted() {
        writeln!(out, "ABORT: too few erased or non-erased samples, outputs set to zero")?;
    } else {
        writeln!(out, "output f={} g={}", symbols(&r.estimates.f), symbols(&r.estimates.g))?;
        writeln!(out, "truth  f={} g={}", symbols(&rec.truth.f), symbols(&rec.truth.g))?;
    }
    Ok(out)
}

pub fn demo(args: &DemoArgs) -> anyhow::Result<()> {
    print!("{}", trace(args)?);
    Ok(())
}
