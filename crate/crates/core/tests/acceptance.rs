//! Acceptance gate. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use erasure_ot::analysis::audit::{audit_disjoint_gf2, audit_exact_mi, AuditInstance, AuditTarget, DEFAULT_ATOM_CAP};
use erasure_ot::analysis::info::capacity_upper_bound;
use erasure_ot::analysis::optimize::branching_sequences;
use erasure_ot::analysis::rates::{rate_boot, rate_swot};
use erasure_ot::boot::{boot_assign, boot_full, boot_knowledge_span, per_round_lengths, BootInputs, BootParams, BootProtocol, BootResources};
use erasure_ot::engine::{Direction, Resource, ResourceSegment, SessionCoins, SessionResult};
use erasure_ot::erasure::{sample_bes, ErasureParams};
use erasure_ot::gsfc::{gsfc_full, gsfc_lengths, GsfcConfig, GsfcProtocol};
use erasure_ot::sim::{run_trial, simulate, Model, SimConfig, SimProtocol};
use erasure_ot::swot::{swot_full, SwotConfig, SwotInputs, SwotProtocol, SwotVariant};
use erasure_ot::{BitMatrix, Coins, ExactRate, FunctionSpec, JointDistribution64, SeededCoins, SourceSamples, StreamId, StreamLabel};

const CAPACITY_TOL: f64 = 1e-9;
const RATE_TOL: f64 = 1e-12;
const MI_TOL: f64 = 1e-12;
const ABORT_SIGMAS: f64 = 3.0;

type Check = fn() -> (bool, String);

struct Report {
    failed: Vec<u32>,
}

impl Report {
    fn line(&mut self, id: u32, pass: bool, budget: Duration, elapsed: Duration, detail: String) {
        let pass = pass && elapsed <= budget;
        println!(
            "{} {id:>2} {detail} [{:.2?} of {:.0?}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            budget
        );
        if !pass {
            self.failed.push(id);
        }
    }
}

fn q(n: i64, d: i64) -> ExactRate {
    ExactRate::new(n, d)
}

fn capacity_point() -> (bool, String) {
    let ok = (2..=12i64).all(|m| rate_swot(q(m - 1, m), m as usize) == q(1, m));
    (ok, "rate_swot((m-1)/m, m) == 1/m exactly for m in 2..=12".into())
}

fn capacity_match() -> (bool, String) {
    let mut worst = 0.0f64;
    for m in [2, 3, 5, 10] {
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            let bound = capacity_upper_bound(&JointDistribution64::bes(p).unwrap(), m).unwrap();
            worst = worst.max((bound - rate_swot(p, m)).abs());
        }
    }
    (worst <= CAPACITY_TOL, format!("BES bound vs SWOT rate, max gap {worst:.1e} (tol {CAPACITY_TOL:.0e})"))
}

fn rate_curves() -> (bool, String) {
    let sets: [&[usize]; 4] = [&[10], &[2, 5], &[2, 2, 3], &[2, 2, 2, 2]];
    let eight_at_half = rate_boot(q(1, 2), sets[3]) == q(1, 8);
    let ten_at_peak = rate_boot(q(9, 10), sets[0]) == q(1, 10);
    // the float curves as emitted agree with the exact ones
    let mut worst = 0.0f64;
    let mut single_best = Vec::new();
    for i in 0..=100i64 {
        let p = q(i, 100);
        let exact: Vec<ExactRate> = sets.iter().map(|s| rate_boot(p, s)).collect();
        for (s, e) in sets.iter().zip(&exact) {
            let float = rate_boot(i as f64 / 100.0, s);
            worst = worst.max((float - *e.numer() as f64 / *e.denom() as f64).abs());
        }
        if exact[1..].iter().all(|r| exact[0] > *r) {
            single_best.push(i);
        }
    }
    let contiguous = single_best.windows(2).all(|w| w[1] == w[0] + 1);
    let near_peak = single_best.contains(&90) && single_best.first().is_some_and(|&lo| lo >= 70);
    let ok = eight_at_half && ten_at_peak && worst <= RATE_TOL && contiguous && near_peak;
    (
        ok,
        format!(
            "{{2,2,2,2}}@0.5=1/8 {eight_at_half}, {{10}}@0.9=1/10 {ten_at_peak}, {{10}} strictly best for p in [{:.2}, {:.2}], float gap {worst:.1e}",
            *single_best.first().unwrap_or(&0) as f64 / 100.0,
            *single_best.last().unwrap_or(&0) as f64 / 100.0
        ),
    )
}

fn improvement_factor() -> (bool, String) {
    let ratio = rate_boot(q(1, 2), &[2, 2, 2, 2]) / rate_swot(q(1, 2), 10);
    (ratio == q(9, 4), format!("rate ratio {ratio} == 9/4 == (m-1)/ceil(log2 m)"))
}

fn perfect_privacy() -> (bool, String) {
    let inst = AuditInstance::Swot {
        cfg: SwotConfig::new(1, 2, 4).unwrap(),
        p: 0.5,
        variant: SwotVariant::Faithful,
    };
    let mut worst = 0.0f64;
    for target in [AuditTarget::JointBob, AuditTarget::JointAlice] {
        let r = audit_exact_mi(&inst, target, DEFAULT_ATOM_CAP).unwrap();
        for v in [r.mi_bits, r.mi_bits_entropy_form, r.max_divergence] {
            worst = worst.max(v.unwrap().abs());
        }
    }
    (worst <= MI_TOL, format!("SWOT n=4 k=1 m=2: max |MI| and per-realization TV {worst:.1e} (tol {MI_TOL:.0e})"))
}

fn disjoint_sweep() -> (bool, String) {
    let mut cases = 0;
    let mut ok = true;
    for m in 2..=8 {
        for s in branching_sequences(m, 3, false) {
            let params = BootParams::new(s, m, 1).unwrap();
            for b in 1..=m {
                cases += 1;
                ok &= audit_disjoint_gf2(&params, b).unwrap().recoverable_units == [b];
            }
        }
    }
    let params = BootParams::new(vec![2, 3], 6, 1).unwrap();
    let span = boot_knowledge_span(&boot_assign(&params), 3).unwrap();
    let target: Vec<bool> = (1..=6).map(|j| [1, 4, 6].contains(&j)).collect();
    let witness = span.contains(&target)
        && audit_disjoint_gf2(&params, 3).unwrap().leak_witnesses.contains(&vec![1, 4, 6]);
    (ok && witness, format!("{cases} (m, s, b) cases recover only b; {{1,4,6}} in span {witness}"))
}

fn abort_agreement() -> (bool, String) {
    let mut ok = true;
    let mut zs = Vec::new();
    for (p, n, k, m) in [(0.5, 1000, 400, 2), (0.9, 2000, 150, 10), (0.25, 800, 150, 2)] {
        let cfg = SimConfig {
            protocol: SimProtocol::Swot {
                protocol: SwotProtocol::new(SwotConfig::new(k, m, n).unwrap()),
                p,
            },
            model: Model::Source,
            trials: 10_000,
            seed: 1,
        };
        let s = simulate(&cfg).unwrap();
        let z = s.abort_z().unwrap();
        ok &= z <= ABORT_SIGMAS && s.silent_errors == 0;
        zs.push(format!("{z:.2}"));
    }
    (ok, format!("10^4 trials each, z = [{}] (gate {ABORT_SIGMAS})", zs.join(", ")))
}

fn random_spec(coins: &mut SeededCoins) -> FunctionSpec {
    let m_a = 2 + coins.below(3) as u32;
    let m_b = 2 + coins.below(3) as u32;
    let rf = 1 + coins.below(4) as u32;
    let rg = 1 + coins.below(4) as u32;
    let cells = (m_a * m_b) as usize;
    let f = (0..cells).map(|_| coins.below(rf as usize) as u32).collect();
    let g = (0..cells).map(|_| coins.below(rg as usize) as u32).collect();
    FunctionSpec::new(m_a, m_b, rf, rg, f, g).unwrap()
}

/// Runs trials until `want` sessions completed; all must be correct.
fn completed_correct(cfg: &SimConfig, want: usize) -> (usize, usize) {
    let (mut done, mut bad) = (0, 0);
    let mut t = 0;
    while done < want && t < 20 * want as u64 {
        let rec = run_trial(cfg, t).unwrap();
        t += 1;
        if rec.result.aborted() {
            continue;
        }
        done += 1;
        bad += !rec.correct().unwrap() as usize;
    }
    (done, bad)
}

fn end_to_end() -> (bool, String) {
    let mut coins = SeededCoins::new(99, StreamId::new(StreamLabel::Source, 7));
    let mut tally = [(0, 0); 3];

    for round in 0..20u64 {
        let (k, m) = (1 + coins.below(12), 2 + coins.below(7));
        let p = 0.2 + 0.6 * coins.below(100) as f64 / 100.0;
        let n = per_round_lengths(k, &[m], p, 0.3).unwrap()[0];
        let cfg = SimConfig {
            protocol: SimProtocol::Swot {
                protocol: SwotProtocol::new(SwotConfig::new(k, m, n).unwrap()),
                p,
            },
            model: if round % 2 == 0 { Model::Source } else { Model::Channel },
            trials: 0,
            seed: round,
        };
        let (d, b) = completed_correct(&cfg, 50);
        tally[0].0 += d;
        tally[0].1 += b;
    }

    for round in 0..20u64 {
        let m = 2 + coins.below(7);
        let seqs = branching_sequences(m, 3, false);
        let s = seqs[coins.below(seqs.len())].clone();
        let k = 1 + coins.below(8);
        let p = 0.2 + 0.6 * coins.below(100) as f64 / 100.0;
        let params = BootParams::new(s, m, k).unwrap();
        let lengths = per_round_lengths(k, params.branching(), p, 0.3).unwrap();
        let resources = if round % 3 == 0 {
            BootResources::Pooled(lengths.iter().sum())
        } else {
            BootResources::PerRound(lengths)
        };
        let cfg = SimConfig {
            protocol: SimProtocol::Boot {
                protocol: BootProtocol::new(params, resources).unwrap(),
                p,
            },
            model: Model::Source,
            trials: 0,
            seed: 100 + round,
        };
        let (d, b) = completed_correct(&cfg, 50);
        tally[1].0 += d;
        tally[1].1 += b;
    }

    for round in 0..20u64 {
        let spec = random_spec(&mut coins);
        let gcfg = GsfcConfig {
            spec,
            k: 1 + coins.below(6),
            p_ab: 0.3 + 0.4 * coins.below(100) as f64 / 100.0,
            p_ba: 0.3 + 0.4 * coins.below(100) as f64 / 100.0,
            single_ot: false,
        };
        let lengths = gsfc_lengths(&gcfg, 0.3).unwrap();
        let cfg = SimConfig {
            protocol: SimProtocol::Gsfc {
                protocol: GsfcProtocol::new(gcfg, lengths).unwrap(),
                // half the rounds draw correlated sources
                correlation: if round % 2 == 0 { 0.0 } else { 0.7 },
            },
            model: Model::Source,
            trials: 0,
            seed: 200 + round,
        };
        let (d, b) = completed_correct(&cfg, 50);
        tally[2].0 += d;
        tally[2].1 += b;
    }
    let ok = tally.iter().all(|&(d, b)| d >= 1000 && b == 0);
    (
        ok,
        format!(
            "completed/incorrect: SWOT {}/{}, BOOT {}/{}, GSFC {}/{}",
            tally[0].0, tally[0].1, tally[1].0, tally[1].1, tally[2].0, tally[2].1
        ),
    )
}

fn session_coins(seed: u64) -> [SeededCoins; 3] {
    [StreamLabel::AliceLocal, StreamLabel::BobLocal, StreamLabel::Noise].map(|l| SeededCoins::labelled(seed, l))
}

fn with_coins(seed: u64, f: impl FnOnce(SessionCoins<'_>) -> SessionResult) -> SessionResult {
    let [mut a, mut b, mut n] = session_coins(seed);
    f(SessionCoins {
        alice: &mut a,
        bob: &mut b,
        noise: &mut n,
    })
}

fn reductions() -> (bool, String) {
    let mut boot_same = 0;
    let mut gsfc_same = 0;
    let total = 200;
    for seed in 0..total as u64 {
        let mut c = SeededCoins::new(seed, StreamId::new(StreamLabel::Source, 0));
        let (k, m) = (1 + c.below(6), 2 + c.below(5));
        let n = per_round_lengths(k, &[m], 0.5, 0.2).unwrap()[0];
        let strings = BitMatrix::new(k, m, (0..k * m).map(|_| c.bit()).collect()).unwrap();
        let b = 1 + c.below(m) as u32;
        let resource = sample_bes(ErasureParams::new(0.5).unwrap(), n, &mut c);

        let swot = with_coins(seed, |coins| {
            swot_full(
                &SwotInputs { a: strings.clone(), b: vec![b; k] },
                resource.clone(),
                SwotConfig::new(k, m, n).unwrap(),
                coins,
            )
            .unwrap()
        });
        let boot = with_coins(seed, |coins| {
            let protocol = BootProtocol::new(BootParams::new(vec![m], m, k).unwrap(), BootResources::PerRound(vec![n])).unwrap();
            let seg = vec![ResourceSegment {
                direction: Direction::AliceToBob,
                resource: Resource::Source(resource.clone()),
            }];
            boot_full(&BootInputs { strings: strings.clone(), b }, seg, &protocol, coins).unwrap()
        });
        boot_same += (boot.transcript.to_log() == swot.transcript.to_log() && boot.transcript == swot.transcript) as usize;

        // constant f with the selection g is one OT on the same matrix
        let bs: Vec<u32> = (0..k).map(|_| 1 + c.below(m) as u32).collect();
        let swot = with_coins(seed, |coins| {
            swot_full(
                &SwotInputs { a: strings.clone(), b: bs.clone() },
                resource.clone(),
                SwotConfig::new(k, m, n).unwrap(),
                coins,
            )
            .unwrap()
        });
        let gsfc = with_coins(seed, |coins| {
            let cfg = GsfcConfig {
                spec: FunctionSpec::selection(m as u32).unwrap(),
                k,
                p_ab: 0.5,
                p_ba: 0.5,
                single_ot: false,
            };
            let protocol = GsfcProtocol::new(cfg, (n, 0)).unwrap();
            let seg = vec![ResourceSegment {
                direction: Direction::AliceToBob,
                resource: Resource::Source(resource.clone()),
            }];
            gsfc_full(&SourceSamples::from_rows(&strings, bs.clone()).unwrap(), &protocol, seg, coins).unwrap()
        });
        gsfc_same += (gsfc.transcript == swot.transcript) as usize;
    }
    (
        boot_same == total && gsfc_same == total,
        format!("identical transcripts: BOOT(u=1) {boot_same}/{total}, GSFC(selection) {gsfc_same}/{total}"),
    )
}

fn main() {
    let mut report = Report { failed: Vec::new() };
    let criteria: [(u32, Duration, Check); 9] = [
        (1, Duration::from_secs(1), capacity_point),
        (2, Duration::from_secs(1), capacity_match),
        (3, Duration::from_secs(1), rate_curves),
        (4, Duration::from_secs(1), improvement_factor),
        (5, Duration::from_secs(60), perfect_privacy),
        (6, Duration::from_secs(60), disjoint_sweep),
        (7, Duration::from_secs(120), abort_agreement),
        (8, Duration::from_secs(120), end_to_end),
        (9, Duration::from_secs(10), reductions),
    ];
    for (id, budget, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = check();
        report.line(id, pass, budget, start.elapsed(), detail);
    }
    let substitutes_hold = !report.failed.iter().any(|id| (5..=9).contains(id));
    report.line(
        10,
        substitutes_hold,
        Duration::from_secs(1),
        Duration::ZERO,
        "asymptotic n -> infinity claims are not reproduced; criteria 5-9 stand in for them".into(),
    );
    if !report.failed.is_empty() {
        eprintln!("failed criteria: {:?}", report.failed);
        std::process::exit(1);
    }
}
