//! Secure computation of arbitrary `f(A, B)` for Alice and `g(A, B)` for Bob.
//!
//! Alice tabulates, for every possible `b`, the encodings of `g(A_t, b)` over
//! all her samples and offers them to Bob by sample-wise OT, with Bob's
//! selections repeated once per output bit. The roles then reverse for `f`.

use crate::bits::{decode_fixed_width, encode_fixed_width, BitMatrix, BitString};
use crate::engine::{
    run_session, Direction, Outcome, Payload, PrivateInput, Protocol, ResourceSegment, Role,
    SegmentDemand, Session, SessionCoins, SessionResult,
};
use crate::function::{FunctionOutputs, FunctionSpec, SourceSamples};
use crate::analysis::rates::rate_swot;
use crate::swot::{run_ot, SwotVariant};
use crate::{Error, Result};

/// Strings one party offers: `strings[i]` is the concatenation over samples
/// of the `h`-bit encodings of the function value at choice `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionStringTable {
    pub direction: Direction,
    pub h: usize,
    pub strings: Vec<BitString>,
}

impl FunctionStringTable {
    /// Sender matrix for sample-wise OT: `k h` rows, one column per string.
    pub fn sender_matrix(&self) -> Result<BitMatrix> {
        BitMatrix::from_columns(&self.strings)
    }
}

/// Builds the table for `direction`. For Alice to Bob, `own` is `A^k` and the
/// values are `g(A_t, i)` for `i` in Bob's alphabet; for Bob to Alice, `own`
/// is `B^k` and the values are `f(i, B_t)`.
pub fn gsfc_build_strings(
    spec: &FunctionSpec,
    own: &[u32],
    direction: Direction,
) -> Result<FunctionStringTable> {
    let (choices, h) = match direction {
        Direction::AliceToBob => (spec.m_b(), spec.h_b()),
        Direction::BobToAlice => (spec.m_a(), spec.h_a()),
    };
    let strings = (1..=choices)
        .map(|i| {
            let mut bits = Vec::with_capacity(own.len() * h as usize);
            for &x in own {
                let value = match direction {
                    Direction::AliceToBob => spec.g(x, i)?,
                    Direction::BobToAlice => spec.f(i, x)?,
                };
                bits.extend(encode_fixed_width(value, h));
            }
            Ok(BitString::new(bits))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionStringTable {
        direction,
        h: h as usize,
        strings,
    })
}

pub type ExpandedSelection = Vec<u32>;

/// Repeats every sample `h` times.
pub fn gsfc_expand_selection(samples: &[u32], h: usize) -> ExpandedSelection {
    samples
        .iter()
        .flat_map(|&b| std::iter::repeat_n(b, h))
        .collect()
}

fn decode_groups(bits: &[bool], h: usize, k: usize) -> Vec<u32> {
    if h == 0 {
        return vec![0; k];
    }
    bits.chunks(h).map(decode_fixed_width).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GsfcConfig {
    pub spec: FunctionSpec,
    pub k: usize,
    pub p_ab: f64,
    pub p_ba: f64,
    /// Run one OT and disclose the other output when one function is a
    /// function of the other.
    pub single_ot: bool,
}

/// What the session will do.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Plan {
    /// OTs in the listed directions, Alice to Bob first.
    Both(Vec<Direction>),
    /// Alice to Bob only; Bob reveals `phi(G)`.
    RevealF(Vec<u32>),
    /// Bob to Alice only; Alice reveals `psi(F)`.
    RevealG(Vec<u32>),
}

#[derive(Clone, Debug)]
pub struct GsfcProtocol {
    pub cfg: GsfcConfig,
    plan: Plan,
    lengths: (usize, usize),
}

impl GsfcProtocol {
    /// `lengths` are the erasure samples for the Alice-to-Bob and
    /// Bob-to-Alice OTs; unused directions ignore theirs.
    pub fn new(cfg: GsfcConfig, lengths: (usize, usize)) -> Result<Self> {
        if cfg.k == 0 {
            return Err(Error::Parameter("k must be positive".into()));
        }
        for p in [cfg.p_ab, cfg.p_ba] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("erasure probability {p} outside [0, 1]")));
            }
        }
        let spec = &cfg.spec;
        let (h_a, h_b) = (spec.h_a(), spec.h_b());
        let mut dirs = Vec::new();
        if h_b > 0 {
            dirs.push(Direction::AliceToBob);
        }
        if h_a > 0 {
            dirs.push(Direction::BobToAlice);
        }
        let plan = if cfg.single_ot && dirs.len() == 2 {
            if let Some(phi) = spec.f_through_g() {
                Plan::RevealF(phi)
            } else if let Some(psi) = spec.g_through_f() {
                Plan::RevealG(psi)
            } else {
                return Err(Error::Parameter(
                    "single-OT mode needs f to be a function of g or g of f".into(),
                ));
            }
        } else {
            Plan::Both(dirs)
        };
        let protocol = Self { cfg, plan, lengths };
        for d in protocol.directions() {
            let m = match d {
                Direction::AliceToBob => protocol.cfg.spec.m_b(),
                Direction::BobToAlice => protocol.cfg.spec.m_a(),
            };
            if m < 2 {
                return Err(Error::Parameter(format!(
                    "an OT from {} needs the other party's alphabet to have at least 2 letters",
                    d.sender()
                )));
            }
        }
        Ok(protocol)
    }

    /// Directions that run an OT, in order.
    pub fn directions(&self) -> Vec<Direction> {
        match &self.plan {
            Plan::Both(d) => d.clone(),
            Plan::RevealF(_) => vec![Direction::AliceToBob],
            Plan::RevealG(_) => vec![Direction::BobToAlice],
        }
    }

    /// Erasure samples for the Alice-to-Bob and Bob-to-Alice OTs.
    pub fn lengths(&self) -> (usize, usize) {
        self.lengths
    }

    fn length(&self, d: Direction) -> usize {
        match d {
            Direction::AliceToBob => self.lengths.0,
            Direction::BobToAlice => self.lengths.1,
        }
    }
}

/// Samples per direction: `ceil(k h / ((1 - slack) R(p, m)))` with the
/// receiving party's alphabet size `m`, or `k h m` where the rate is 0.
pub fn gsfc_lengths(cfg: &GsfcConfig, slack: f64) -> Result<(usize, usize)> {
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::Parameter(format!("slack {slack} outside [0, 1)")));
    }
    let size = |h: u32, m: u32, p: f64| -> usize {
        let bits = cfg.k * h as usize;
        if bits == 0 || m < 2 {
            return 0;
        }
        let r = rate_swot(p, m as usize);
        if r <= 0.0 {
            bits * m as usize
        } else {
            (bits as f64 / ((1.0 - slack) * r) - 1e-9).ceil() as usize
        }
    };
    let spec = &cfg.spec;
    Ok((
        size(spec.h_b(), spec.m_b(), cfg.p_ab),
        size(spec.h_a(), spec.m_a(), cfg.p_ba),
    ))
}

impl Protocol for GsfcProtocol {
    type Inputs = SourceSamples;

    fn demand(&self) -> Vec<SegmentDemand> {
        self.directions()
            .into_iter()
            .map(|direction| SegmentDemand {
                direction,
                n: self.length(direction),
            })
            .collect()
    }

    fn output_len(&self, inputs: &SourceSamples) -> usize {
        inputs.k()
    }

    fn private_inputs(&self, inputs: &SourceSamples) -> (PrivateInput, PrivateInput) {
        (
            PrivateInput::Symbols(inputs.a().to_vec()),
            PrivateInput::Symbols(inputs.b().to_vec()),
        )
    }

    fn execute(&self, inputs: &SourceSamples, session: &mut Session<'_>) -> Result<Outcome> {
        let k = self.cfg.k;
        if inputs.k() != k {
            return Err(Error::dims(format!("k = {k}"), format!("k = {}", inputs.k())));
        }
        let spec = &self.cfg.spec;
        let mut out = FunctionOutputs::zeros(k);
        for (segment, direction) in self.directions().into_iter().enumerate() {
            let (own, other) = match direction {
                Direction::AliceToBob => (inputs.a(), inputs.b()),
                Direction::BobToAlice => (inputs.b(), inputs.a()),
            };
            let table = gsfc_build_strings(spec, own, direction)?;
            let h = table.h;
            let selections = gsfc_expand_selection(other, h);
            for &x in other {
                let size = match direction {
                    Direction::AliceToBob => spec.m_b(),
                    Direction::BobToAlice => spec.m_a(),
                };
                if x == 0 || x > size {
                    return Err(Error::Domain { value: x, size });
                }
            }
            let got = run_ot(
                session,
                direction.sender(),
                table.sender_matrix()?,
                selections,
                segment,
                None,
                SwotVariant::Faithful,
            )?;
            let Some(bits) = got else {
                return Ok(Outcome::Aborted);
            };
            let values = decode_groups(&bits, h, k);
            match direction {
                Direction::AliceToBob => out.g = values,
                Direction::BobToAlice => out.f = values,
            }
        }
        match &self.plan {
            Plan::Both(_) => {}
            Plan::RevealF(phi) => {
                out.f = out.g.iter().map(|&g| phi[g as usize]).collect();
                session.send(Role::Bob, Payload::Reveal(encode_all(&out.f, spec.h_a())));
            }
            Plan::RevealG(psi) => {
                out.g = out.f.iter().map(|&f| psi[f as usize]).collect();
                session.send(Role::Alice, Payload::Reveal(encode_all(&out.g, spec.h_b())));
            }
        }
        Ok(Outcome::Completed(out))
    }
}

fn encode_all(values: &[u32], h: u32) -> BitString {
    values.iter().flat_map(|&v| encode_fixed_width(v, h)).collect()
}

/// Runs the whole protocol. `resources` lists one segment per direction in
/// [`GsfcProtocol::directions`].
pub fn gsfc_full(
    inputs: &SourceSamples,
    protocol: &GsfcProtocol,
    resources: Vec<ResourceSegment>,
    coins: SessionCoins<'_>,
) -> Result<SessionResult> {
    run_session(protocol, inputs, resources, coins)
}
