//! Two-party sessions: transcript, party views and abort bookkeeping.
//!
//! A protocol's [`Protocol::execute`] drives a [`Session`]. Discussion is run
//! by [`Session::exchange`], which alternates half-steps between two
//! [`PartyMachine`]s and appends every message to the shared transcript.
//! Erasure resources are either handed over at the start (source model) or
//! transmitted on demand through a channel (channel model), so transmissions
//! can be interleaved with discussion.

use std::fmt::{self, Write as _};

use crate::bits::{pack_bits, BitMatrix, BitString};
use crate::erasure::{simulate_bec_transmission, ErasureParams, ErasureSequence, ErasureSymbol};
use crate::function::FunctionOutputs;
use crate::randomness::{Coins, Draw, RecordingCoins};
use crate::swot::SelectionMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Alice,
    Bob,
}

impl Role {
    pub fn peer(self) -> Role {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Alice => "alice",
            Role::Bob => "bob",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Payload {
    Selection(SelectionMatrix),
    Cipher(BitMatrix),
    Abort,
    /// Alice's masked strings in the bootstrap protocol.
    EncodedStrings(Vec<BitString>),
    /// Function values disclosed in the clear.
    Reveal(BitString),
}

impl Payload {
    pub fn tag(&self) -> &'static str {
        match self {
            Payload::Selection(_) => "selection",
            Payload::Cipher(_) => "cipher",
            Payload::Abort => "abort",
            Payload::EncodedStrings(_) => "encoded",
            Payload::Reveal(_) => "reveal",
        }
    }

    /// `(rows, cols)` of the payload grid.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Payload::Selection(u) => (u.rows(), u.cols()),
            Payload::Cipher(c) => c.shape(),
            Payload::Abort => (0, 0),
            Payload::EncodedStrings(s) => (s.len(), s.first().map_or(0, BitString::len)),
            Payload::Reveal(s) => (1, s.len()),
        }
    }

    /// Canonical bytes: selection entries as big-endian `u32`, bit payloads
    /// packed row-major most-significant-bit first.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Payload::Selection(u) => u
                .entries()
                .iter()
                .flat_map(|&e| (e as u32).to_be_bytes())
                .collect(),
            Payload::Cipher(c) => c.to_packed_bytes(),
            Payload::Abort => Vec::new(),
            Payload::EncodedStrings(s) => {
                let bits: Vec<bool> = s.iter().flat_map(|b| b.bits().iter().copied()).collect();
                pack_bits(&bits)
            }
            Payload::Reveal(s) => s.to_packed_bytes(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    pub stage: usize,
    pub sender: Role,
    pub payload: Payload,
}

impl Message {
    /// `stage sender tag RxC hex`, with `-` for an empty payload.
    pub fn log_line(&self) -> String {
        let (r, c) = self.payload.shape();
        let bytes = self.payload.to_bytes();
        let hex = if bytes.is_empty() {
            "-".to_string()
        } else {
            bytes.iter().fold(String::new(), |mut s, b| {
                write!(s, "{b:02x}").unwrap();
                s
            })
        };
        format!(
            "{} {} {} {}x{} {}",
            self.stage,
            self.sender,
            self.payload.tag(),
            r,
            c,
            hex
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Transcript {
    pub messages: Vec<Message>,
    /// Erasure samples consumed.
    pub resource_usage: usize,
    pub aborted: bool,
}

impl Transcript {
    /// One message per line, see [`Message::log_line`].
    pub fn to_log(&self) -> String {
        self.messages.iter().fold(String::new(), |mut s, m| {
            s.push_str(&m.log_line());
            s.push('\n');
            s
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrivateInput {
    Bits(BitMatrix),
    Symbols(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ResourceSide {
    /// Channel inputs or source samples `X^n`.
    Sent(Vec<bool>),
    /// Channel outputs or source samples `Y^n`.
    Received(Vec<ErasureSymbol>),
}

/// Everything one party sees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartyView {
    pub role: Role,
    pub private_inputs: PrivateInput,
    pub resource_side: Vec<ResourceSide>,
    pub local_randomness_record: Vec<Draw>,
    pub received_messages: Vec<Message>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SessionResult {
    pub transcript: Transcript,
    pub alice_view: PartyView,
    pub bob_view: PartyView,
    pub estimates: FunctionOutputs,
}

impl SessionResult {
    pub fn aborted(&self) -> bool {
        self.transcript.aborted
    }

    pub fn view(&self, role: Role) -> &PartyView {
        match role {
            Role::Alice => &self.alice_view,
            Role::Bob => &self.bob_view,
        }
    }
}

/// Which party feeds the erasure resource.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn sender(self) -> Role {
        match self {
            Direction::AliceToBob => Role::Alice,
            Direction::BobToAlice => Role::Bob,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentDemand {
    pub direction: Direction,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Resource {
    Source(ErasureSequence),
    /// The sender draws uniform inputs and transmits them when the segment
    /// is first used.
    Channel(ErasureParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceSegment {
    pub direction: Direction,
    pub resource: Resource,
}

pub enum Outcome {
    Completed(FunctionOutputs),
    Aborted,
}

/// Randomness for one session: each party's local stream and resource noise.
pub struct SessionCoins<'a> {
    pub alice: &'a mut dyn Coins,
    pub bob: &'a mut dyn Coins,
    pub noise: &'a mut dyn Coins,
}

pub enum Turn {
    Send(Payload),
    Finished,
}

/// One side of an exchange, advanced one half-step at a time.
pub trait PartyMachine {
    fn role(&self) -> Role;

    /// Called with the peer's last message (`None` on the opening turn).
    fn on_turn(&mut self, incoming: Option<&Payload>, coins: &mut dyn Coins) -> Result<Turn>;
}

pub trait Protocol {
    type Inputs;

    /// Erasure segments the protocol expects, in order.
    fn demand(&self) -> Vec<SegmentDemand>;

    /// Number of output samples `k`.
    fn output_len(&self, inputs: &Self::Inputs) -> usize;

    /// `(alice, bob)` private inputs as recorded in the views.
    fn private_inputs(&self, inputs: &Self::Inputs) -> (PrivateInput, PrivateInput);

    fn execute(&self, inputs: &Self::Inputs, session: &mut Session<'_>) -> Result<Outcome>;
}

#[derive(Default)]
struct PartyState {
    record: Vec<Draw>,
    sides: Vec<ResourceSide>,
}

const MAX_HALF_STEPS: usize = 1 << 16;

pub struct Session<'a> {
    messages: Vec<Message>,
    segments: Vec<ResourceSegment>,
    acquired: Vec<Option<ErasureSequence>>,
    demand: Vec<SegmentDemand>,
    alice: PartyState,
    bob: PartyState,
    coins: SessionCoins<'a>,
    usage: usize,
}

impl<'a> Session<'a> {
    fn new(segments: Vec<ResourceSegment>, demand: Vec<SegmentDemand>, coins: SessionCoins<'a>) -> Self {
        let acquired = vec![None; segments.len()];
        Self {
            messages: Vec::new(),
            segments,
            acquired,
            demand,
            alice: PartyState::default(),
            bob: PartyState::default(),
            coins,
            usage: 0,
        }
    }

    fn state(&mut self, role: Role) -> &mut PartyState {
        match role {
            Role::Alice => &mut self.alice,
            Role::Bob => &mut self.bob,
        }
    }

    /// Appends a discussion message.
    pub fn send(&mut self, from: Role, payload: Payload) {
        let stage = self.messages.len() + 1;
        self.messages.push(Message {
            stage,
            sender: from,
            payload,
        });
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// Local randomness of `role`, recorded into its view.
    pub fn party_coins(&mut self, role: Role) -> RecordingCoins<'_> {
        let (coins, state) = match role {
            Role::Alice => (&mut *self.coins.alice, &mut self.alice),
            Role::Bob => (&mut *self.coins.bob, &mut self.bob),
        };
        RecordingCoins::new(coins, &mut state.record)
    }

    /// Makes segment `index` available, transmitting it first in the
    /// channel model. Idempotent.
    pub fn acquire(&mut self, index: usize) -> Result<ErasureSequence> {
        if let Some(seq) = self.acquired.get(index).and_then(Option::as_ref) {
            return Ok(seq.clone());
        }
        let segment = self
            .segments
            .get(index)
            .ok_or_else(|| Error::Structural(format!("no resource segment {index}")))?
            .clone();
        let sender = segment.direction.sender();
        let seq = match segment.resource {
            Resource::Source(seq) => seq,
            Resource::Channel(params) => {
                let n = self.demand[index].n;
                let inputs: Vec<bool> = {
                    let mut coins = self.party_coins(sender);
                    (0..n).map(|_| coins.bit()).collect()
                };
                simulate_bec_transmission(params, &inputs, &mut *self.coins.noise)
            }
        };
        self.state(sender).sides.push(ResourceSide::Sent(seq.x().to_vec()));
        self.state(sender.peer())
            .sides
            .push(ResourceSide::Received(seq.y().to_vec()));
        self.usage += seq.len();
        self.acquired[index] = Some(seq.clone());
        Ok(seq)
    }

    /// Alternates half-steps, `first` opening with no incoming message,
    /// until one side reports it is finished.
    pub fn exchange<'p>(
        &mut self,
        first: &'p mut dyn PartyMachine,
        second: &'p mut dyn PartyMachine,
    ) -> Result<()> {
        if first.role() == second.role() {
            return Err(Error::Structural("exchange needs two distinct parties".into()));
        }
        let mut parties: [&mut dyn PartyMachine; 2] = [first, second];
        let mut turn = 0usize;
        let mut incoming: Option<Payload> = None;
        for _ in 0..MAX_HALF_STEPS {
            let party = &mut parties[turn];
            let role = party.role();
            let step = {
                let mut coins = self.party_coins(role);
                party.on_turn(incoming.as_ref(), &mut coins)?
            };
            match step {
                Turn::Send(payload) => {
                    self.send(role, payload.clone());
                    incoming = Some(payload);
                    turn ^= 1;
                }
                Turn::Finished => return Ok(()),
            }
        }
        Err(Error::Structural("exchange did not terminate".into()))
    }
}

/// Runs `protocol` to completion and assembles the transcript and views.
pub fn run_session<P: Protocol>(
    protocol: &P,
    inputs: &P::Inputs,
    resources: Vec<ResourceSegment>,
    coins: SessionCoins<'_>,
) -> Result<SessionResult> {
    let demand = protocol.demand();
    if demand.len() != resources.len() {
        return Err(Error::dims(
            format!("{} resource segments", demand.len()),
            resources.len(),
        ));
    }
    for (i, (d, r)) in demand.iter().zip(&resources).enumerate() {
        if d.direction != r.direction {
            return Err(Error::Structural(format!(
                "segment {i} runs in the wrong direction"
            )));
        }
        if let Resource::Source(seq) = &r.resource {
            if seq.len() != d.n {
                return Err(Error::dims(
                    format!("segment {i} of length {}", d.n),
                    seq.len(),
                ));
            }
        }
    }

    let mut session = Session::new(resources, demand, coins);
    for i in 0..session.segments.len() {
        if matches!(session.segments[i].resource, Resource::Source(_)) {
            session.acquire(i)?;
        }
    }

    let k = protocol.output_len(inputs);
    let outcome = protocol.execute(inputs, &mut session)?;
    let (estimates, aborted) = match outcome {
        Outcome::Completed(out) => {
            if out.f.len() != k || out.g.len() != k {
                return Err(Error::Structural(format!(
                    "estimates of length ({}, {}) for k = {k}",
                    out.f.len(),
                    out.g.len()
                )));
            }
            (out, false)
        }
        Outcome::Aborted => {
            if session.messages.last().map(|m| &m.payload) != Some(&Payload::Abort) {
                return Err(Error::Structural(
                    "aborted session must end with an abort notice".into(),
                ));
            }
            (FunctionOutputs::zeros(k), true)
        }
    };

    let (alice_inputs, bob_inputs) = protocol.private_inputs(inputs);
    let Session {
        messages,
        alice,
        bob,
        usage,
        ..
    } = session;
    let view = |role, private_inputs, state: PartyState| PartyView {
        role,
        private_inputs,
        resource_side: state.sides,
        local_randomness_record: state.record,
        received_messages: messages.clone(),
    };
    Ok(SessionResult {
        alice_view: view(Role::Alice, alice_inputs, alice),
        bob_view: view(Role::Bob, bob_inputs, bob),
        transcript: Transcript {
            messages,
            resource_usage: usage,
            aborted,
        },
        estimates,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Correctness {
    pub alice: bool,
    pub bob: bool,
}

/// Whole-vector comparison of the estimates against the true outputs.
pub fn check_correctness(result: &SessionResult, truth: &FunctionOutputs) -> Result<Correctness> {
    let est = &result.estimates;
    if est.f.len() != truth.f.len() || est.g.len() != truth.g.len() {
        return Err(Error::dims(
            format!("k = {}", truth.g.len()),
            format!("k = {}", est.g.len()),
        ));
    }
    Ok(Correctness {
        alice: est.f == truth.f,
        bob: est.g == truth.g,
    })
}
