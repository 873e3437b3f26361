//! Sample-wise oblivious transfer over an erasure resource.
//!
//! Bob hides his `k` selections among `k*m` positions of a selection matrix
//! `U`: the selected positions point at non-erased samples, all others at
//! erased ones. Alice pads her `k x m` bit matrix with `X_U`. Bob can strip the
//! pad exactly where he knows `X`, and nowhere else. When there are too few
//! erasures or non-erasures the session aborts and Bob outputs zeros.

use std::collections::BTreeSet;

use crate::bits::BitMatrix;
use crate::engine::{
    run_session, Direction, Outcome, PartyMachine, Payload, PrivateInput, Protocol, Resource,
    ResourceSegment, Role, SegmentDemand, Session, SessionCoins, SessionResult, Turn,
};
use crate::erasure::{partition_subset, ErasureSequence, ErasureSymbol, IndexPartition};
use crate::function::FunctionOutputs;
use crate::randomness::{draw_without_replacement, Coins};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwotConfig {
    pub k: usize,
    pub m: usize,
    pub n: usize,
}

impl SwotConfig {
    pub fn new(k: usize, m: usize, n: usize) -> Result<Self> {
        if m < 2 || k < 1 || n < 1 {
            return Err(Error::Parameter(format!(
                "sample-wise OT needs m >= 2, k >= 1, n >= 1 (got k={k}, m={m}, n={n})"
            )));
        }
        Ok(Self { k, m, n })
    }
}

/// `k x m` matrix of 1-based resource indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SelectionMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<usize>,
}

impl SelectionMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<usize>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::dims(rows * cols, entries.len()));
        }
        if entries.contains(&0) {
            return Err(Error::Parameter("selection indices are 1-based".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.entries[row * self.cols + col]
    }
}

/// Variants of Bob's selection step. Only `Faithful` is private; the other
/// exists so the privacy auditor has something to catch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SwotVariant {
    #[default]
    Faithful,
    /// Uses a single erased index for every concealed position.
    ReuseConcealedIndex,
}

/// True when the protocol must abort: `k > |S|` or `k(m-1) > |S_e|`.
pub fn must_abort(non_erased: usize, erased: usize, k: usize, m: usize) -> bool {
    k > non_erased || k * (m - 1) > erased
}

/// Bob's first step. `Ok(None)` means abort.
pub fn swot_bob_build_selection(
    partition: &IndexPartition,
    b_samples: &[u32],
    m: usize,
    coins: &mut dyn Coins,
    variant: SwotVariant,
) -> Result<Option<SelectionMatrix>> {
    let k = b_samples.len();
    if let Some(&b) = b_samples.iter().find(|&&b| b == 0 || b as usize > m) {
        return Err(Error::Domain {
            value: b,
            size: m as u32,
        });
    }
    if must_abort(partition.non_erased.len(), partition.erased.len(), k, m) {
        return Ok(None);
    }
    let revealed = draw_without_replacement(&partition.non_erased, k, coins)?;
    let concealed = match variant {
        SwotVariant::Faithful => draw_without_replacement(&partition.erased, k * (m - 1), coins)?,
        SwotVariant::ReuseConcealedIndex => {
            let one = draw_without_replacement(&partition.erased, 1.min(k * (m - 1)), coins)?;
            one.iter().copied().cycle().take(k * (m - 1)).collect()
        }
    };
    let mut entries = vec![0usize; k * m];
    let mut revealed = revealed.into_iter();
    let mut concealed = concealed.into_iter();
    for (i, &b) in b_samples.iter().enumerate() {
        entries[i * m + (b as usize - 1)] = revealed.next().expect("k revealed indices");
    }
    for e in entries.iter_mut().filter(|e| **e == 0) {
        *e = concealed.next().expect("k(m-1) concealed indices");
    }
    SelectionMatrix::new(k, m, entries).map(Some)
}

/// Alice's step: `C = A xor X_U`.
pub fn swot_alice_encrypt(a: &BitMatrix, u: &SelectionMatrix, x: &[bool]) -> Result<BitMatrix> {
    if a.shape() != (u.rows(), u.cols()) {
        return Err(Error::dims(
            format!("{}x{}", a.rows(), a.cols()),
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    let mut c = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let idx = u.get(i, j);
            let pad = *x.get(idx - 1).ok_or_else(|| {
                Error::Structural(format!("selection index {idx} beyond n = {}", x.len()))
            })?;
            c.set(i, j, a.get(i, j) ^ pad);
        }
    }
    Ok(c)
}

/// Bob's last step: `G_i = C(i, B_i) xor Y_U(i, B_i)`.
pub fn swot_bob_decode(
    c: &BitMatrix,
    u: &SelectionMatrix,
    y: &[ErasureSymbol],
    b_samples: &[u32],
) -> Result<Vec<bool>> {
    if c.shape() != (u.rows(), u.cols()) || c.rows() != b_samples.len() {
        return Err(Error::Structural("cipher and selection shapes disagree".into()));
    }
    b_samples
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let j = b as usize - 1;
            let idx = u.get(i, j);
            let symbol = y
                .get(idx - 1)
                .ok_or_else(|| Error::Structural(format!("index {idx} beyond n = {}", y.len())))?;
            let known = symbol.bit().ok_or_else(|| {
                Error::Structural(format!("selected index {idx} is erased"))
            })?;
            Ok(c.get(i, j) ^ known)
        })
        .collect()
}

/// The OT sender. Holds its side `X^n` of the resource.
pub struct OtSender {
    role: Role,
    rows: BitMatrix,
    x: Vec<bool>,
    sent: bool,
}

impl OtSender {
    pub fn new(role: Role, rows: BitMatrix, x: Vec<bool>) -> Self {
        Self {
            role,
            rows,
            x,
            sent: false,
        }
    }
}

impl PartyMachine for OtSender {
    fn role(&self) -> Role {
        self.role
    }

    fn on_turn(&mut self, incoming: Option<&Payload>, _coins: &mut dyn Coins) -> Result<Turn> {
        match incoming {
            Some(Payload::Selection(u)) if !self.sent => {
                self.sent = true;
                let c = swot_alice_encrypt(&self.rows, u, &self.x)?;
                Ok(Turn::Send(Payload::Cipher(c)))
            }
            Some(Payload::Abort) => Ok(Turn::Finished),
            _ if self.sent => Ok(Turn::Finished),
            other => Err(Error::Structural(format!(
                "OT sender cannot handle {:?}",
                other.map(Payload::tag)
            ))),
        }
    }
}

/// The OT receiver. Holds `Y^n` and the positions it may use.
pub struct OtReceiver {
    role: Role,
    selections: Vec<u32>,
    m: usize,
    y: Vec<ErasureSymbol>,
    available: Vec<usize>,
    variant: SwotVariant,
    selection: Option<SelectionMatrix>,
    output: Option<Vec<bool>>,
}

impl OtReceiver {
    pub fn new(
        role: Role,
        selections: Vec<u32>,
        m: usize,
        y: Vec<ErasureSymbol>,
        available: Vec<usize>,
        variant: SwotVariant,
    ) -> Self {
        Self {
            role,
            selections,
            m,
            y,
            available,
            variant,
            selection: None,
            output: None,
        }
    }

    pub fn selection(&self) -> Option<&SelectionMatrix> {
        self.selection.as_ref()
    }

    pub fn output(&self) -> Option<&[bool]> {
        self.output.as_deref()
    }
}

impl PartyMachine for OtReceiver {
    fn role(&self) -> Role {
        self.role
    }

    fn on_turn(&mut self, incoming: Option<&Payload>, coins: &mut dyn Coins) -> Result<Turn> {
        match incoming {
            None => {
                let partition = partition_subset(&self.y, self.available.iter().copied());
                match swot_bob_build_selection(&partition, &self.selections, self.m, coins, self.variant)? {
                    Some(u) => {
                        self.selection = Some(u.clone());
                        Ok(Turn::Send(Payload::Selection(u)))
                    }
                    None => Ok(Turn::Send(Payload::Abort)),
                }
            }
            Some(Payload::Cipher(c)) => {
                let u = self
                    .selection
                    .as_ref()
                    .ok_or_else(|| Error::Structural("cipher before selection".into()))?;
                self.output = Some(swot_bob_decode(c, u, &self.y, &self.selections)?);
                Ok(Turn::Finished)
            }
            Some(other) => Err(Error::Structural(format!(
                "OT receiver cannot handle {}",
                other.tag()
            ))),
        }
    }
}

/// Runs one sample-wise OT inside `session` over resource segment `segment`.
///
/// `rows` is the sender's `k x m` matrix and `selections` the receiver's
/// 1-based choices. With `pool`, only positions not already in it may be used
/// and the consumed positions are added to it. Returns `None` on abort.
pub fn run_ot(
    session: &mut Session<'_>,
    sender: Role,
    rows: BitMatrix,
    selections: Vec<u32>,
    segment: usize,
    pool: Option<&mut BTreeSet<usize>>,
    variant: SwotVariant,
) -> Result<Option<Vec<bool>>> {
    if rows.rows() != selections.len() {
        return Err(Error::dims(rows.rows(), selections.len()));
    }
    let seq = session.acquire(segment)?;
    let available: Vec<usize> = match &pool {
        Some(used) => (1..=seq.len()).filter(|i| !used.contains(i)).collect(),
        None => (1..=seq.len()).collect(),
    };
    let m = rows.cols();
    let mut tx = OtSender::new(sender, rows, seq.x().to_vec());
    let mut rx = OtReceiver::new(
        sender.peer(),
        selections,
        m,
        seq.y().to_vec(),
        available,
        variant,
    );
    session.exchange(&mut rx, &mut tx)?;
    if let (Some(used), Some(u)) = (pool, rx.selection()) {
        used.extend(u.entries().iter().copied());
    }
    Ok(rx.output.take())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwotInputs {
    pub a: BitMatrix,
    pub b: Vec<u32>,
}

/// Sample-wise OT as a standalone session.
#[derive(Clone, Copy, Debug)]
pub struct SwotProtocol {
    pub cfg: SwotConfig,
    pub variant: SwotVariant,
}

impl SwotProtocol {
    pub fn new(cfg: SwotConfig) -> Self {
        Self {
            cfg,
            variant: SwotVariant::Faithful,
        }
    }
}

impl Protocol for SwotProtocol {
    type Inputs = SwotInputs;

    fn demand(&self) -> Vec<SegmentDemand> {
        vec![SegmentDemand {
            direction: Direction::AliceToBob,
            n: self.cfg.n,
        }]
    }

    fn output_len(&self, inputs: &SwotInputs) -> usize {
        inputs.b.len()
    }

    fn private_inputs(&self, inputs: &SwotInputs) -> (PrivateInput, PrivateInput) {
        (
            PrivateInput::Bits(inputs.a.clone()),
            PrivateInput::Symbols(inputs.b.clone()),
        )
    }

    fn execute(&self, inputs: &SwotInputs, session: &mut Session<'_>) -> Result<Outcome> {
        let SwotConfig { k, m, .. } = self.cfg;
        if inputs.a.shape() != (k, m) || inputs.b.len() != k {
            return Err(Error::dims(
                format!("{k}x{m} matrix and {k} selections"),
                format!(
                    "{}x{} matrix and {} selections",
                    inputs.a.rows(),
                    inputs.a.cols(),
                    inputs.b.len()
                ),
            ));
        }
        let got = run_ot(
            session,
            Role::Alice,
            inputs.a.clone(),
            inputs.b.clone(),
            0,
            None,
            self.variant,
        )?;
        Ok(match got {
            Some(bits) => Outcome::Completed(FunctionOutputs {
                f: vec![0; k],
                g: bits.into_iter().map(u32::from).collect(),
            }),
            None => Outcome::Aborted,
        })
    }
}

/// Runs the whole protocol over a source-model resource.
pub fn swot_full(
    inputs: &SwotInputs,
    resource: ErasureSequence,
    cfg: SwotConfig,
    coins: SessionCoins<'_>,
) -> Result<SessionResult> {
    run_session(
        &SwotProtocol::new(cfg),
        inputs,
        vec![ResourceSegment {
            direction: Direction::AliceToBob,
            resource: Resource::Source(resource),
        }],
        coins,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::enumerate::enumerate;
    use crate::erasure::{partition_indices, sample_bes, ErasureParams};
    use crate::randomness::{SeededCoins, StreamLabel};
    use std::collections::BTreeMap;
    use ErasureSymbol::*;

    fn partition(non_erased: &[usize], erased: &[usize]) -> IndexPartition {
        IndexPartition {
            non_erased: non_erased.to_vec(),
            erased: erased.to_vec(),
        }
    }

    fn seq(x: &[u8], y: &[ErasureSymbol]) -> ErasureSequence {
        ErasureSequence::new(x.iter().map(|&b| b == 1).collect(), y.to_vec()).unwrap()
    }

    fn coins(seed: u64) -> [SeededCoins; 3] {
        [
            SeededCoins::labelled(seed, StreamLabel::AliceLocal),
            SeededCoins::labelled(seed, StreamLabel::BobLocal),
            SeededCoins::labelled(seed, StreamLabel::Noise),
        ]
    }

    fn session_coins(c: &mut [SeededCoins; 3]) -> SessionCoins<'_> {
        let [a, b, n] = c;
        SessionCoins {
            alice: a,
            bob: b,
            noise: n,
        }
    }

    #[test]
    fn config_checks() {
        assert!(SwotConfig::new(1, 1, 4).is_err());
        assert!(SwotConfig::new(0, 2, 4).is_err());
        assert!(SwotConfig::new(1, 2, 0).is_err());
        assert!(SwotConfig::new(1, 2, 1).is_ok());
    }

    #[test]
    fn unique_arrangement() {
        let mut c = SeededCoins::labelled(0, StreamLabel::BobLocal);
        let u = swot_bob_build_selection(&partition(&[1], &[2]), &[1], 2, &mut c, SwotVariant::Faithful)
            .unwrap()
            .unwrap();
        assert_eq!(u.entries(), &[1, 2]);
    }

    #[test]
    fn aborts_without_enough_non_erasures() {
        let mut c = SeededCoins::labelled(0, StreamLabel::BobLocal);
        let out = swot_bob_build_selection(&partition(&[1], &[2, 3, 4]), &[1, 2], 2, &mut c, SwotVariant::Faithful);
        assert_eq!(out, Ok(None));
    }

    #[test]
    fn equality_does_not_abort() {
        let mut c = SeededCoins::labelled(0, StreamLabel::BobLocal);
        let u = swot_bob_build_selection(&partition(&[1, 2], &[3, 4, 5, 6]), &[3, 1], 3, &mut c, SwotVariant::Faithful)
            .unwrap()
            .unwrap();
        let mut all = u.entries().to_vec();
        all.sort();
        assert_eq!(all, vec![1, 2, 3, 4, 5, 6]);
        assert!([1, 2].contains(&u.get(0, 2)) && [1, 2].contains(&u.get(1, 0)));
    }

    #[test]
    fn selection_out_of_alphabet() {
        let mut c = SeededCoins::labelled(0, StreamLabel::BobLocal);
        let out = swot_bob_build_selection(&partition(&[1], &[2]), &[3], 2, &mut c, SwotVariant::Faithful);
        assert!(matches!(out, Err(Error::Domain { .. })));
    }

    #[test]
    fn selection_law_does_not_depend_on_choice() {
        // n = 3, k = 1, m = 2: law of U (marginal over the erasure pattern)
        let law = |b: u32| {
            let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            let params = ErasureParams::new(0.5).unwrap();
            for (w, u) in enumerate(u128::MAX, |c| {
                let s = sample_bes(params, 3, c);
                swot_bob_build_selection(&partition_indices(&s), &[b], 2, c, SwotVariant::Faithful)
                    .unwrap()
                    .map(|u| u.entries().to_vec())
            })
            .unwrap()
            {
                *out.entry(u.unwrap_or_default()).or_default() += w;
            }
            out
        };
        let (l1, l2) = (law(1), law(2));
        assert_eq!(l1.len(), l2.len());
        for (k, v) in &l1 {
            assert!((v - l2[k]).abs() < 1e-15, "{k:?}");
        }
    }

    #[test]
    fn encrypt_by_hand() {
        let a = BitMatrix::new(1, 2, vec![true, false]).unwrap();
        let u = SelectionMatrix::new(1, 2, vec![2, 1]).unwrap();
        let c = swot_alice_encrypt(&a, &u, &[false, true]).unwrap();
        assert_eq!(c, BitMatrix::new(1, 2, vec![false, false]).unwrap());
    }

    #[test]
    fn encrypt_zero_cases() {
        let u = SelectionMatrix::new(2, 2, vec![1, 3, 4, 2]).unwrap();
        let x = [true, false, true, true];
        let c = swot_alice_encrypt(&BitMatrix::zeros(2, 2), &u, &x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(c.get(i, j), x[u.get(i, j) - 1]);
            }
        }
        let a = BitMatrix::new(2, 2, vec![true, false, false, true]).unwrap();
        assert_eq!(swot_alice_encrypt(&a, &u, &[false; 4]).unwrap(), a);
    }

    #[test]
    fn encrypt_bad_index() {
        let u = SelectionMatrix::new(1, 2, vec![1, 9]).unwrap();
        assert!(matches!(
            swot_alice_encrypt(&BitMatrix::zeros(1, 2), &u, &[false; 4]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn decode_trivial_and_erased() {
        let c = BitMatrix::zeros(1, 2);
        let u = SelectionMatrix::new(1, 2, vec![1, 2]).unwrap();
        assert_eq!(swot_bob_decode(&c, &u, &[Zero, Erased], &[1]).unwrap(), vec![false]);
        assert!(matches!(
            swot_bob_decode(&c, &u, &[Zero, Erased], &[2]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn end_to_end_every_matrix() {
        // Y = (0, e), so U = [[1,2]] for B=1 and [[2,1]] for B=2
        let resource = seq(&[0, 1], &[Zero, Erased]);
        for bits in 0..4u8 {
            let a = BitMatrix::new(1, 2, vec![bits & 2 != 0, bits & 1 != 0]).unwrap();
            for b in 1..=2u32 {
                let mut c = coins(bits as u64);
                let inputs = SwotInputs { a: a.clone(), b: vec![b] };
                let cfg = SwotConfig::new(1, 2, 2).unwrap();
                let res = swot_full(&inputs, resource.clone(), cfg, session_coins(&mut c)).unwrap();
                assert!(!res.aborted());
                assert_eq!(res.estimates.g, vec![a.get(0, b as usize - 1) as u32]);
            }
        }
    }

    #[test]
    fn hand_trace_n4() {
        // Y = (1, e, 0, e): S = {1,3}, S_e = {2,4}; A = [[1,0]], B = 2
        let resource = seq(&[1, 1, 0, 0], &[One, Erased, Zero, Erased]);
        let a = BitMatrix::new(1, 2, vec![true, false]).unwrap();
        let inputs = SwotInputs { a: a.clone(), b: vec![2] };
        let mut c = coins(5);
        let res = swot_full(&inputs, resource, SwotConfig::new(1, 2, 4).unwrap(), session_coins(&mut c)).unwrap();
        let Payload::Selection(u) = &res.transcript.messages[0].payload else {
            panic!("expected selection first");
        };
        assert!([1, 3].contains(&u.get(0, 1)));
        assert!([2, 4].contains(&u.get(0, 0)));
        assert_eq!(res.estimates.g, vec![0]);
        assert_eq!(res.transcript.messages.len(), 2);
        assert_eq!(res.transcript.resource_usage, 4);
    }

    #[test]
    fn no_erasures_always_abort() {
        let resource = seq(&[1, 0, 1], &[One, Zero, One]);
        let a = BitMatrix::new(1, 2, vec![true, true]).unwrap();
        let inputs = SwotInputs { a, b: vec![1] };
        let mut c = coins(1);
        let res = swot_full(&inputs, resource, SwotConfig::new(1, 2, 3).unwrap(), session_coins(&mut c)).unwrap();
        assert!(res.aborted());
        assert_eq!(res.estimates.g, vec![0]);
        assert_eq!(res.transcript.messages.len(), 1);
        assert_eq!(res.transcript.messages[0].payload, Payload::Abort);
        assert_eq!(res.transcript.messages[0].sender, Role::Bob);
    }

    #[test]
    fn replay_is_identical() {
        let run = || {
            let mut c = coins(9);
            let params = ErasureParams::new(0.5).unwrap();
            let resource = sample_bes(params, 40, &mut c[2]);
            let a = BitMatrix::new(5, 3, (0..15).map(|i| i % 3 == 0).collect()).unwrap();
            let inputs = SwotInputs { a, b: vec![1, 2, 3, 1, 2] };
            swot_full(&inputs, resource, SwotConfig::new(5, 3, 40).unwrap(), session_coins(&mut c)).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn views_are_separated() {
        let mut c = coins(3);
        let params = ErasureParams::new(0.5).unwrap();
        let resource = sample_bes(params, 20, &mut c[2]);
        let a = BitMatrix::new(2, 2, vec![true, false, true, true]).unwrap();
        let inputs = SwotInputs { a: a.clone(), b: vec![2, 1] };
        let res = swot_full(&inputs, resource.clone(), SwotConfig::new(2, 2, 20).unwrap(), session_coins(&mut c)).unwrap();
        use crate::engine::{PrivateInput, ResourceSide};
        assert_eq!(res.alice_view.private_inputs, PrivateInput::Bits(a));
        assert_eq!(res.bob_view.private_inputs, PrivateInput::Symbols(vec![2, 1]));
        assert_eq!(res.alice_view.resource_side, vec![ResourceSide::Sent(resource.x().to_vec())]);
        assert_eq!(res.bob_view.resource_side, vec![ResourceSide::Received(resource.y().to_vec())]);
        assert!(res.alice_view.local_randomness_record.is_empty());
    }

    #[test]
    fn wrong_resource_length_rejected() {
        let resource = seq(&[1, 0], &[One, Erased]);
        let inputs = SwotInputs { a: BitMatrix::zeros(1, 2), b: vec![1] };
        let mut c = coins(1);
        assert!(swot_full(&inputs, resource, SwotConfig::new(1, 2, 3).unwrap(), session_coins(&mut c)).is_err());
    }

    #[test]
    fn reuse_variant_repeats_one_index() {
        let mut c = SeededCoins::labelled(0, StreamLabel::BobLocal);
        let u = swot_bob_build_selection(&partition(&[1], &[2, 3]), &[1], 3, &mut c, SwotVariant::ReuseConcealedIndex)
            .unwrap()
            .unwrap();
        assert_eq!(u.get(0, 1), u.get(0, 2));
    }
}
