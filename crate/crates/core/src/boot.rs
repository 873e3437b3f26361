//! Bootstrapped 1-out-of-`m` string OT from `u` smaller sample-wise OTs.
//!
//! Each of Alice's `m` strings is padded with the XOR of one mask per level,
//! chosen along a mixed-radix tree with radices `s_1..s_u`. Bob learns the
//! `u` masks on the path to his string through 1-out-of-`s_i` string OTs, so
//! he unpads exactly that string. He may also learn XORs of other strings
//! (disjoint but not joint privacy), which [`boot_knowledge_span`] exposes.

use std::collections::BTreeSet;

use crate::analysis::gf2;
use crate::analysis::rates::rate_swot;
use crate::bits::{BitMatrix, BitString};
use crate::engine::{
    run_session, Direction, Outcome, Payload, PrivateInput, Protocol, ResourceSegment, Role,
    SegmentDemand, Session, SessionCoins, SessionResult,
};
use crate::function::FunctionOutputs;
use crate::randomness::Coins;
use crate::swot::{run_ot, SwotVariant};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BootParams {
    branching: Vec<usize>,
    m: usize,
    k: usize,
}

impl BootParams {
    pub fn new(branching: Vec<usize>, m: usize, k: usize) -> Result<Self> {
        if branching.is_empty() {
            return Err(Error::Parameter("branching sequence is empty".into()));
        }
        if m < 2 || k < 1 {
            return Err(Error::Parameter(format!("need m >= 2 and k >= 1, got m={m}, k={k}")));
        }
        if let Some(&s) = branching.iter().find(|&&s| s < 2 || s > m) {
            return Err(Error::Parameter(format!("radix {s} outside 2..={m}")));
        }
        let leaves = branching
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .unwrap_or(usize::MAX);
        if leaves < m {
            return Err(Error::Parameter(format!(
                "radices {branching:?} give {leaves} leaves, fewer than m = {m}"
            )));
        }
        Ok(Self { branching, m, k })
    }

    pub fn branching(&self) -> &[usize] {
        &self.branching
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn u(&self) -> usize {
        self.branching.len()
    }
}

/// Mask digits `(d_1..d_u)`, 1-based, for every string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EncodingAssignment {
    branching: Vec<usize>,
    digits: Vec<Vec<usize>>,
}

impl EncodingAssignment {
    pub fn branching(&self) -> &[usize] {
        &self.branching
    }

    pub fn m(&self) -> usize {
        self.digits.len()
    }

    /// Digits of string `j` (1-based).
    pub fn digits(&self, j: usize) -> &[usize] {
        &self.digits[j - 1]
    }

    /// Tab-separated table: one line per string with its mask labels.
    pub fn to_table(&self) -> String {
        let mut out = String::from("string\tmasks\n");
        for (j, d) in self.digits.iter().enumerate() {
            let masks: Vec<String> = d
                .iter()
                .enumerate()
                .map(|(i, di)| format!("Z[{},{}]", i + 1, di))
                .collect();
            out.push_str(&format!("{}\t{}\n", j + 1, masks.join(" ")));
        }
        out
    }
}

/// String `j` gets the mixed-radix digits of `j - 1`, most significant level
/// first, each shifted to start at 1.
pub fn boot_assign(params: &BootParams) -> EncodingAssignment {
    let s = &params.branching;
    let digits = (0..params.m)
        .map(|j| {
            let mut rest = j;
            let mut d = vec![0; s.len()];
            for i in (0..s.len()).rev() {
                d[i] = rest % s[i] + 1;
                rest /= s[i];
            }
            d
        })
        .collect();
    EncodingAssignment {
        branching: s.clone(),
        digits,
    }
}

/// `masks[i][j]` is the `k`-bit mask `Z_{i+1, j+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaskTable {
    masks: Vec<Vec<BitString>>,
}

impl MaskTable {
    pub fn new(masks: Vec<Vec<BitString>>) -> Self {
        Self { masks }
    }

    /// Level by level, mask by mask, bit by bit.
    pub fn sample(params: &BootParams, coins: &mut dyn Coins) -> Self {
        let masks = params
            .branching
            .iter()
            .map(|&s| {
                (0..s)
                    .map(|_| (0..params.k).map(|_| coins.bit()).collect())
                    .collect()
            })
            .collect();
        Self { masks }
    }

    pub fn zeros(params: &BootParams) -> Self {
        Self {
            masks: params
                .branching
                .iter()
                .map(|&s| vec![BitString::zeros(params.k); s])
                .collect(),
        }
    }

    /// Mask `Z_{level, index}`, both 1-based.
    pub fn get(&self, level: usize, index: usize) -> &BitString {
        &self.masks[level - 1][index - 1]
    }

    /// Level `level` (1-based) as a `k x s` sender matrix, column `j` = mask `j`.
    pub fn level_matrix(&self, level: usize) -> Result<BitMatrix> {
        BitMatrix::from_columns(&self.masks[level - 1])
    }
}

pub type EncodedStrings = Vec<BitString>;

/// `C_j = A_j xor Z_{1,d_1(j)} xor ... xor Z_{u,d_u(j)}`.
pub fn boot_encode(
    strings: &[BitString],
    masks: &MaskTable,
    assignment: &EncodingAssignment,
) -> Result<EncodedStrings> {
    if strings.len() != assignment.m() {
        return Err(Error::dims(format!("{} strings", assignment.m()), strings.len()));
    }
    if masks.masks.len() != assignment.branching.len()
        || masks
            .masks
            .iter()
            .zip(&assignment.branching)
            .any(|(level, &s)| level.len() != s)
    {
        return Err(Error::Structural("mask table does not match the tree".into()));
    }
    strings
        .iter()
        .zip(&assignment.digits)
        .map(|(a, d)| {
            d.iter()
                .enumerate()
                .try_fold(a.clone(), |acc, (i, &di)| acc.xor(masks.get(i + 1, di)))
        })
        .collect()
}

/// Erasure samples for each level: one fresh segment per sub-session, or
/// one shared segment that the sub-sessions draw from without reuse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BootResources {
    PerRound(Vec<usize>),
    Pooled(usize),
}

/// `n_i = ceil(k / ((1 - slack) R(p, s_i)))`, or `k s_i` where the rate is 0.
pub fn per_round_lengths(k: usize, branching: &[usize], p: f64, slack: f64) -> Result<Vec<usize>> {
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::Parameter(format!("slack {slack} outside [0, 1)")));
    }
    Ok(branching
        .iter()
        .map(|&s| {
            let r = rate_swot(p, s);
            if r <= 0.0 {
                k * s
            } else {
                // tolerate round-off so exact quotients are not bumped up
                (k as f64 / ((1.0 - slack) * r) - 1e-9).ceil() as usize
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BootInputs {
    /// `k x m` matrix whose column `j` is string `A_j`.
    pub strings: BitMatrix,
    pub b: u32,
}

#[derive(Clone, Debug)]
pub struct BootProtocol {
    pub params: BootParams,
    pub resources: BootResources,
}

impl BootProtocol {
    pub fn new(params: BootParams, resources: BootResources) -> Result<Self> {
        if let BootResources::PerRound(n) = &resources {
            if n.len() != params.u() {
                return Err(Error::dims(format!("{} round lengths", params.u()), n.len()));
            }
        }
        Ok(Self { params, resources })
    }

    /// Segment feeding level `level` (0-based).
    fn segment(&self, level: usize) -> usize {
        match self.resources {
            BootResources::PerRound(_) => level,
            BootResources::Pooled(_) => 0,
        }
    }
}

impl Protocol for BootProtocol {
    type Inputs = BootInputs;

    fn demand(&self) -> Vec<SegmentDemand> {
        let lengths = match &self.resources {
            BootResources::PerRound(n) => n.clone(),
            BootResources::Pooled(n) => vec![*n],
        };
        lengths
            .into_iter()
            .map(|n| SegmentDemand {
                direction: Direction::AliceToBob,
                n,
            })
            .collect()
    }

    fn output_len(&self, _inputs: &BootInputs) -> usize {
        self.params.k
    }

    fn private_inputs(&self, inputs: &BootInputs) -> (PrivateInput, PrivateInput) {
        (
            PrivateInput::Bits(inputs.strings.clone()),
            PrivateInput::Symbols(vec![inputs.b]),
        )
    }

    fn execute(&self, inputs: &BootInputs, session: &mut Session<'_>) -> Result<Outcome> {
        let BootParams { k, m, .. } = self.params;
        if inputs.strings.shape() != (k, m) {
            return Err(Error::dims(
                format!("{k}x{m} string matrix"),
                format!("{}x{}", inputs.strings.rows(), inputs.strings.cols()),
            ));
        }
        if inputs.b == 0 || inputs.b as usize > m {
            return Err(Error::Domain {
                value: inputs.b,
                size: m as u32,
            });
        }
        let mut pool = matches!(self.resources, BootResources::Pooled(_)).then(BTreeSet::new);
        let finish = |got: Option<Vec<bool>>| match got {
            Some(bits) => Outcome::Completed(FunctionOutputs {
                f: vec![0; k],
                g: bits.into_iter().map(u32::from).collect(),
            }),
            None => Outcome::Aborted,
        };

        if self.params.u() == 1 {
            // a one-level tree is plain string OT on Alice's strings
            let got = run_ot(
                session,
                Role::Alice,
                inputs.strings.clone(),
                vec![inputs.b; k],
                0,
                pool.as_mut(),
                SwotVariant::Faithful,
            )?;
            return Ok(finish(got));
        }

        let assignment = boot_assign(&self.params);
        let masks = MaskTable::sample(&self.params, &mut session.party_coins(Role::Alice));
        let encoded = boot_encode(&inputs.strings.columns(), &masks, &assignment)?;
        let mut estimate = encoded[inputs.b as usize - 1].clone();
        session.send(Role::Alice, Payload::EncodedStrings(encoded));

        let path = assignment.digits(inputs.b as usize).to_vec();
        for (level, &d) in path.iter().enumerate() {
            let got = run_ot(
                session,
                Role::Alice,
                masks.level_matrix(level + 1)?,
                vec![d as u32; k],
                self.segment(level),
                pool.as_mut(),
                SwotVariant::Faithful,
            )?;
            match got {
                Some(mask) => estimate = estimate.xor(&BitString::new(mask))?,
                None => return Ok(Outcome::Aborted),
            }
        }
        Ok(finish(Some(estimate.into_bits())))
    }
}

/// Runs the whole protocol.
pub fn boot_full(
    inputs: &BootInputs,
    resources: Vec<ResourceSegment>,
    protocol: &BootProtocol,
    coins: SessionCoins<'_>,
) -> Result<SessionResult> {
    run_session(protocol, inputs, resources, coins)
}

/// What Bob can compute linearly from the encoded strings and his masks.
///
/// Vectors are over the string variables `A_1..A_m` only (position `j - 1`
/// is `A_j`); the masks have been eliminated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeSpan {
    pub m: usize,
    pub b: usize,
    /// Basis of the mask-free part of Bob's span.
    pub basis: Vec<Vec<bool>>,
    /// Basis of the combinations that avoid `A_b`.
    pub leak_basis: Vec<Vec<bool>>,
}

impl KnowledgeSpan {
    pub fn contains(&self, v: &[bool]) -> bool {
        let e = gf2::echelon(&self.basis, &[]);
        gf2::in_span(&e, v)
    }

    /// 1-based strings Bob can determine on their own.
    pub fn recoverable_units(&self) -> Vec<usize> {
        let e = gf2::echelon(&self.basis, &[]);
        (0..self.m)
            .filter(|&j| {
                let mut v = vec![false; self.m];
                v[j] = true;
                gf2::in_span(&e, &v)
            })
            .map(|j| j + 1)
            .collect()
    }

    /// Least-weight combinations of two or more strings other than `A_b`
    /// that Bob knows, as 1-based index sets. `None` if the leak space is too
    /// large to enumerate.
    pub fn leak_witnesses(&self) -> Option<Vec<Vec<usize>>> {
        let vs = gf2::min_weight_vectors(&self.leak_basis, 2, 20)?;
        let mut sets: Vec<Vec<usize>> = vs
            .iter()
            .map(|v| (0..self.m).filter(|&j| v[j]).map(|j| j + 1).collect())
            .collect();
        sets.sort();
        Some(sets)
    }
}

/// Span of `{C_j}` and Bob's masks `{Z_{i, d_i(b)}}` over the variables
/// `A_1..A_m, Z_{1,1}..Z_{u,s_u}`, projected onto mask-free combinations.
pub fn boot_knowledge_span(assignment: &EncodingAssignment, b: usize) -> Result<KnowledgeSpan> {
    let m = assignment.m();
    if b == 0 || b > m {
        return Err(Error::Domain {
            value: b as u32,
            size: m as u32,
        });
    }
    let s = assignment.branching();
    let offsets: Vec<usize> = s
        .iter()
        .scan(m, |acc, &si| {
            let o = *acc;
            *acc += si;
            Some(o)
        })
        .collect();
    let width = m + s.iter().sum::<usize>();
    let mask_var = |level: usize, d: usize| offsets[level] + d - 1;

    let mut rows = Vec::new();
    for j in 1..=m {
        let mut r = vec![false; width];
        r[j - 1] = true;
        for (i, &d) in assignment.digits(j).iter().enumerate() {
            r[mask_var(i, d)] = true;
        }
        rows.push(r);
    }
    for (i, &d) in assignment.digits(b).iter().enumerate() {
        let mut r = vec![false; width];
        r[mask_var(i, d)] = true;
        rows.push(r);
    }

    // masks first, then A_b, then the other strings
    let mut order: Vec<usize> = (m..width).collect();
    order.push(b - 1);
    order.extend((0..m).filter(|&j| j != b - 1));
    let reduced = gf2::echelon(&rows, &order);

    let mut basis = Vec::new();
    let mut leak_basis = Vec::new();
    for (lead, row) in reduced {
        if lead >= m {
            continue;
        }
        let strings = row[..m].to_vec();
        if lead != b - 1 {
            leak_basis.push(strings.clone());
        }
        basis.push(strings);
    }
    Ok(KnowledgeSpan {
        m,
        b,
        basis,
        leak_basis,
    })
}
