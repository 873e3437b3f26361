//! Function tables, source samples and function outputs.
//!
//! Alphabet symbols are 1-based (`{1..m_A}`, `{1..m_B}`); range elements are
//! 0-based indices into an enumerated range and are carried on the wire as
//! their big-endian binary expansion of width `h = ceil(log2 |R|)`.

use std::fmt::Write as _;

use crate::bits::{decode_fixed_width, encode_fixed_width, Bit, BitMatrix};
use crate::{Error, Result};

/// `ceil(log2(size))`, with `ceil(log2(1)) = 0`.
pub fn bit_width(size: u32) -> u32 {
    assert!(size >= 1, "range must be non-empty");
    32 - (size - 1).leading_zeros()
}

/// Encodes a row of `m` bits as the 1-based symbol `1 + (a_1 a_2 .. a_m)_2`.
pub fn row_symbol(bits: &[Bit]) -> u32 {
    decode_fixed_width(bits) + 1
}

/// Inverse of [`row_symbol`].
pub fn symbol_bits(symbol: u32, m: u32) -> Vec<Bit> {
    encode_fixed_width(symbol - 1, m)
}

/// The pair of functions `f` (Alice's output) and `g` (Bob's output).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSpec {
    m_a: u32,
    m_b: u32,
    range_f: u32,
    range_g: u32,
    f_table: Vec<u32>,
    g_table: Vec<u32>,
}

impl FunctionSpec {
    /// Tables are row-major over `(a, b)`: entry `(a-1) * m_b + (b-1)`.
    pub fn new(
        m_a: u32,
        m_b: u32,
        range_f: u32,
        range_g: u32,
        f_table: Vec<u32>,
        g_table: Vec<u32>,
    ) -> Result<Self> {
        if m_a == 0 || m_b == 0 || range_f == 0 || range_g == 0 {
            return Err(Error::Parameter(
                "alphabet and range sizes must be positive".into(),
            ));
        }
        let cells = m_a as usize * m_b as usize;
        for (name, table) in [("f", &f_table), ("g", &g_table)] {
            if table.len() != cells {
                return Err(Error::dims(
                    format!("{cells} {name}-entries"),
                    table.len(),
                ));
            }
        }
        if let Some(&v) = f_table.iter().find(|&&v| v >= range_f) {
            return Err(Error::Parameter(format!(
                "f entry {v} outside range of size {range_f}"
            )));
        }
        if let Some(&v) = g_table.iter().find(|&&v| v >= range_g) {
            return Err(Error::Parameter(format!(
                "g entry {v} outside range of size {range_g}"
            )));
        }
        Ok(Self {
            m_a,
            m_b,
            range_f,
            range_g,
            f_table,
            g_table,
        })
    }

    /// Builds a spec by evaluating closures on every `(a, b)`.
    pub fn from_fns(
        m_a: u32,
        m_b: u32,
        range_f: u32,
        range_g: u32,
        f: impl Fn(u32, u32) -> u32,
        g: impl Fn(u32, u32) -> u32,
    ) -> Result<Self> {
        let cells = || (1..=m_a).flat_map(move |a| (1..=m_b).map(move |b| (a, b)));
        let f_table = cells().map(|(a, b)| f(a, b)).collect();
        let g_table = cells().map(|(a, b)| g(a, b)).collect();
        Self::new(m_a, m_b, range_f, range_g, f_table, g_table)
    }

    /// The 1-out-of-`m` sample-wise OT instance: Alice holds `m`-bit rows,
    /// Bob selects a position, `f = 0` and `g((a_1..a_m), b) = a_b`.
    pub fn selection(m: u32) -> Result<Self> {
        if !(1..=20).contains(&m) {
            return Err(Error::Parameter(format!(
                "selection table supports 1 <= m <= 20, got {m}"
            )));
        }
        Self::from_fns(
            1 << m,
            m,
            1,
            2,
            |_, _| 0,
            |a, b| symbol_bits(a, m)[(b - 1) as usize] as u32,
        )
    }

    pub fn m_a(&self) -> u32 {
        self.m_a
    }

    pub fn m_b(&self) -> u32 {
        self.m_b
    }

    pub fn range_f(&self) -> u32 {
        self.range_f
    }

    pub fn range_g(&self) -> u32 {
        self.range_g
    }

    pub fn h_a(&self) -> u32 {
        bit_width(self.range_f)
    }

    pub fn h_b(&self) -> u32 {
        bit_width(self.range_g)
    }

    fn cell(&self, a: u32, b: u32) -> Result<usize> {
        if a == 0 || a > self.m_a {
            return Err(Error::Domain {
                value: a,
                size: self.m_a,
            });
        }
        if b == 0 || b > self.m_b {
            return Err(Error::Domain {
                value: b,
                size: self.m_b,
            });
        }
        Ok((a - 1) as usize * self.m_b as usize + (b - 1) as usize)
    }

    pub fn f(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.f_table[self.cell(a, b)?])
    }

    pub fn g(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.g_table[self.cell(a, b)?])
    }

    /// If `f(a,b) = phi(g(a,b))` for some `phi`, returns `phi` as a table over
    /// the range of `g` (unreached entries map to 0).
    pub fn f_through_g(&self) -> Option<Vec<u32>> {
        derive_map(&self.g_table, &self.f_table, self.range_g)
    }

    /// If `g(a,b) = psi(f(a,b))` for some `psi`, returns `psi`.
    pub fn g_through_f(&self) -> Option<Vec<u32>> {
        derive_map(&self.f_table, &self.g_table, self.range_f)
    }

    /// Parses the plain-text table format: a header `m_A m_B |Rf| |Rg|`
    /// followed by `m_A * m_B` lines `a b f(a,b) g(a,b)`, with `a`, `b`
    /// 1-based and function values given as 0-based range indices. Blank lines
    /// and `#` comments are ignored.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty function table".into()))?;
        let head = parse_numbers(header, 4)?;
        let (m_a, m_b, range_f, range_g) = (head[0], head[1], head[2], head[3]);
        if m_a == 0 || m_b == 0 {
            return Err(Error::Parse("alphabet sizes must be positive".into()));
        }
        let cells = m_a as usize * m_b as usize;
        let mut f_table = vec![None; cells];
        let mut g_table = vec![0; cells];
        for line in lines {
            let row = parse_numbers(line, 4)?;
            let (a, b) = (row[0], row[1]);
            if a == 0 || a > m_a || b == 0 || b > m_b {
                return Err(Error::Parse(format!("cell ({a},{b}) outside the alphabets")));
            }
            let idx = (a - 1) as usize * m_b as usize + (b - 1) as usize;
            if f_table[idx].is_some() {
                return Err(Error::Parse(format!("cell ({a},{b}) given twice")));
            }
            f_table[idx] = Some(row[2]);
            g_table[idx] = row[3];
        }
        let f_table = f_table
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse(format!("table must list all {cells} cells")))?;
        Self::new(m_a, m_b, range_f, range_g, f_table, g_table)
    }

    /// Renders the spec in the format read by [`FunctionSpec::parse_table`].
    pub fn to_table_string(&self) -> String {
        let mut out = format!(
            "{} {} {} {}\n",
            self.m_a, self.m_b, self.range_f, self.range_g
        );
        for a in 1..=self.m_a {
            for b in 1..=self.m_b {
                let i = self.cell(a, b).expect("in range");
                writeln!(out, "{a} {b} {} {}", self.f_table[i], self.g_table[i]).unwrap();
            }
        }
        out
    }
}

fn derive_map(from: &[u32], to: &[u32], from_size: u32) -> Option<Vec<u32>> {
    let mut map: Vec<Option<u32>> = vec![None; from_size as usize];
    for (&x, &y) in from.iter().zip(to) {
        match map[x as usize] {
            Some(prev) if prev != y => return None,
            _ => map[x as usize] = Some(y),
        }
    }
    Some(map.into_iter().map(|v| v.unwrap_or(0)).collect())
}

fn parse_numbers(line: &str, expected: usize) -> Result<Vec<u32>> {
    let values = line
        .split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} integers in `{line}`"
        )));
    }
    Ok(values)
}

/// `k` samples for each party.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourceSamples {
    a: Vec<u32>,
    b: Vec<u32>,
}

impl SourceSamples {
    pub fn new(a: Vec<u32>, b: Vec<u32>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::dims(a.len(), b.len()));
        }
        Ok(Self { a, b })
    }

    /// Sample-wise OT sources: row `i` of `matrix` is `A_i`.
    pub fn from_rows(matrix: &BitMatrix, b: Vec<u32>) -> Result<Self> {
        let a = (0..matrix.rows()).map(|i| row_symbol(matrix.row(i))).collect();
        Self::new(a, b)
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    /// True when every `b_i` is the same, i.e. a string-OT instance.
    pub fn is_string_ot(&self) -> bool {
        self.b.windows(2).all(|w| w[0] == w[1])
    }
}

/// Per-sample outputs for both parties, either true values or estimates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FunctionOutputs {
    pub f: Vec<u32>,
    pub g: Vec<u32>,
}

impl FunctionOutputs {
    pub fn zeros(k: usize) -> Self {
        Self {
            f: vec![0; k],
            g: vec![0; k],
        }
    }
}

/// Evaluates `F^k` and `G^k` sample by sample.
pub fn eval_functions(spec: &FunctionSpec, sources: &SourceSamples) -> Result<FunctionOutputs> {
    let mut out = FunctionOutputs {
        f: Vec::with_capacity(sources.k()),
        g: Vec::with_capacity(sources.k()),
    };
    for (&a, &b) in sources.a.iter().zip(&sources.b) {
        out.f.push(spec.f(a, b)?);
        out.g.push(spec.g(a, b)?);
    }
    Ok(out)
}
