//! Bits, bit strings and bit matrices.
//!
//! Entries are stored one per element. Column indices accepted by
//! [`BitMatrix::column`] are 1-based, matching the `{1..m}` convention used by
//! protocol messages; element accessors are 0-based.

use std::fmt;
use std::ops::BitXor;

use crate::{Error, Result};

/// A binary symbol. XOR is `^`.
pub type Bit = bool;

/// An ordered sequence of bits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<Bit>);

impl BitString {
    pub fn new(bits: Vec<Bit>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[Bit] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<Bit> {
        self.0
    }

    pub fn get(&self, i: usize) -> Bit {
        self.0[i]
    }

    /// Bitwise XOR of two equal-length strings.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::dims(self.len(), other.len()));
        }
        Ok(BitString(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    /// Packs the bits most-significant-first into bytes.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        pack_bits(&self.0)
    }
}

impl From<Vec<Bit>> for BitString {
    fn from(bits: Vec<Bit>) -> Self {
        Self(bits)
    }
}

impl FromIterator<Bit> for BitString {
    fn from_iter<I: IntoIterator<Item = Bit>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major `rows x cols` binary matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Bit>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Bit>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::Parameter("bit matrix needs at least one column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols >= 1, "bit matrix needs at least one column");
        Self {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<Bit>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::dims(cols, row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Assembles a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[BitString]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, BitString::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::dims(rows, bad.len()));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(columns.iter().map(|c| c.get(i)));
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Bit] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Bit {
        assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Bit) {
        assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Bit] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// The `j`-th column (1-based) as a string of length `rows`.
    pub fn column(&self, j: usize) -> Result<BitString> {
        if j == 0 || j > self.cols {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, j - 1)).collect())
    }

    pub fn columns(&self) -> Vec<BitString> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).collect())
            .collect()
    }

    /// Elementwise XOR; dimensions must agree.
    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(BitMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|b| !b)
    }

    /// Row-major bits packed most-significant-first.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        pack_bits(&self.data)
    }
}

impl BitXor for &BitMatrix {
    type Output = Result<BitMatrix>;

    fn bitxor(self, rhs: &BitMatrix) -> Result<BitMatrix> {
        self.xor(rhs)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("/")?;
            }
            for &b in self.row(i) {
                f.write_str(if b { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

/// Elementwise XOR of two equal-shape matrices.
pub fn xor_matrices(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    a.xor(b)
}

pub(crate) fn pack_bits(bits: &[Bit]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
        })
        .collect()
}

/// Big-endian binary expansion of `value` in exactly `width` bits.
pub fn encode_fixed_width(value: u32, width: u32) -> Vec<Bit> {
    (0..width)
        .rev()
        .map(|shift| shift < 32 && (value >> shift) & 1 == 1)
        .collect()
}

/// Inverse of [`encode_fixed_width`].
pub fn decode_fixed_width(bits: &[Bit]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32)
}
