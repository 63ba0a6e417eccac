//! Exact permanent and perfect-matching-count engines for square 0/1 matrices.

mod bounds;
mod engines;
mod matching;

pub use bounds::{bregman_minc_log_bound, log_permanent};
pub use engines::{permanent_bruteforce, permanent_glynn, permanent_ryser};
pub use matching::{has_perfect_matching, max_matching_size};

use crate::error::{Error, Result};
use num_bigint::BigUint;

/// Largest dimension the exact integer engines accept.
pub const EXACT_DIM_LIMIT: usize = 34;
/// Largest dimension for the permutation-enumeration oracle.
pub const BRUTEFORCE_DIM_LIMIT: usize = 10;

/// An n×n 0/1 matrix stored as one bitmask per row; bit j of row i is the
/// entry at (i, j). Doubles as the bipartite graph on rows × columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareBitMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl SquareBitMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= 64, "dimension out of representable range");
        Self {
            n,
            rows: vec![0; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut m = Self::zeros(n);
        let full = Self::row_mask(n);
        for r in &mut m.rows {
            *r = full;
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn from_fn(n: usize, mut entry: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if entry(i, j) {
                    m.rows[i] |= 1 << j;
                }
            }
        }
        m
    }

    /// Row bitmasks; bits at positions >= n are guaranteed zero.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        assert_eq!(rows.len(), n);
        let mask = Self::row_mask(n);
        assert!(
            rows.iter().all(|r| r & !mask == 0),
            "row has bits beyond dimension"
        );
        Self { n, rows }
    }

    fn row_mask(n: usize) -> u64 {
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn edge_count(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    pub fn row_degree(&self, i: usize) -> u32 {
        self.rows[i].count_ones()
    }

    /// Bitmask over rows of column j.
    pub fn column_mask(&self, j: usize) -> u64 {
        let mut c = 0u64;
        for (i, &r) in self.rows.iter().enumerate() {
            c |= ((r >> j) & 1) << i;
        }
        c
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// Leading k×k principal submatrix.
    pub fn leading_minor(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.n);
        let mask = Self::row_mask(k);
        Self {
            n: k,
            rows: self.rows[..k].iter().map(|r| r & mask).collect(),
        }
    }

    /// Parses the fixture text format: first line n, then n lines of n
    /// characters '0'/'1'.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::MatrixParse {
            line: 1,
            column: 1,
            message: "empty input".into(),
        })?;
        let n: usize = header.trim().parse().map_err(|_| Error::MatrixParse {
            line: 1,
            column: 1,
            message: format!("expected a dimension, got {:?}", header.trim()),
        })?;
        if n < 1 || n > 64 {
            return Err(Error::MatrixParse {
                line: 1,
                column: 1,
                message: format!("dimension {} out of range 1..=64", n),
            });
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| Error::MatrixParse {
                line: i + 2,
                column: 1,
                message: "missing matrix row".into(),
            })?;
            let line = line.trim_end();
            if line.chars().count() != n {
                return Err(Error::MatrixParse {
                    line: i + 2,
                    column: line.chars().count() + 1,
                    message: format!("expected {} characters, got {}", n, line.chars().count()),
                });
            }
            let mut row = 0u64;
            for (j, c) in line.chars().enumerate() {
                match c {
                    '1' => row |= 1 << j,
                    '0' => {}
                    other => {
                        return Err(Error::MatrixParse {
                            line: i + 2,
                            column: j + 1,
                            message: format!("expected '0' or '1', got {:?}", other),
                        })
                    }
                }
            }
            rows.push(row);
        }
        Ok(Self { n, rows })
    }

    /// Renders the fixture text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &r in &self.rows {
            for j in 0..self.n {
                out.push(if (r >> j) & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub(crate) fn check_dim(&self, max: usize) -> Result<()> {
        if self.n > max {
            Err(Error::DimensionTooLarge { n: self.n, max })
        } else {
            Ok(())
        }
    }
}

/// Exact nonnegative matching count; decimal-string round-trips losslessly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        use num_traits::Zero;
        BigCount(BigUint::zero())
    }

    pub fn from_u64(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }

    pub fn is_zero(&self) -> bool {
        use num_traits::Zero;
        self.0.is_zero()
    }

    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    pub fn from_decimal(s: &str) -> Option<Self> {
        BigUint::parse_bytes(s.as_bytes(), 10).map(BigCount)
    }

    /// Natural log; None for zero.
    pub fn ln(&self) -> Option<f64> {
        crate::numeric::ln_biguint(&self.0)
    }
}

impl std::fmt::Display for BigCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_round_trip() {
        let m = SquareBitMatrix::from_fn(3, |i, j| (i + j) % 2 == 0);
        let text = m.to_text();
        assert_eq!(text, "3\n101\n010\n101\n");
        assert_eq!(SquareBitMatrix::parse_text(&text).unwrap(), m);
    }

    #[test]
    fn parse_rejects_bad_char_with_position() {
        let err = SquareBitMatrix::parse_text("2\n01\n0x\n").unwrap_err();
        match err {
            Error::MatrixParse { line, column, .. } => {
                assert_eq!((line, column), (3, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_short_row() {
        let err = SquareBitMatrix::parse_text("3\n010\n01\n000\n").unwrap_err();
        match err {
            Error::MatrixParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn leading_minor_nests() {
        let m = SquareBitMatrix::from_fn(5, |i, j| (i * 7 + j * 3) % 2 == 1);
        let m3 = m.leading_minor(3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m3.get(i, j), m.get(i, j));
            }
        }
    }

    #[test]
    fn bigcount_decimal_round_trip() {
        let c = BigCount::from_decimal("295232799039604140847618609643520000000").unwrap();
        assert_eq!(
            c.to_decimal(),
            "295232799039604140847618609643520000000"
        );
    }

    #[test]
    fn edge_count_is_total_popcount() {
        let m = SquareBitMatrix::from_fn(4, |i, j| i <= j);
        assert_eq!(m.edge_count(), 10);
        assert_eq!(m.column_mask(0), 0b0001);
        assert_eq!(m.column_mask(3), 0b1111);
    }
}
