//! Exact rational scalars, dense rational matrices and fraction-free kernels.
//!
//! Every routine here is exact. Determinants and solves go through Bareiss
//! elimination on integer rows: each row is first scaled by the lcm of its
//! denominators, so elimination never builds fractions and intermediate
//! entries stay bounded by Hadamard-type minors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

/// Dense vector of rationals.
pub type RatVector = Vec<Rat>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix (det = 0)")]
    Singular,
    #[error("matrices differ in more than one column (columns {0:?})")]
    MultipleMovingColumns(Vec<usize>),
    #[error("cannot parse {0:?} as an exact rational")]
    Parse(String),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `(1 - t) * a + t * b`.
pub fn lerp(a: &Rat, b: &Rat, t: &Rat) -> Rat {
    a + (b - a) * t
}

/// Parses an integer (`-3`), a fraction (`22/7`) or a plain decimal (`-1.25`)
/// into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat, ArithError> {
    let s = text.trim();
    let err = || ArithError::Parse(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (negative, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        let all_digits = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        if !all_digits(int_digits)
            || !all_digits(frac_part)
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return Err(err());
        }
        let digits = format!("{int_digits}{frac_part}");
        let mantissa = if digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(&digits).map_err(|_| err())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rat::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(s)
        .map(Rat::from_integer)
        .map_err(|_| err())
}

/// Row-major dense matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Result<Self, ArithError> {
        if entries.len() != rows * cols {
            return Err(ArithError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds a matrix from rows of small integers.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, ArithError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ArithError::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&v| rat(v)).collect();
        Self::new(rows.len(), cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rat {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rat) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[Rat] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> RatVector {
        (0..self.rows).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn set_column(&mut self, col: usize, values: &[Rat]) {
        assert_eq!(
            values.len(),
            self.rows,
            "column length must equal row count"
        );
        for (r, v) in values.iter().enumerate() {
            self.set(r, col, v.clone());
        }
    }

    /// Copy of `self` with column `col` replaced by `values`.
    pub fn with_column(&self, col: usize, values: &[Rat]) -> Self {
        let mut out = self.clone();
        out.set_column(col, values);
        out
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Result<RatVector, ArithError> {
        if x.len() != self.cols {
            return Err(ArithError::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Indices of the columns where `self` and `other` differ.
    pub fn differing_columns(&self, other: &Self) -> Result<Vec<usize>, ArithError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ArithError::Dimension("shape mismatch".into()));
        }
        Ok((0..self.cols)
            .filter(|&c| (0..self.rows).any(|r| self.get(r, c) != other.get(r, c)))
            .collect())
    }

    pub fn count_nonzero(&self) -> usize {
        self.entries.iter().filter(|v| !v.is_zero()).count()
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Scales each row (matrix part plus optional extra columns) to integers.
/// Returns the integer rows and the product of the row multipliers.
fn integer_rows(m: &RatMatrix, extra: &[&[Rat]]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = (0..m.rows())
        .map(|r| {
            let row: Vec<&Rat> = m
                .row(r)
                .iter()
                .chain(extra.iter().map(|col| &col[r]))
                .collect();
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            scale *= &lcm;
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect();
    (rows, scale)
}

/// In-place Bareiss elimination on the leading `n` columns of `a` (which may
/// carry extra augmented columns). Returns `None` when a pivot column is
/// entirely zero, otherwise the permutation sign. On success `a[n-1][n-1]`
/// is the determinant of the scaled leading block times the sign.
fn bareiss(a: &mut [Vec<BigInt>], n: usize) -> Option<i8> {
    let width = a.first().map_or(0, Vec::len);
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !a[i][k].is_zero())?;
        if pivot != k {
            a.swap(pivot, k);
            sign = -sign;
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut().take(n - k - 1) {
            let factor = row[k].clone();
            for j in k + 1..width {
                let v = &row[j] * &pivot_row[k] - &factor * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    Some(sign)
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn det(m: &RatMatrix) -> Result<Rat, ArithError> {
    if !m.is_square() {
        return Err(ArithError::Dimension(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Rat::one());
    }
    let (mut a, scale) = integer_rows(m, &[]);
    Ok(match bareiss(&mut a, n) {
        None => Rat::zero(),
        Some(sign) => {
            let d = &a[n - 1][n - 1];
            let d = if sign < 0 { -d } else { d.clone() };
            Rat::new(d, scale)
        }
    })
}

/// Solves `m x = rhs` exactly. Fails with [`ArithError::Singular`] when
/// `det m = 0`.
pub fn solve_linear(m: &RatMatrix, rhs: &[Rat]) -> Result<RatVector, ArithError> {
    if !m.is_square() || rhs.len() != m.rows() {
        return Err(ArithError::Dimension(format!(
            "system {}x{} with right-hand side of length {}",
            m.rows(),
            m.cols(),
            rhs.len()
        )));
    }
    let n = m.rows();
    let (mut a, _) = integer_rows(m, &[rhs]);
    if bareiss(&mut a, n).is_none() {
        return Err(ArithError::Singular);
    }
    let mut x: RatVector = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rat::from_integer(a[i][n].clone());
        for j in i + 1..n {
            if !a[i][j].is_zero() {
                acc -= Rat::from_integer(a[i][j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rat::from_integer(a[i][i].clone());
    }
    Ok(x)
}

/// Endpoint determinants of the affine family `(1 - t) m0 + t m1`, where the
/// two matrices share every column but (at most) one. The determinant of the
/// family is then affine in `t`: `det(t) = (1 - t) det(0) + t det(1)`.
pub fn det_affine_in_t(m0: &RatMatrix, m1: &RatMatrix) -> Result<(Rat, Rat), ArithError> {
    let moving = m0.differing_columns(m1)?;
    if moving.len() > 1 {
        return Err(ArithError::MultipleMovingColumns(moving));
    }
    if moving.is_empty() {
        let d = det(m0)?;
        return Ok((d.clone(), d));
    }
    Ok((det(m0)?, det(m1)?))
}

/// Evaluates the affine function with the given endpoint values at `t`.
pub fn affine_at(endpoints: &(Rat, Rat), t: &Rat) -> Rat {
    lerp(&endpoints.0, &endpoints.1, t)
}

/// Sign as -1, 0 or 1.
pub fn sign(v: &Rat) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}
