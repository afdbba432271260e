//! Instances, partitions and the block linear system whose solution is the
//! common point `z` together with the affine coefficients `alpha`.
//!
//! For a partition `J_1, ..., J_r` the unknowns are `(alpha_1..alpha_n, z)`
//! and each block contributes `d + 1` rows:
//!
//! ```text
//!   sum_{i in J_p} alpha_i a_i - z = 0
//!   sum_{i in J_p} alpha_i         = 1
//! ```
//!
//! Columns are laid out block by block (ascending point index inside each
//! block), followed by the `d` columns of `z`, which hold a stack of `-I_d`
//! with a zero row between consecutive copies.

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{self, ArithError, Rat, RatMatrix, RatVector};

pub type Point = Vec<Rat>;

/// `(r - 1)(d + 1) + 1`, the number of points that always admits a Tverberg
/// partition into `r` parts.
pub fn tverberg_number(d: usize, r: usize) -> usize {
    (r - 1) * (d + 1) + 1
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition is not proper: block {block} has {size} points (allowed 1..={max})")]
    NotProper {
        block: usize,
        size: usize,
        max: usize,
    },
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    /// The affine hulls of the blocks do not meet in a single point. For
    /// points in general position this cannot happen, so it flags a
    /// degenerate input.
    #[error("singular system: the block affine hulls do not meet in a single point")]
    Singular,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    d: usize,
    r: usize,
    points: Vec<Point>,
}

impl Instance {
    /// Validates dimension, part count, point count and distinctness.
    pub fn new(d: usize, r: usize, points: Vec<Point>) -> Result<Self, ModelError> {
        if d == 0 {
            return Err(ModelError::InvalidInstance(
                "dimension must be at least 1".into(),
            ));
        }
        if r < 2 {
            return Err(ModelError::InvalidInstance("need at least 2 parts".into()));
        }
        let n = tverberg_number(d, r);
        if points.len() != n {
            return Err(ModelError::InvalidInstance(format!(
                "d={d}, r={r} requires exactly {n} points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| p.len() != d) {
            return Err(ModelError::InvalidInstance(format!(
                "point {i} has {} coordinates, expected {d}",
                points[i].len()
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p) {
                return Err(ModelError::InvalidInstance(format!(
                    "point {i} is a duplicate"
                )));
            }
        }
        Ok(Self { d, r, points })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Same instance with point `i` moved to `p`. Distinctness is not
    /// rechecked: intermediate positions along a path are allowed to be
    /// arbitrary.
    pub fn with_point(&self, i: usize, p: Point) -> Self {
        assert_eq!(p.len(), self.d, "replacement point has wrong dimension");
        let mut points = self.points.clone();
        points[i] = p;
        Self { points, ..*self }
    }

    pub(crate) fn from_parts_unchecked(d: usize, r: usize, points: Vec<Point>) -> Self {
        debug_assert_eq!(points.len(), tverberg_number(d, r));
        Self { d, r, points }
    }
}

/// Ordered list of `r` disjoint blocks covering `0..n`. Block labels are
/// positions in the list; each block is kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>, n: usize) -> Result<Self, ModelError> {
        let mut block_of = vec![usize::MAX; n];
        for (p, block) in blocks.iter_mut().enumerate() {
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n {
                    return Err(ModelError::InvalidPartition(format!(
                        "index {i} out of range for {n} points"
                    )));
                }
                if block_of[i] != usize::MAX {
                    return Err(ModelError::InvalidPartition(format!(
                        "index {i} appears more than once"
                    )));
                }
                block_of[i] = p;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(ModelError::InvalidPartition(format!(
                "index {i} is not covered"
            )));
        }
        Ok(Self { blocks, block_of })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, p: usize) -> &[usize] {
        &self.blocks[p]
    }

    pub fn parts(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    /// Every block has between 1 and `d + 1` points.
    pub fn check_proper(&self, d: usize) -> Result<(), ModelError> {
        match self
            .blocks
            .iter()
            .position(|b| b.is_empty() || b.len() > d + 1)
        {
            Some(block) => Err(ModelError::NotProper {
                block,
                size: self.blocks[block].len(),
                max: d + 1,
            }),
            None => Ok(()),
        }
    }

    pub fn is_proper(&self, d: usize) -> bool {
        self.check_proper(d).is_ok()
    }

    /// Partition with point `i` taken out of its block and appended to block
    /// `to`. Other block labels are unchanged.
    pub fn move_point(&self, i: usize, to: usize) -> Self {
        let from = self.block_of[i];
        let mut blocks = self.blocks.clone();
        blocks[from].retain(|&x| x != i);
        let pos = blocks[to].partition_point(|&x| x < i);
        blocks[to].insert(pos, i);
        let mut block_of = self.block_of.clone();
        block_of[i] = to;
        Self { blocks, block_of }
    }

    /// Label-free normal form: blocks ordered by their smallest element.
    pub fn canonical(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.sort_by_key(|b| b.first().copied().unwrap_or(usize::MAX));
        Self::new(blocks, self.n()).expect("relabeling keeps a valid partition")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(ToString::to_string).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The assembled `(n + d) x (n + d)` system `M (alpha, z) = c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TverbergSystem {
    d: usize,
    matrix: RatMatrix,
    rhs: RatVector,
    column_of_point: Vec<usize>,
}

impl TverbergSystem {
    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Rat] {
        &self.rhs
    }

    pub fn column_of_point(&self, i: usize) -> usize {
        self.column_of_point[i]
    }

    pub fn n(&self) -> usize {
        self.column_of_point.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Column of length `n + d` holding `(point, 1)` in the rows of block `p`
    /// and zeros elsewhere.
    pub fn block_column(&self, p: usize, point: &[Rat]) -> RatVector {
        let mut col = vec![Rat::zero(); self.dim()];
        let base = p * (self.d + 1);
        for (k, x) in point.iter().enumerate() {
            col[base + k] = x.clone();
        }
        col[base + self.d] = Rat::one();
        col
    }

    /// The matrix with the column of point `i` replaced by the right-hand
    /// side.
    pub fn replaced_column_matrix(&self, i: usize) -> RatMatrix {
        self.matrix.with_column(self.column_of_point[i], &self.rhs)
    }

    pub fn det(&self) -> Result<Rat, ModelError> {
        Ok(arith::det(&self.matrix)?)
    }
}

/// Assembles the block system for `part` over `inst`, optionally with point
/// `m` replaced by another position (used for the moving point `a_m(t)`).
pub fn build_system(
    inst: &Instance,
    part: &Partition,
    override_point: Option<(usize, &[Rat])>,
) -> Result<TverbergSystem, ModelError> {
    let (d, n) = (inst.d(), inst.n());
    if part.n() != n {
        return Err(ModelError::InvalidPartition(format!(
            "partition covers {} points, instance has {n}",
            part.n()
        )));
    }
    if part.parts() != inst.r() {
        return Err(ModelError::InvalidPartition(format!(
            "partition has {} blocks, expected {}",
            part.parts(),
            inst.r()
        )));
    }
    part.check_proper(d)?;
    if let Some((m, p)) = override_point {
        if m >= n {
            return Err(ModelError::IndexOutOfRange(m));
        }
        if p.len() != d {
            return Err(ModelError::InvalidInstance(
                "override point has wrong dimension".into(),
            ));
        }
    }

    let size = n + d;
    let mut matrix = RatMatrix::zeros(size, size);
    let mut rhs = vec![Rat::zero(); size];
    let mut column_of_point = vec![0; n];
    let mut col = 0;
    for (p, block) in part.blocks().iter().enumerate() {
        let base = p * (d + 1);
        for &i in block {
            let coords: &[Rat] = match override_point {
                Some((m, q)) if m == i => q,
                _ => inst.point(i),
            };
            for (k, x) in coords.iter().enumerate() {
                matrix.set(base + k, col, x.clone());
            }
            matrix.set(base + d, col, Rat::one());
            column_of_point[i] = col;
            col += 1;
        }
        for k in 0..d {
            matrix.set(base + k, n + k, -Rat::one());
        }
        rhs[base + d] = Rat::one();
    }
    debug_assert_eq!(col, n);
    Ok(TverbergSystem {
        d,
        matrix,
        rhs,
        column_of_point,
    })
}

/// Common point and affine coefficients (indexed by point) for a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub z: Point,
    pub alpha: RatVector,
    /// Every coefficient is strictly positive.
    pub strict: bool,
}

/// Solves the block system for `part`. A singular system surfaces as
/// [`ModelError::Singular`].
pub fn solve_partition(
    inst: &Instance,
    part: &Partition,
    override_point: Option<(usize, &[Rat])>,
) -> Result<Certificate, ModelError> {
    let sys = build_system(inst, part, override_point)?;
    solve_system(&sys)
}

pub fn solve_system(sys: &TverbergSystem) -> Result<Certificate, ModelError> {
    let x = match arith::solve_linear(sys.matrix(), sys.rhs()) {
        Ok(x) => x,
        Err(ArithError::Singular) => return Err(ModelError::Singular),
        Err(e) => return Err(e.into()),
    };
    let n = sys.n();
    let alpha: RatVector = (0..n).map(|i| x[sys.column_of_point(i)].clone()).collect();
    let z = x[n..].to_vec();
    let strict = alpha.iter().all(Signed::is_positive);
    Ok(Certificate { z, alpha, strict })
}

/// `det M_i`: the determinant with the column of point `i` replaced by `c`.
pub fn replaced_column_det(sys: &TverbergSystem, i: usize) -> Result<Rat, ModelError> {
    if i >= sys.n() {
        return Err(ModelError::IndexOutOfRange(i));
    }
    Ok(arith::det(&sys.replaced_column_matrix(i))?)
}

/// Why a certificate failed to verify.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("partition does not match the instance: {0}")]
    Partition(String),
    #[error("block sum ≠ 1 in block {block}")]
    BlockSum { block: usize },
    #[error("block {block} combination differs from z in coordinate {coord}")]
    BlockPoint { block: usize, coord: usize },
    #[error("coefficient of point {index} is negative")]
    Negative { index: usize },
    #[error("coefficient of point {index} is zero but strict positivity was required")]
    NotStrict { index: usize },
}

/// Checks every block equation exactly and the sign condition on `alpha`.
pub fn verify_certificate(
    inst: &Instance,
    part: &Partition,
    cert: &Certificate,
    require_strict: bool,
) -> Result<(), Violation> {
    let (d, n) = (inst.d(), inst.n());
    if part.n() != n || part.parts() != inst.r() {
        return Err(Violation::Partition(format!(
            "{} blocks over {} points for an instance with r={}, n={n}",
            part.parts(),
            part.n(),
            inst.r()
        )));
    }
    if cert.alpha.len() != n || cert.z.len() != d {
        return Err(Violation::Shape(format!(
            "alpha has {} entries and z has {} coordinates",
            cert.alpha.len(),
            cert.z.len()
        )));
    }
    for (index, a) in cert.alpha.iter().enumerate() {
        if a.is_negative() {
            return Err(Violation::Negative { index });
        }
        if require_strict && a.is_zero() {
            return Err(Violation::NotStrict { index });
        }
    }
    for (block, members) in part.blocks().iter().enumerate() {
        let sum: Rat = members.iter().map(|&i| &cert.alpha[i]).sum();
        if !sum.is_one() {
            return Err(Violation::BlockSum { block });
        }
        for coord in 0..d {
            let combo: Rat = members
                .iter()
                .map(|&i| &cert.alpha[i] * &inst.point(i)[coord])
                .sum();
            if combo != cert.z[coord] {
                return Err(Violation::BlockPoint { block, coord });
            }
        }
    }
    Ok(())
}
