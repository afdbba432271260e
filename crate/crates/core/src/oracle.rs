//! Brute-force reference: try every proper partition.

use num_traits::Signed;
use thiserror::Error;

use crate::model::{solve_partition, Certificate, Instance, ModelError, Partition};

/// Refuse to enumerate more proper partitions than this.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} proper partitions exceed the enumeration limit of {ENUMERATION_LIMIT}")]
    TooLarge { count: u128 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    /// Partitions (canonical form) that admit a certificate, in enumeration
    /// order.
    pub valid_partitions: Vec<(Partition, Certificate)>,
    pub total_proper_partitions: u128,
    /// Proper partitions whose system was singular.
    pub singular: usize,
}

impl OracleReport {
    pub fn contains(&self, part: &Partition) -> bool {
        let canonical = part.canonical();
        self.valid_partitions.iter().any(|(p, _)| *p == canonical)
    }

    pub fn certificate_for(&self, part: &Partition) -> Option<&Certificate> {
        let canonical = part.canonical();
        self.valid_partitions
            .iter()
            .find(|(p, _)| *p == canonical)
            .map(|(_, c)| c)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of partitions of an `n`-set into exactly `parts` unlabeled blocks
/// of sizes `1..=max_block`.
pub fn count_proper_partitions(n: usize, parts: usize, max_block: usize) -> u128 {
    // ways[m][k]: partitions of an m-set into k blocks. Condition on the
    // size of the block holding the first element.
    let mut ways = vec![vec![0u128; parts + 1]; n + 1];
    ways[0][0] = 1;
    for m in 1..=n {
        for k in 1..=parts {
            ways[m][k] = (1..=max_block.min(m))
                .map(|s| binomial(m - 1, s - 1).saturating_mul(ways[m - s][k - 1]))
                .fold(0u128, u128::saturating_add);
        }
    }
    ways[n][parts]
}

/// Visits every partition of `0..n` into exactly `parts` blocks of size at
/// most `max_block`, each once, blocks ordered by smallest element.
pub fn for_each_proper_partition(
    n: usize,
    parts: usize,
    max_block: usize,
    mut visit: impl FnMut(&[Vec<usize>]),
) {
    fn go(
        i: usize,
        n: usize,
        parts: usize,
        max_block: usize,
        blocks: &mut Vec<Vec<usize>>,
        visit: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        if n - i < parts - blocks.len() {
            return;
        }
        if i == n {
            visit(blocks);
            return;
        }
        for b in 0..blocks.len() {
            if blocks[b].len() < max_block {
                blocks[b].push(i);
                go(i + 1, n, parts, max_block, blocks, visit);
                blocks[b].pop();
            }
        }
        if blocks.len() < parts {
            blocks.push(vec![i]);
            go(i + 1, n, parts, max_block, blocks, visit);
            blocks.pop();
        }
    }
    if parts == 0 || parts > n {
        return;
    }
    go(
        0,
        n,
        parts,
        max_block,
        &mut Vec::with_capacity(parts),
        &mut visit,
    );
}

/// Solves the system of every proper partition and keeps those with
/// non-negative (or, with `strict`, positive) coefficients.
pub fn enumerate_tverberg(inst: &Instance, strict: bool) -> Result<OracleReport, OracleError> {
    let (n, r, d) = (inst.n(), inst.r(), inst.d());
    let count = count_proper_partitions(n, r, d + 1);
    if count > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge { count });
    }
    let mut valid = Vec::new();
    let mut singular = 0;
    let mut failure = None;
    for_each_proper_partition(n, r, d + 1, |blocks| {
        if failure.is_some() {
            return;
        }
        let part = Partition::new(blocks.to_vec(), n).expect("enumeration yields partitions");
        match solve_partition(inst, &part, None) {
            Ok(cert) => {
                let ok = if strict {
                    cert.strict
                } else {
                    cert.alpha.iter().all(|a| !a.is_negative())
                };
                if ok {
                    valid.push((part, cert));
                }
            }
            Err(ModelError::Singular) => singular += 1,
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(OracleReport {
        valid_partitions: valid,
        total_proper_partitions: count,
        singular,
    })
}
