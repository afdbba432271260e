//! Top-level driver: perturb the input into general position, grow a
//! Tverberg partition from the initial configuration by moving one point per
//! stage, then certify the final partition against the original points.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::Rat;
use crate::model::{
    solve_partition, verify_certificate, Certificate, Instance, ModelError, Partition, Point,
};
use crate::noise;
use crate::pathfollow::{
    default_pivot_cap, make_initial, run_stage, EventRecord, InitialConfig, PathError, PathState,
};

/// Radius of the noise added to the starting simplices.
fn initial_delta() -> Rat {
    Rat::new(1.into(), 16.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Input perturbation radius is `extent / 2^perturb_exponent`.
    pub perturb_exponent: u32,
    pub max_restarts: usize,
    pub rng_seed: u64,
    /// Per-stage pivot budget; `None` selects `10 n r`.
    pub pivot_cap: Option<usize>,
    pub certify_original: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            perturb_exponent: 40,
            max_restarts: 5,
            rng_seed: 0,
            pivot_cap: None,
            certify_original: true,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertifiedFor {
    Original,
    Perturbed,
}

impl fmt::Display for CertifiedFor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertifiedFor::Original => "original",
            CertifiedFor::Perturbed => "perturbed",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Pivots in each stage of the returned attempt.
    pub pivots_per_stage: Vec<usize>,
    pub restarts: usize,
    /// Why each discarded attempt was discarded.
    pub restart_reasons: Vec<String>,
}

impl SolveStats {
    pub fn total_pivots(&self) -> usize {
        self.pivots_per_stage.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    /// Canonical form (blocks ordered by smallest index).
    pub partition: Partition,
    pub certificate: Certificate,
    pub certified_for: CertifiedFor,
    pub perturbation_used: Rat,
    /// Exact perturbed targets of the returned attempt.
    pub perturbed_points: Vec<Point>,
    pub initial: InitialConfig,
    /// Events of the returned attempt, block labels as used during the run.
    pub trace: Vec<EventRecord>,
    pub stats: SolveStats,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("no certificate after {attempts} attempts; last failure: {last}")]
    Exhausted { attempts: usize, last: String },
}

/// Largest coordinate range over all axes.
fn extent(inst: &Instance) -> Rat {
    (0..inst.d())
        .map(|k| {
            let coords = inst.points().iter().map(|p| &p[k]);
            let lo = coords.clone().min().expect("non-empty");
            let hi = coords.max().expect("non-empty");
            hi - lo
        })
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Adds an independent uniform rational in `[-delta, delta]` to every
/// coordinate.
pub fn perturb(inst: &Instance, delta: &Rat, seed: u64) -> Instance {
    let mut rng = noise::rng_for(seed, 1);
    let points = inst
        .points()
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| x + noise::offset(&mut rng, delta))
                .collect()
        })
        .collect();
    Instance::from_parts_unchecked(inst.d(), inst.r(), points)
}

fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

struct Run {
    partition: Partition,
    certificate: Certificate,
    perturbed: Instance,
    initial: InitialConfig,
    trace: Vec<EventRecord>,
    pivots_per_stage: Vec<usize>,
}

/// Moves every point of the initial configuration onto its target.
fn follow(targets: &Instance, seed: u64, pivot_cap: usize) -> Result<Run, PathError> {
    let initial = make_initial(targets.d(), targets.r(), &initial_delta(), seed)?;
    let mut base = initial.instance();
    let mut partition = initial.partition.clone();
    let mut trace = Vec::new();
    let mut pivots_per_stage = Vec::with_capacity(targets.n());
    for m in 0..targets.n() {
        let state = PathState::begin(base, partition, m, targets.point(m).clone());
        let done = run_stage(state, pivot_cap, &mut trace)?;
        pivots_per_stage.push(done.pivot_count);
        base = done.inst_at_t();
        partition = done.partition;
    }
    debug_assert_eq!(&base, targets);
    let certificate = solve_partition(targets, &partition, None)?;
    Ok(Run {
        partition,
        certificate,
        perturbed: base,
        initial,
        trace,
        pivots_per_stage,
    })
}

/// Certificate on the original points, if the final partition admits one.
fn certify_on(inst: &Instance, part: &Partition) -> Option<Certificate> {
    let cert = solve_partition(inst, part, None).ok()?;
    cert.alpha.iter().all(|a| !a.is_negative()).then_some(cert)
}

/// Computes a Tverberg partition of `inst`. The returned certificate has
/// been verified exactly against the point set named by `certified_for`.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    if cfg.perturb_exponent == 0 || cfg.max_restarts == 0 {
        return Err(SolveError::Input(
            "perturb_exponent and max_restarts must be at least 1".into(),
        ));
    }
    let pivot_cap = cfg
        .pivot_cap
        .unwrap_or_else(|| default_pivot_cap(inst.d(), inst.r()));
    let mut delta =
        extent(inst) / Rat::from_integer(num_bigint::BigInt::one() << cfg.perturb_exponent);
    let mut reasons: Vec<String> = Vec::new();
    let mut fallback: Option<SolveResult> = None;

    for attempt in 0..=cfg.max_restarts {
        let seed = attempt_seed(cfg.rng_seed, attempt);
        let targets = perturb(inst, &delta, seed);
        let run = match follow(&targets, seed, pivot_cap) {
            Ok(run) => run,
            Err(PathError::Degenerate(why)) => {
                reasons.push(why.to_string());
                delta /= Rat::from_integer(2.into());
                continue;
            }
            Err(e) => return Err(SolveError::Internal(e.to_string())),
        };
        if let Err(v) = verify_certificate(&run.perturbed, &run.partition, &run.certificate, true) {
            return Err(SolveError::Internal(format!(
                "perturbed certificate failed verification: {v}"
            )));
        }
        let stats = SolveStats {
            pivots_per_stage: run.pivots_per_stage,
            restarts: attempt,
            restart_reasons: reasons.clone(),
        };
        let mut result = SolveResult {
            partition: run.partition.canonical(),
            certificate: run.certificate,
            certified_for: CertifiedFor::Perturbed,
            perturbation_used: delta.clone(),
            perturbed_points: run.perturbed.points().to_vec(),
            initial: run.initial,
            trace: run.trace,
            stats,
        };
        if !cfg.certify_original {
            return Ok(result);
        }
        if let Some(cert) = certify_on(inst, &run.partition) {
            if let Err(v) = verify_certificate(inst, &result.partition, &cert, false) {
                return Err(SolveError::Internal(format!(
                    "original certificate failed verification: {v}"
                )));
            }
            result.certificate = cert;
            result.certified_for = CertifiedFor::Original;
            return Ok(result);
        }
        reasons.push("final partition does not certify on the original points".into());
        fallback = Some(result);
        delta /= Rat::from_integer(2.into());
    }

    match fallback {
        Some(mut result) => {
            result.stats.restart_reasons = reasons;
            result.stats.restarts = cfg.max_restarts;
            Ok(result)
        }
        None => Err(SolveError::Exhausted {
            attempts: cfg.max_restarts + 1,
            last: reasons.pop().unwrap_or_default(),
        }),
    }
}

impl From<ModelError> for SolveError {
    fn from(e: ModelError) -> Self {
        SolveError::Input(e.to_string())
    }
}
