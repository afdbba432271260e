//! Moving the points.
//!
//! A stage moves one point `a_m` along the segment to its target `b_m` while
//! keeping a partition whose system has strictly positive coefficients. Only
//! the column of `a_m` depends on `t`, so every `det M_i(t)` is affine in
//! `t` and the first time a coefficient vanishes is the smallest root of
//! those affine functions. At that time the vanishing point `a_h` is moved
//! to another block chosen from the cofactor expansion of the matrix whose
//! column `h` carries `(a_h, 1)` in every block.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{self, affine_at, lerp, ratio, sign, Rat, RatMatrix};
use crate::model::{
    build_system, solve_partition, tverberg_number, Certificate, Instance, ModelError, Partition,
    Point,
};
use crate::noise::{self, NoiseRng};

/// Ways the input can betray that it is not in general position. Each one is
/// resolved by the solver with a fresh perturbation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Degeneracy {
    #[error("points {indices:?} reach zero coefficient simultaneously at t = {t}")]
    TiedRoots { t: Rat, indices: Vec<usize> },
    #[error("system is singular at event time t = {t}")]
    SingularAtEvent { t: Rat },
    #[error("coefficient of point {h} vanishes exactly at the stage endpoint")]
    EventAtEndpoint { h: usize },
    #[error("no block qualifies for the pivot of point {h}")]
    NoPivotCandidate { h: usize },
    #[error("pivot cap of {cap} exceeded")]
    PivotCapExceeded { cap: usize },
    #[error("partition is not strictly feasible at t = {t}")]
    NotRegular { t: Rat },
    #[error("singular system along the path")]
    SingularSystem,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error(transparent)]
    Degenerate(#[from] Degeneracy),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("initial configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(ModelError),
}

impl From<ModelError> for PathError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Singular => PathError::Degenerate(Degeneracy::SingularSystem),
            other => PathError::Model(other),
        }
    }
}

impl From<arith::ArithError> for PathError {
    fn from(e: arith::ArithError) -> Self {
        ModelError::from(e).into()
    }
}

/// Default per-stage pivot budget: `10 n r`.
pub fn default_pivot_cap(d: usize, r: usize) -> usize {
    10 * tverberg_number(d, r) * r
}

/// Starting set: `r - 1` rotated, perturbed simplices around a perturbed
/// origin, which lies inside each of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialConfig {
    pub d: usize,
    pub r: usize,
    pub points: Vec<Point>,
    pub partition: Partition,
    /// Perturbation radius that was actually used (after any halving).
    pub delta: Rat,
    pub certificate: Certificate,
}

impl InitialConfig {
    pub fn instance(&self) -> Instance {
        Instance::from_parts_unchecked(self.d, self.r, self.points.clone())
    }
}

const SIMPLEX_GRID: f64 = 65536.0;
const INITIAL_RETRIES: usize = 32;

/// Rational approximation of a regular simplex inscribed in the unit sphere
/// of `R^d`, recentred so its centroid is exactly the origin.
pub fn base_simplex(d: usize) -> Vec<Point> {
    // Gram matrix of a regular simplex: 1 on the diagonal, -1/d elsewhere.
    // The first d vertices are the rows of its Cholesky factor.
    let gram = |i: usize, j: usize| if i == j { 1.0 } else { -1.0 / d as f64 };
    let mut l = vec![vec![0.0f64; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (gram(i, i) - s).sqrt();
            } else {
                l[i][j] = (gram(i, j) - s) / l[j][j];
            }
        }
    }
    let mut vertices: Vec<Point> = l
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| ratio((x * SIMPLEX_GRID).round() as i64, SIMPLEX_GRID as i64))
                .collect()
        })
        .collect();
    let last: Point = (0..d)
        .map(|k| -vertices.iter().map(|v| &v[k]).sum::<Rat>())
        .collect();
    vertices.push(last);
    vertices
}

/// Random rational rotation by the Cayley transform `(I - S)(I + S)^-1` of a
/// skew-symmetric `S`; exactly orthogonal.
fn random_rotation(d: usize, rng: &mut NoiseRng) -> RatMatrix {
    use rand::Rng;
    let mut skew = RatMatrix::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let s = ratio(rng.random_range(-16i64..=16), 8);
            skew.set(i, j, s.clone());
            skew.set(j, i, -s);
        }
    }
    let mut plus = RatMatrix::identity(d);
    let mut minus = RatMatrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            plus.set(i, j, plus.get(i, j) + skew.get(i, j));
            minus.set(i, j, minus.get(i, j) - skew.get(i, j));
        }
    }
    let mut q = RatMatrix::zeros(d, d);
    for c in 0..d {
        let mut e = vec![Rat::zero(); d];
        e[c] = Rat::one();
        let w = arith::solve_linear(&plus, &e).expect("I + S is invertible for skew S");
        q.set_column(c, &minus.mul_vec(&w).expect("square"));
    }
    q
}

fn initial_partition(d: usize, r: usize) -> Partition {
    let n = tverberg_number(d, r);
    let mut blocks: Vec<Vec<usize>> = (0..r - 1)
        .map(|p| (p * (d + 1)..(p + 1) * (d + 1)).collect())
        .collect();
    blocks.push(vec![n - 1]);
    Partition::new(blocks, n).expect("initial blocks cover 0..n")
}

/// Builds and certifies the starting configuration. Uncertified draws are
/// retried with fresh rotations and half the radius.
pub fn make_initial(
    d: usize,
    r: usize,
    delta: &Rat,
    seed: u64,
) -> Result<InitialConfig, PathError> {
    if d == 0 || r < 2 {
        return Err(PathError::Config(format!(
            "need d >= 1 and r >= 2, got d={d}, r={r}"
        )));
    }
    if delta.is_negative() {
        return Err(PathError::Config(
            "perturbation radius must be non-negative".into(),
        ));
    }
    let simplex = base_simplex(d);
    let partition = initial_partition(d, r);
    let mut rng = noise::rng_for(seed, 0);
    let mut delta = delta.clone();
    for _ in 0..INITIAL_RETRIES {
        let mut points = Vec::with_capacity(tverberg_number(d, r));
        for _ in 0..r - 1 {
            let q = random_rotation(d, &mut rng);
            for v in &simplex {
                let rotated = q.mul_vec(v).expect("square");
                points.push(
                    rotated
                        .into_iter()
                        .map(|x| x + noise::offset(&mut rng, &delta))
                        .collect(),
                );
            }
        }
        points.push((0..d).map(|_| noise::offset(&mut rng, &delta)).collect());

        if let Ok(inst) = Instance::new(d, r, points) {
            if let Ok(cert) = solve_partition(&inst, &partition, None) {
                if cert.strict {
                    let points = inst.points().to_vec();
                    return Ok(InitialConfig {
                        d,
                        r,
                        points,
                        partition,
                        delta,
                        certificate: cert,
                    });
                }
            }
        }
        delta /= Rat::from_integer(2.into());
    }
    Err(PathError::Config(format!(
        "no certified configuration after {INITIAL_RETRIES} attempts"
    )))
}

/// A regular point on the path of stage `moving`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathState {
    /// Stage-local time in `[0, 1]`.
    pub t: Rat,
    pub moving: usize,
    /// Instance with the moving point at its stage start `a_m(0)`.
    pub base: Instance,
    pub target: Point,
    pub partition: Partition,
    pub pivot_count: usize,
}

impl PathState {
    /// State at the start of the stage moving point `moving` to `target`.
    pub fn begin(base: Instance, partition: Partition, moving: usize, target: Point) -> Self {
        Self {
            t: Rat::zero(),
            moving,
            base,
            target,
            partition,
            pivot_count: 0,
        }
    }

    pub fn position_at(&self, t: &Rat) -> Point {
        self.base
            .point(self.moving)
            .iter()
            .zip(&self.target)
            .map(|(a, b)| lerp(a, b, t))
            .collect()
    }

    pub fn inst_at(&self, t: &Rat) -> Instance {
        self.base.with_point(self.moving, self.position_at(t))
    }

    pub fn inst_at_t(&self) -> Instance {
        self.inst_at(&self.t)
    }

    /// Solves the current partition at time `t`.
    pub fn certificate_at(&self, t: &Rat) -> Result<Certificate, PathError> {
        let pos = self.position_at(t);
        Ok(solve_partition(
            &self.base,
            &self.partition,
            Some((self.moving, &pos)),
        )?)
    }
}

/// Root of the affine function with endpoint values `(f0, f1)`, if any.
pub fn crossing_time(ends: &(Rat, Rat)) -> Option<Rat> {
    let (f0, f1) = ends;
    (f0 != f1).then(|| f0 / (f0 - f1))
}

/// Endpoint determinants for one stage and one partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageDeterminants {
    /// `(det M(0), det M(1))`.
    pub system: (Rat, Rat),
    /// `(det M_i(0), det M_i(1))` for every point `i`.
    pub replaced: Vec<(Rat, Rat)>,
}

pub fn stage_determinants(state: &PathState) -> Result<StageDeterminants, PathError> {
    let m = state.moving;
    let sys0 = build_system(&state.base, &state.partition, None)?;
    let sys1 = build_system(&state.base, &state.partition, Some((m, &state.target)))?;
    let system = arith::det_affine_in_t(sys0.matrix(), sys1.matrix())?;
    let replaced = (0..state.base.n())
        .map(|i| {
            arith::det_affine_in_t(
                &sys0.replaced_column_matrix(i),
                &sys1.replaced_column_matrix(i),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StageDeterminants { system, replaced })
}

/// First time after `state.t` where a coefficient vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularEvent {
    pub t1: Rat,
    pub h: usize,
    pub q: usize,
    /// `det M(t1)`, nonzero.
    pub det_system: Rat,
}

/// Smallest root in `(state.t, 1]` of the affine functions `det M_i(t)`.
pub fn next_event(state: &PathState) -> Result<Option<SingularEvent>, PathError> {
    let dets = stage_determinants(state)?;
    let mut best: Option<(Rat, Vec<usize>)> = None;
    for (i, ends) in dets.replaced.iter().enumerate() {
        let Some(t) = crossing_time(ends) else {
            continue;
        };
        if t <= state.t || t > Rat::one() {
            continue;
        }
        match &mut best {
            Some((bt, idx)) if *bt == t => idx.push(i),
            Some((bt, _)) if *bt < t => {}
            _ => best = Some((t, vec![i])),
        }
    }
    let Some((t1, indices)) = best else {
        return Ok(None);
    };
    if indices.len() > 1 {
        return Err(Degeneracy::TiedRoots { t: t1, indices }.into());
    }
    let det_system = affine_at(&dets.system, &t1);
    if det_system.is_zero() {
        return Err(Degeneracy::SingularAtEvent { t: t1 }.into());
    }
    let h = indices[0];
    Ok(Some(SingularEvent {
        q: state.partition.block_of(h),
        t1,
        h,
        det_system,
    }))
}

/// Result of repairing the partition at a singular event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pivot {
    pub partition: Partition,
    pub j: usize,
    /// `det M(t1)` under the old partition.
    pub det_system: Rat,
    /// `(p, det Mbar^p(t1))` for every block `p != q`, including full blocks.
    pub contributions: Vec<(usize, Rat)>,
}

/// Moves `a_h` out of its block into the smallest block `j` with at most `d`
/// points whose expansion term has sign opposite to `det M(t1)`.
pub fn pivot(state: &PathState, event: &SingularEvent) -> Result<Pivot, PathError> {
    let d = state.base.d();
    let (h, q) = (event.h, event.q);
    let part = &state.partition;
    if part.block_of(h) != q {
        return Err(PathError::Invariant(format!(
            "point {h} is not in block {q}"
        )));
    }
    if part.block(q).len() < 2 {
        return Err(PathError::Invariant(format!(
            "vanishing point {h} is a singleton, whose coefficient is identically 1"
        )));
    }
    let pos = state.position_at(&event.t1);
    let sys = build_system(&state.base, part, Some((state.moving, &pos)))?;
    let det_system = sys.det()?;
    if det_system != event.det_system {
        return Err(PathError::Invariant(
            "det M(t1) disagrees with its affine form".into(),
        ));
    }
    let a_h = if h == state.moving {
        pos.clone()
    } else {
        state.base.point(h).clone()
    };
    let col_h = sys.column_of_point(h);

    let mut contributions = Vec::with_capacity(part.parts() - 1);
    for p in (0..part.parts()).filter(|&p| p != q) {
        let bar = sys.matrix().with_column(col_h, &sys.block_column(p, &a_h));
        let value = arith::det(&bar)?;
        if part.block(p).len() == d + 1 && !value.is_zero() {
            return Err(PathError::Invariant(format!(
                "full block {p} contributes {value} to the expansion"
            )));
        }
        contributions.push((p, value));
    }
    let total: Rat = &det_system + contributions.iter().map(|(_, v)| v).sum::<Rat>();
    if !total.is_zero() {
        return Err(PathError::Invariant(format!(
            "cofactor expansion along column {h} sums to {total}, expected 0"
        )));
    }

    let want = -sign(&det_system);
    let j = contributions
        .iter()
        .find(|(p, v)| part.block(*p).len() <= d && sign(v) == want)
        .map(|(p, _)| *p)
        .ok_or(Degeneracy::NoPivotCandidate { h })?;
    let partition = part.move_point(h, j);
    debug_assert!(partition.is_proper(d));
    Ok(Pivot {
        partition,
        j,
        det_system,
        contributions,
    })
}

/// One singular event and the pivot that resolved it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRecord {
    pub stage: usize,
    pub t1: Rat,
    pub h: usize,
    pub q: usize,
    pub j: usize,
    /// Pivots so far in this stage, this one included.
    pub pivot_count: usize,
    pub det_system: Rat,
    pub contributions: Vec<(usize, Rat)>,
}

/// Follows the path of `state.moving` to `t = 1`, pivoting at every event.
/// Each pivot is checked by solving at the midpoint of the next interval.
pub fn run_stage(
    mut state: PathState,
    pivot_cap: usize,
    trace: &mut Vec<EventRecord>,
) -> Result<PathState, PathError> {
    let mut upcoming = next_event(&state)?;
    while let Some(event) = upcoming {
        if event.t1.is_one() {
            return Err(Degeneracy::EventAtEndpoint { h: event.h }.into());
        }
        if state.pivot_count >= pivot_cap {
            return Err(Degeneracy::PivotCapExceeded { cap: pivot_cap }.into());
        }
        let pv = pivot(&state, &event)?;
        state.partition = pv.partition;
        state.t = event.t1.clone();
        state.pivot_count += 1;

        upcoming = next_event(&state)?;
        let t_next = upcoming.as_ref().map_or_else(Rat::one, |e| e.t1.clone());
        let t_mid = (&state.t + &t_next) / Rat::from_integer(2.into());
        if !state.certificate_at(&t_mid)?.strict {
            return Err(Degeneracy::NotRegular { t: t_mid }.into());
        }
        trace.push(EventRecord {
            stage: state.moving,
            t1: event.t1,
            h: event.h,
            q: event.q,
            j: pv.j,
            pivot_count: state.pivot_count,
            det_system: pv.det_system,
            contributions: pv.contributions,
        });
    }
    state.t = Rat::one();
    if !state.certificate_at(&state.t)?.strict {
        return Err(Degeneracy::NotRegular { t: Rat::one() }.into());
    }
    Ok(state)
}
