//! Simulation and exact dynamic-programming oracles.

mod collapsed;
mod cursor;

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{self, BoundaryCoefficients, TreeCase};
use crate::tree::{self, BoundaryPoint, TreeVertex};
use crate::walk::TreeWalk;
use crate::{Error, Result};

pub use collapsed::{green_partial, ClassChain, ClassDistribution, GreenPartial, GreenTable, SemiIsotropic, DEFAULT_CLASS_CAP};
pub use cursor::TreeCursor;

/// The random stream for run `index` of a batch seeded with `seed`.
pub fn run_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TrajectoryParams {
    pub steps: usize,
    /// Steps the root confluent must stay fixed.
    pub window: usize,
    /// Required `hor(Z_n) − hor(o ⋏ Z_n)`.
    pub depth_margin: u64,
    pub seed: u64,
}

impl TrajectoryParams {
    pub fn new(steps: usize, window: usize, depth_margin: u64, seed: u64) -> Result<Self> {
        if window == 0 {
            return Err(Error::schema("window", "must be at least 1"));
        }
        if depth_margin == 0 {
            return Err(Error::schema("depth_margin", "must be at least 1"));
        }
        Ok(TrajectoryParams {
            steps,
            window,
            depth_margin,
            seed,
        })
    }
}

impl Default for TrajectoryParams {
    fn default() -> Self {
        TrajectoryParams {
            steps: 10_000,
            window: 50,
            depth_margin: 30,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub n: usize,
    pub hor: i64,
    pub up_root: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub end: TreeVertex,
}

impl Trajectory {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        write_rows(out, &self.points)
    }
}

/// A tree trajectory of `params.steps` steps from `x0`, seeded by `params.seed`.
pub fn simulate(w: &TreeWalk, x0: &TreeVertex, params: &TrajectoryParams) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut cursor = TreeCursor::new(x0, w.q());
    let mut points = Vec::with_capacity(params.steps + 1);
    for n in 0..=params.steps {
        if n > 0 {
            cursor.step(w, &mut rng);
        }
        points.push(TrajectoryPoint {
            n,
            hor: cursor.hor(),
            up_root: cursor.up_from_root(),
        });
    }
    Trajectory {
        points,
        end: cursor.to_vertex(),
    }
}

/// The vertices visited by any semi-isotropic walk, `x0` included.
pub fn sample_path<W: SemiIsotropic>(w: &W, x0: &W::Vertex, steps: usize, seed: u64) -> Vec<W::Vertex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = Vec::with_capacity(steps + 1);
    path.push(x0.clone());
    for _ in 0..steps {
        let next = w.sample_step(path.last().expect("path is never empty"), &mut rng);
        path.push(next);
    }
    path
}

/// What a converged run says about `Z_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitSignature {
    /// `up(o, Z_∞)`.
    pub k: u64,
    /// A vertex on the ray to `Z_∞`, `depth_margin` below `o ⋏ Z_∞`.
    pub anchor: TreeVertex,
    pub steps: usize,
}

impl LimitSignature {
    pub fn end(&self) -> BoundaryPoint {
        BoundaryPoint::new(self.anchor.clone())
    }
}

/// Runs until `o ⋏ Z_n` has been fixed for `window` steps with `Z_n` at least
/// `depth_margin` below it.
pub fn boundary_limit<R: rand::Rng + ?Sized>(
    w: &TreeWalk,
    x0: &TreeVertex,
    params: &TrajectoryParams,
    rng: &mut R,
) -> Result<LimitSignature> {
    let mut cursor = TreeCursor::new(x0, w.q());
    let mut confluent = cursor.root_confluent();
    let mut unchanged = 0;
    for n in 1..=params.steps {
        cursor.step(w, rng);
        let c = cursor.root_confluent();
        if c == confluent {
            unchanged += 1;
        } else {
            confluent = c;
            unchanged = 0;
        }
        if unchanged >= params.window && cursor.hor() - c >= params.depth_margin as i64 {
            return Ok(LimitSignature {
                k: (-c) as u64,
                anchor: cursor.vertex_at(c + params.depth_margin as i64),
                steps: n,
            });
        }
    }
    Err(Error::Unconverged { steps: params.steps })
}

/// Counts of `Z_∞` over `bins` events; runs falling in no bin are `missed`,
/// runs that never settled are `unconverged`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinCounts {
    pub runs: u64,
    pub counts: Vec<u64>,
    pub missed: u64,
    pub unconverged: u64,
}

impl BinCounts {
    fn empty(bins: usize) -> Self {
        BinCounts {
            runs: 0,
            counts: vec![0; bins],
            missed: 0,
            unconverged: 0,
        }
    }

    fn merge(mut self, other: BinCounts) -> Self {
        self.runs += other.runs;
        self.missed += other.missed;
        self.unconverged += other.unconverged;
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    /// Frequency of bin `i` among all runs, with its binomial standard error.
    pub fn estimate(&self, i: usize) -> Estimate {
        let n = self.runs as f64;
        let p = self.counts[i] as f64 / n;
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / n).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `a / b` with first-order error propagation.
    pub fn ratio(self, other: Estimate) -> Estimate {
        let value = self.value / other.value;
        let rel = ((self.stderr / self.value).powi(2) + (other.stderr / other.value).powi(2)).sqrt();
        Estimate {
            value,
            stderr: value * rel,
        }
    }

    /// `|value − target|` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.stderr
    }
}

/// Simulates `runs` walks from `x0` (run `i` seeded with `seed + i`) and bins
/// their limits.
pub fn bin_limits(
    w: &TreeWalk,
    x0: &TreeVertex,
    params: &TrajectoryParams,
    runs: u64,
    bins: usize,
    classify: impl Fn(&LimitSignature) -> Option<usize> + Sync,
) -> BinCounts {
    (0..runs)
        .into_par_iter()
        .fold(
            || BinCounts::empty(bins),
            |mut acc, i| {
                acc.runs += 1;
                let mut rng = run_rng(params.seed, i);
                match boundary_limit(w, x0, params, &mut rng) {
                    Ok(sig) => match classify(&sig) {
                        Some(b) => acc.counts[b] += 1,
                        None => acc.missed += 1,
                    },
                    Err(_) => acc.unconverged += 1,
                }
                acc
            },
        )
        .reduce(|| BinCounts::empty(bins), BinCounts::merge)
}

/// A boundary event built from cylinders.
#[derive(Clone, Debug, PartialEq)]
pub enum Cylinder {
    All,
    /// `Ω_k(base) = {ξ : up(base, ξ) = k}`.
    Up { base: TreeVertex, k: u64 },
    /// `Ω_0(y)`: ends whose ray passes through `y`.
    Through(TreeVertex),
    And(Vec<Cylinder>),
}

impl Cylinder {
    /// `Ω_k(o) ∩ Ω_l(x)` for the pair `(k, l)` realised by `xi`.
    pub fn around(x: &TreeVertex, xi: &BoundaryPoint) -> Result<Cylinder> {
        let o = TreeVertex::root();
        Ok(Cylinder::And(vec![
            Cylinder::Up {
                k: tree::up_to_boundary(&o, xi)?,
                base: o,
            },
            Cylinder::Up {
                k: tree::up_to_boundary(x, xi)?,
                base: x.clone(),
            },
        ]))
    }

    pub fn contains(&self, xi: &BoundaryPoint) -> Result<bool> {
        Ok(match self {
            Cylinder::All => true,
            Cylinder::Up { base, k } => tree::up_to_boundary(base, xi)? == *k,
            Cylinder::Through(y) => xi.confluent_level(y)? == y.hor(),
            Cylinder::And(parts) => {
                for part in parts {
                    if !part.contains(xi)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }
}

/// The walk that is actually simulated for harmonic measures, with the
/// factor turning its hitting law from `x` into `ν_x`.
fn simulated_walk(w: &TreeWalk) -> Result<(TreeWalk, TreeCase)> {
    let case = boundary::classify_tree_case(w)?;
    if case == TreeCase::ZeroDrift {
        return Err(Error::Unclassifiable(
            "harmonic measures on the boundary need nonzero drift".into(),
        ));
    }
    Ok((boundary::effective_walk(w, case)?, case))
}

fn prefactor(case: TreeCase, x: &TreeVertex) -> f64 {
    match case {
        TreeCase::NegativeDriftConjugated { c0 } => (c0 * x.hor() as f64).exp(),
        _ => 1.0,
    }
}

/// `ν_x(cylinder)` by simulation.
pub fn estimate_harmonic_measure(
    w: &TreeWalk,
    x: &TreeVertex,
    cylinder: &Cylinder,
    params: &TrajectoryParams,
    runs: u64,
) -> Result<(Estimate, BinCounts)> {
    let (walk, case) = simulated_walk(w)?;
    let counts = bin_limits(&walk, x, params, runs, 1, |sig| {
        cylinder.contains(&sig.end()).ok().and_then(|hit| hit.then_some(0))
    });
    let f = prefactor(case, x);
    let e = counts.estimate(0);
    Ok((
        Estimate {
            value: f * e.value,
            stderr: f * e.stderr,
        },
        counts,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub j: u64,
    pub count: u64,
    pub freq: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    pub runs: u64,
    pub unconverged: u64,
    /// Runs with `k` beyond the last row.
    pub beyond: u64,
    pub rows: Vec<CoefficientRow>,
}

impl CoefficientEstimate {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        write_rows(out, &self.rows)
    }
}

/// Frequencies of `up(o, Z_∞) = j` for `j ≤ j_max`, which estimate the
/// total-mass-one coefficients `a_j`.
pub fn estimate_coefficients(w: &TreeWalk, params: &TrajectoryParams, runs: u64, j_max: u64) -> Result<CoefficientEstimate> {
    let (walk, _) = simulated_walk(w)?;
    let bins = j_max as usize + 1;
    let counts = bin_limits(&walk, &TreeVertex::root(), params, runs, bins, |sig| {
        (sig.k <= j_max).then_some(sig.k as usize)
    });
    let rows = (0..bins)
        .map(|j| {
            let e = counts.estimate(j);
            CoefficientRow {
                j: j as u64,
                count: counts.counts[j],
                freq: e.value,
                stderr: e.stderr,
            }
        })
        .collect();
    Ok(CoefficientEstimate {
        runs,
        unconverged: counts.unconverged,
        beyond: counts.missed,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MartinRow {
    pub n: u64,
    pub k_hat: f64,
    pub target: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartinReport {
    pub n_max: usize,
    pub target: f64,
    pub rows: Vec<MartinRow>,
}

impl MartinReport {
    pub fn final_rel_err(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.rel_err)
    }

    /// Whether each error is no larger than the one before, ignoring moves
    /// below `floor` (once `y_n` passes `x ⋏ ξ` a nearest-neighbour walk gives
    /// the exact kernel and only rounding is left).
    pub fn trends_down(&self, floor: f64) -> bool {
        self.rows.windows(2).all(|p| p[1].rel_err <= p[0].rel_err || p[1].rel_err <= floor)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        write_rows(out, &self.rows)
    }
}

/// `K̂(x, y_n) = G(x, y_n) / G(o, y_n)` along `y_n = geodesic_toward(ξ, n)`,
/// against the closed form `K(x, ξ)`.
pub fn martin_convergence_test(
    w: &TreeWalk,
    coeffs: &BoundaryCoefficients,
    x: &TreeVertex,
    xi: &BoundaryPoint,
    depths: &[u64],
    n_max: usize,
) -> Result<MartinReport> {
    // y_n may still lie above x ⋏ ξ; the target needs an anchor below it
    let deep = xi.deepen((x.hor() - xi.anchor.hor()).max(0) as u64);
    let target = boundary::kernel_at(coeffs, x, &deep)?;
    let o = TreeVertex::root();
    let green = ClassChain::new(w).green_table(n_max)?;
    let rows = depths
        .iter()
        .map(|&n| {
            let y = tree::geodesic_toward(xi, n);
            let gx = green.get(&w.pair_class(x, &y)).sum;
            let go = green.get(&w.pair_class(&o, &y)).sum;
            let k_hat = gx / go;
            MartinRow {
                n,
                k_hat,
                target,
                rel_err: (k_hat - target).abs() / target,
            }
        })
        .collect();
    Ok(MartinReport { n_max, target, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransienceReport {
    pub runs: u64,
    pub steps: usize,
    pub seed: u64,
    /// Mean number of returns to the root within `steps / 2` steps.
    pub half: Estimate,
    /// Mean number of returns within `steps` steps.
    pub full: Estimate,
}

impl TransienceReport {
    /// Whether doubling the horizon moved the return count by less than
    /// `sigmas` combined standard errors.
    pub fn stabilised(&self, sigmas: f64) -> bool {
        let spread = (self.half.stderr.powi(2) + self.full.stderr.powi(2)).sqrt();
        self.full.value - self.half.value <= sigmas * spread.max(1e-12)
    }
}

/// Empirical expected number of returns to the root.
pub fn transience_diagnostic<W: SemiIsotropic + Sync>(w: &W, runs: u64, steps: usize, seed: u64) -> TransienceReport {
    let root = w.root();
    let per_run: Vec<(u64, u64)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = run_rng(seed, i);
            let mut x = root.clone();
            let (mut half, mut full) = (0, 0);
            for n in 1..=steps {
                x = w.sample_step(&x, &mut rng);
                if x == root {
                    full += 1;
                    if n <= steps / 2 {
                        half += 1;
                    }
                }
            }
            (half, full)
        })
        .collect();
    let mean_and_err = |pick: fn(&(u64, u64)) -> u64| {
        let n = per_run.len() as f64;
        let mean = per_run.iter().map(|r| pick(r) as f64).sum::<f64>() / n;
        let var = per_run.iter().map(|r| (pick(r) as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Estimate {
            value: mean,
            stderr: (var / n).sqrt(),
        }
    };
    TransienceReport {
        runs,
        steps,
        seed,
        half: mean_and_err(|r| r.0),
        full: mean_and_err(|r| r.1),
    }
}

fn write_rows<T: Serialize>(out: impl Write, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes `rows` as CSV to `path`.
pub fn write_csv_file<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    write_rows(std::fs::File::create(path)?, rows)
}
