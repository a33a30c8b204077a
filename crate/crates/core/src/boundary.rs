//! Invariant boundary measures, the kernels `K(·, ξ)`, and the classification
//! of minimal harmonic functions on trees and on `DL(q, r)`.
//!
//! The coefficients `a_j = ν(Ω_j)` solve an infinite linear system. It is cut
//! at `J` and closed by extrapolating the tail: geometrically with the decay
//! rate `e^{c}` of the negative root of `φ(c) = 1` when the total mass is
//! finite, linearly when the drift vanishes. Before solving, `a_j` is
//! rescaled by that decay rate so that small coefficients keep full relative
//! precision.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dl::{self, DLVertex, Side};
use crate::error::{Error, Result};
use crate::tree::{self, BoundaryPoint, TreeVertex};
use crate::walk::{QuadrupleMeasure, TreeWalk, ZWalk, DERIVED_MASS_TOL};

pub const DEFAULT_TRUNCATION: usize = 200;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-8;
pub const DEFAULT_EXACT_TOL: f64 = 1e-10;

/// The three cases of the tree classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TreeCase {
    PositiveDrift,
    ZeroDrift,
    /// Negative drift with `c₀ > 0`, `φ(c₀) = 1`; coefficients belong to `P♯`.
    NegativeDriftConjugated { c0: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    TotalMassOne,
    AZeroOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// SVD least-squares solve of the truncated system.
    Direct,
    /// Damped fixed-point sweeps `a ← (a + F(a))/2`.
    Power,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolverConfig {
    pub truncation: usize,
    pub tol: f64,
    pub method: SolveMethod,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            truncation: DEFAULT_TRUNCATION,
            tol: DEFAULT_SOLVER_TOL,
            method: SolveMethod::Direct,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCoefficients {
    pub q: u32,
    pub a: Vec<f64>,
    pub case: TreeCase,
    pub normalization: Normalization,
    /// Largest relative residual of the equations that do not touch the tail.
    pub residual: f64,
    pub iterations: usize,
}

impl BoundaryCoefficients {
    pub fn truncation(&self) -> usize {
        self.a.len() - 1
    }

    pub fn get(&self, j: u64) -> Result<f64> {
        self.a.get(j as usize).copied().ok_or(Error::TruncationExceeded {
            index: j,
            truncation: self.truncation(),
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j", "a_j"])?;
        for (j, a) in self.a.iter().enumerate() {
            w.write_record([j.to_string(), format!("{a:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn classify_tree_case(w: &TreeWalk) -> Result<TreeCase> {
    let z = w.z_walk();
    let alpha = z.drift();
    if z.has_zero_drift() {
        return Ok(TreeCase::ZeroDrift);
    }
    if alpha > 0.0 {
        return Ok(TreeCase::PositiveDrift);
    }
    match z.find_c0(DERIVED_MASS_TOL) {
        Ok(Some(c0)) if c0 > 0.0 => Ok(TreeCase::NegativeDriftConjugated { c0 }),
        Ok(_) | Err(Error::NoBracket { .. }) => Err(Error::Unclassifiable(format!(
            "drift {alpha} < 0 and phi(c) = 1 has no positive root"
        ))),
        Err(e) => Err(e),
    }
}

/// The walk whose invariant measure gives the coefficients in `case`.
pub fn effective_walk(w: &TreeWalk, case: TreeCase) -> Result<TreeWalk> {
    match case {
        TreeCase::NegativeDriftConjugated { c0 } => w.conjugate(c0),
        _ => Ok(w.clone()),
    }
}

/// A linear form `Σ coeff · a_index`.
type Row = Vec<(usize, f64)>;

/// Right-hand sides of the invariance equations for `a_0, …, a_J`, in the
/// unknowns `a_0, a_1, …` (indices may exceed `J`).
fn equation_rows(w: &TreeWalk, truncation: usize) -> Vec<Row> {
    let q = w.q() as f64;
    let mut rows = Vec::with_capacity(truncation + 1);
    let mut row0 = Row::new();
    for ((k, r), mu) in w.classes() {
        let (k, r) = (k as usize, r as usize);
        if k >= 1 && r >= 1 {
            row0.push((r, mu / ((q - 1.0) * q.powi(k as i32 - 1))));
        } else if k >= 1 {
            row0.push((0, mu / q.powi(k as i32)));
        } else {
            row0.extend((0..=r).map(|i| (i, mu)));
        }
    }
    rows.push(row0);
    for j in 1..=truncation {
        let mut row = Row::new();
        for ((k, r), mu) in w.classes() {
            let (k, r) = (k as usize, r as usize);
            if k < j {
                row.push((j + r - k, mu));
            } else if k > j && r >= 1 {
                row.push((r, mu / q.powi((k - j) as i32)));
            }
            if k >= j && r == 0 {
                row.push((0, (q - 1.0) / q * mu / q.powi((k - j) as i32)));
            }
            if k == j && r >= 1 {
                row.extend((0..r).map(|i| (i, mu)));
                row.push((r, (q - 2.0) / (q - 1.0) * mu));
            }
        }
        rows.push(row);
    }
    rows
}

#[derive(Clone, Copy, Debug)]
enum Tail {
    /// `a_{J+i} = ρ^i a_J`
    Geometric(f64),
    /// `a_{J+i} = a_J + i (a_J − a_{J−1})`
    Linear,
}

impl Tail {
    /// Expresses `a_index` through `a_0, …, a_J`.
    fn expand(self, index: usize, truncation: usize) -> Vec<(usize, f64)> {
        if index <= truncation {
            return vec![(index, 1.0)];
        }
        let i = (index - truncation) as f64;
        match self {
            Tail::Geometric(rho) => vec![(truncation, rho.powf(i))],
            Tail::Linear => vec![(truncation, 1.0 + i), (truncation - 1, -i)],
        }
    }

    /// `Σ_{i ≥ 1} a_{J+i}` as a multiple of `a_J`, if finite.
    fn tail_mass_factor(self) -> f64 {
        match self {
            Tail::Geometric(rho) => rho / (1.0 - rho),
            Tail::Linear => f64::INFINITY,
        }
    }
}

/// Solves for `a_0, …, a_J` with residuals checked against `config.tol`.
pub fn solve_coefficients(w: &TreeWalk, config: &SolverConfig) -> Result<BoundaryCoefficients> {
    let case = classify_tree_case(w)?;
    solve_for_case(w, case, config)
}

pub fn solve_for_case(w: &TreeWalk, case: TreeCase, config: &SolverConfig) -> Result<BoundaryCoefficients> {
    let eff = effective_walk(w, case)?;
    let n = config.truncation;
    let radius = eff.radius() as usize;
    if n < 2 * radius + 2 {
        return Err(Error::TruncationExceeded {
            index: (2 * radius + 2) as u64,
            truncation: n,
        });
    }
    let (tail, normalization) = match case {
        TreeCase::ZeroDrift => (Tail::Linear, Normalization::AZeroOne),
        _ => {
            // decay rate of the finite-mass solution
            let rho = match eff.z_walk().find_c0(DERIVED_MASS_TOL) {
                Ok(Some(c)) if c < 0.0 => c.exp(),
                _ => 0.0,
            };
            (Tail::Geometric(rho), Normalization::TotalMassOne)
        }
    };
    let scale_rate = match tail {
        Tail::Geometric(rho) if rho > 0.0 => rho,
        _ => 1.0,
    };
    let scale: Vec<f64> = (0..=n).map(|j| scale_rate.powi(j as i32)).collect();

    // rows of C in the scaled unknowns b_j = a_j / scale_j: b_j = Σ C_ji b_i
    let rows = equation_rows(&eff, n);
    let mut scaled: Vec<Row> = Vec::with_capacity(n + 1);
    for (j, row) in rows.iter().enumerate() {
        let mut out = Row::new();
        for &(idx, c) in row {
            for (i, f) in tail.expand(idx, n) {
                out.push((i, c * f * scale[i] / scale[j]));
            }
        }
        scaled.push(out);
    }
    // normalisation functional in the scaled unknowns
    let mut norm = vec![0.0; n + 1];
    match normalization {
        Normalization::AZeroOne => norm[0] = 1.0,
        Normalization::TotalMassOne => {
            for (j, s) in scale.iter().enumerate() {
                norm[j] = *s;
            }
            norm[n] += scale[n] * tail.tail_mass_factor();
        }
    }

    let (b, iterations) = match config.method {
        SolveMethod::Direct => (solve_direct(&scaled, &norm)?, 1),
        SolveMethod::Power => power_iterate(&scaled, &norm, config)?,
    };
    // pin the normalisation exactly rather than to solver precision
    let total = match normalization {
        Normalization::AZeroOne => b[0],
        Normalization::TotalMassOne => b.iter().zip(&norm).map(|(b, w)| b * w).sum(),
    };
    let a: Vec<f64> = b.iter().zip(&scale).map(|(b, s)| b / total * s).collect();

    let residual = relative_residual(&rows, &a, n.saturating_sub(radius));
    if !(residual < config.tol) || a.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NoConvergence { iterations, residual });
    }
    Ok(BoundaryCoefficients {
        q: w.q(),
        a,
        case,
        normalization,
        residual,
        iterations,
    })
}

fn solve_direct(rows: &[Row], norm: &[f64]) -> Result<Vec<f64>> {
    let n = norm.len();
    // All J+1 equations plus the normalisation; the system is consistent, so
    // the least-squares solution solves it.
    let mut m = DMatrix::<f64>::zeros(n + 1, n);
    for (j, row) in rows.iter().enumerate() {
        m[(j, j)] += 1.0;
        for &(i, c) in row {
            m[(j, i)] -= c;
        }
    }
    for (i, &v) in norm.iter().enumerate() {
        m[(n, i)] = v;
    }
    let mut rhs = DVector::<f64>::zeros(n + 1);
    rhs[n] = 1.0;
    let sol = m
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|_| Error::NoConvergence {
            iterations: 0,
            residual: f64::INFINITY,
        })?;
    Ok(sol.iter().copied().collect())
}

fn power_iterate(rows: &[Row], norm: &[f64], config: &SolverConfig) -> Result<(Vec<f64>, usize)> {
    let n = norm.len();
    let normalize = |b: &mut Vec<f64>| {
        let s: f64 = b.iter().zip(norm).map(|(x, w)| x * w).sum();
        b.iter_mut().for_each(|x| *x /= s);
    };
    let mut b = vec![1.0; n];
    normalize(&mut b);
    let mut diff = f64::INFINITY;
    for it in 1..=config.max_iterations {
        let mut next: Vec<f64> = rows
            .iter()
            .zip(&b)
            .map(|(row, bj)| 0.5 * (bj + row.iter().map(|&(i, c)| c * b[i]).sum::<f64>()))
            .collect();
        normalize(&mut next);
        let top = next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        diff = next
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / top;
        b = next;
        if diff < 1e-15 {
            return Ok((b, it));
        }
    }
    Err(Error::NoConvergence {
        iterations: config.max_iterations,
        residual: diff,
    })
}

/// `max_{j ≤ upto} |a_j − F_j(a)| / a_j` using only rows within the truncation.
fn relative_residual(rows: &[Row], a: &[f64], upto: usize) -> f64 {
    let mut worst = 0.0f64;
    for (j, row) in rows.iter().enumerate().take(upto + 1) {
        if row.iter().any(|&(i, _)| i >= a.len()) {
            continue;
        }
        let rhs: f64 = row.iter().map(|&(i, c)| c * a[i]).sum();
        worst = worst.max((a[j] - rhs).abs() / a[j]);
    }
    worst
}

/// Residuals of the invariance equations for the walk the coefficients belong to.
pub fn equation_residual(coeffs: &BoundaryCoefficients, w: &TreeWalk) -> Result<f64> {
    let eff = effective_walk(w, coeffs.case)?;
    let rows = equation_rows(&eff, coeffs.truncation());
    Ok(relative_residual(&rows, &coeffs.a, coeffs.truncation()))
}

/// `max |a_j − Σ_n a_{j+n} μ̃(n)| / a_j` over `N < j < J − N`.
pub fn tail_recurrence_residual(coeffs: &BoundaryCoefficients, w: &TreeWalk) -> Result<f64> {
    let eff = effective_walk(w, coeffs.case)?;
    let z = eff.z_walk();
    let big_n = eff.radius() as usize;
    let j_max = coeffs.truncation();
    let mut worst = 0.0f64;
    for j in big_n + 1..j_max.saturating_sub(big_n) {
        let rhs = z.apply(|i| coeffs.a[i as usize], j as i64);
        worst = worst.max((coeffs.a[j] - rhs).abs() / coeffs.a[j]);
    }
    Ok(worst)
}

fn sign(x: i64) -> i32 {
    x.signum() as i32
}

/// The exponent `ε(k, l, m)` of `q/(q−1)` in the kernel.
pub fn epsilon(k: u64, l: u64, m: i64) -> i32 {
    if k == 0 && l >= 1 && (l as i64) <= m {
        return 1;
    }
    if l == 0 && k >= 1 && (k as i64) <= -m {
        return -1;
    }
    sign(k as i64 - l as i64 + m) * sign(k as i64) * sign(l as i64)
}

/// Power of `q/(q−1)` actually carried by the kernel: the ratio of the cone
/// sizes `|T_{k,r}| / |T_{l,r'}|` contributes `[l ≥ 1] − [k ≥ 1]`.
/// Agrees with [`epsilon`] whenever `x ⋏ ξ` and `o ⋏ ξ` coincide.
pub fn kernel_exponent(k: u64, l: u64) -> i32 {
    (l >= 1) as i32 - (k >= 1) as i32
}

/// `K = b(m) (a_l / a_k) q^{k−l+m} (q/(q−1))^{[l≥1]−[k≥1]}`.
pub fn kernel_value(coeffs: &BoundaryCoefficients, k: u64, l: u64, m: i64) -> Result<f64> {
    let (ak, al) = (coeffs.get(k)?, coeffs.get(l)?);
    let q = coeffs.q as f64;
    let b = match coeffs.case {
        TreeCase::NegativeDriftConjugated { c0 } => c0 * m as f64,
        _ => 0.0,
    };
    let log = b + al.ln() - ak.ln()
        + (k as i64 - l as i64 + m) as f64 * q.ln()
        + kernel_exponent(k, l) as f64 * (q / (q - 1.0)).ln();
    Ok(log.exp())
}

/// `K(x, ξ)` with `k = up(o, ξ)`, `l = up(x, ξ)`, `m = hor(x)`.
pub fn kernel_at(coeffs: &BoundaryCoefficients, x: &TreeVertex, xi: &BoundaryPoint) -> Result<f64> {
    let k = tree::up_to_boundary(&TreeVertex::root(), xi)?;
    let l = tree::up_to_boundary(x, xi)?;
    kernel_value(coeffs, k, l, x.hor())
}

/// `ν_x(Ω_0(y))` when `up(y, x) ≥ 1`: the harmonic measure of the ends below `y`.
pub fn cylinder_measure(coeffs: &BoundaryCoefficients, x: &TreeVertex, y: &TreeVertex) -> Result<f64> {
    let (k, r) = (tree::up(x, y), tree::up(y, x));
    if r == 0 {
        return Err(Error::schema("y", "cylinder base must lie strictly below its confluent with x"));
    }
    let factor = match coeffs.case {
        TreeCase::NegativeDriftConjugated { c0 } => (c0 * x.hor() as f64).exp(),
        _ => 1.0,
    };
    Ok(factor * coeffs.get(k)? / tree::cone_size(coeffs.q, k, r))
}

/// The positive `P̃`-harmonic functions on `Z` come from `{c : φ(c) = 1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZHarmonics {
    /// Exponents `c` of the minimal functions `m ↦ e^{cm}`; always contains 0.
    pub exponents: Vec<f64>,
}

impl ZHarmonics {
    pub fn eval(&self, index: usize, m: i64) -> f64 {
        (self.exponents[index] * m as f64).exp()
    }
}

pub fn minimal_z_harmonics(w: &ZWalk) -> Result<ZHarmonics> {
    let mut exponents = vec![0.0];
    match w.find_c0(DERIVED_MASS_TOL) {
        Ok(Some(c0)) => exponents.push(c0),
        Ok(None) | Err(Error::NoBracket { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(ZHarmonics { exponents })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Tree(Side),
    DL,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HarmonicKind {
    TreeKernel {
        side: Side,
        xi: BoundaryPoint,
        coefficients: BoundaryCoefficients,
    },
    /// `e^{c·hor}` of the coordinate on `side`.
    Exponential { side: Side, c: f64 },
    Constant,
    Mixture(Vec<(f64, HarmonicFunction)>),
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicFunction {
    pub kind: HarmonicKind,
    pub domain: Domain,
}

impl HarmonicFunction {
    pub fn tree_kernel(side: Side, xi: BoundaryPoint, coefficients: BoundaryCoefficients) -> Self {
        HarmonicFunction {
            kind: HarmonicKind::TreeKernel { side, xi, coefficients },
            domain: Domain::Tree(side),
        }
    }

    pub fn constant(domain: Domain) -> Self {
        HarmonicFunction {
            kind: HarmonicKind::Constant,
            domain,
        }
    }

    pub fn exponential(side: Side, c: f64, domain: Domain) -> Self {
        HarmonicFunction {
            kind: HarmonicKind::Exponential { side, c },
            domain,
        }
    }

    /// Positive weights only.
    pub fn mixture(parts: Vec<(f64, HarmonicFunction)>, domain: Domain) -> Result<Self> {
        if let Some((w, _)) = parts.iter().find(|(w, _)| !(*w > 0.0)) {
            return Err(Error::schema("mixture", format!("weight {w} is not positive")));
        }
        Ok(HarmonicFunction {
            kind: HarmonicKind::Mixture(parts),
            domain,
        })
    }

    /// Value at a vertex of the tree on `side`.
    pub fn eval_tree(&self, x: &TreeVertex) -> Result<f64> {
        match &self.kind {
            HarmonicKind::TreeKernel { xi, coefficients, .. } => kernel_at(coefficients, x, xi),
            HarmonicKind::Exponential { c, .. } => Ok((c * x.hor() as f64).exp()),
            HarmonicKind::Constant => Ok(1.0),
            HarmonicKind::Mixture(parts) => {
                let mut total = 0.0;
                for (w, h) in parts {
                    total += w * h.eval_tree(x)?;
                }
                Ok(total)
            }
        }
    }

    /// Value at a vertex of `DL`, through the projection the function depends on.
    pub fn eval_dl(&self, x: &DLVertex) -> Result<f64> {
        match &self.kind {
            HarmonicKind::TreeKernel { side, .. } | HarmonicKind::Exponential { side, .. } => {
                self.eval_tree(&dl::project(x, *side))
            }
            HarmonicKind::Constant => Ok(1.0),
            HarmonicKind::Mixture(parts) => {
                let mut total = 0.0;
                for (w, h) in parts {
                    total += w * h.eval_dl(x)?;
                }
                Ok(total)
            }
        }
    }

    /// `h(x₁x₂) = h_side(x_side)`.
    pub fn lift_to_dl(&self) -> HarmonicFunction {
        let kind = match &self.kind {
            HarmonicKind::Mixture(parts) => {
                HarmonicKind::Mixture(parts.iter().map(|(w, h)| (*w, h.lift_to_dl())).collect())
            }
            other => other.clone(),
        };
        HarmonicFunction {
            kind,
            domain: Domain::DL,
        }
    }
}

/// `max_x |Ph(x) − h(x)| / h(x)` over tree vertices.
pub fn harmonicity_error_tree(h: &HarmonicFunction, w: &TreeWalk, points: &[TreeVertex]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        let hx = h.eval_tree(x)?;
        let ph = w.apply(x, |y| h.eval_tree(y))?;
        worst = worst.max((ph - hx).abs() / hx);
    }
    Ok(worst)
}

/// `max_x |Ph(x) − h(x)| / h(x)` over `DL` vertices.
pub fn harmonicity_error_dl(h: &HarmonicFunction, w: &QuadrupleMeasure, points: &[DLVertex]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        let hx = h.eval_dl(x)?;
        let ph = w.apply(x, |y| h.eval_dl(y))?;
        worst = worst.max((ph - hx).abs() / hx);
    }
    Ok(worst)
}

/// One family of minimal harmonic functions.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `x ↦ K_side(x_side, ξ)` for all `ξ ∈ ∂*T`.
    Kernels {
        side: Side,
        tree_case: TreeCase,
        coefficients: BoundaryCoefficients,
    },
    /// The single function `x ↦ e^{c·hor(x_side)}`.
    Exponential { side: Side, c: f64 },
    Constant,
}

impl Family {
    /// The member attached to `ξ`; ignored for single-function families.
    pub fn member(&self, xi: &BoundaryPoint, domain: Domain) -> HarmonicFunction {
        match self {
            Family::Kernels { side, coefficients, .. } => {
                let h = HarmonicFunction::tree_kernel(*side, xi.clone(), coefficients.clone());
                match domain {
                    Domain::DL => h.lift_to_dl(),
                    Domain::Tree(_) => h,
                }
            }
            Family::Exponential { side, c } => HarmonicFunction::exponential(*side, *c, domain),
            Family::Constant => HarmonicFunction::constant(domain),
        }
    }

    pub fn side(&self) -> Option<Side> {
        match self {
            Family::Kernels { side, .. } | Family::Exponential { side, .. } => Some(*side),
            Family::Constant => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DLCase {
    I,
    II,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub q: u32,
    pub r: u32,
    pub case: DLCase,
    pub drift: f64,
    pub c0: Option<f64>,
    pub moment_2_5: f64,
    pub exp_moment_c0: Option<f64>,
    pub families: Vec<Family>,
    pub residuals: Vec<f64>,
}

impl ClassificationReport {
    pub fn includes_constant(&self) -> bool {
        self.families.iter().any(|f| matches!(f, Family::Constant))
    }

    pub fn kernels(&self, side: Side) -> Option<&BoundaryCoefficients> {
        self.families.iter().find_map(|f| match f {
            Family::Kernels { side: s, coefficients, .. } if *s == side => Some(coefficients),
            _ => None,
        })
    }
}

/// Minimal harmonic functions on `DL(q, r)`: case I (zero drift) adds the
/// constant to the two lifted kernel families, case II (`φ(c₀) = 1`, `c₀ ≠ 0`)
/// has the kernel families only.
///
/// Minimality is not checked here; the families are those of the
/// classification, and every member can be tested for harmonicity.
pub fn enumerate_minimal_families(w: &QuadrupleMeasure, config: &SolverConfig) -> Result<ClassificationReport> {
    let z = w.z_walk();
    let drift = z.drift();
    let c0 = if z.has_zero_drift() {
        None
    } else {
        match z.find_c0(DERIVED_MASS_TOL) {
            Ok(c) => c,
            Err(Error::NoBracket { .. }) => {
                return Err(Error::Unclassifiable(format!(
                    "drift {drift} is nonzero and phi(c) = 1 has no root besides 0"
                )))
            }
            Err(e) => return Err(e),
        }
    };
    let case = if c0.is_some() { DLCase::II } else { DLCase::I };
    let mut families = Vec::new();
    let mut residuals = Vec::new();
    for side in [Side::One, Side::Two] {
        let t = w.project_to_tree(side);
        let tree_case = classify_tree_case(&t)?;
        let coefficients = solve_for_case(&t, tree_case, config)?;
        residuals.push(coefficients.residual);
        families.push(Family::Kernels {
            side,
            tree_case,
            coefficients,
        });
    }
    if case == DLCase::I {
        families.push(Family::Constant);
    }
    Ok(ClassificationReport {
        q: w.q(),
        r: w.r(),
        case,
        drift,
        c0,
        moment_2_5: w.moment(2.5),
        exp_moment_c0: c0.map(|c| w.exp_moment(c)),
        families,
        residuals,
    })
}

/// Minimal harmonic functions of a walk on a single tree.
pub fn tree_minimal_families(w: &TreeWalk, side: Side, config: &SolverConfig) -> Result<Vec<Family>> {
    let tree_case = classify_tree_case(w)?;
    let coefficients = solve_for_case(w, tree_case, config)?;
    let mut out = vec![Family::Kernels {
        side,
        tree_case,
        coefficients,
    }];
    match tree_case {
        TreeCase::PositiveDrift => {
            if let Ok(Some(c0)) = w.z_walk().find_c0(DERIVED_MASS_TOL) {
                out.push(Family::Exponential { side, c: c0 });
            }
        }
        TreeCase::ZeroDrift | TreeCase::NegativeDriftConjugated { .. } => out.push(Family::Constant),
    }
    Ok(out)
}

/// `g ξ` for the tree on `side`, with `g` in the lamplighter group.
pub fn act_on_boundary(g: &DLVertex, xi: &BoundaryPoint, side: Side, q: u32) -> Result<BoundaryPoint> {
    let shift = match side {
        Side::One => g.pos,
        Side::Two => -g.pos,
    };
    // every lamp of g must land above the image of the anchor
    let deepest = g
        .lamps()
        .keys()
        .map(|&c| match side {
            Side::One => c,
            Side::Two => 1 - c,
        })
        .max();
    let need = deepest.map_or(0, |l| (l - (xi.anchor.hor() + shift)).max(0) as u64);
    let xi = xi.deepen(need);
    Ok(BoundaryPoint::new(dl::induced_tree_action(g, &xi.anchor, side, q, q)?))
}

/// Largest relative deviation in `K(x, gξ) = K(g⁻¹x, ξ) / K(g⁻¹o, ξ)`.
pub fn cocycle_check(
    coeffs: &BoundaryCoefficients,
    g: &DLVertex,
    side: Side,
    xi: &BoundaryPoint,
    xs: &[TreeVertex],
) -> Result<f64> {
    let q = coeffs.q;
    let g_inv = dl::group_inverse(g, q, q)?;
    let g_xi = act_on_boundary(g, xi, side, q)?;
    let g_inv_o = dl::induced_tree_action(&g_inv, &TreeVertex::root(), side, q, q)?;
    let denom = kernel_at(coeffs, &g_inv_o, xi)?;
    let mut worst = 0.0f64;
    for x in xs {
        let lhs = kernel_at(coeffs, x, &g_xi)?;
        let rhs = kernel_at(coeffs, &dl::induced_tree_action(&g_inv, x, side, q, q)?, xi)? / denom;
        worst = worst.max((lhs - rhs).abs() / lhs);
    }
    Ok(worst)
}
