//! Semi-isotropic transition laws on `T_q` and `DL(q, r)`, their projections,
//! the functionals `φ`, drift and moments, conjugation, and sampling.

use std::collections::BTreeMap;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::dl::{self, DLVertex, Side};
use crate::error::{Error, Result};
use crate::tree::{self, check_branching, cone_size, TreeVertex};

/// Tolerance for user-supplied probability vectors.
pub const INPUT_MASS_TOL: f64 = 1e-12;
/// Tolerance for laws produced by projections and conjugation.
pub const DERIVED_MASS_TOL: f64 = 1e-10;
/// Drifts smaller than this in absolute value count as zero.
pub const ZERO_DRIFT_TOL: f64 = 1e-12;
/// Largest `|c|` searched by [`ZWalk::find_c0`].
pub const C0_SEARCH_LIMIT: f64 = 50.0;

fn check_mass(total: f64, tol: f64, key: &str) -> Result<()> {
    if (total - 1.0).abs() > tol {
        return Err(Error::measure(key, format!("total mass {total} differs from 1")));
    }
    Ok(())
}

fn check_prob(p: f64, key: impl FnOnce() -> String) -> Result<()> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::measure(key(), format!("probability {p} is negative or not finite")));
    }
    Ok(())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The law `μ̃` of the horocycle increments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZWalk {
    mu: BTreeMap<i64, f64>,
}

impl ZWalk {
    pub fn new(mu: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let w = Self::collect(mu)?;
        check_mass(w.mu.values().sum(), INPUT_MASS_TOL, "mu_tilde")?;
        Ok(w)
    }

    fn collect(mu: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (n, p) in mu {
            check_prob(p, || format!("mu_tilde.{n}"))?;
            if p > 0.0 {
                *out.entry(n).or_insert(0.0) += p;
            }
        }
        Ok(ZWalk { mu: out })
    }

    pub fn mass(&self, n: i64) -> f64 {
        self.mu.get(&n).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mu.iter().map(|(&n, &p)| (n, p))
    }

    /// Largest `|n|` in the support.
    pub fn range(&self) -> u64 {
        self.mu.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    /// `φ(c) = Σ μ̃(m) e^{cm}`.
    pub fn phi(&self, c: f64) -> f64 {
        self.support().map(|(n, p)| p * (c * n as f64).exp()).sum()
    }

    pub fn phi_prime(&self, c: f64) -> f64 {
        self.support().map(|(n, p)| p * n as f64 * (c * n as f64).exp()).sum()
    }

    pub fn drift(&self) -> f64 {
        self.support().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn has_zero_drift(&self) -> bool {
        self.drift().abs() < ZERO_DRIFT_TOL
    }

    /// The law of `−n`.
    pub fn reflect(&self) -> ZWalk {
        ZWalk {
            mu: self.mu.iter().map(|(&n, &p)| (-n, p)).collect(),
        }
    }

    /// Whether the support generates `Z` as a semigroup.
    pub fn is_irreducible(&self) -> bool {
        let pos = self.mu.keys().any(|&n| n > 0);
        let neg = self.mu.keys().any(|&n| n < 0);
        let g = self.mu.keys().fold(0, |g, &n| gcd(g, n.unsigned_abs()));
        pos && neg && g == 1
    }

    /// `Σ_n μ̃(n) f(m + n)`.
    pub fn apply(&self, f: impl Fn(i64) -> f64, m: i64) -> f64 {
        self.support().map(|(n, p)| p * f(m + n)).sum()
    }

    /// The nonzero root of `φ(c) = 1`, or `None` when the drift vanishes.
    pub fn find_c0(&self, tol: f64) -> Result<Option<f64>> {
        let alpha = self.drift();
        if alpha.abs() < ZERO_DRIFT_TOL {
            return Ok(None);
        }
        // φ decreases away from 0 in direction `dir`, then turns up again.
        let dir = -alpha.signum();
        let mut far = 0.01;
        while self.phi(dir * far) <= 1.0 {
            far *= 2.0;
            if far > C0_SEARCH_LIMIT {
                return Err(Error::NoBracket {
                    limit: C0_SEARCH_LIMIT,
                });
            }
        }
        // minimiser of φ on [0, far]: φ' changes sign there
        let (mut lo, mut hi) = (0.0, far);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dir * self.phi_prime(dir * mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (mut lo, mut hi) = (0.5 * (lo + hi), far);
        if self.phi(dir * lo) >= 1.0 {
            return Err(Error::NoBracket {
                limit: C0_SEARCH_LIMIT,
            });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.phi(dir * mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c0 = dir * 0.5 * (lo + hi);
        let residual = (self.phi(c0) - 1.0).abs();
        if residual >= tol {
            return Err(Error::NotStochastic {
                c0,
                phi: self.phi(c0),
            });
        }
        Ok(Some(c0))
    }
}

/// A semi-isotropic walk on `T_q`, stored by class masses
/// `μ_{k,r} = Σ_{x ∈ T_{k,r}} p(o, x)`.
#[derive(Clone, Debug)]
pub struct TreeWalk {
    q: u32,
    mu: BTreeMap<(u64, u64), f64>,
    classes: Vec<(u64, u64)>,
    picker: WeightedIndex<f64>,
}

impl PartialEq for TreeWalk {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.mu == other.mu
    }
}

impl TreeWalk {
    pub fn new(q: u32, mu: impl IntoIterator<Item = ((u64, u64), f64)>) -> Result<Self> {
        Self::build(q, mu, INPUT_MASS_TOL)
    }

    fn build(q: u32, mu: impl IntoIterator<Item = ((u64, u64), f64)>, tol: f64) -> Result<Self> {
        check_branching(q)?;
        let mut out = BTreeMap::new();
        for ((k, r), p) in mu {
            check_prob(p, || format!("mu.({k},{r})"))?;
            if p > 0.0 {
                *out.entry((k, r)).or_insert(0.0) += p;
            }
        }
        check_mass(out.values().sum(), tol, "mu")?;
        let classes: Vec<_> = out.keys().copied().collect();
        let picker = WeightedIndex::new(out.values().copied())
            .map_err(|e| Error::measure("mu", e.to_string()))?;
        Ok(TreeWalk {
            q,
            mu: out,
            classes,
            picker,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn class_mass(&self, k: u64, r: u64) -> f64 {
        self.mu.get(&(k, r)).copied().unwrap_or(0.0)
    }

    pub fn classes(&self) -> impl Iterator<Item = ((u64, u64), f64)> + '_ {
        self.mu.iter().map(|(&c, &p)| (c, p))
    }

    /// `p(x, y)` for any `y ∈ T_{k,r}(x)`.
    pub fn per_vertex(&self, k: u64, r: u64) -> f64 {
        self.class_mass(k, r) / cone_size(self.q, k, r)
    }

    pub fn transition_prob(&self, x: &TreeVertex, y: &TreeVertex) -> f64 {
        self.per_vertex(tree::up(x, y), tree::up(y, x))
    }

    /// Largest distance of a single step.
    pub fn radius(&self) -> u64 {
        self.mu.keys().map(|&(k, r)| k + r).max().unwrap_or(0)
    }

    /// Largest `k` and largest `r` in the support.
    pub fn reach(&self) -> (u64, u64) {
        let k = self.mu.keys().map(|c| c.0).max().unwrap_or(0);
        let r = self.mu.keys().map(|c| c.1).max().unwrap_or(0);
        (k, r)
    }

    /// `μ̃(n) = Σ_{r−k=n} μ_{k,r}`.
    pub fn z_walk(&self) -> ZWalk {
        let mut mu = BTreeMap::new();
        for (&(k, r), &p) in &self.mu {
            *mu.entry(r as i64 - k as i64).or_insert(0.0) += p;
        }
        ZWalk { mu }
    }

    pub fn drift(&self) -> f64 {
        self.z_walk().drift()
    }

    pub fn phi(&self, c: f64) -> f64 {
        self.z_walk().phi(c)
    }

    /// `m_t(P) = Σ_x d(o, x)^t p(o, x)`.
    pub fn moment(&self, t: f64) -> f64 {
        self.classes().map(|((k, r), p)| ((k + r) as f64).powf(t) * p).sum()
    }

    /// `Σ_x d(o, x) e^{c·hor(x)} p(o, x)`.
    pub fn hor_moment(&self, c: f64) -> f64 {
        self.classes()
            .map(|((k, r), p)| (k + r) as f64 * (c * (r as f64 - k as f64)).exp() * p)
            .sum()
    }

    /// `μ♯_{k,r} = μ_{k,r} e^{c₀(r−k)}`.
    pub fn conjugate(&self, c0: f64) -> Result<TreeWalk> {
        let phi = self.phi(c0);
        if (phi - 1.0).abs() > DERIVED_MASS_TOL {
            return Err(Error::NotStochastic { c0, phi });
        }
        Self::build(
            self.q,
            self.classes()
                .map(|((k, r), p)| ((k, r), p * (c0 * (r as f64 - k as f64)).exp())),
            DERIVED_MASS_TOL,
        )
    }

    pub fn sample_class<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        self.classes[self.picker.sample(rng)]
    }

    /// One step from `x`: a class by its total mass, then a uniform vertex in it.
    pub fn sample_step<R: Rng + ?Sized>(&self, x: &TreeVertex, rng: &mut R) -> TreeVertex {
        let (k, r) = self.sample_class(rng);
        tree::sample_in_cone(x, k, r, self.q, rng)
    }

    /// Every `y` with `p(x, y) > 0`, with its probability.
    pub fn support_from(&self, x: &TreeVertex) -> Vec<(TreeVertex, f64)> {
        let mut out = Vec::new();
        for ((k, r), _) in self.classes() {
            let p = self.per_vertex(k, r);
            tree::for_each_in_cone(x, k, r, self.q, |y| out.push((y.clone(), p)));
        }
        out
    }

    /// `Σ_y p(x, y) f(y)`.
    pub fn apply(&self, x: &TreeVertex, f: impl Fn(&TreeVertex) -> Result<f64>) -> Result<f64> {
        let mut total = 0.0;
        for ((k, r), _) in self.classes() {
            let p = self.per_vertex(k, r);
            let mut err = None;
            let mut sum = 0.0;
            tree::for_each_in_cone(x, k, r, self.q, |y| match f(y) {
                Ok(v) => sum += v,
                Err(e) => err = err.take().or(Some(e)),
            });
            if let Some(e) = err {
                return Err(e);
            }
            total += p * sum;
        }
        Ok(total)
    }
}

/// The up-quadruple `(k₁, l₁, k₂, l₂)`.
pub type Quadruple = [u64; 4];

/// A semi-isotropic walk on `DL(q, r)` given by per-vertex probabilities
/// `𝕞(k₁, l₁, k₂, l₂)`.
#[derive(Clone, Debug)]
pub struct QuadrupleMeasure {
    q: u32,
    r: u32,
    entries: BTreeMap<Quadruple, f64>,
    keys: Vec<Quadruple>,
    picker: WeightedIndex<f64>,
}

impl PartialEq for QuadrupleMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.r == other.r && self.entries == other.entries
    }
}

impl QuadrupleMeasure {
    pub fn new(q: u32, r: u32, entries: impl IntoIterator<Item = (Quadruple, f64)>) -> Result<Self> {
        Self::build(q, r, entries, INPUT_MASS_TOL)
    }

    fn build(q: u32, r: u32, entries: impl IntoIterator<Item = (Quadruple, f64)>, tol: f64) -> Result<Self> {
        check_branching(q)?;
        check_branching(r)?;
        let mut out = BTreeMap::new();
        for (key, p) in entries {
            let [k1, l1, k2, l2] = key;
            let name = || format!("quadruples({k1},{l1},{k2},{l2})");
            if k1 + k2 != l1 + l2 {
                return Err(Error::measure(name(), "k1 + k2 must equal l1 + l2"));
            }
            check_prob(p, name)?;
            if p > 0.0 {
                *out.entry(key).or_insert(0.0) += p;
            }
        }
        let w = |key: &Quadruple, p: f64| p * Self::class_size_of(q, r, key);
        check_mass(out.iter().map(|(key, &p)| w(key, p)).sum(), tol, "quadruples")?;
        let keys: Vec<_> = out.keys().copied().collect();
        let picker = WeightedIndex::new(out.iter().map(|(key, &p)| w(key, p)))
            .map_err(|e| Error::measure("quadruples", e.to_string()))?;
        Ok(QuadrupleMeasure {
            q,
            r,
            entries: out,
            keys,
            picker,
        })
    }

    fn class_size_of(q: u32, r: u32, key: &Quadruple) -> f64 {
        cone_size(q, key[0], key[1]) * cone_size(r, key[2], key[3])
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Per-vertex probability of a quadruple class.
    pub fn entry(&self, key: Quadruple) -> f64 {
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Quadruple, f64)> + '_ {
        self.entries.iter().map(|(&k, &p)| (k, p))
    }

    /// Number of `y` sharing the quadruple `key` relative to a fixed `x`.
    pub fn class_size(&self, key: Quadruple) -> f64 {
        Self::class_size_of(self.q, self.r, &key)
    }

    /// `(quadruple, total class mass)` pairs.
    pub fn class_masses(&self) -> impl Iterator<Item = (Quadruple, f64)> + '_ {
        self.entries().map(|(k, p)| (k, p * self.class_size(k)))
    }

    pub fn transition_prob(&self, x: &DLVertex, y: &DLVertex) -> f64 {
        self.entry(dl::up_quadruple(x, y))
    }

    /// Projection onto `T_q` (side one) or `T_r` (side two).
    pub fn project_to_tree(&self, side: Side) -> TreeWalk {
        let mut mu = BTreeMap::new();
        for ([k1, l1, k2, l2], m) in self.class_masses() {
            let key = match side {
                Side::One => (k1, l1),
                Side::Two => (k2, l2),
            };
            *mu.entry(key).or_insert(0.0) += m;
        }
        let branching = match side {
            Side::One => self.q,
            Side::Two => self.r,
        };
        TreeWalk::build(branching, mu, DERIVED_MASS_TOL).expect("projection of a valid measure")
    }

    /// The law of `hor(y₁) − hor(x₁)`.
    pub fn z_walk(&self) -> ZWalk {
        let mut mu = BTreeMap::new();
        for ([k1, l1, _, _], m) in self.class_masses() {
            *mu.entry(l1 as i64 - k1 as i64).or_insert(0.0) += m;
        }
        ZWalk { mu }
    }

    pub fn drift(&self) -> f64 {
        self.z_walk().drift()
    }

    pub fn phi(&self, c: f64) -> f64 {
        self.z_walk().phi(c)
    }

    /// `m_t(P)` for the graph metric of `DL(q, r)`.
    pub fn moment(&self, t: f64) -> f64 {
        self.class_masses()
            .map(|([k1, l1, k2, l2], m)| {
                let d = k1 + l1 + k2 + l2 - (l1 as i64 - k1 as i64).unsigned_abs();
                (d as f64).powf(t) * m
            })
            .sum()
    }

    /// `m^{(c)}(P) = Σ (d(o₁,x₁) e^{c₊ hor(x₁)} + d(o₂,x₂) e^{c₋ hor(x₂)}) p(o, x)`.
    pub fn exp_moment(&self, c: f64) -> f64 {
        let (cp, cm) = (c.max(0.0), c.min(0.0));
        self.class_masses()
            .map(|([k1, l1, k2, l2], m)| {
                let h1 = l1 as f64 - k1 as f64;
                let h2 = l2 as f64 - k2 as f64;
                ((k1 + l1) as f64 * (cp * h1).exp() + (k2 + l2) as f64 * (cm * h2).exp()) * m
            })
            .sum()
    }

    /// `p♯(x, y) = p(x, y) e^{c₀(hor(y₁) − hor(x₁))}`.
    pub fn conjugate(&self, c0: f64) -> Result<QuadrupleMeasure> {
        let phi = self.phi(c0);
        if (phi - 1.0).abs() > DERIVED_MASS_TOL {
            return Err(Error::NotStochastic { c0, phi });
        }
        Self::build(
            self.q,
            self.r,
            self.entries()
                .map(|(key, p)| (key, p * (c0 * (key[1] as f64 - key[0] as f64)).exp())),
            DERIVED_MASS_TOL,
        )
    }

    pub fn sample_class<R: Rng + ?Sized>(&self, rng: &mut R) -> Quadruple {
        self.keys[self.picker.sample(rng)]
    }

    /// One step from `x`; within a class both tree coordinates are uniform
    /// and independent.
    pub fn sample_step<R: Rng + ?Sized>(&self, x: &DLVertex, rng: &mut R) -> DLVertex {
        let [k1, l1, k2, l2] = self.sample_class(rng);
        let (x1, x2) = dl::split(x);
        let y1 = tree::sample_in_cone(&x1, k1, l1, self.q, rng);
        let y2 = tree::sample_in_cone(&x2, k2, l2, self.r, rng);
        dl::compose(&y1, &y2).expect("quadruple keys balance horocycles")
    }

    /// Visits every `y` with `p(x, y) > 0`.
    pub fn for_each_target(&self, x: &DLVertex, mut visit: impl FnMut(&DLVertex, f64)) {
        let (x1, x2) = dl::split(x);
        for ([k1, l1, k2, l2], p) in self.entries() {
            let mut seconds = Vec::new();
            tree::for_each_in_cone(&x2, k2, l2, self.r, |y2| seconds.push(y2.clone()));
            tree::for_each_in_cone(&x1, k1, l1, self.q, |y1| {
                for y2 in &seconds {
                    let y = dl::compose(y1, y2).expect("quadruple keys balance horocycles");
                    visit(&y, p);
                }
            });
        }
    }

    pub fn support_from(&self, x: &DLVertex) -> Vec<(DLVertex, f64)> {
        let mut out = Vec::new();
        self.for_each_target(x, |y, p| out.push((y.clone(), p)));
        out
    }

    /// `Σ_y p(x, y) f(y)`.
    pub fn apply(&self, x: &DLVertex, f: impl Fn(&DLVertex) -> Result<f64>) -> Result<f64> {
        let mut total = 0.0;
        let mut err = None;
        self.for_each_target(x, |y, p| match f(y) {
            Ok(v) => total += p * v,
            Err(e) => err = err.take().or(Some(e)),
        });
        match err {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }
}

/// The lamplighter walk `μ = Σ_m μ̃(m) μ_m`: jump by `m` and re-randomise the
/// `|m|` lamps crossed, in the colour they carry after the jump.
pub fn switch_walk(mu_tilde: &ZWalk, q: u32, r: u32) -> Result<QuadrupleMeasure> {
    check_branching(q)?;
    check_branching(r)?;
    let entries = mu_tilde.support().map(|(m, p)| {
        let a = m.unsigned_abs();
        if m > 0 {
            ([0, a, a, 0], p / (q as f64).powi(a as i32))
        } else if m < 0 {
            ([a, 0, 0, a], p / (r as f64).powi(a as i32))
        } else {
            ([0, 0, 0, 0], p)
        }
    });
    QuadrupleMeasure::build(q, r, entries, DERIVED_MASS_TOL)
}

/// A parsed walk specification.
#[derive(Clone, Debug)]
pub struct WalkSpec {
    pub measure: QuadrupleMeasure,
    /// `μ̃` when the spec names a switch walk.
    pub mu_tilde: Option<ZWalk>,
    pub raw: Value,
}

impl WalkSpec {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text)?;
        Self::from_value(raw)
    }

    pub fn from_value(raw: Value) -> Result<Self> {
        let obj = raw
            .as_object()
            .ok_or_else(|| Error::schema("$", "expected a JSON object"))?;
        let q = branching(obj.get("q"), "q")?;
        let r = branching(obj.get("r"), "r")?;
        let family = obj.get("family").map(|v| {
            v.as_str()
                .ok_or_else(|| Error::schema("family", "expected a string"))
        });
        let family = family.transpose()?;
        match (family, obj.get("mu_tilde"), obj.get("quadruples")) {
            (Some("switch-walk") | None, Some(mt), None) => {
                let table = mt
                    .as_object()
                    .ok_or_else(|| Error::schema("mu_tilde", "expected an object of jump -> probability"))?;
                let mut mu = Vec::new();
                for (key, value) in table {
                    let path = format!("mu_tilde.{key}");
                    let n: i64 = key
                        .trim()
                        .parse()
                        .map_err(|_| Error::schema(&path, "jump must be an integer"))?;
                    let p = value
                        .as_f64()
                        .ok_or_else(|| Error::schema(&path, "expected a number"))?;
                    check_prob(p, || path.clone())?;
                    mu.push((n, p));
                }
                let mu_tilde = ZWalk::new(mu)?;
                let measure = switch_walk(&mu_tilde, q, r)?;
                Ok(WalkSpec {
                    measure,
                    mu_tilde: Some(mu_tilde),
                    raw,
                })
            }
            (Some("quadruples") | None, None, Some(list)) => {
                let list = list
                    .as_array()
                    .ok_or_else(|| Error::schema("quadruples", "expected an array"))?;
                let mut entries = Vec::new();
                for (i, item) in list.iter().enumerate() {
                    let base = format!("quadruples[{i}]");
                    let item = item
                        .as_object()
                        .ok_or_else(|| Error::schema(&base, "expected an object"))?;
                    let field = |name: &str| -> Result<u64> {
                        let path = format!("{base}.{name}");
                        item.get(name)
                            .ok_or_else(|| Error::schema(&path, "missing"))?
                            .as_u64()
                            .ok_or_else(|| Error::schema(&path, "expected a nonnegative integer"))
                    };
                    let key = [field("k1")?, field("l1")?, field("k2")?, field("l2")?];
                    if key[0] + key[2] != key[1] + key[3] {
                        return Err(Error::measure(&base, "k1 + k2 must equal l1 + l2"));
                    }
                    let path = format!("{base}.per_vertex_prob");
                    let p = item
                        .get("per_vertex_prob")
                        .ok_or_else(|| Error::schema(&path, "missing"))?
                        .as_f64()
                        .ok_or_else(|| Error::schema(&path, "expected a number"))?;
                    check_prob(p, || path.clone())?;
                    entries.push((key, p));
                }
                Ok(WalkSpec {
                    measure: QuadrupleMeasure::new(q, r, entries)?,
                    mu_tilde: None,
                    raw,
                })
            }
            (Some(other), _, _) if other != "switch-walk" && other != "quadruples" => Err(Error::schema(
                "family",
                format!("unknown family `{other}`; expected `switch-walk` or `quadruples`"),
            )),
            (_, Some(_), Some(_)) => Err(Error::schema("$", "give either `mu_tilde` or `quadruples`, not both")),
            (Some("switch-walk"), None, _) => Err(Error::schema("mu_tilde", "missing")),
            _ => Err(Error::schema("quadruples", "missing")),
        }
    }
}

fn branching(v: Option<&Value>, name: &str) -> Result<u32> {
    let v = v.ok_or_else(|| Error::schema(name, "missing"))?;
    let n = v
        .as_u64()
        .ok_or_else(|| Error::schema(name, "expected a positive integer"))?;
    let n = u32::try_from(n).map_err(|_| Error::schema(name, "too large"))?;
    if n < 2 {
        return Err(Error::schema(name, format!("branching must be at least 2, got {n}")));
    }
    Ok(n)
}
