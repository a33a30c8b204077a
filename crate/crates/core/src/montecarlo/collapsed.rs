use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

use crate::dl::{self, DLVertex};
use crate::tree::{self, TreeVertex};
use crate::walk::{Quadruple, QuadrupleMeasure, TreeWalk};
use crate::{Error, Result};

/// Default bound on the number of classes the lumped chain may touch.
pub const DEFAULT_CLASS_CAP: usize = 4_000_000;

/// A walk whose transition probabilities depend only on the class of a pair
/// of vertices, and whose automorphisms fixing the root act transitively on
/// every class. `p⁽ⁿ⁾(x, y)` then depends only on the class of `(x, y)`.
pub trait SemiIsotropic {
    type Vertex: Clone + Eq + Hash + Debug + Send + Sync;
    type Class: Copy + Ord + Hash + Debug + Send + Sync;

    fn root(&self) -> Self::Vertex;
    fn pair_class(&self, x: &Self::Vertex, y: &Self::Vertex) -> Self::Class;
    fn representative(&self, c: Self::Class) -> Self::Vertex;
    fn class_size(&self, c: Self::Class) -> f64;
    fn for_each_target(&self, x: &Self::Vertex, visit: impl FnMut(&Self::Vertex, f64));
    fn sample_step<R: Rng + ?Sized>(&self, x: &Self::Vertex, rng: &mut R) -> Self::Vertex;

    fn class_of(&self, y: &Self::Vertex) -> Self::Class {
        self.pair_class(&self.root(), y)
    }
}

impl SemiIsotropic for TreeWalk {
    type Vertex = TreeVertex;
    type Class = (u64, u64);

    fn root(&self) -> TreeVertex {
        TreeVertex::root()
    }

    fn pair_class(&self, x: &TreeVertex, y: &TreeVertex) -> (u64, u64) {
        (tree::up(x, y), tree::up(y, x))
    }

    fn representative(&self, (k, r): (u64, u64)) -> TreeVertex {
        TreeVertex::class_representative(k, r)
    }

    fn class_size(&self, (k, r): (u64, u64)) -> f64 {
        tree::cone_size(self.q(), k, r)
    }

    fn for_each_target(&self, x: &TreeVertex, mut visit: impl FnMut(&TreeVertex, f64)) {
        for ((k, r), _) in self.classes() {
            let p = self.per_vertex(k, r);
            tree::for_each_in_cone(x, k, r, self.q(), |y| visit(y, p));
        }
    }

    fn sample_step<R: Rng + ?Sized>(&self, x: &TreeVertex, rng: &mut R) -> TreeVertex {
        TreeWalk::sample_step(self, x, rng)
    }
}

impl SemiIsotropic for QuadrupleMeasure {
    type Vertex = DLVertex;
    type Class = Quadruple;

    fn root(&self) -> DLVertex {
        DLVertex::root()
    }

    fn pair_class(&self, x: &DLVertex, y: &DLVertex) -> Quadruple {
        let (x1, x2) = dl::split(x);
        let (y1, y2) = dl::split(y);
        [tree::up(&x1, &y1), tree::up(&y1, &x1), tree::up(&x2, &y2), tree::up(&y2, &x2)]
    }

    fn representative(&self, [k1, l1, k2, l2]: Quadruple) -> DLVertex {
        let y1 = TreeVertex::class_representative(k1, l1);
        let y2 = TreeVertex::class_representative(k2, l2);
        dl::compose(&y1, &y2).expect("classes reached by the walk balance horocycles")
    }

    fn class_size(&self, key: Quadruple) -> f64 {
        QuadrupleMeasure::class_size(self, key)
    }

    fn for_each_target(&self, x: &DLVertex, visit: impl FnMut(&DLVertex, f64)) {
        QuadrupleMeasure::for_each_target(self, x, visit)
    }

    fn sample_step<R: Rng + ?Sized>(&self, x: &DLVertex, rng: &mut R) -> DLVertex {
        QuadrupleMeasure::sample_step(self, x, rng)
    }
}

/// `p⁽ⁿ⁾(o, ·)` lumped onto classes. Stored as class masses; the per-vertex
/// probability is the mass divided by the class size.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassDistribution<C: Ord> {
    pub horizon: usize,
    mass: BTreeMap<C, f64>,
    sizes: BTreeMap<C, f64>,
}

impl<C: Copy + Ord> ClassDistribution<C> {
    pub fn per_vertex(&self, c: C) -> f64 {
        match (self.mass.get(&c), self.sizes.get(&c)) {
            (Some(m), Some(s)) => m / s,
            _ => 0.0,
        }
    }

    pub fn class_mass(&self, c: C) -> f64 {
        self.mass.get(&c).copied().unwrap_or(0.0)
    }

    /// `(class, per-vertex probability, class size)`.
    pub fn table(&self) -> impl Iterator<Item = (C, f64, f64)> + '_ {
        self.mass.iter().map(|(c, m)| {
            let s = self.sizes[c];
            (*c, m / s, s)
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }
}

/// The walk lumped onto classes relative to the root. Class-to-class
/// transition masses are read off the exact one-step support of a
/// representative and memoised.
pub struct ClassChain<'a, W: SemiIsotropic> {
    walk: &'a W,
    cap: usize,
    transitions: HashMap<W::Class, Vec<(W::Class, f64)>>,
}

impl<'a, W: SemiIsotropic> ClassChain<'a, W> {
    pub fn new(walk: &'a W) -> Self {
        Self::with_cap(walk, DEFAULT_CLASS_CAP)
    }

    pub fn with_cap(walk: &'a W, cap: usize) -> Self {
        ClassChain {
            walk,
            cap,
            transitions: HashMap::new(),
        }
    }

    pub fn walk(&self) -> &W {
        self.walk
    }

    /// The point mass at the root.
    pub fn initial(&self) -> ClassDistribution<W::Class> {
        let root = self.walk.class_of(&self.walk.root());
        ClassDistribution {
            horizon: 0,
            mass: BTreeMap::from([(root, 1.0)]),
            sizes: BTreeMap::from([(root, self.walk.class_size(root))]),
        }
    }

    /// `Σ_{y ∈ c'} p(y_c, y)` for every class `c'` reachable from `c`.
    pub fn transitions(&mut self, c: W::Class) -> Result<&[(W::Class, f64)]> {
        if !self.transitions.contains_key(&c) {
            if self.transitions.len() >= self.cap {
                return Err(Error::DepthExceeded { cap: self.cap });
            }
            let walk = self.walk;
            let rep = walk.representative(c);
            let mut out: BTreeMap<W::Class, f64> = BTreeMap::new();
            walk.for_each_target(&rep, |y, p| {
                *out.entry(walk.class_of(y)).or_insert(0.0) += p;
            });
            self.transitions.insert(c, out.into_iter().collect());
        }
        Ok(&self.transitions[&c])
    }

    /// One exact step of the lumped chain.
    pub fn step(&mut self, dist: &ClassDistribution<W::Class>) -> Result<ClassDistribution<W::Class>> {
        let mut mass: BTreeMap<W::Class, f64> = BTreeMap::new();
        for (&c, &m) in &dist.mass {
            for &(target, p) in self.transitions(c)? {
                *mass.entry(target).or_insert(0.0) += m * p;
            }
        }
        let sizes = mass.keys().map(|&c| (c, self.walk.class_size(c))).collect();
        Ok(ClassDistribution {
            horizon: dist.horizon + 1,
            mass,
            sizes,
        })
    }

    /// `p⁽ⁿ⁾(o, ·)` on classes.
    pub fn distribution(&mut self, n: usize) -> Result<ClassDistribution<W::Class>> {
        let mut dist = self.initial();
        for _ in 0..n {
            dist = self.step(&dist)?;
        }
        Ok(dist)
    }

    /// Partial Green sums `Σ_{n ≤ n_max} p⁽ⁿ⁾(o, y)` for every class at once.
    pub fn green_table(&mut self, n_max: usize) -> Result<GreenTable<W::Class>> {
        let mut dist = self.initial();
        let mut sums: HashMap<W::Class, f64> = HashMap::new();
        let mut last: HashMap<W::Class, f64> = HashMap::new();
        for n in 0..=n_max {
            if n > 0 {
                dist = self.step(&dist)?;
            }
            for (c, p, _) in dist.table() {
                *sums.entry(c).or_insert(0.0) += p;
                if n == n_max {
                    last.insert(c, p);
                }
            }
        }
        Ok(GreenTable { n_max, sums, last })
    }
}

/// Partial Green sums by class, as produced by [`ClassChain::green_table`].
#[derive(Clone, Debug)]
pub struct GreenTable<C> {
    pub n_max: usize,
    sums: HashMap<C, f64>,
    last: HashMap<C, f64>,
}

/// `Σ_{n ≤ N} p⁽ⁿ⁾(x, y)` and the final increment `p⁽ᴺ⁾(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GreenPartial {
    pub sum: f64,
    pub last_increment: f64,
}

impl<C: Eq + Hash> GreenTable<C> {
    pub fn get(&self, c: &C) -> GreenPartial {
        GreenPartial {
            sum: self.sums.get(c).copied().unwrap_or(0.0),
            last_increment: self.last.get(c).copied().unwrap_or(0.0),
        }
    }
}

/// `Σ_{n ≤ n_max} p⁽ⁿ⁾(x, y)`, through the class of `(x, y)`.
pub fn green_partial<W: SemiIsotropic>(w: &W, x: &W::Vertex, y: &W::Vertex, n_max: usize) -> Result<GreenPartial> {
    let c = w.pair_class(x, y);
    let mut chain = ClassChain::new(w);
    let mut dist = chain.initial();
    let mut sum = dist.per_vertex(c);
    let mut last = sum;
    for _ in 0..n_max {
        dist = chain.step(&dist)?;
        last = dist.per_vertex(c);
        sum += last;
    }
    Ok(GreenPartial {
        sum,
        last_increment: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{switch_walk, ZWalk};

    #[test]
    fn one_down_step_splits_evenly() {
        let w = TreeWalk::new(3, [((0, 1), 1.0)]).unwrap();
        let mut chain = ClassChain::new(&w);
        let d = chain.distribution(1).unwrap();
        assert!((d.per_vertex((0, 1)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mass_is_conserved() {
        let w = TreeWalk::new(2, [((0, 1), 0.5), ((1, 0), 0.3), ((2, 1), 0.2)]).unwrap();
        let mut chain = ClassChain::new(&w);
        let mut d = chain.initial();
        for _ in 0..40 {
            d = chain.step(&d).unwrap();
            assert!((d.total_mass() - 1.0).abs() < 1e-12);
        }
        let m = switch_walk(&ZWalk::new([(1, 0.5), (-1, 0.5)]).unwrap(), 2, 2).unwrap();
        let mut chain = ClassChain::new(&m);
        let mut d = chain.initial();
        for _ in 0..20 {
            d = chain.step(&d).unwrap();
            assert!((d.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dl_classes_are_up_quadruples() {
        let m = switch_walk(&ZWalk::new([(2, 0.5), (-1, 0.5)]).unwrap(), 2, 3).unwrap();
        let o = DLVertex::root();
        for y in dl::ball(&o, 3, 2, 3).unwrap() {
            assert_eq!(m.class_of(&y), dl::up_quadruple(&o, &y));
            let c = m.class_of(&y);
            assert_eq!(m.class_of(&m.representative(c)), c);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let w = TreeWalk::new(2, [((0, 1), 0.5), ((1, 0), 0.5)]).unwrap();
        let mut chain = ClassChain::with_cap(&w, 5);
        assert!(matches!(chain.distribution(10), Err(Error::DepthExceeded { cap: 5 })));
    }

    #[test]
    fn green_partial_basics() {
        let w = TreeWalk::new(2, [((0, 1), 0.7), ((1, 0), 0.3)]).unwrap();
        let o = TreeVertex::root();
        assert_eq!(green_partial(&w, &o, &o, 0).unwrap().sum, 1.0);
        let y = TreeVertex::from_levels(2, [(1, 1)]);
        let mut prev = 0.0;
        for n in [0, 5, 10, 20] {
            let g = green_partial(&w, &o, &y, n).unwrap().sum;
            assert!(g >= prev);
            prev = g;
        }
        let tail = green_partial(&w, &o, &y, 200).unwrap();
        assert!(tail.last_increment < 1e-10, "{}", tail.last_increment);
    }
}
