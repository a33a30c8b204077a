//! Geometry of the homogeneous tree `T_q` drawn with a distinguished end `ω`.
//!
//! A vertex is a pair `(σ, k)`: a finitely supported word over `{0,…,q−1}` and
//! a horocycle index `k`. The predecessor of `(σ, k)` is `(σ′, k−1)` with
//! `σ′(m) = σ(m+1)`, so every vertex has one predecessor and `q` successors.
//!
//! Internally the word is stored by *absolute level*: the symbol `σ(m)` of a
//! vertex on horocycle `k` is the label of the edge entering level `k − m` on
//! the path from `ω`. With that indexing, moving to the predecessor drops the
//! top label and moving to a successor appends one, and two vertices share an
//! ancestor on level `h` exactly when their labels agree on every level `≤ h`.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex `(σ, k)` of `T_q`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "VertexRepr", into = "VertexRepr")]
pub struct TreeVertex {
    hor: i64,
    // level -> nonzero label, all keys <= hor
    labels: BTreeMap<i64, u32>,
}

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    hor: i64,
    #[serde(default)]
    word: BTreeMap<u64, u32>,
}

impl TryFrom<VertexRepr> for TreeVertex {
    type Error = Error;

    fn try_from(repr: VertexRepr) -> Result<Self> {
        Ok(TreeVertex::from_word(repr.hor, repr.word))
    }
}

impl From<TreeVertex> for VertexRepr {
    fn from(v: TreeVertex) -> Self {
        VertexRepr {
            hor: v.hor,
            word: v.word(),
        }
    }
}

impl std::fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:?}, {})", self.word(), self.hor)
    }
}

impl TreeVertex {
    /// The root `o = (𝟘, 0)`.
    pub fn root() -> Self {
        Self::zero(0)
    }

    /// The vertex `(𝟘, k)`; for `k ≤ 0` this is the ancestor `o_{−k}` of the root.
    pub fn zero(hor: i64) -> Self {
        TreeVertex {
            hor,
            labels: BTreeMap::new(),
        }
    }

    /// Builds `(σ, k)` from the word `m ↦ σ(m)`. Zero symbols are dropped.
    pub fn from_word(hor: i64, word: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let labels = word
            .into_iter()
            .filter(|&(_, s)| s != 0)
            .map(|(m, s)| (hor - m as i64, s))
            .collect();
        TreeVertex { hor, labels }
    }

    /// Builds a vertex from labels indexed by absolute level. Levels above
    /// `hor` are ignored and zero labels are dropped.
    pub fn from_levels(hor: i64, labels: impl IntoIterator<Item = (i64, u32)>) -> Self {
        let labels = labels
            .into_iter()
            .filter(|&(h, s)| s != 0 && h <= hor)
            .collect();
        TreeVertex { hor, labels }
    }

    pub fn hor(&self) -> i64 {
        self.hor
    }

    /// `σ(m)`.
    pub fn symbol(&self, m: u64) -> u32 {
        self.label_at(self.hor - m as i64)
    }

    /// Label of the edge entering `level` on the path from `ω`; zero for
    /// levels above the vertex.
    pub fn label_at(&self, level: i64) -> u32 {
        if level > self.hor {
            return 0;
        }
        self.labels.get(&level).copied().unwrap_or(0)
    }

    /// The word as a sparse map `m ↦ σ(m)` of nonzero symbols.
    pub fn word(&self) -> BTreeMap<u64, u32> {
        self.labels
            .iter()
            .map(|(&h, &s)| ((self.hor - h) as u64, s))
            .collect()
    }

    /// Nonzero labels by absolute level.
    pub fn levels(&self) -> &BTreeMap<i64, u32> {
        &self.labels
    }

    pub fn validate(&self, q: u32) -> Result<()> {
        check_branching(q)?;
        match self.labels.values().find(|&&s| s >= q) {
            Some(&s) => Err(Error::SymbolOutOfRange {
                symbol: s,
                alphabet: q,
            }),
            None => Ok(()),
        }
    }

    pub fn predecessor(&self) -> TreeVertex {
        let mut labels = self.labels.clone();
        labels.remove(&self.hor);
        TreeVertex {
            hor: self.hor - 1,
            labels,
        }
    }

    /// The ancestor `n` levels up.
    pub fn ancestor(&self, n: u64) -> TreeVertex {
        let level = self.hor - n as i64;
        self.truncate(level)
    }

    /// The ancestor on horocycle `level`; `level` must not exceed `hor`.
    fn truncate(&self, level: i64) -> TreeVertex {
        debug_assert!(level <= self.hor);
        let labels = self.labels.range(..=level).map(|(&h, &s)| (h, s)).collect();
        TreeVertex { hor: level, labels }
    }

    /// The successor with new symbol `σ(0) = symbol`.
    pub fn successor(&self, symbol: u32) -> TreeVertex {
        let mut labels = self.labels.clone();
        let hor = self.hor + 1;
        if symbol != 0 {
            labels.insert(hor, symbol);
        }
        TreeVertex { hor, labels }
    }

    pub fn is_ancestor_of(&self, other: &TreeVertex) -> bool {
        self.hor <= other.hor && confluent_level(self, other) == self.hor
    }

    /// The class representative in `T_{u,s}(o)`: go up `u` from the root, then
    /// down `s`, leaving the ray through the root by symbol 1 when `u, s ≥ 1`.
    pub fn class_representative(u: u64, s: u64) -> TreeVertex {
        let top = -(u as i64);
        let hor = top + s as i64;
        if u >= 1 && s >= 1 {
            TreeVertex::from_levels(hor, [(top + 1, 1)])
        } else {
            TreeVertex::zero(hor)
        }
    }
}

pub(crate) fn check_branching(q: u32) -> Result<()> {
    if q < 2 {
        Err(Error::InvalidBranching(q))
    } else {
        Ok(())
    }
}

pub fn predecessor(v: &TreeVertex) -> TreeVertex {
    v.predecessor()
}

/// The `q` successors, ordered by the new symbol `σ(0)`.
pub fn successors(v: &TreeVertex, q: u32) -> Result<Vec<TreeVertex>> {
    check_branching(q)?;
    Ok((0..q).map(|s| v.successor(s)).collect())
}

/// Tree neighbours: predecessor first, then the successors.
pub fn neighbors(v: &TreeVertex, q: u32) -> Result<Vec<TreeVertex>> {
    let mut out = Vec::with_capacity(q as usize + 1);
    out.push(v.predecessor());
    out.extend(successors(v, q)?);
    Ok(out)
}

/// Horocycle of `x ⋏ y`.
pub fn confluent_level(x: &TreeVertex, y: &TreeVertex) -> i64 {
    let top = x.hor.min(y.hor);
    let mut a = x.labels.range(..=top).peekable();
    let mut b = y.labels.range(..=top).peekable();
    // First level (from below) where the label sequences differ.
    let first_diff = loop {
        match (a.peek(), b.peek()) {
            (None, None) => break None,
            (Some(&(&h, _)), None) | (None, Some(&(&h, _))) => break Some(h),
            (Some(&(&ha, &sa)), Some(&(&hb, &sb))) => {
                if ha != hb {
                    break Some(ha.min(hb));
                }
                if sa != sb {
                    break Some(ha);
                }
                a.next();
                b.next();
            }
        }
    };
    match first_diff {
        Some(h) => h - 1,
        None => top,
    }
}

/// The maximal common ancestor `x ⋏ y`.
pub fn confluent(x: &TreeVertex, y: &TreeVertex) -> TreeVertex {
    x.truncate(confluent_level(x, y))
}

/// `up(x, y) = hor(x) − hor(x ⋏ y)`.
pub fn up(x: &TreeVertex, y: &TreeVertex) -> u64 {
    (x.hor - confluent_level(x, y)) as u64
}

pub fn distance(x: &TreeVertex, y: &TreeVertex) -> u64 {
    let c = confluent_level(x, y);
    ((x.hor - c) + (y.hor - c)) as u64
}

/// `|T_{k,r}(x)|`, which does not depend on `x`.
pub fn cone_count(q: u32, k: u32, r: u32) -> Result<u128> {
    check_branching(q)?;
    let q = q as u128;
    let pow = |e: u32| {
        q.checked_pow(e)
            .ok_or_else(|| Error::Overflow(format!("{q}^{e}")))
    };
    if r == 0 {
        Ok(1)
    } else if k == 0 {
        pow(r)
    } else {
        Ok((q - 1) * pow(r - 1)?)
    }
}

/// `|T_{k,r}|` as a float; exact while it fits in 53 bits and finite far beyond.
pub fn cone_size(q: u32, k: u64, r: u64) -> f64 {
    let q = q as f64;
    if r == 0 {
        1.0
    } else if k == 0 {
        q.powi(r as i32)
    } else {
        (q - 1.0) * q.powi(r as i32 - 1)
    }
}

/// The set `T_{k,r}(base) = { y : up(base, y) = k, up(y, base) = r }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSpec {
    pub base: TreeVertex,
    pub k: u64,
    pub r: u64,
}

impl ConeSpec {
    pub fn new(base: TreeVertex, k: i64, r: i64) -> Result<Self> {
        if k < 0 {
            return Err(Error::NegativeIndex { name: "k", value: k });
        }
        if r < 0 {
            return Err(Error::NegativeIndex { name: "r", value: r });
        }
        Ok(ConeSpec {
            base,
            k: k as u64,
            r: r as u64,
        })
    }
}

pub fn enumerate_cone(spec: &ConeSpec, q: u32) -> Result<Vec<TreeVertex>> {
    check_branching(q)?;
    let mut out = Vec::new();
    for_each_in_cone(&spec.base, spec.k, spec.r, q, |y| out.push(y.clone()));
    Ok(out)
}

/// Visits every vertex of `T_{k,r}(base)` without collecting them.
pub fn for_each_in_cone(
    base: &TreeVertex,
    k: u64,
    r: u64,
    q: u32,
    mut visit: impl FnMut(&TreeVertex),
) {
    let top = base.ancestor(k);
    if r == 0 {
        visit(&top);
        return;
    }
    let avoid = (k >= 1).then(|| base.label_at(top.hor + 1));
    for s in (0..q).filter(|&s| Some(s) != avoid) {
        let child = top.successor(s);
        descend(&child, r - 1, q, &mut visit);
    }
}

/// A uniform draw from `T_{k,r}(base)`.
pub fn sample_in_cone<R: rand::Rng + ?Sized>(base: &TreeVertex, k: u64, r: u64, q: u32, rng: &mut R) -> TreeVertex {
    let mut v = base.ancestor(k);
    if r == 0 {
        return v;
    }
    let first = if k >= 1 {
        // skip the branch that leads back towards base
        let avoid = base.label_at(v.hor + 1);
        let s = rng.random_range(0..q - 1);
        if s >= avoid {
            s + 1
        } else {
            s
        }
    } else {
        rng.random_range(0..q)
    };
    v = v.successor(first);
    for _ in 1..r {
        v = v.successor(rng.random_range(0..q));
    }
    v
}

fn descend(v: &TreeVertex, depth: u64, q: u32, visit: &mut impl FnMut(&TreeVertex)) {
    if depth == 0 {
        visit(v);
        return;
    }
    for s in 0..q {
        descend(&v.successor(s), depth - 1, q, visit);
    }
}

/// All vertices within graph distance `radius` of `center`.
pub fn ball(center: &TreeVertex, radius: u64, q: u32) -> Result<Vec<TreeVertex>> {
    check_branching(q)?;
    let mut seen: HashSet<TreeVertex> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(center.clone());
    queue.push_back((center.clone(), 0u64));
    while let Some((v, d)) = queue.pop_front() {
        if d < radius {
            for w in neighbors(&v, q)? {
                if seen.insert(w.clone()) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// An end `ξ ∈ ∂*T`, given by a vertex on the geodesic `⟨ω ξ⟩`; below the
/// anchor the ray continues through symbol 0 forever.
///
/// Quantities that would depend on the ray below the anchor are refused with
/// [`Error::InsufficientDepth`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub anchor: TreeVertex,
}

impl BoundaryPoint {
    pub fn new(anchor: TreeVertex) -> Self {
        BoundaryPoint { anchor }
    }

    /// The same end, anchored `n` levels deeper.
    pub fn deepen(&self, n: u64) -> Self {
        BoundaryPoint::new(geodesic_toward(self, n))
    }

    /// Label of the ray at `level`.
    pub fn label_at(&self, level: i64) -> u32 {
        self.anchor.label_at(level)
    }

    /// Horocycle of `x ⋏ ξ`, or `InsufficientDepth` when it lies strictly
    /// below the anchor.
    pub fn confluent_level(&self, x: &TreeVertex) -> Result<i64> {
        let level = confluent_level(x, &self.anchor);
        // Above the anchor level the ray is the anchor's own path.
        let level = if level < self.anchor.hor || x.hor <= self.anchor.hor {
            level
        } else {
            // x runs through the anchor; follow the zero continuation.
            x.labels
                .range(self.anchor.hor + 1..)
                .next()
                .map_or(x.hor, |(&h, _)| h - 1)
        };
        if level > self.anchor.hor {
            return Err(Error::InsufficientDepth {
                anchor_hor: self.anchor.hor,
                confluent_hor: level,
            });
        }
        Ok(level)
    }
}

/// `up(x, ξ) = hor(x) − hor(x ⋏ ξ)`.
pub fn up_to_boundary(x: &TreeVertex, xi: &BoundaryPoint) -> Result<u64> {
    Ok((x.hor - xi.confluent_level(x)?) as u64)
}

/// The vertex of `⟨ω ξ⟩` on horocycle `hor(anchor) + n`.
pub fn geodesic_toward(xi: &BoundaryPoint, n: u64) -> TreeVertex {
    TreeVertex {
        hor: xi.anchor.hor + n as i64,
        labels: xi.anchor.labels.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn v(hor: i64, word: &[(u64, u32)]) -> TreeVertex {
        TreeVertex::from_word(hor, word.iter().copied())
    }

    /// Distances from `center` by breadth-first search up to `radius`.
    fn bfs(center: &TreeVertex, radius: u64, q: u32) -> HashMap<TreeVertex, u64> {
        let mut dist = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(center.clone(), 0);
        queue.push_back(center.clone());
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == radius {
                continue;
            }
            for y in neighbors(&x, q).unwrap() {
                dist.entry(y.clone()).or_insert_with(|| {
                    queue.push_back(y.clone());
                    d + 1
                });
            }
        }
        dist
    }

    /// Ancestors of `x`, `x` first, up to horocycle `floor`.
    fn ancestors(x: &TreeVertex, floor: i64) -> Vec<TreeVertex> {
        let mut out = vec![x.clone()];
        let mut cur = x.clone();
        while cur.hor() > floor {
            cur = cur.predecessor();
            out.push(cur.clone());
        }
        out
    }

    fn arb_vertex(q: u32) -> impl Strategy<Value = TreeVertex> {
        (
            -6i64..6,
            prop::collection::btree_map(0u64..10, 1..q, 0..5),
        )
            .prop_map(|(hor, word)| TreeVertex::from_word(hor, word))
    }

    #[test]
    fn predecessor_examples() {
        assert_eq!(predecessor(&TreeVertex::root()), TreeVertex::zero(-1));
        assert_eq!(predecessor(&v(1, &[(0, 1)])), TreeVertex::root());
        assert_eq!(predecessor(&v(5, &[(0, 1), (1, 1)])), v(4, &[(0, 1)]));
    }

    #[test]
    fn word_round_trip_through_levels() {
        let x = v(3, &[(0, 2), (4, 1)]);
        assert_eq!(x.symbol(0), 2);
        assert_eq!(x.symbol(4), 1);
        assert_eq!(x.symbol(1), 0);
        assert_eq!(x.word(), BTreeMap::from([(0, 2), (4, 1)]));
        // zero symbols are not stored, so equality is canonical
        assert_eq!(v(3, &[(0, 2), (2, 0)]), v(3, &[(0, 2)]));
    }

    #[test]
    fn successors_of_root() {
        let s = successors(&TreeVertex::root(), 2).unwrap();
        assert_eq!(s, vec![v(1, &[]), v(1, &[(0, 1)])]);
        assert!(successors(&TreeVertex::root(), 1).is_err());
    }

    #[test]
    fn confluent_examples() {
        let o = TreeVertex::root();
        let x = v(1, &[(0, 1)]);
        assert_eq!(confluent(&x, &x), x);
        assert_eq!(confluent(&x, &o), o);
        assert_eq!(confluent(&x, &v(1, &[])), o);
        assert_eq!(up(&x, &x), 0);
        assert_eq!(up(&x, &o), 1);
        assert_eq!(up(&o, &x), 0);
    }

    #[test]
    fn confluent_matches_ancestor_enumeration_on_ball() {
        // brute force: deepest common element of the two ancestor chains
        let ball3 = ball(&TreeVertex::root(), 3, 2).unwrap();
        for x in &ball3 {
            for y in &ball3 {
                let ax = ancestors(x, -10);
                let ay: HashSet<_> = ancestors(y, -10).into_iter().collect();
                let expected = ax.into_iter().find(|a| ay.contains(a)).unwrap();
                assert_eq!(confluent(x, y), expected);
            }
        }
    }

    #[test]
    fn up_distance_matches_bfs() {
        for q in [2, 3] {
            let o = TreeVertex::root();
            let b = ball(&o, 4, q).unwrap();
            for x in &b {
                let d = bfs(x, 8, q);
                for y in &b {
                    assert_eq!(up(x, y) + up(y, x), d[y]);
                    assert_eq!(up(y, x) as i64 - up(x, y) as i64, y.hor() - x.hor());
                }
            }
        }
    }

    #[test]
    fn cone_count_examples() {
        assert_eq!(cone_count(2, 3, 0).unwrap(), 1);
        assert_eq!(cone_count(2, 0, 3).unwrap(), 8);
        assert_eq!(cone_count(2, 1, 1).unwrap(), 1);
        assert_eq!(cone_count(3, 2, 2).unwrap(), 6);
        assert!(cone_count(1, 0, 0).is_err());
        assert!(cone_count(2, 0, 200).is_err());
        assert!(ConeSpec::new(TreeVertex::root(), -1, 0).is_err());
        assert!(ConeSpec::new(TreeVertex::root(), 0, -2).is_err());
    }

    #[test]
    fn cone_count_matches_ball_classification() {
        // Count T_{k,r}(x) by classifying the whole ball of radius k + r.
        for q in [2u32, 3] {
            let x = v(1, &[(0, 1)]);
            let b = ball(&x, 8, q).unwrap();
            for k in 0..=4u64 {
                for r in 0..=4u64 {
                    if k + r > 8 {
                        continue;
                    }
                    let brute = b
                        .iter()
                        .filter(|y| up(&x, y) == k && up(y, &x) == r)
                        .count() as u128;
                    assert_eq!(cone_count(q, k as u32, r as u32).unwrap(), brute, "q={q} k={k} r={r}");
                    let spec = ConeSpec::new(x.clone(), k as i64, r as i64).unwrap();
                    let cone = enumerate_cone(&spec, q).unwrap();
                    assert_eq!(cone.len() as u128, brute);
                    assert_eq!(cone_size(q, k, r), brute as f64);
                    for y in &cone {
                        assert_eq!((up(&x, y), up(y, &x)), (k, r));
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_cone_examples() {
        let o = TreeVertex::root();
        let c = |k, r| enumerate_cone(&ConeSpec::new(o.clone(), k, r).unwrap(), 2).unwrap();
        assert_eq!(c(0, 0), vec![o.clone()]);
        assert_eq!(c(2, 0), vec![o.predecessor().predecessor()]);
    }

    #[test]
    fn class_representative_lies_in_its_class() {
        let o = TreeVertex::root();
        for u in 0..5 {
            for s in 0..5 {
                let y = TreeVertex::class_representative(u, s);
                assert_eq!((up(&o, &y), up(&y, &o)), (u, s));
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let o = TreeVertex::root();
        let xi = BoundaryPoint::new(o.clone());
        assert_eq!(up_to_boundary(&o, &xi).unwrap(), 0);
        assert_eq!(up_to_boundary(&o.predecessor(), &xi).unwrap(), 0);
        assert_eq!(geodesic_toward(&xi, 0), o);
        for n in 0..=20 {
            assert_eq!(geodesic_toward(&xi, n).hor() - o.hor(), n as i64);
        }
        // x below the anchor on the zero continuation: refused
        let below = geodesic_toward(&xi, 2);
        assert!(matches!(
            up_to_boundary(&below, &xi),
            Err(Error::InsufficientDepth { .. })
        ));
        // x below the anchor but off the ray: the confluent is the anchor itself
        let off = geodesic_toward(&xi, 1).successor(1);
        assert!(up_to_boundary(&off, &xi).is_err());
        let off = o.successor(1);
        assert_eq!(up_to_boundary(&off, &xi).unwrap(), 1);
    }

    #[test]
    fn up_to_boundary_stabilises_along_the_ray() {
        let xi = BoundaryPoint::new(v(6, &[(0, 1), (2, 1), (5, 1)]));
        let b = ball(&TreeVertex::root(), 3, 2).unwrap();
        for x in &b {
            let exact = up_to_boundary(x, &xi).unwrap();
            for n in 0..10 {
                assert_eq!(up(x, &geodesic_toward(&xi, n)), exact);
            }
        }
    }

    #[test]
    fn cylinders_partition_anchored_rays() {
        // Every ray through the depth-4 descendants of o_2 in T_2 falls in exactly
        // one nonempty Ω_k(o) ∩ Ω_l(x), and the cylinder is determined by (k, l).
        let o = TreeVertex::root();
        let x = v(1, &[(0, 1)]);
        let top = TreeVertex::zero(-2);
        let ends: Vec<BoundaryPoint> = enumerate_cone(&ConeSpec::new(top, 0, 6).unwrap(), 2)
            .unwrap()
            .into_iter()
            .map(BoundaryPoint::new)
            .collect();
        let mut cells: HashMap<(u64, u64), usize> = HashMap::new();
        for xi in &ends {
            let key = (
                up_to_boundary(&o, xi).unwrap(),
                up_to_boundary(&x, xi).unwrap(),
            );
            *cells.entry(key).or_default() += 1;
        }
        assert_eq!(cells.values().sum::<usize>(), ends.len());
        // ray through x, through o's other child, and via o_1 / o_2 branches
        for key in [(0, 0), (0, 1), (1, 2), (2, 3)] {
            assert!(cells.contains_key(&key), "{key:?}");
        }
    }

    #[test]
    fn json_encoding() {
        let x = v(-2, &[(0, 1), (3, 2)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"hor":-2,"word":{"0":1,"3":2}}"#);
        let back: TreeVertex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let xi: BoundaryPoint = serde_json::from_str(r#"{"anchor":{"hor":0,"word":{}}}"#).unwrap();
        assert_eq!(xi.anchor, TreeVertex::root());
    }

    proptest! {
        #[test]
        fn successors_invert_predecessor(x in arb_vertex(3)) {
            let succ = successors(&x, 3).unwrap();
            prop_assert_eq!(succ.len(), 3);
            let distinct: HashSet<_> = succ.iter().collect();
            prop_assert_eq!(distinct.len(), 3);
            for s in &succ {
                prop_assert_eq!(s.hor(), x.hor() + 1);
                prop_assert_eq!(&s.predecessor(), &x);
            }
            prop_assert!(successors(&x.predecessor(), 3).unwrap().contains(&x));
        }

        #[test]
        fn confluent_is_symmetric_common_ancestor(x in arb_vertex(2), y in arb_vertex(2)) {
            let c = confluent(&x, &y);
            prop_assert_eq!(&c, &confluent(&y, &x));
            prop_assert!(c.is_ancestor_of(&x));
            prop_assert!(c.is_ancestor_of(&y));
            prop_assert_eq!(up(&y, &x) as i64 - up(&x, &y) as i64, y.hor() - x.hor());
        }

        #[test]
        fn geodesic_points_nest(word in prop::collection::btree_map(0u64..8, 1u32..3, 0..4), n in 0u64..15, m in 0u64..15) {
            let xi = BoundaryPoint::new(TreeVertex::from_word(2, word));
            let a = geodesic_toward(&xi, n);
            let b = geodesic_toward(&xi, m);
            prop_assert_eq!(confluent(&a, &b), geodesic_toward(&xi, n.min(m)));
            if n > 0 {
                prop_assert_eq!(distance(&a, &geodesic_toward(&xi, n - 1)), 1);
            }
        }
    }
}
