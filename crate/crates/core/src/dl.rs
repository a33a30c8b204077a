//! Diestel-Leader graphs `DL(q, r)` and the lamplighter group `Z_q ≀ Z`.
//!
//! A vertex is a lamp configuration together with the lamplighter position
//! `k`. Lamps sit at edge midpoints `m − ½`, stored under the integer code
//! `m`. Lamps with code `≤ k` (left of the lamplighter) take green states in
//! `{0,…,q−1}`, lamps with code `≥ k+1` take red states in `{0,…,r−1}`.
//!
//! Splitting the configuration at `k` gives the two tree projections: the
//! green half is the vertex `π₁x` of `T_q` on horocycle `k` (lamp code `c` is
//! its label on level `c`), the red half is `π₂x` of `T_r` on horocycle `−k`
//! (lamp code `c` is its label on level `1 − c`).

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{self, check_branching, TreeVertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn from_index(i: u8) -> Result<Side> {
        match i {
            1 => Ok(Side::One),
            2 => Ok(Side::Two),
            _ => Err(Error::schema("side", format!("expected 1 or 2, got {i}"))),
        }
    }
}

/// A vertex `(η, k)` of `DL(q, r)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DLVertex {
    pub pos: i64,
    // code m (lamp at m − ½) -> nonzero state
    #[serde(default)]
    lamps: BTreeMap<i64, u32>,
}

impl std::fmt::Debug for DLVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:?}, {})", self.lamps, self.pos)
    }
}

impl DLVertex {
    pub fn root() -> Self {
        DLVertex {
            pos: 0,
            lamps: BTreeMap::new(),
        }
    }

    /// Builds a vertex without checking lamp states against the colours.
    pub fn from_lamps(pos: i64, lamps: impl IntoIterator<Item = (i64, u32)>) -> Self {
        DLVertex {
            pos,
            lamps: lamps.into_iter().filter(|&(_, s)| s != 0).collect(),
        }
    }

    pub fn new(pos: i64, lamps: impl IntoIterator<Item = (i64, u32)>, q: u32, r: u32) -> Result<Self> {
        let x = Self::from_lamps(pos, lamps);
        x.validate(q, r)?;
        Ok(x)
    }

    pub fn validate(&self, q: u32, r: u32) -> Result<()> {
        check_branching(q)?;
        check_branching(r)?;
        for (&code, &s) in &self.lamps {
            let alphabet = if code <= self.pos { q } else { r };
            if s >= alphabet {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet });
            }
        }
        Ok(())
    }

    pub fn lamp(&self, code: i64) -> u32 {
        self.lamps.get(&code).copied().unwrap_or(0)
    }

    pub fn lamps(&self) -> &BTreeMap<i64, u32> {
        &self.lamps
    }

    pub fn is_root(&self) -> bool {
        self.pos == 0 && self.lamps.is_empty()
    }

    pub(crate) fn set_lamp(&mut self, code: i64, state: u32) {
        if state == 0 {
            self.lamps.remove(&code);
        } else {
            self.lamps.insert(code, state);
        }
    }
}

/// `π_side x`.
pub fn project(x: &DLVertex, side: Side) -> TreeVertex {
    match side {
        Side::One => TreeVertex::from_levels(x.pos, x.lamps.range(..=x.pos).map(|(&c, &s)| (c, s))),
        Side::Two => TreeVertex::from_levels(
            -x.pos,
            x.lamps.range(x.pos + 1..).map(|(&c, &s)| (1 - c, s)),
        ),
    }
}

pub fn split(x: &DLVertex) -> (TreeVertex, TreeVertex) {
    (project(x, Side::One), project(x, Side::Two))
}

/// The vertex `x₁x₂` with the given projections.
pub fn compose(x1: &TreeVertex, x2: &TreeVertex) -> Result<DLVertex> {
    if x1.hor() + x2.hor() != 0 {
        return Err(Error::HorocycleMismatch(x1.hor(), x2.hor()));
    }
    let lamps = x1
        .levels()
        .iter()
        .map(|(&h, &s)| (h, s))
        .chain(x2.levels().iter().map(|(&h, &s)| (1 - h, s)))
        .collect();
    Ok(DLVertex {
        pos: x1.hor(),
        lamps,
    })
}

/// The `q + r` neighbours: first the `q` moves to `k+1` (new green state at
/// `k+½`), then the `r` moves to `k−1` (new red state at `k−½`).
pub fn neighbors(x: &DLVertex, q: u32, r: u32) -> Result<Vec<DLVertex>> {
    check_branching(q)?;
    check_branching(r)?;
    let mut out = Vec::with_capacity((q + r) as usize);
    for s in 0..q {
        let mut y = x.clone();
        y.set_lamp(x.pos + 1, s);
        y.pos += 1;
        out.push(y);
    }
    for s in 0..r {
        let mut y = x.clone();
        y.set_lamp(x.pos, s);
        y.pos -= 1;
        out.push(y);
    }
    Ok(out)
}

/// Left/right flags of an ordered pair and the induced up-values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagData {
    pub fl1: i64,
    pub fl2: i64,
    pub up1: u64,
    pub up2: u64,
}

/// Flags by scanning the configurations: the leftmost and rightmost
/// positions the lamplighter must visit to turn `x` into `y`. A differing lamp
/// on the edge `[m, m+1]` forces a visit to both `m` and `m+1`.
pub fn flags(x: &DLVertex, y: &DLVertex) -> FlagData {
    let mut fl1 = x.pos.min(y.pos);
    let mut fl2 = x.pos.max(y.pos);
    let codes: std::collections::BTreeSet<i64> = x.lamps.keys().chain(y.lamps.keys()).copied().collect();
    for c in codes {
        if x.lamp(c) != y.lamp(c) {
            fl1 = fl1.min(c - 1);
            fl2 = fl2.max(c);
        }
    }
    FlagData {
        fl1,
        fl2,
        up1: (x.pos - fl1) as u64,
        up2: (fl2 - x.pos) as u64,
    }
}

/// Flags through the tree confluents: `fl₁ = hor(x₁ ⋏ y₁)`, `fl₂ = −hor(x₂ ⋏ y₂)`.
pub fn flags_via_trees(x: &DLVertex, y: &DLVertex) -> FlagData {
    let (x1, x2) = split(x);
    let (y1, y2) = split(y);
    let fl1 = tree::confluent_level(&x1, &y1);
    let fl2 = -tree::confluent_level(&x2, &y2);
    FlagData {
        fl1,
        fl2,
        up1: (x.pos - fl1) as u64,
        up2: (fl2 - x.pos) as u64,
    }
}

/// Up-quadruple `(up(x₁,y₁), up(y₁,x₁), up(x₂,y₂), up(y₂,x₂))`.
pub fn up_quadruple(x: &DLVertex, y: &DLVertex) -> [u64; 4] {
    let f = flags(x, y);
    [
        f.up1,
        (y.pos - f.fl1) as u64,
        f.up2,
        (f.fl2 - y.pos) as u64,
    ]
}

/// Graph distance `d(x₁,y₁) + d(x₂,y₂) − |hor(x₁) − hor(y₁)|`.
pub fn dl_distance(x: &DLVertex, y: &DLVertex) -> u64 {
    let (x1, x2) = split(x);
    let (y1, y2) = split(y);
    tree::distance(&x1, &y1) + tree::distance(&x2, &y2) - (x.pos - y.pos).unsigned_abs()
}

pub fn ball(center: &DLVertex, radius: u64, q: u32, r: u32) -> Result<Vec<DLVertex>> {
    let mut seen: HashSet<DLVertex> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(center.clone());
    queue.push_back((center.clone(), 0u64));
    while let Some((v, d)) = queue.pop_front() {
        if d < radius {
            for w in neighbors(&v, q, r)? {
                if seen.insert(w.clone()) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        out.push(v);
    }
    Ok(out)
}

fn check_group(q: u32, r: u32) -> Result<()> {
    check_branching(q)?;
    if q != r {
        return Err(Error::ColorMismatch { q, r });
    }
    Ok(())
}

/// `(η, k)(η′, k′) = (η + T_k η′, k + k′)` in `Z_q ≀ Z`.
pub fn group_multiply(x: &DLVertex, y: &DLVertex, q: u32, r: u32) -> Result<DLVertex> {
    check_group(q, r)?;
    let mut out = x.clone();
    for (&c, &s) in &y.lamps {
        let code = c + x.pos;
        out.set_lamp(code, (out.lamp(code) + s) % q);
    }
    out.pos = x.pos + y.pos;
    Ok(out)
}

pub fn group_inverse(x: &DLVertex, q: u32, r: u32) -> Result<DLVertex> {
    check_group(q, r)?;
    Ok(DLVertex {
        pos: -x.pos,
        lamps: x
            .lamps
            .iter()
            .map(|(&c, &s)| (c - x.pos, (q - s) % q))
            .collect(),
    })
}

/// `π_side(g·x)` for any `x` with `π_side(x) = v`.
pub fn induced_tree_action(g: &DLVertex, v: &TreeVertex, side: Side, q: u32, r: u32) -> Result<TreeVertex> {
    check_group(q, r)?;
    let (hor, mut labels): (i64, BTreeMap<i64, u32>) = match side {
        // level h of the image carries lamp code h of g·x
        Side::One => (
            v.hor() + g.pos,
            v.levels().iter().map(|(&h, &s)| (h + g.pos, s)).collect(),
        ),
        // level h of the image carries lamp code 1 − h of g·x
        Side::Two => (
            v.hor() - g.pos,
            v.levels().iter().map(|(&h, &s)| (h - g.pos, s)).collect(),
        ),
    };
    for (&c, &s) in &g.lamps {
        let level = match side {
            Side::One => c,
            Side::Two => 1 - c,
        };
        if level <= hor {
            let e = labels.entry(level).or_insert(0);
            *e = (*e + s) % q;
        }
    }
    Ok(TreeVertex::from_levels(hor, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn bfs(center: &DLVertex, radius: u64, q: u32, r: u32) -> HashMap<DLVertex, u64> {
        let mut dist = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(center.clone(), 0);
        queue.push_back(center.clone());
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == radius {
                continue;
            }
            for y in neighbors(&x, q, r).unwrap() {
                dist.entry(y.clone()).or_insert_with(|| {
                    queue.push_back(y.clone());
                    d + 1
                });
            }
        }
        dist
    }

    fn arb_dl(q: u32) -> impl Strategy<Value = DLVertex> {
        (-5i64..5, prop::collection::btree_map(-6i64..6, 1..q, 0..6))
            .prop_map(|(pos, lamps)| DLVertex::from_lamps(pos, lamps))
    }

    #[test]
    fn projection_examples() {
        let o = DLVertex::root();
        assert_eq!(project(&o, Side::One), TreeVertex::root());
        assert_eq!(project(&o, Side::Two), TreeVertex::root());
        // lamp at ½ on, lamplighter at 1
        let x = DLVertex::new(1, [(1, 1)], 2, 2).unwrap();
        assert_eq!(project(&x, Side::One), TreeVertex::from_word(1, [(0, 1)]));
        assert_eq!(project(&x, Side::Two), TreeVertex::zero(-1));
    }

    #[test]
    fn compose_examples() {
        let o = TreeVertex::root();
        assert_eq!(compose(&o, &o).unwrap(), DLVertex::root());
        assert!(matches!(
            compose(&TreeVertex::zero(1), &TreeVertex::zero(0)),
            Err(Error::HorocycleMismatch(1, 0))
        ));
    }

    #[test]
    fn colour_validation() {
        // code 1 is red at pos 0, so state 2 is fine in DL(2,3) but not in DL(3,2)
        assert!(DLVertex::new(0, [(1, 2)], 2, 3).is_ok());
        assert!(DLVertex::new(0, [(1, 2)], 3, 2).is_err());
        assert!(DLVertex::new(0, [(0, 2)], 3, 2).is_ok());
    }

    #[test]
    fn neighbor_counts_and_symmetry() {
        let o = DLVertex::root();
        assert_eq!(neighbors(&o, 2, 3).unwrap().len(), 5);
        for (q, r) in [(2, 2), (2, 3)] {
            let b = ball(&o, 3, q, r).unwrap();
            for x in &b {
                let nx = neighbors(x, q, r).unwrap();
                assert_eq!(nx.len(), (q + r) as usize);
                let distinct: HashSet<_> = nx.iter().collect();
                assert_eq!(distinct.len(), (q + r) as usize);
                let (x1, x2) = split(x);
                for y in &nx {
                    assert!(neighbors(y, q, r).unwrap().contains(x));
                    let (y1, y2) = split(y);
                    assert_eq!(tree::distance(&x1, &y1), 1);
                    assert_eq!(tree::distance(&x2, &y2), 1);
                }
            }
        }
    }

    #[test]
    fn horocycles_cancel_on_ball() {
        for x in ball(&DLVertex::root(), 3, 2, 3).unwrap() {
            let (x1, x2) = split(&x);
            assert_eq!(x1.hor() + x2.hor(), 0);
            assert_eq!(compose(&x1, &x2).unwrap(), x);
        }
    }

    #[test]
    fn flag_examples() {
        let o = DLVertex::root();
        let f = flags(&o, &o);
        assert_eq!(f, FlagData { fl1: 0, fl2: 0, up1: 0, up2: 0 });
        let y = DLVertex::new(0, [(1, 1)], 2, 2).unwrap();
        let f = flags(&o, &y);
        assert_eq!((f.fl1, f.fl2), (0, 1));
        assert_eq!(f, flags_via_trees(&o, &y));
        let y = DLVertex::new(0, [(0, 1)], 2, 2).unwrap();
        assert_eq!((flags(&o, &y).fl1, flags(&o, &y).fl2), (-1, 0));
    }

    #[test]
    fn scan_flags_match_tree_flags_on_ball() {
        for (q, r) in [(2, 2), (2, 3)] {
            let b = ball(&DLVertex::root(), 3, q, r).unwrap();
            for x in &b {
                for y in &b {
                    let f = flags(x, y);
                    assert_eq!(f, flags_via_trees(x, y), "{x:?} {y:?}");
                    assert!(f.fl1 <= x.pos.min(y.pos) && f.fl2 >= x.pos.max(y.pos));
                }
            }
        }
    }

    #[test]
    fn distance_example() {
        let y = DLVertex::new(2, [(1, 1), (2, 1)], 2, 3).unwrap();
        let o = DLVertex::root();
        let (y1, y2) = split(&y);
        assert_eq!(tree::distance(&TreeVertex::root(), &y1), 2);
        assert_eq!(tree::distance(&TreeVertex::root(), &y2), 2);
        assert_eq!(dl_distance(&o, &y), 2);
        assert_eq!(bfs(&o, 3, 2, 3)[&y], 2);
    }

    #[test]
    fn distance_matches_bfs() {
        for (q, r) in [(2, 2), (2, 3), (3, 2)] {
            let o = DLVertex::root();
            let dist = bfs(&o, 4, q, r);
            for (y, d) in &dist {
                assert_eq!(dl_distance(&o, y), *d, "{y:?}");
            }
            let x = DLVertex::new(-1, [(0, 1), (2, 1)], q, r).unwrap();
            let dist = bfs(&x, 3, q, r);
            for (y, d) in &dist {
                assert_eq!(dl_distance(&x, y), *d, "{y:?}");
            }
        }
    }

    #[test]
    fn distance_is_a_metric_on_small_ball() {
        let b = ball(&DLVertex::root(), 2, 2, 3).unwrap();
        for x in &b {
            assert_eq!(dl_distance(x, x), 0);
            for y in &b {
                let dxy = dl_distance(x, y);
                assert_eq!(dxy, dl_distance(y, x));
                if x != y {
                    assert!(dxy > 0);
                }
                for z in &b {
                    assert!(dl_distance(x, z) <= dxy + dl_distance(y, z));
                }
            }
        }
    }

    #[test]
    fn up_identity_on_ball() {
        let b = ball(&DLVertex::root(), 3, 2, 3).unwrap();
        for x in &b {
            for y in &b {
                let [a, b_, c, d] = up_quadruple(x, y);
                assert_eq!(a + c, b_ + d);
            }
        }
    }

    #[test]
    fn group_examples() {
        let o = DLVertex::root();
        let x = DLVertex::new(1, [(1, 1)], 2, 2).unwrap();
        let y = DLVertex::new(-1, [(1, 1)], 2, 2).unwrap();
        assert_eq!(group_multiply(&x, &o, 2, 2).unwrap(), x);
        assert_eq!(group_multiply(&o, &x, 2, 2).unwrap(), x);
        assert_eq!(
            group_multiply(&x, &y, 2, 2).unwrap(),
            DLVertex::new(0, [(1, 1), (2, 1)], 2, 2).unwrap()
        );
        assert!(matches!(
            group_multiply(&x, &y, 2, 3),
            Err(Error::ColorMismatch { q: 2, r: 3 })
        ));
    }

    #[test]
    fn induced_action_of_identity_and_translation() {
        let o = DLVertex::root();
        let v = TreeVertex::from_word(2, [(0, 1), (3, 1)]);
        assert_eq!(induced_tree_action(&o, &v, Side::One, 2, 2).unwrap(), v);
        assert_eq!(induced_tree_action(&o, &v, Side::Two, 2, 2).unwrap(), v);
        let g = DLVertex::new(3, [(0, 1)], 2, 2).unwrap();
        assert_eq!(induced_tree_action(&g, &v, Side::One, 2, 2).unwrap().hor(), 5);
        assert_eq!(induced_tree_action(&g, &v, Side::Two, 2, 2).unwrap().hor(), -1);
    }

    #[test]
    fn left_translation_is_an_automorphism_on_ball() {
        let q = 2;
        let g = DLVertex::new(1, [(-1, 1), (2, 1)], q, q).unwrap();
        let b = ball(&DLVertex::root(), 2, q, q).unwrap();
        let image: HashSet<_> = b.iter().map(|x| group_multiply(&g, x, q, q).unwrap()).collect();
        assert_eq!(image.len(), b.len());
        for x in &b {
            let gx = group_multiply(&g, x, q, q).unwrap();
            let n_gx: HashSet<_> = neighbors(&gx, q, q).unwrap().into_iter().collect();
            for y in neighbors(x, q, q).unwrap() {
                assert!(n_gx.contains(&group_multiply(&g, &y, q, q).unwrap()));
            }
        }
    }

    proptest! {
        #[test]
        fn compose_round_trip(x in arb_dl(3)) {
            let (x1, x2) = split(&x);
            prop_assert_eq!(x1.hor() + x2.hor(), 0);
            prop_assert_eq!(compose(&x1, &x2).unwrap(), x);
        }

        #[test]
        fn inverse_and_associativity(x in arb_dl(3), y in arb_dl(3), z in arb_dl(3)) {
            let q = 3;
            let xi = group_inverse(&x, q, q).unwrap();
            prop_assert!(group_multiply(&x, &xi, q, q).unwrap().is_root());
            prop_assert!(group_multiply(&xi, &x, q, q).unwrap().is_root());
            let left = group_multiply(&group_multiply(&x, &y, q, q).unwrap(), &z, q, q).unwrap();
            let right = group_multiply(&x, &group_multiply(&y, &z, q, q).unwrap(), q, q).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn induced_action_is_well_defined_isometry(g in arb_dl(2), x in arb_dl(2), other in prop::collection::btree_map(-6i64..6, 1u32..2, 0..4)) {
            let q = 2;
            for side in [Side::One, Side::Two] {
                let v = project(&x, side);
                // a second lift of v: change the lamps that the other projection sees
                let mut lift = x.clone();
                for (&c, &s) in &other {
                    let visible_elsewhere = match side { Side::One => c > x.pos, Side::Two => c <= x.pos };
                    if visible_elsewhere { lift.set_lamp(c, s); }
                }
                prop_assert_eq!(project(&lift, side), v.clone());
                let image = induced_tree_action(&g, &v, side, q, q).unwrap();
                prop_assert_eq!(&image, &project(&group_multiply(&g, &x, q, q).unwrap(), side));
                prop_assert_eq!(&image, &project(&group_multiply(&g, &lift, q, q).unwrap(), side));
                let shift = match side { Side::One => g.pos, Side::Two => -g.pos };
                prop_assert_eq!(image.hor(), v.hor() + shift);
                let w = project(&other_vertex(&other), side);
                let w_image = induced_tree_action(&g, &w, side, q, q).unwrap();
                prop_assert_eq!(tree::distance(&image, &w_image), tree::distance(&v, &w));
            }
        }
    }

    fn other_vertex(lamps: &BTreeMap<i64, u32>) -> DLVertex {
        DLVertex::from_lamps(1, lamps.iter().map(|(&c, &s)| (c, s)))
    }
}
