use rand::Rng;

use crate::tree::TreeVertex;
use crate::walk::TreeWalk;

/// A tree vertex held as a dense strip of labels, for long simulations.
///
/// Labels above the current horocycle are kept at zero, so the lowest
/// nonzero label (cached) gives the confluent with the root directly.
#[derive(Clone, Debug)]
pub struct TreeCursor {
    q: u32,
    hor: i64,
    base: i64,
    labels: Vec<u32>,
    first_nonzero: Option<i64>,
}

impl TreeCursor {
    pub fn new(start: &TreeVertex, q: u32) -> Self {
        let low = start.levels().keys().next().copied().unwrap_or(start.hor()).min(start.hor());
        let base = low - 16;
        let mut cursor = TreeCursor {
            q,
            hor: start.hor(),
            base,
            labels: vec![0; (start.hor() - base + 64) as usize],
            first_nonzero: None,
        };
        for (&level, &s) in start.levels() {
            cursor.set(level, s);
        }
        cursor
    }

    pub fn hor(&self) -> i64 {
        self.hor
    }

    pub fn label_at(&self, level: i64) -> u32 {
        if level < self.base || level > self.hor {
            return 0;
        }
        self.labels.get((level - self.base) as usize).copied().unwrap_or(0)
    }

    /// Horocycle of `o ⋏ x`.
    pub fn root_confluent(&self) -> i64 {
        let top = self.hor.min(0);
        match self.first_nonzero {
            Some(f) if f <= top => f - 1,
            _ => top,
        }
    }

    /// `up(o, x)`.
    pub fn up_from_root(&self) -> u64 {
        (-self.root_confluent()) as u64
    }

    pub fn is_root(&self) -> bool {
        self.hor == 0 && self.first_nonzero.is_none_or(|f| f > 0)
    }

    /// The ancestor of the current vertex on horocycle `level` (or the vertex
    /// itself when `level` is below it).
    pub fn vertex_at(&self, level: i64) -> TreeVertex {
        let hor = level.min(self.hor);
        let from = self.first_nonzero.unwrap_or(hor + 1);
        TreeVertex::from_levels(hor, (from..=hor).map(|l| (l, self.label_at(l))))
    }

    pub fn to_vertex(&self) -> TreeVertex {
        self.vertex_at(self.hor)
    }

    /// Move into a uniform vertex of `T_{k,r}(x)`.
    pub fn jump<R: Rng + ?Sized>(&mut self, k: u64, r: u64, rng: &mut R) {
        let top = self.hor - k as i64;
        let avoid = self.label_at(top + 1);
        for level in top + 1..=self.hor {
            self.set(level, 0);
        }
        self.hor = top;
        if r == 0 {
            return;
        }
        let first = if k >= 1 {
            let s = rng.random_range(0..self.q - 1);
            if s >= avoid {
                s + 1
            } else {
                s
            }
        } else {
            rng.random_range(0..self.q)
        };
        self.set(top + 1, first);
        for level in top + 2..=top + r as i64 {
            let s = rng.random_range(0..self.q);
            self.set(level, s);
        }
        self.hor = top + r as i64;
    }

    pub fn step<R: Rng + ?Sized>(&mut self, w: &TreeWalk, rng: &mut R) {
        let (k, r) = w.sample_class(rng);
        self.jump(k, r, rng);
    }

    fn set(&mut self, level: i64, s: u32) {
        if level < self.base {
            if s == 0 {
                return;
            }
            let grow = (self.base - level + 64) as usize;
            self.labels.splice(0..0, std::iter::repeat_n(0, grow));
            self.base -= grow as i64;
        }
        let i = (level - self.base) as usize;
        if i >= self.labels.len() {
            if s == 0 {
                return;
            }
            self.labels.resize(i + 64, 0);
        }
        let old = std::mem::replace(&mut self.labels[i], s);
        if s != 0 {
            if self.first_nonzero.is_none_or(|f| level < f) {
                self.first_nonzero = Some(level);
            }
        } else if old != 0 && self.first_nonzero == Some(level) {
            self.first_nonzero = self.labels[i + 1..]
                .iter()
                .position(|&x| x != 0)
                .map(|p| level + 1 + p as i64);
        }
    }
}
