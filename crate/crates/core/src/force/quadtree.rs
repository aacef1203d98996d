//! Pairwise repulsion, exact and Barnes-Hut approximated.
//!
//! The repulsion on node `i` from node `j` is
//! `(p_i - p_j) * strength / max(d^2, 1)`. Callers fold the annealing
//! temperature into `strength`.

use crate::scalar::{Scalar, Vec2};

/// Exact O(n^2) repulsion, summed in canonical index order.
pub fn repulsion_brute<S: Scalar>(positions: &[Vec2<S>], strength: S) -> Vec<Vec2<S>> {
    positions
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut f = Vec2::zero();
            for (j, &q) in positions.iter().enumerate() {
                if i != j {
                    f += pair_force(p - q, S::one(), strength);
                }
            }
            f
        })
        .collect()
}

#[inline]
fn pair_force<S: Scalar>(delta: Vec2<S>, charge: S, strength: S) -> Vec2<S> {
    let d2 = delta.norm_sq().max(S::one());
    delta * (strength * charge / d2)
}

/// Barnes-Hut repulsion. A cell is used as a single pseudo-charge when
/// `cell_width <= theta * distance_to_center_of_mass` and the cell does not
/// contain the node itself; leaves are summed exactly. `theta = 0` therefore
/// degenerates to the exact sum in tree order.
pub fn repulsion_bh<S: Scalar>(positions: &[Vec2<S>], strength: S, theta: S) -> Vec<Vec2<S>> {
    if positions.len() < 2 {
        return vec![Vec2::zero(); positions.len()];
    }
    let tree = QuadTree::build(positions);
    positions
        .iter()
        .enumerate()
        .map(|(i, &p)| tree.force_on(i, p, positions, strength, theta))
        .collect()
}

const MAX_DEPTH: u32 = 48;

struct Cell<S> {
    origin: Vec2<S>,
    width: S,
    children: [u32; 4],
    /// point indices; only leaves hold points
    points: Vec<u32>,
    count: usize,
    center_of_mass: Vec2<S>,
}

const NONE: u32 = u32::MAX;

impl<S: Scalar> Cell<S> {
    fn new(origin: Vec2<S>, width: S) -> Self {
        Self {
            origin,
            width,
            children: [NONE; 4],
            points: Vec::new(),
            count: 0,
            center_of_mass: Vec2::zero(),
        }
    }

    fn is_leaf(&self) -> bool {
        self.children == [NONE; 4]
    }

    fn contains(&self, p: Vec2<S>) -> bool {
        p.x >= self.origin.x
            && p.y >= self.origin.y
            && p.x <= self.origin.x + self.width
            && p.y <= self.origin.y + self.width
    }
}

struct QuadTree<S> {
    cells: Vec<Cell<S>>,
}

impl<S: Scalar> QuadTree<S> {
    fn build(positions: &[Vec2<S>]) -> Self {
        let mut min = positions[0];
        let mut max = positions[0];
        for p in positions {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        let mut width = (max.x - min.x).max(max.y - min.y);
        if width <= S::zero() {
            width = S::one();
        }
        let mut tree = Self {
            cells: vec![Cell::new(min, width)],
        };
        for i in 0..positions.len() {
            tree.insert(0, i as u32, positions, 0);
        }
        tree.summarize(0, positions);
        tree
    }

    fn quadrant(&self, cell: usize, p: Vec2<S>) -> usize {
        let c = &self.cells[cell];
        let half = c.width / S::of(2.0);
        let right = p.x >= c.origin.x + half;
        let below = p.y >= c.origin.y + half;
        (right as usize) | ((below as usize) << 1)
    }

    fn child(&mut self, cell: usize, q: usize) -> usize {
        if self.cells[cell].children[q] == NONE {
            let c = &self.cells[cell];
            let half = c.width / S::of(2.0);
            let mut origin = c.origin;
            if q & 1 == 1 {
                origin.x += half;
            }
            if q & 2 == 2 {
                origin.y += half;
            }
            self.cells.push(Cell::new(origin, half));
            let idx = (self.cells.len() - 1) as u32;
            self.cells[cell].children[q] = idx;
        }
        self.cells[cell].children[q] as usize
    }

    fn insert(&mut self, cell: usize, point: u32, positions: &[Vec2<S>], depth: u32) {
        if self.cells[cell].is_leaf() {
            if self.cells[cell].points.is_empty() || depth >= MAX_DEPTH {
                self.cells[cell].points.push(point);
                return;
            }
            // split: push resident points down
            let resident = std::mem::take(&mut self.cells[cell].points);
            for r in resident {
                let q = self.quadrant(cell, positions[r as usize]);
                let ch = self.child(cell, q);
                self.insert(ch, r, positions, depth + 1);
            }
        }
        let q = self.quadrant(cell, positions[point as usize]);
        let ch = self.child(cell, q);
        self.insert(ch, point, positions, depth + 1);
    }

    fn summarize(&mut self, cell: usize, positions: &[Vec2<S>]) {
        let mut count = 0usize;
        let mut sum = Vec2::zero();
        if self.cells[cell].is_leaf() {
            for &p in &self.cells[cell].points {
                sum += positions[p as usize];
                count += 1;
            }
        } else {
            for q in 0..4 {
                let ch = self.cells[cell].children[q];
                if ch == NONE {
                    continue;
                }
                self.summarize(ch as usize, positions);
                let c = &self.cells[ch as usize];
                sum += c.center_of_mass * S::of(c.count as f64);
                count += c.count;
            }
        }
        let c = &mut self.cells[cell];
        c.count = count;
        if count > 0 {
            c.center_of_mass = sum * (S::one() / S::of(count as f64));
        }
    }

    fn force_on(&self, i: usize, p: Vec2<S>, positions: &[Vec2<S>], strength: S, theta: S) -> Vec2<S> {
        let mut f = Vec2::zero();
        let mut stack = vec![0usize];
        while let Some(ci) = stack.pop() {
            let c = &self.cells[ci];
            if c.count == 0 {
                continue;
            }
            if c.is_leaf() {
                for &j in &c.points {
                    if j as usize != i {
                        f += pair_force(p - positions[j as usize], S::one(), strength);
                    }
                }
                continue;
            }
            let delta = p - c.center_of_mass;
            if !c.contains(p) && c.width <= theta * delta.norm() {
                f += pair_force(delta, S::of(c.count as f64), strength);
                continue;
            }
            // reversed so children are visited in quadrant order
            for &ch in c.children.iter().rev() {
                if ch != NONE {
                    stack.push(ch as usize);
                }
            }
        }
        f
    }
}
