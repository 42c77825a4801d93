//! Toroidal world geometry and neighbor search.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Width and height of the wrap-around world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Torus {
    pub width: f64,
    pub height: f64,
}

impl Torus {
    pub fn new(width: f64, height: f64) -> Self {
        debug_assert!(width > 0.0 && height > 0.0);
        Self { width, height }
    }

    pub fn contains(&self, p: Position) -> bool {
        (0.0..self.width).contains(&p.x) && (0.0..self.height).contains(&p.y)
    }

    pub fn displace(&self, p: Position, dx: f64, dy: f64) -> Position {
        torus_displace(p, dx, dy, self.width, self.height)
    }

    pub fn distance(&self, p: Position, q: Position) -> f64 {
        torus_distance(p, q, self.width, self.height)
    }

    /// Largest possible distance between two points.
    pub fn max_distance(&self) -> f64 {
        (0.25 * (self.width * self.width + self.height * self.height)).sqrt()
    }
}

#[inline]
fn wrap(v: f64, extent: f64) -> f64 {
    let r = v.rem_euclid(extent);
    // rem_euclid rounds tiny negatives up to `extent` itself.
    if r >= extent {
        0.0
    } else {
        r
    }
}

/// Moves `p` by `(dx, dy)` and wraps the result into `[0, w) x [0, h)`.
pub fn torus_displace(p: Position, dx: f64, dy: f64, w: f64, h: f64) -> Position {
    Position {
        x: wrap(p.x + dx, w),
        y: wrap(p.y + dy, h),
    }
}

/// Shortest Euclidean distance between `p` and `q` over all wrapped images.
#[inline]
pub fn torus_distance(p: Position, q: Position, w: f64, h: f64) -> f64 {
    let mut dx = (p.x - q.x).abs();
    let mut dy = (p.y - q.y).abs();
    if dx > w - dx {
        dx = w - dx;
    }
    if dy > h - dy {
        dy = h - dy;
    }
    (dx * dx + dy * dy).sqrt()
}

/// Uniform bucket grid over the torus with cells at least `radius` wide, so
/// every neighbor within `radius` lies in the 3x3 block of cells around the
/// query point. Storage is a counting-sort layout: `ids[starts[c]..starts[c+1]]`
/// are the points in cell `c`, in ascending id order.
/// Wider cells only cost extra distance checks, so tiny radii get capped.
const MAX_CELLS_PER_AXIS: usize = 1024;

#[derive(Debug, Clone)]
pub struct SpatialGrid {
    torus: Torus,
    radius: f64,
    cols: usize,
    rows: usize,
    cell_w: f64,
    cell_h: f64,
    starts: Vec<u32>,
    ids: Vec<u32>,
    cell_of: Vec<u32>,
}

impl SpatialGrid {
    pub fn new(torus: Torus, radius: f64) -> Self {
        assert!(radius > 0.0, "neighbor radius must be positive");
        let cols = ((torus.width / radius).floor() as usize).clamp(1, MAX_CELLS_PER_AXIS);
        let rows = ((torus.height / radius).floor() as usize).clamp(1, MAX_CELLS_PER_AXIS);
        Self {
            torus,
            radius,
            cols,
            rows,
            cell_w: torus.width / cols as f64,
            cell_h: torus.height / rows as f64,
            starts: vec![0; cols * rows + 1],
            ids: Vec::new(),
            cell_of: Vec::new(),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    fn cell_coords(&self, p: Position) -> (usize, usize) {
        let cx = ((p.x / self.cell_w) as usize).min(self.cols - 1);
        let cy = ((p.y / self.cell_h) as usize).min(self.rows - 1);
        (cx, cy)
    }

    /// Re-buckets all points. Point `i` gets id `i`.
    pub fn rebuild(&mut self, positions: &[Position]) {
        let ncells = self.cols * self.rows;
        let mut cell_of = std::mem::take(&mut self.cell_of);
        cell_of.clear();
        cell_of.extend(positions.iter().map(|&p| {
            let (cx, cy) = self.cell_coords(p);
            (cy * self.cols + cx) as u32
        }));
        self.cell_of = cell_of;
        self.starts.iter_mut().for_each(|s| *s = 0);
        for &c in &self.cell_of {
            self.starts[c as usize + 1] += 1;
        }
        for c in 0..ncells {
            self.starts[c + 1] += self.starts[c];
        }
        self.ids.resize(positions.len(), 0);
        let mut cursor: Vec<u32> = self.starts[..ncells].to_vec();
        for (i, &c) in self.cell_of.iter().enumerate() {
            let slot = &mut cursor[c as usize];
            self.ids[*slot as usize] = i as u32;
            *slot += 1;
        }
    }

    /// Ids of all points other than `center` within `radius` of point
    /// `center`, ascending. `positions` must be the slice last passed to
    /// [`rebuild`](Self::rebuild).
    pub fn neighbors_into(&self, positions: &[Position], center: usize, out: &mut Vec<u32>) {
        out.clear();
        let p = positions[center];
        let (cx, cy) = self.cell_coords(p);
        let mut cells = [usize::MAX; 9];
        let mut n = 0;
        for dy in [self.rows - 1, 0, 1] {
            for dx in [self.cols - 1, 0, 1] {
                let c = ((cy + dy) % self.rows) * self.cols + (cx + dx) % self.cols;
                // Small grids wrap onto the same cell more than once.
                if !cells[..n].contains(&c) {
                    cells[n] = c;
                    n += 1;
                }
            }
        }
        for &c in &cells[..n] {
            let bucket = &self.ids[self.starts[c] as usize..self.starts[c + 1] as usize];
            for &j in bucket {
                if j as usize != center
                    && self.torus.distance(p, positions[j as usize]) <= self.radius
                {
                    out.push(j);
                }
            }
        }
        out.sort_unstable();
    }
}

/// O(N) scan used as the oracle for [`SpatialGrid`].
pub fn brute_force_neighbors(
    torus: Torus,
    positions: &[Position],
    center: usize,
    radius: f64,
) -> Vec<u32> {
    let p = positions[center];
    positions
        .iter()
        .enumerate()
        .filter(|&(j, &q)| j != center && torus.distance(p, q) <= radius)
        .map(|(j, _)| j as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RngStream, StreamLabel};
    use proptest::prelude::*;

    const W: f64 = 200.0;

    #[test]
    fn displace_examples() {
        let p = torus_displace(Position::new(10.0, 10.0), 0.0, 0.0, W, W);
        assert_eq!(p, Position::new(10.0, 10.0));
        let p = torus_displace(Position::new(199.5, 0.0), 1.0, 0.0, W, W);
        assert_eq!(p, Position::new(0.5, 0.0));
        let p = torus_displace(Position::new(0.0, 0.0), -0.5, 0.0, W, W);
        assert_eq!(p, Position::new(199.5, 0.0));
    }

    #[test]
    fn displace_tiny_negative_stays_in_bounds() {
        let p = torus_displace(Position::new(0.0, 0.0), -1e-300, -1e-17, W, W);
        assert!(Torus::new(W, W).contains(p), "{p:?}");
    }

    #[test]
    fn distance_examples() {
        let p = Position::new(3.0, 4.0);
        assert_eq!(torus_distance(p, p, W, W), 0.0);
        let d = torus_distance(Position::new(1.0, 0.0), Position::new(199.0, 0.0), W, W);
        assert_eq!(d, 2.0);
        let d = torus_distance(Position::new(0.0, 0.0), Position::new(100.0, 100.0), W, W);
        assert!((d - 100.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_matches_brute_force_on_tiny_world() {
        // 5x5 world with radius 2 gives a 2x2 grid, where the 3x3 block wraps.
        let torus = Torus::new(5.0, 5.0);
        let mut rng = RngStream::new(1, StreamLabel::Placement);
        let pos: Vec<Position> = (0..60)
            .map(|_| Position::new(rng.uniform() * 5.0, rng.uniform() * 5.0))
            .collect();
        let mut grid = SpatialGrid::new(torus, 2.0);
        grid.rebuild(&pos);
        let mut out = Vec::new();
        for i in 0..pos.len() {
            grid.neighbors_into(&pos, i, &mut out);
            assert_eq!(out, brute_force_neighbors(torus, &pos, i, 2.0));
        }
    }

    #[test]
    fn radius_larger_than_world() {
        let torus = Torus::new(10.0, 10.0);
        let pos = vec![
            Position::new(0.0, 0.0),
            Position::new(5.0, 5.0),
            Position::new(9.9, 0.1),
        ];
        let mut grid = SpatialGrid::new(torus, 50.0);
        grid.rebuild(&pos);
        let mut out = Vec::new();
        grid.neighbors_into(&pos, 0, &mut out);
        assert_eq!(out, vec![1, 2]);
    }

    proptest! {
        #[test]
        fn displace_always_in_bounds(
            x in 0.0..W, y in 0.0..W,
            dx in -1e6f64..1e6, dy in -1e6f64..1e6,
        ) {
            let p = torus_displace(Position::new(x, y), dx, dy, W, W);
            prop_assert!(Torus::new(W, W).contains(p));
        }

        #[test]
        fn distance_symmetric_and_bounded(
            px in 0.0..W, py in 0.0..150.0, qx in 0.0..W, qy in 0.0..150.0,
            rx in 0.0..W, ry in 0.0..150.0,
        ) {
            let (p, q, r) = (Position::new(px, py), Position::new(qx, qy), Position::new(rx, ry));
            let d = |a, b| torus_distance(a, b, W, 150.0);
            prop_assert_eq!(d(p, q), d(q, p));
            prop_assert!(d(p, q) <= W / 2f64.sqrt() + 150.0 / 2f64.sqrt());
            prop_assert!(d(p, q) <= Torus::new(W, 150.0).max_distance() + 1e-9);
            prop_assert!(d(p, r) <= d(p, q) + d(q, r) + 1e-9);
        }
    }
}
