//! Point sets and axis-aligned boxes.
//!
//! Locations are stored as a flat row-major buffer (`len × dim`), which keeps
//! distance loops allocation-free and cache-friendly for the 10³–10⁴ point
//! sets the benchmarks use.

use crate::error::{Error, Result};

/// A set of points in `dim`-dimensional space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    /// Empty point set in `dim` dimensions (`dim` ∈ 1..=3).
    pub fn new(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dim must be 1, 2 or 3");
        Points {
            dim,
            data: Vec::new(),
        }
    }

    /// Builds from a flat row-major buffer; `data.len()` must be a multiple of `dim`.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        assert!((1..=3).contains(&dim), "dim must be 1, 2 or 3");
        if data.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "flat buffer length {} is not a multiple of dim {}",
                data.len(),
                dim
            )));
        }
        Ok(Points { dim, data })
    }

    /// Convenience constructor for 1-d point sets.
    pub fn from_coords_1d(xs: &[f64]) -> Self {
        Points {
            dim: 1,
            data: xs.to_vec(),
        }
    }

    /// Appends one point; panics if the slice length differs from `dim`.
    pub fn push(&mut self, coords: &[f64]) {
        assert_eq!(coords.len(), self.dim, "coordinate count != dim");
        self.data.extend_from_slice(coords);
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// True if the set holds no points.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of point `i`.
    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterator over point rows.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Concatenates two point sets of equal dimension.
    pub fn concat(&self, other: &Points) -> Points {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Points {
            dim: self.dim,
            data,
        }
    }
}

/// Euclidean distance between two coordinate slices of equal length.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// An axis-aligned box, the domain abstraction used by bases and experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoundingBox {
    /// Box from per-axis bounds; every `hi` must exceed its `lo`.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() > 3 {
            return Err(Error::InvalidParameter(format!(
                "box needs matching lo/hi of dimension 1..=3, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for ax in 0..lo.len() {
            if !(hi[ax] > lo[ax]) {
                return Err(Error::InvalidParameter(format!(
                    "box axis {ax}: hi {} must exceed lo {}",
                    hi[ax], lo[ax]
                )));
            }
        }
        Ok(BoundingBox { lo, hi })
    }

    /// The square `[lo, hi]²`.
    pub fn square(lo: f64, hi: f64) -> Self {
        BoundingBox::new(vec![lo, lo], vec![hi, hi]).expect("square bounds")
    }

    /// The interval `[lo, hi]` as a 1-d box.
    pub fn interval(lo: f64, hi: f64) -> Self {
        BoundingBox::new(vec![lo], vec![hi]).expect("interval bounds")
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Lower corner.
    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    /// Upper corner.
    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Side length along `axis`.
    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    /// Volume (area in 2-d, length in 1-d).
    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|ax| self.side(ax)).product()
    }

    /// The box grown by `margin` on every side of every axis.
    pub fn expanded(&self, margin: f64) -> BoundingBox {
        BoundingBox {
            lo: self.lo.iter().map(|x| x - margin).collect(),
            hi: self.hi.iter().map(|x| x + margin).collect(),
        }
    }

    /// True if `p` lies inside (inclusive, with tolerance `tol`).
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.iter()
            .enumerate()
            .all(|(ax, &x)| x >= self.lo[ax] - tol && x <= self.hi[ax] + tol)
    }

    /// The concentric box with half the side length on every axis
    /// (one quarter of the area in 2-d).
    pub fn central_quarter(&self) -> BoundingBox {
        let lo = (0..self.dim())
            .map(|ax| self.lo[ax] + 0.25 * self.side(ax))
            .collect();
        let hi = (0..self.dim())
            .map(|ax| self.hi[ax] - 0.25 * self.side(ax))
            .collect();
        BoundingBox { lo, hi }
    }

    /// Regular grid with `counts[ax]` points per axis, endpoints included.
    ///
    /// Points are emitted with the *last* axis varying fastest (row-major over
    /// axis indices), matching the Kronecker ordering used for tensor bases.
    pub fn grid(&self, counts: &[usize]) -> Points {
        assert_eq!(counts.len(), self.dim(), "counts per axis");
        assert!(counts.iter().all(|&c| c >= 1), "at least one point per axis");
        let total: usize = counts.iter().product();
        let mut pts = Points::new(self.dim());
        let mut coord = vec![0.0; self.dim()];
        for flat in 0..total {
            let mut rem = flat;
            // decode row-major multi-index: last axis fastest
            for ax in (0..self.dim()).rev() {
                let idx = rem % counts[ax];
                rem /= counts[ax];
                coord[ax] = if counts[ax] == 1 {
                    0.5 * (self.lo[ax] + self.hi[ax])
                } else {
                    self.lo[ax] + self.side(ax) * idx as f64 / (counts[ax] - 1) as f64
                };
            }
            pts.push(&coord);
        }
        pts
    }

    /// Lattice of cell midpoints: `counts[ax]` cells per axis, points at the
    /// cell centers. Used for process-convolution kernel placement.
    pub fn cell_centers(&self, counts: &[usize]) -> Points {
        assert_eq!(counts.len(), self.dim(), "counts per axis");
        let total: usize = counts.iter().product();
        let mut pts = Points::new(self.dim());
        let mut coord = vec![0.0; self.dim()];
        for flat in 0..total {
            let mut rem = flat;
            for ax in (0..self.dim()).rev() {
                let idx = rem % counts[ax];
                rem /= counts[ax];
                coord[ax] = self.lo[ax] + self.side(ax) * (idx as f64 + 0.5) / counts[ax] as f64;
            }
            pts.push(&coord);
        }
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_roundtrip() {
        let mut p = Points::new(2);
        p.push(&[0.5, 1.5]);
        p.push(&[2.0, 3.0]);
        assert_eq!(p.len(), 2);
        assert_eq!(p.get(1), &[2.0, 3.0]);
        assert_eq!(p.iter().count(), 2);
    }

    #[test]
    fn flat_buffer_must_divide() {
        assert!(Points::from_flat(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(Points::from_flat(2, vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn distance_matches_hand_value() {
        assert!((dist(&[0.0, 0.0], &[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn grid_orders_last_axis_fastest() {
        let b = BoundingBox::square(0.0, 1.0);
        let g = b.grid(&[2, 3]);
        assert_eq!(g.len(), 6);
        assert_eq!(g.get(0), &[0.0, 0.0]);
        assert_eq!(g.get(1), &[0.0, 0.5]);
        assert_eq!(g.get(3), &[1.0, 0.0]);
    }

    #[test]
    fn central_quarter_has_quarter_area() {
        let b = BoundingBox::square(0.0, 8.0);
        let q = b.central_quarter();
        assert_eq!(q.lo(), &[2.0, 2.0]);
        assert_eq!(q.hi(), &[6.0, 6.0]);
        assert!((q.volume() - b.volume() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn expansion_grows_every_side() {
        let b = BoundingBox::square(0.0, 5.0).expanded(2.0);
        assert_eq!(b.lo(), &[-2.0, -2.0]);
        assert_eq!(b.hi(), &[7.0, 7.0]);
    }

    #[test]
    fn cell_centers_are_midpoints() {
        let b = BoundingBox::square(0.0, 2.0);
        let c = b.cell_centers(&[2, 2]);
        assert_eq!(c.len(), 4);
        assert_eq!(c.get(0), &[0.5, 0.5]);
        assert_eq!(c.get(3), &[1.5, 1.5]);
    }
}
