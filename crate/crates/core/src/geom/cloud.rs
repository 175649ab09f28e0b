use rayon::prelude::*;

use super::vec::Vec2R;
use crate::error::{Error, Result};

/// A finite sample of a compact planar set.
///
/// `resolution_hint` records how far the true set may be from the samples,
/// so that downstream checks can budget discretization error explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec2R>,
    resolution_hint: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Vec2R>, resolution_hint: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("cloud", "point cloud is empty"));
        }
        if !(resolution_hint >= 0.0) || !resolution_hint.is_finite() {
            return Err(Error::invalid(
                "resolution_hint",
                format!("must be finite and nonnegative, got {resolution_hint}"),
            ));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::invalid("cloud", format!("non-finite point {p}")));
        }
        Ok(Self {
            points,
            resolution_hint,
        })
    }

    /// Builds a cloud whose hint is the largest nearest-neighbor spacing.
    pub fn from_points(points: Vec<Vec2R>) -> Result<Self> {
        let mut cloud = Self::new(points, 0.0)?;
        cloud.resolution_hint = max_nearest_neighbor_spacing(&cloud.points);
        Ok(cloud)
    }

    /// Wraps mapped points without validation; a non-finite point (a map
    /// evaluated outside its supported range) makes the hint infinite.
    pub(crate) fn image_of(points: Vec<Vec2R>, hint: f64) -> PointCloud {
        let finite = points.iter().all(|p| p.is_finite());
        let resolution_hint = if finite && hint >= 0.0 {
            hint
        } else {
            f64::INFINITY
        };
        PointCloud {
            points,
            resolution_hint,
        }
    }

    pub fn singleton(p: Vec2R) -> Result<Self> {
        Self::new(vec![p], 0.0)
    }

    pub fn points(&self) -> &[Vec2R] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec2R> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn resolution_hint(&self) -> f64 {
        self.resolution_hint
    }

    pub fn with_resolution_hint(mut self, hint: f64) -> Self {
        self.resolution_hint = hint.max(0.0);
        self
    }

    /// Applies `f` to every point (in parallel) keeping the order; the hint is left unchanged.
    pub fn map_points<F>(&self, f: F) -> PointCloud
    where
        F: Fn(Vec2R) -> Vec2R + Sync,
    {
        let points = self.points.par_iter().map(|&p| f(p)).collect();
        PointCloud {
            points,
            resolution_hint: self.resolution_hint,
        }
    }

    pub fn translate(&self, t: Vec2R) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|&p| p + t).collect(),
            resolution_hint: self.resolution_hint,
        }
    }

    pub fn scale(&self, s: f64) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|&p| p * s).collect(),
            resolution_hint: self.resolution_hint * s.abs(),
        }
    }

    pub fn centroid(&self) -> Vec2R {
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Vec2R::new(sx / n, sy / n)
    }

    /// `(min corner, max corner)` of the axis-aligned bounding box.
    pub fn bbox(&self) -> (Vec2R, Vec2R) {
        bbox_of(&self.points)
    }

    pub fn union(&self, other: &PointCloud) -> PointCloud {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        PointCloud {
            points,
            resolution_hint: self.resolution_hint.max(other.resolution_hint),
        }
    }

    /// Evenly strided subsample of at most about `max_points` points, starting at the first.
    pub fn subsample(&self, max_points: usize) -> Vec<Vec2R> {
        if max_points == 0 || self.points.len() <= max_points {
            return self.points.clone();
        }
        let stride = self.points.len().div_ceil(max_points);
        self.points.iter().step_by(stride).copied().collect()
    }
}

pub(crate) fn bbox_of(points: &[Vec2R]) -> (Vec2R, Vec2R) {
    let mut lo = Vec2R::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2R::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Uniform bucket grid for nearest-neighbor queries.
pub struct GridIndex<'a> {
    points: &'a [Vec2R],
    origin: Vec2R,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> GridIndex<'a> {
    pub fn new(points: &'a [Vec2R]) -> Self {
        assert!(!points.is_empty(), "grid index over empty point set");
        assert!(
            points.len() < u32::MAX as usize,
            "point set too large for index"
        );
        let (lo, hi) = bbox_of(points);
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let n = points.len() as f64;
        let extent = w.max(h);
        let mut cell = if w > 0.0 && h > 0.0 {
            (w * h * 2.0 / n).sqrt()
        } else {
            extent * 2.0 / n
        };
        if !(cell > 0.0) || !cell.is_finite() {
            cell = 1.0;
        }
        // Keep the cell count within a small multiple of the point count.
        let max_cells = (4.0 * n).max(16.0);
        while ((w / cell).floor() + 1.0) * ((h / cell).floor() + 1.0) > max_cells {
            cell *= 1.5;
        }
        let nx = (w / cell).floor() as usize + 1;
        let ny = (h / cell).floor() as usize + 1;

        let mut counts = vec![0u32; nx * ny + 1];
        let cell_ids: Vec<usize> = points
            .iter()
            .map(|p| {
                let ix = (((p.x - lo.x) / cell) as usize).min(nx - 1);
                let iy = (((p.y - lo.y) / cell) as usize).min(ny - 1);
                iy * nx + ix
            })
            .collect();
        for &c in &cell_ids {
            counts[c + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; points.len()];
        for (i, &c) in cell_ids.iter().enumerate() {
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self {
            points,
            origin: lo,
            cell,
            nx,
            ny,
            starts,
            items,
        }
    }

    fn clamp_cell(&self, p: Vec2R) -> (isize, isize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        let ix = fx.clamp(0.0, (self.nx - 1) as f64) as isize;
        let iy = fy.clamp(0.0, (self.ny - 1) as f64) as isize;
        (ix, iy)
    }

    fn scan_cell(&self, ix: isize, iy: isize, p: Vec2R, best: &mut (f64, usize)) {
        if ix < 0 || iy < 0 || ix >= self.nx as isize || iy >= self.ny as isize {
            return;
        }
        let c = iy as usize * self.nx + ix as usize;
        for &i in &self.items[self.starts[c] as usize..self.starts[c + 1] as usize] {
            let d = p.dist_sq(self.points[i as usize]);
            if d < best.0 || (d == best.0 && (i as usize) < best.1) {
                *best = (d, i as usize);
            }
        }
    }

    /// Index and distance of the nearest indexed point (lowest index on ties).
    pub fn nearest(&self, p: Vec2R) -> (usize, f64) {
        let (cx, cy) = self.clamp_cell(p);
        let mut best = (f64::INFINITY, usize::MAX);
        let max_ring = self.nx.max(self.ny) as isize;
        for r in 0..=max_ring {
            if r == 0 {
                self.scan_cell(cx, cy, p, &mut best);
            } else {
                for dx in -r..=r {
                    self.scan_cell(cx + dx, cy - r, p, &mut best);
                    self.scan_cell(cx + dx, cy + r, p, &mut best);
                }
                for dy in (-r + 1)..r {
                    self.scan_cell(cx - r, cy + dy, p, &mut best);
                    self.scan_cell(cx + r, cy + dy, p, &mut best);
                }
            }
            // Cells beyond ring r are at least r·cell away from p.
            if best.1 != usize::MAX {
                let reach = r as f64 * self.cell;
                if best.0 <= reach * reach {
                    break;
                }
            }
        }
        (best.1, best.0.sqrt())
    }

    pub fn nearest_distance(&self, p: Vec2R) -> f64 {
        self.nearest(p).1
    }
}

fn max_nearest_neighbor_spacing(points: &[Vec2R]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let index = GridIndex::new(points);
    points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            // Nearest other point: query with the point itself removed by
            // looking for the nearest distinct index.
            nearest_excluding(&index, p, i)
        })
        .reduce(|| 0.0, f64::max)
}

fn nearest_excluding(index: &GridIndex<'_>, p: Vec2R, skip: usize) -> f64 {
    let (cx, cy) = index.clamp_cell(p);
    let mut best = f64::INFINITY;
    let max_ring = index.nx.max(index.ny) as isize;
    for r in 0..=max_ring {
        let mut visit = |ix: isize, iy: isize| {
            if ix < 0 || iy < 0 || ix >= index.nx as isize || iy >= index.ny as isize {
                return;
            }
            let c = iy as usize * index.nx + ix as usize;
            for &i in &index.items[index.starts[c] as usize..index.starts[c + 1] as usize] {
                if i as usize != skip {
                    best = best.min(p.dist_sq(index.points[i as usize]));
                }
            }
        };
        if r == 0 {
            visit(cx, cy);
        } else {
            for dx in -r..=r {
                visit(cx + dx, cy - r);
                visit(cx + dx, cy + r);
            }
            for dy in (-r + 1)..r {
                visit(cx - r, cy + dy);
                visit(cx + r, cy + dy);
            }
        }
        let reach = r as f64 * index.cell;
        if best <= reach * reach {
            break;
        }
    }
    best.sqrt()
}

/// `sup_{a ∈ A} d(a, B)`.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    let index = GridIndex::new(b.points());
    directed_with_index(a.points(), &index)
}

pub(crate) fn directed_with_index(a: &[Vec2R], index: &GridIndex<'_>) -> f64 {
    a.par_iter()
        .map(|&p| index.nearest_distance(p))
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between two clouds.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// True iff every point of `y` lies within `eps` (inclusive) of some point of `x`.
pub fn eps_dense(x: &PointCloud, y: &PointCloud, eps: f64) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::invalid(
            "eps",
            format!("must be positive, got {eps}"),
        ));
    }
    Ok(directed_hausdorff(y, x) <= eps)
}

/// Convex hull by Andrew's monotone chain, counterclockwise, collinear points dropped.
/// Returns one point for a singleton and two for collinear input.
pub fn convex_hull(points: &[Vec2R]) -> Vec<Vec2R> {
    let mut pts: Vec<Vec2R> = points.to_vec();
    pts.sort_by(|p, q| p.lex_cmp(*q));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Vec2R> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2R>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let o = hull[hull.len() - 2];
                let a = hull[hull.len() - 1];
                if (a - o).cross(p - o) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // Everything collinear: keep the two extremes.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Largest pairwise distance among `points`.
pub fn diameter_of_points(points: &[Vec2R]) -> f64 {
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for j in (i + 1)..hull.len() {
            best = best.max(hull[i].dist(hull[j]));
        }
    }
    best
}

pub fn diameter(a: &PointCloud) -> f64 {
    diameter_of_points(a.points())
}

/// Samples `X + [-v, v]` by sweeping every point of `X` along the segment.
pub fn stretch(x: &PointCloud, v: Vec2R, samples_per_unit: u32) -> Result<PointCloud> {
    if v.norm_sq() == 0.0 || !v.is_finite() {
        return Err(Error::invalid(
            "v",
            "stretch direction must be nonzero and finite",
        ));
    }
    if samples_per_unit == 0 {
        return Err(Error::invalid("samples_per_unit", "must be positive"));
    }
    let len = 2.0 * v.norm();
    let steps = ((len * samples_per_unit as f64).ceil() as usize).max(1);
    let mut points = Vec::with_capacity(x.len() * (steps + 1));
    for &p in x.points() {
        for k in 0..=steps {
            let t = -1.0 + 2.0 * k as f64 / steps as f64;
            points.push(p + v * t);
        }
    }
    let spacing = len / steps as f64;
    PointCloud::new(points, x.resolution_hint().max(spacing))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(pts: &[(f64, f64)]) -> PointCloud {
        PointCloud::new(pts.iter().map(|&(x, y)| Vec2R::new(x, y)).collect(), 0.0).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let sq = cloud(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(hausdorff(&sq, &sq.translate(Vec2R::new(3.0, 0.0))), 3.0);
        assert_eq!(hausdorff(&sq, &sq), 0.0);
        let a = cloud(&[(0.0, 0.0)]);
        let b = cloud(&[(0.0, 0.0), (0.0, 2.0)]);
        assert_eq!(hausdorff(&a, &b), 2.0);
    }

    #[test]
    fn diameter_examples() {
        let sq = cloud(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!((diameter(&sq) - 2f64.sqrt()).abs() < 1e-15);
        let big = cloud(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]);
        assert!((diameter(&big) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(diameter(&cloud(&[(4.0, 5.0)])), 0.0);
        let line = cloud(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        assert!((diameter(&line) - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eps_dense_examples() {
        let x = cloud(&[(0.0, 0.0), (1.0, 0.0)]);
        let y = PointCloud::new(
            (0..=100)
                .map(|i| Vec2R::new(i as f64 / 100.0, 0.0))
                .collect(),
            0.0,
        )
        .unwrap();
        assert!(eps_dense(&x, &y, 0.5).unwrap());
        assert!(eps_dense(&y, &y, 1e-9).unwrap());
        assert!(!eps_dense(&cloud(&[(0.0, 0.0)]), &cloud(&[(0.0, 3.0)]), 1.0).unwrap());
        assert!(eps_dense(&x, &y, 0.0).is_err());
    }

    #[test]
    fn stretch_examples() {
        let s = stretch(&cloud(&[(0.0, 0.0)]), Vec2R::new(0.0, 1.0), 10).unwrap();
        let (lo, hi) = s.bbox();
        assert_eq!((lo, hi), (Vec2R::new(0.0, -1.0), Vec2R::new(0.0, 1.0)));
        assert!((s.resolution_hint() - 0.1).abs() < 1e-12);

        let s = stretch(&cloud(&[(1.0, 1.0)]), Vec2R::new(1.0, 1.0), 10).unwrap();
        let (lo, hi) = s.bbox();
        assert_eq!((lo, hi), (Vec2R::new(0.0, 0.0), Vec2R::new(2.0, 2.0)));

        assert!(stretch(&cloud(&[(0.0, 0.0)]), Vec2R::ZERO, 10).is_err());
    }

    #[test]
    fn from_points_hint_is_grid_spacing() {
        let pts: Vec<Vec2R> = (0..11)
            .flat_map(|i| (0..11).map(move |j| Vec2R::new(i as f64 / 10.0, j as f64 / 10.0)))
            .collect();
        let c = PointCloud::from_points(pts).unwrap();
        assert!((c.resolution_hint() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_clouds() {
        assert!(PointCloud::new(vec![], 0.0).is_err());
        assert!(PointCloud::new(vec![Vec2R::new(f64::NAN, 0.0)], 0.0).is_err());
        assert!(PointCloud::new(vec![Vec2R::ZERO], -1.0).is_err());
    }

    #[test]
    fn hull_drops_collinear_points() {
        let pts = [
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (2.0, 2.0),
            (0.0, 2.0),
            (1.0, 1.0),
        ];
        let h = convex_hull(
            &pts.iter()
                .map(|&(x, y)| Vec2R::new(x, y))
                .collect::<Vec<_>>(),
        );
        assert_eq!(h.len(), 4);
    }
}
