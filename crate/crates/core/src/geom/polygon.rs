use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::cloud::{bbox_of, convex_hull, PointCloud};
use super::vec::{Vec2Q, Vec2R};
use crate::error::{Error, Result};

/// A segment of positive length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub p: Vec2R,
    pub q: Vec2R,
}

impl Segment {
    pub fn new(p: Vec2R, q: Vec2R) -> Result<Self> {
        if p == q {
            return Err(Error::invalid("segment", "endpoints coincide"));
        }
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::invalid("segment", "non-finite endpoint"));
        }
        Ok(Self { p, q })
    }

    pub fn length(&self) -> f64 {
        self.p.dist(self.q)
    }

    pub fn direction(&self) -> Vec2R {
        self.q - self.p
    }

    /// `dy/dx`; infinite for vertical segments.
    pub fn slope(&self) -> f64 {
        let d = self.direction();
        d.y / d.x
    }

    pub fn point_at(&self, t: f64) -> Vec2R {
        self.p + (self.q - self.p) * t
    }

    pub fn distance_to(&self, x: Vec2R) -> f64 {
        point_segment_distance(x, self.p, self.q)
    }
}

pub(crate) fn point_segment_distance(x: Vec2R, p: Vec2R, q: Vec2R) -> f64 {
    let d = q - p;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return x.dist(p);
    }
    let t = ((x - p).dot(d) / len_sq).clamp(0.0, 1.0);
    x.dist(p + d * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolygonKind {
    Point,
    Segment,
    Proper,
}

/// Convex polygon given by its counterclockwise vertex cycle.
///
/// A single vertex is a point and two vertices a segment; both are flagged
/// through [`PolygonKind`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2R>,
    kind: PolygonKind,
    symmetric: bool,
}

impl ConvexPolygon {
    /// Convex hull of arbitrary points.
    pub fn hull_of(points: &[Vec2R]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("polygon", "no points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("polygon", "non-finite vertex"));
        }
        Ok(Self::from_hull(convex_hull(points)))
    }

    pub fn point(p: Vec2R) -> Self {
        Self::from_hull(vec![p])
    }

    fn from_hull(vertices: Vec<Vec2R>) -> Self {
        let kind = match vertices.len() {
            1 => PolygonKind::Point,
            2 => PolygonKind::Segment,
            _ => PolygonKind::Proper,
        };
        let symmetric = is_point_symmetric(&vertices);
        Self {
            vertices,
            kind,
            symmetric,
        }
    }

    pub fn vertices(&self) -> &[Vec2R] {
        &self.vertices
    }

    pub fn kind(&self) -> PolygonKind {
        self.kind
    }

    pub fn is_degenerate(&self) -> bool {
        self.kind != PolygonKind::Proper
    }

    pub fn is_point_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn center(&self) -> Vec2R {
        let n = self.vertices.len() as f64;
        self.vertices.iter().fold(Vec2R::ZERO, |acc, &v| acc + v) / n
    }

    pub fn translate(&self, t: Vec2R) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| v + t).collect(),
            kind: self.kind,
            symmetric: self.symmetric,
        }
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        Self::hull_of(&self.vertices.iter().map(|&v| v * s).collect::<Vec<_>>())
    }

    /// `P + [-v, v]`.
    pub fn stretch(&self, v: Vec2R) -> Result<Self> {
        let mut pts = Vec::with_capacity(2 * self.vertices.len());
        for &p in &self.vertices {
            pts.push(p + v);
            pts.push(p - v);
        }
        Self::hull_of(&pts)
    }

    pub fn bbox(&self) -> (Vec2R, Vec2R) {
        bbox_of(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(a.dist(*b));
            }
        }
        best
    }

    pub fn area(&self) -> f64 {
        if self.kind != PolygonKind::Proper {
            return 0.0;
        }
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn contains(&self, x: Vec2R) -> bool {
        self.distance_to(x) == 0.0
    }

    /// Euclidean distance from `x` to the polygon (0 inside).
    pub fn distance_to(&self, x: Vec2R) -> f64 {
        let v = &self.vertices;
        match self.kind {
            PolygonKind::Point => x.dist(v[0]),
            PolygonKind::Segment => point_segment_distance(x, v[0], v[1]),
            PolygonKind::Proper => {
                let n = v.len();
                let inside = (0..n).all(|i| (v[(i + 1) % n] - v[i]).cross(x - v[i]) >= 0.0);
                if inside {
                    return 0.0;
                }
                (0..n)
                    .map(|i| point_segment_distance(x, v[i], v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// `sup_{x ∈ cloud} d(x, P)`.
    pub fn directed_from_cloud(&self, cloud: &PointCloud) -> f64 {
        cloud
            .points()
            .par_iter()
            .map(|&p| self.distance_to(p))
            .reduce(|| 0.0, f64::max)
    }

    /// Samples the polygon with boundary points and an interior grid, both at `spacing`.
    ///
    /// Every point of the polygon is within `spacing` of some sample; that is
    /// recorded as the cloud's resolution hint.
    pub fn sample(&self, spacing: f64) -> Result<PointCloud> {
        if !(spacing > 0.0) {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        let v = &self.vertices;
        let mut pts = Vec::new();
        let n = v.len();
        let edges = if n == 1 {
            0
        } else if n == 2 {
            1
        } else {
            n
        };
        for i in 0..edges {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let steps = ((a.dist(b) / spacing).ceil() as usize).max(1);
            for k in 0..steps {
                pts.push(a + (b - a) * (k as f64 / steps as f64));
            }
            if n == 2 {
                pts.push(b);
            }
        }
        if n == 1 {
            pts.push(v[0]);
        }
        if self.kind == PolygonKind::Proper {
            let (lo, hi) = self.bbox();
            let nx = ((hi.x - lo.x) / spacing).floor() as usize;
            let ny = ((hi.y - lo.y) / spacing).floor() as usize;
            for i in 1..=nx {
                for j in 1..=ny {
                    let p = Vec2R::new(lo.x + i as f64 * spacing, lo.y + j as f64 * spacing);
                    if self.contains(p) {
                        pts.push(p);
                    }
                }
            }
        }
        PointCloud::new(pts, spacing)
    }
}

fn is_point_symmetric(vertices: &[Vec2R]) -> bool {
    let n = vertices.len();
    if n <= 2 {
        return true;
    }
    if n % 2 == 1 {
        return false;
    }
    let c = vertices.iter().fold(Vec2R::ZERO, |acc, &v| acc + v) / n as f64;
    let scale = vertices
        .iter()
        .map(|v| (*v - c).norm())
        .fold(0.0, f64::max)
        .max(1.0);
    (0..n / 2).all(|i| {
        let a = vertices[i] - c;
        let b = vertices[i + n / 2] - c;
        (a + b).norm() <= 1e-9 * scale
    })
}

/// Exact vertex cycle of `Zon(v₁, …, v_l) = Σ [-vᵢ, vᵢ]`, counterclockwise,
/// plus a flag set when all generators are parallel (the zonogon is a segment).
pub fn zonogon_vertices_exact(generators: &[Vec2Q]) -> Result<(Vec<Vec2Q>, bool)> {
    if generators.is_empty() {
        return Err(Error::invalid(
            "generators",
            "at least one generator is required",
        ));
    }
    if generators.iter().any(Vec2Q::is_zero) {
        return Err(Error::invalid("generators", "zero generator"));
    }
    // Representatives in the upper half-plane, sorted by angle in [0, π).
    let mut upper: Vec<Vec2Q> = generators
        .iter()
        .map(|g| if g.is_upper() { g.clone() } else { -g })
        .collect();
    upper.sort_by(|a, b| {
        let c = a.cross(b);
        if c.is_positive() {
            std::cmp::Ordering::Less
        } else if c.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let mut merged: Vec<Vec2Q> = Vec::with_capacity(upper.len());
    for g in upper {
        match merged.last_mut() {
            Some(last) if last.cross(&g).is_zero() => *last = &*last + &g,
            _ => merged.push(g),
        }
    }
    if merged.len() == 1 {
        let g = &merged[0];
        return Ok((vec![-g, g.clone()], true));
    }
    let two = BigRational::from_integer(2.into());
    let mut start = Vec2Q::zero();
    for g in &merged {
        start = &start - g;
    }
    let mut vertices = Vec::with_capacity(2 * merged.len());
    let mut cur = start;
    for sign in [1i64, -1] {
        for g in &merged {
            vertices.push(cur.clone());
            let step = g.scale(&(&two * BigRational::from_integer(sign.into())));
            cur = &cur + &step;
        }
    }
    Ok((vertices, false))
}

/// Convex polygon `Zon(v₁, …, v_l)`, centered at the origin.
pub fn minkowski_zonogon(generators: &[Vec2Q]) -> Result<ConvexPolygon> {
    let (vertices, _) = zonogon_vertices_exact(generators)?;
    let real: Vec<Vec2R> = vertices.iter().map(Vec2Q::to_real).collect();
    Ok(ConvexPolygon::from_hull(real))
}
