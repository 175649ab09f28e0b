//! Finite-time estimates of rotation sets, generalized rotation sets and
//! related diagnostics, all computed from the sampled fundamental domain.

use rayon::prelude::*;

use crate::dynamics::{FundamentalDomain, PlaneMap, SampledSet};
use crate::error::{Error, Result};
use crate::geom::{diameter, hausdorff, ConvexPolygon, GridIndex, PointCloud, Vec2R};

/// Convex hull of `f̃ⁿ(D)/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationEstimate {
    pub n: usize,
    pub hull: ConvexPolygon,
    pub diameter: f64,
}

/// `f̃ⁿ(D)` of the sampled domain, without coverage tracking.
fn iterate_points<M: PlaneMap + ?Sized>(map: &M, n: usize, dom: &FundamentalDomain) -> SampledSet {
    let mut current = dom.sampled_set();
    for _ in 0..n {
        current = current.map_untracked(map);
    }
    current
}

pub fn rotation_set_estimate<M: PlaneMap + ?Sized>(
    map: &M,
    n: usize,
    dom: &FundamentalDomain,
) -> Result<RotationEstimate> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let image = iterate_points(map, n, dom).into_samples();
    let scaled: Vec<Vec2R> = image.points().iter().map(|&p| p / n as f64).collect();
    let hull = ConvexPolygon::hull_of(&scaled)?;
    let diameter = hull.diameter();
    Ok(RotationEstimate { n, hull, diameter })
}

/// Normalized iterates `(f̃^{n_i}(D) − f̃^{n_i}(x̃₀)) / diam f̃^{n_i}(D)`.
#[derive(Clone, Debug)]
pub struct GeneralizedRotEstimate {
    pub subsequence: Vec<usize>,
    /// Normalized clouds; each hint is the coverage estimate divided by the diameter.
    pub clouds: Vec<PointCloud>,
    /// `diam f̃^{n_i}(D)` before normalization.
    pub diam_trace: Vec<f64>,
    /// Largest pairwise Hausdorff distance among the last three normalized clouds.
    pub cauchy_gap: f64,
    /// False when the diameters fail to increase along the subsequence, in
    /// which case no generalized rotation set is suggested.
    pub diameter_grows: bool,
}

/// Diameter below which a term cannot be normalized.
pub const MIN_NORMALIZABLE_DIAMETER: f64 = 1e-9;

pub fn generalized_rot_estimate<M: PlaneMap + ?Sized>(
    map: &M,
    subsequence: &[usize],
    dom: &FundamentalDomain,
) -> Result<GeneralizedRotEstimate> {
    if subsequence.is_empty() {
        return Err(Error::invalid("subsequence", "must not be empty"));
    }
    if subsequence[0] == 0 || subsequence.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "subsequence",
            "must be strictly increasing positive integers",
        ));
    }
    let base = dom.basepoint_index();
    let mut current = dom.sampled_set();
    let mut done = 0usize;
    let mut clouds = Vec::with_capacity(subsequence.len());
    let mut diam_trace = Vec::with_capacity(subsequence.len());
    for &n in subsequence {
        for _ in done..n {
            current = current.map_untracked(map);
        }
        done = n;
        let samples = current.covered_samples();
        let diam = diameter(&samples);
        if !(diam >= MIN_NORMALIZABLE_DIAMETER) {
            return Err(Error::Degenerate(format!(
                "iterate {n} has diameter {diam:e}, too small to normalize"
            )));
        }
        let anchor = samples.points()[base];
        clouds.push(samples.translate(-anchor).scale(1.0 / diam));
        diam_trace.push(diam);
    }
    let tail = &clouds[clouds.len().saturating_sub(3)..];
    let mut cauchy_gap = 0.0f64;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            cauchy_gap = cauchy_gap.max(hausdorff(a, b));
        }
    }
    let diameter_grows =
        diam_trace.len() > 1 && diam_trace.windows(2).all(|w| w[1] > w[0] * (1.0 + 1e-9));
    Ok(GeneralizedRotEstimate {
        subsequence: subsequence.to_vec(),
        clouds,
        diam_trace,
        cauchy_gap,
        diameter_grows,
    })
}

/// `max_x |⟨f̃ⁿ(x) − x − nρ, v⟩|` for `n = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationProfile {
    pub v: Vec2R,
    pub rho: Vec2R,
    pub deviations: Vec<f64>,
}

impl DeviationProfile {
    pub fn max(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

pub fn deviation_profile<M: PlaneMap + ?Sized>(
    map: &M,
    v: Vec2R,
    rho: Vec2R,
    steps: usize,
    dom: &FundamentalDomain,
) -> Result<DeviationProfile> {
    if !v.is_finite() || v == Vec2R::ZERO {
        return Err(Error::invalid("v", "must be a nonzero finite vector"));
    }
    if !rho.is_finite() {
        return Err(Error::invalid("rho", "must be finite"));
    }
    if steps == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    let start = dom.cloud().points();
    let mut current = start.to_vec();
    let mut deviations = Vec::with_capacity(steps);
    for n in 1..=steps {
        current.par_iter_mut().for_each(|p| *p = map.apply(*p));
        let shift = rho * n as f64;
        let dev = current
            .par_iter()
            .zip(start.par_iter())
            .map(|(&y, &x)| (y - x - shift).dot(v).abs())
            .reduce(|| 0.0, f64::max);
        deviations.push(dev);
    }
    Ok(DeviationProfile { v, rho, deviations })
}

/// Flat torus distance between the projections of two points of the plane.
pub fn torus_distance(a: Vec2R, b: Vec2R) -> f64 {
    let d = a - b;
    Vec2R::new(d.x - d.x.round(), d.y - d.y.round()).norm()
}

/// `max_x d_T²(fⁿ(x), x)` for `n = 1..=N`.
pub fn rigidity_profile<M: PlaneMap + ?Sized>(
    map: &M,
    steps: usize,
    dom: &FundamentalDomain,
) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    let start = dom.cloud().points();
    let mut current = start.to_vec();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        current.par_iter_mut().for_each(|p| *p = map.apply(*p));
        let worst = current
            .par_iter()
            .zip(start.par_iter())
            .map(|(&y, &x)| torus_distance(y, x))
            .reduce(|| 0.0, f64::max);
        out.push(worst);
    }
    Ok(out)
}

/// `max_x |f(x) − x|` over the sampled domain; for a map commuting with
/// integer translations this is its displacement bound on the whole plane,
/// up to sampling.
pub fn displacement_bound<M: PlaneMap + ?Sized>(map: &M, dom: &FundamentalDomain) -> f64 {
    dom.cloud()
        .points()
        .par_iter()
        .map(|&p| (map.apply(p) - p).norm())
        .reduce(|| 0.0, f64::max)
}

/// A ball of radius `R` in which `f̃ⁿ(U)` was found `ε`-dense.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadingWitness {
    pub n: usize,
    pub center: Vec2R,
}

/// Candidate centers taken from the image itself, in addition to the grid.
const IMAGE_CENTER_CANDIDATES: usize = 256;

/// Searches `n = 1..=N` for a ball `B_R(c)` in which `f̃ⁿ(U)` is `ε`-dense.
///
/// Each candidate ball is sampled on a grid of spacing `s = ε/4`; it is
/// accepted when every sample lies within `ε − s/√2` of the image, which
/// implies density of the image in the whole ball. Candidates are a grid of
/// spacing `max(ε, R)/2` over the image's bounding box plus a subsample of
/// the image points. `None` means nothing was found, not that the map fails
/// to spread.
pub fn weak_spreading_probe<M: PlaneMap + ?Sized>(
    map: &M,
    u: &PointCloud,
    eps: f64,
    radius: f64,
    steps: usize,
) -> Result<Option<SpreadingWitness>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("eps", "must be positive and finite"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("R", "must be positive and finite"));
    }
    let spacing = eps / 4.0;
    let tolerance = eps - spacing * std::f64::consts::FRAC_1_SQRT_2;
    let m = (radius / spacing).ceil() as i64;
    let mut offsets = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let o = Vec2R::new(i as f64 * spacing, j as f64 * spacing);
            if o.norm() <= radius {
                offsets.push(o);
            }
        }
    }
    // Boundary points keep the sampled ball from missing its rim.
    let rim = ((2.0 * std::f64::consts::PI * radius / spacing).ceil() as usize).max(8);
    for k in 0..rim {
        let t = 2.0 * std::f64::consts::PI * k as f64 / rim as f64;
        offsets.push(Vec2R::from_angle(t) * radius);
    }

    let mut image: Vec<Vec2R> = u.points().to_vec();
    for n in 1..=steps {
        image.par_iter_mut().for_each(|p| *p = map.apply(*p));
        if image.iter().any(|p| !p.is_finite()) {
            return Err(Error::Degenerate(format!(
                "iterate {n} left the representable range"
            )));
        }
        let index = GridIndex::new(&image);
        let (lo, hi) = crate::geom::bbox_of(&image);
        let step = eps.max(radius) / 2.0;
        let nx = ((hi.x - lo.x) / step).ceil() as usize;
        let ny = ((hi.y - lo.y) / step).ceil() as usize;
        let mut centers: Vec<Vec2R> = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                centers.push(lo + Vec2R::new(i as f64 * step, j as f64 * step));
            }
        }
        let stride = (image.len() / IMAGE_CENTER_CANDIDATES).max(1);
        centers.extend(image.iter().step_by(stride).copied());

        let dense_at = |c: Vec2R| {
            offsets
                .iter()
                .all(|&o| index.nearest_distance(c + o) <= tolerance)
        };
        let found = centers
            .par_iter()
            .enumerate()
            .filter(|(_, &c)| dense_at(c))
            .map(|(i, _)| i)
            .min();
        if let Some(i) = found {
            return Ok(Some(SpreadingWitness {
                n,
                center: centers[i],
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Generator, LiftWord};

    fn translation(x: f64, y: f64) -> LiftWord {
        LiftWord::single(Generator::Translation(Vec2R::new(x, y)))
    }

    #[test]
    fn translation_rotation_set_shrinks_to_theta() {
        let dom = FundamentalDomain::new(11).unwrap();
        let theta = Vec2R::new(1.0 / 3.0, 0.5);
        for n in [1, 5, 40] {
            let est = rotation_set_estimate(&translation(theta.x, theta.y), n, &dom).unwrap();
            let worst = est
                .hull
                .vertices()
                .iter()
                .map(|v| v.dist(theta))
                .fold(0.0, f64::max);
            assert!(worst <= std::f64::consts::SQRT_2 / n as f64 + 1e-12);
        }
        assert!(rotation_set_estimate(&LiftWord::identity(), 0, &dom).is_err());
    }

    #[test]
    fn shear_generalized_estimate_grows_linearly() {
        let dom = FundamentalDomain::new(41).unwrap();
        let shear = LiftWord::single(Generator::shear(1.0, 1).unwrap());
        let est = generalized_rot_estimate(&shear, &[1, 2, 4, 8], &dom).unwrap();
        assert!(est.diameter_grows);
        for (n, d) in est.subsequence.iter().zip(&est.diam_trace) {
            // Vertical extent 2n plus the unit square.
            assert!((d - (2 * n + 1) as f64).abs() < 0.1, "n={n}: {d}");
        }
        for c in &est.clouds {
            assert!((diameter(c) - 1.0).abs() < 1e-9);
            assert!(c.points()[dom.basepoint_index()] == Vec2R::ZERO);
        }
    }

    #[test]
    fn translation_generalized_estimate_does_not_grow() {
        let dom = FundamentalDomain::new(11).unwrap();
        let est = generalized_rot_estimate(&translation(0.3, 0.1), &[1, 2, 3], &dom).unwrap();
        assert!(!est.diameter_grows);
        assert!(est.cauchy_gap < 1e-12);
        assert!(generalized_rot_estimate(&translation(0.3, 0.1), &[2, 2], &dom).is_err());
    }

    #[test]
    fn deviation_examples() {
        let dom = FundamentalDomain::new(21).unwrap();
        let rho = Vec2R::new(0.2, 0.7);
        let prof = deviation_profile(
            &translation(rho.x, rho.y),
            Vec2R::new(1.0, 2.0),
            rho,
            5,
            &dom,
        )
        .unwrap();
        assert!(prof.max() < 1e-12);

        let shear = LiftWord::single(Generator::shear(1.0, 1).unwrap());
        let vert = deviation_profile(&shear, Vec2R::new(0.0, 1.0), Vec2R::ZERO, 4, &dom).unwrap();
        for (k, d) in vert.deviations.iter().enumerate() {
            assert!((d - (k + 1) as f64).abs() < 1e-12);
        }
        let horiz = deviation_profile(&shear, Vec2R::new(1.0, 0.0), Vec2R::ZERO, 4, &dom).unwrap();
        assert_eq!(horiz.max(), 0.0);
        assert!(deviation_profile(&shear, Vec2R::ZERO, Vec2R::ZERO, 4, &dom).is_err());
    }

    #[test]
    fn rigidity_examples() {
        let dom = FundamentalDomain::new(11).unwrap();
        let prof = rigidity_profile(&translation(2.0 / 5.0, 0.0), 15, &dom).unwrap();
        for (k, d) in prof.iter().enumerate() {
            if (k + 1) % 5 == 0 {
                assert!(*d < 1e-12);
            } else {
                assert!(*d > 0.1);
            }
        }
        assert!(rigidity_profile(&LiftWord::identity(), 3, &dom)
            .unwrap()
            .iter()
            .all(|&d| d == 0.0));
    }

    #[test]
    fn torus_distance_wraps() {
        assert!((torus_distance(Vec2R::new(0.95, 0.0), Vec2R::new(0.05, 3.0)) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn spreading_probe_examples() {
        let u = PointCloud::from_points(vec![Vec2R::new(0.5, 0.5), Vec2R::new(0.52, 0.5)]).unwrap();
        // A ball smaller than ε around an image point is trivially covered.
        let w = weak_spreading_probe(&translation(0.1, 0.0), &u, 0.5, 0.1, 3).unwrap();
        assert_eq!(w.map(|w| w.n), Some(1));
        // Rigid translations never spread.
        assert!(
            weak_spreading_probe(&translation(0.1, 0.0), &u, 0.01, 1.0, 5)
                .unwrap()
                .is_none()
        );
    }
}
