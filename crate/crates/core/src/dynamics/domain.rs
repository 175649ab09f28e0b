use rayon::prelude::*;

use super::word::PlaneMap;
use crate::error::{Error, Result};
use crate::geom::{directed_hausdorff, GridIndex, PointCloud, Vec2R};

/// Default basepoint of the unit square.
pub const DEFAULT_BASEPOINT: Vec2R = Vec2R::new(0.5, 0.5);

/// Grid sampling of `D = [0,1]²` with a distinguished basepoint.
///
/// Besides the `N×N` grid samples the domain carries one probe per grid cell
/// (the cell centers, the points of `D` farthest from the samples). Probes
/// are pushed through maps alongside the samples; their distance to the
/// image samples estimates how well the image samples cover the image of `D`.
#[derive(Clone, Debug)]
pub struct FundamentalDomain {
    resolution: u32,
    cloud: PointCloud,
    probes: Vec<Vec2R>,
    basepoint: Vec2R,
    basepoint_index: usize,
}

impl FundamentalDomain {
    pub fn new(resolution: u32) -> Result<Self> {
        Self::with_basepoint(resolution, DEFAULT_BASEPOINT)
    }

    /// `N×N` grid with spacing `1/(N-1)`; the basepoint is appended when it is
    /// not a grid point.
    pub fn with_basepoint(resolution: u32, basepoint: Vec2R) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::invalid("resolution", "must be at least 2"));
        }
        if resolution > 20_000 {
            return Err(Error::invalid("resolution", "at most 20000 per side"));
        }
        if !(0.0..=1.0).contains(&basepoint.x) || !(0.0..=1.0).contains(&basepoint.y) {
            return Err(Error::invalid(
                "basepoint",
                format!("{basepoint} is outside [0,1]²"),
            ));
        }
        let n = resolution as usize;
        let h = 1.0 / (n - 1) as f64;
        let coord = |i: usize| if i == n - 1 { 1.0 } else { i as f64 * h };
        let mut points = Vec::with_capacity(n * n + 1);
        for j in 0..n {
            for i in 0..n {
                points.push(Vec2R::new(coord(i), coord(j)));
            }
        }
        let basepoint_index = match points.iter().position(|&p| p == basepoint) {
            Some(i) => i,
            None => {
                points.push(basepoint);
                points.len() - 1
            }
        };
        let mut probes = Vec::with_capacity((n - 1) * (n - 1));
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                probes.push(Vec2R::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h));
            }
        }
        let cloud = PointCloud::new(points, h * std::f64::consts::FRAC_1_SQRT_2)?;
        Ok(Self {
            resolution,
            cloud,
            probes,
            basepoint,
            basepoint_index,
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn probes(&self) -> &[Vec2R] {
        &self.probes
    }

    pub fn basepoint(&self) -> Vec2R {
        self.basepoint
    }

    /// Index of the basepoint inside [`FundamentalDomain::cloud`].
    pub fn basepoint_index(&self) -> usize {
        self.basepoint_index
    }

    /// Grid spacing `1/(N-1)`.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    pub fn sampled_set(&self) -> SampledSet {
        SampledSet {
            samples: self.cloud.clone(),
            probes: self.probes.clone(),
        }
    }
}

/// Samples of a set together with probe points used to estimate coverage.
#[derive(Clone, Debug)]
pub struct SampledSet {
    samples: PointCloud,
    probes: Vec<Vec2R>,
}

impl SampledSet {
    pub fn new(samples: PointCloud, probes: Vec<Vec2R>) -> Self {
        Self { samples, probes }
    }

    pub fn samples(&self) -> &PointCloud {
        &self.samples
    }

    pub fn into_samples(self) -> PointCloud {
        self.samples
    }

    pub fn probes(&self) -> &[Vec2R] {
        &self.probes
    }

    /// Pushes samples and probes through `map`; the image's resolution hint
    /// is the largest distance from a probe image to the image samples.
    pub fn map<M: PlaneMap + ?Sized>(&self, map: &M) -> SampledSet {
        let images: Vec<Vec2R> = self
            .samples
            .points()
            .par_iter()
            .map(|&p| map.apply(p))
            .collect();
        let probes: Vec<Vec2R> = self.probes.par_iter().map(|&p| map.apply(p)).collect();
        let hint = probe_coverage(&images, &probes).max(0.0);
        let samples = PointCloud::image_of(images, hint);
        SampledSet { samples, probes }
    }

    /// Largest distance from a probe to the samples: the resolution hint
    /// [`SampledSet::map`] would assign.
    pub fn coverage(&self) -> f64 {
        probe_coverage(self.samples.points(), &self.probes)
    }

    /// The samples with their hint replaced by [`SampledSet::coverage`].
    pub fn covered_samples(&self) -> PointCloud {
        self.samples.clone().with_resolution_hint(self.coverage())
    }

    /// Like [`SampledSet::map`] but keeps the previous hint (no coverage estimate).
    pub fn map_untracked<M: PlaneMap + ?Sized>(&self, map: &M) -> SampledSet {
        let images: Vec<Vec2R> = self
            .samples
            .points()
            .par_iter()
            .map(|&p| map.apply(p))
            .collect();
        let probes: Vec<Vec2R> = self.probes.par_iter().map(|&p| map.apply(p)).collect();
        let samples = PointCloud::image_of(images, self.samples.resolution_hint());
        SampledSet { samples, probes }
    }
}

fn probe_coverage(samples: &[Vec2R], probes: &[Vec2R]) -> f64 {
    if probes.is_empty() || samples.iter().any(|p| !p.is_finite()) {
        return if probes.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let index = GridIndex::new(samples);
    probes
        .par_iter()
        .map(|&p| index.nearest_distance(p))
        .reduce(|| 0.0, f64::max)
}

/// Streaming orbit of the sampled domain: yields `f(D), f²(D), …`.
pub struct OrbitIter<'a, M: PlaneMap + ?Sized> {
    map: &'a M,
    current: SampledSet,
    track_resolution: bool,
}

impl<'a, M: PlaneMap + ?Sized> OrbitIter<'a, M> {
    pub fn new(map: &'a M, dom: &FundamentalDomain, track_resolution: bool) -> Self {
        Self {
            map,
            current: dom.sampled_set(),
            track_resolution,
        }
    }
}

impl<M: PlaneMap + ?Sized> Iterator for OrbitIter<'_, M> {
    type Item = PointCloud;

    fn next(&mut self) -> Option<PointCloud> {
        self.current = if self.track_resolution {
            self.current.map(self.map)
        } else {
            self.current.map_untracked(self.map)
        };
        Some(self.current.samples().clone())
    }
}

/// `[f(D), …, fⁿ(D)]`, each computed from the previous one.
pub fn iterate_domain<M: PlaneMap + ?Sized>(
    map: &M,
    n: usize,
    dom: &FundamentalDomain,
) -> Result<Vec<PointCloud>> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    Ok(OrbitIter::new(map, dom, true).take(n).collect())
}

/// `d_H` between the sampled domain pushed through two maps; handy for
/// comparing a word with its simplified or factored form.
pub fn image_distance<M1: PlaneMap + ?Sized, M2: PlaneMap + ?Sized>(
    f: &M1,
    g: &M2,
    dom: &FundamentalDomain,
) -> f64 {
    let a = dom.cloud().map_points(|p| f.apply(p));
    let b = dom.cloud().map_points(|p| g.apply(p));
    directed_hausdorff(&a, &b).max(directed_hausdorff(&b, &a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Generator, LiftWord};
    use crate::geom::diameter;

    #[test]
    fn grid_layout() {
        let d = FundamentalDomain::new(3).unwrap();
        assert_eq!(d.cloud().len(), 9);
        assert_eq!(
            d.cloud().points()[d.basepoint_index()],
            Vec2R::new(0.5, 0.5)
        );
        let d = FundamentalDomain::new(4).unwrap();
        assert_eq!(d.cloud().len(), 17);
        assert_eq!(d.basepoint_index(), 16);
        assert_eq!(d.probes().len(), 9);
        assert!(FundamentalDomain::new(1).is_err());
        assert!(FundamentalDomain::with_basepoint(5, Vec2R::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn translation_orbit() {
        let d = FundamentalDomain::new(5).unwrap();
        let theta = Vec2R::new(0.3, -0.1);
        let w = LiftWord::single(Generator::Translation(theta));
        let orbit = iterate_domain(&w, 3, &d).unwrap();
        for (k, c) in orbit.iter().enumerate() {
            let shift = theta * (k + 1) as f64;
            for (p, q) in c.points().iter().zip(d.cloud().points()) {
                assert!((*p - *q - shift).norm() < 1e-12);
            }
            assert!((c.resolution_hint() - d.cloud().resolution_hint()).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_orbit_repeats_domain() {
        let d = FundamentalDomain::new(6).unwrap();
        let orbit = iterate_domain(&LiftWord::identity(), 4, &d).unwrap();
        assert_eq!(orbit.len(), 4);
        for c in &orbit {
            assert_eq!(c.points(), d.cloud().points());
        }
    }

    #[test]
    fn shear_spreads_vertically() {
        let d = FundamentalDomain::new(21).unwrap();
        let w = LiftWord::single(Generator::shear(1.0, 1).unwrap());
        let orbit = iterate_domain(&w, 1, &d).unwrap();
        assert!(diameter(&orbit[0]) >= 2.0);
        assert!(iterate_domain(&w, 0, &d).is_err());
    }
}
