use crate::dynamics::Generator;
use crate::error::{Error, Result};
use crate::geom::{Mat2Z, PointCloud, Segment, Vec2R};

/// Pieces of `J_{η,ξ}(I)` over full half-periods of the triangle wave.
///
/// `I` is first cut down to its largest sub-segment whose horizontal
/// projection is `[z₁/(2ξ), z₂/(2ξ)]` with integers `z₁ < z₂`; each piece of
/// that sub-segment over a single `[z/(2ξ), (z+1)/(2ξ)]` is mapped by the
/// shear to one segment. Segments too short horizontally to contain a full
/// half-period (and vertical segments) contribute nothing.
pub fn spread_segment(seg: &Segment, eta: f64, xi: u32) -> Result<Vec<Segment>> {
    let shear = Generator::shear(eta, xi)?;
    let (p, q) = if seg.p.x <= seg.q.x {
        (seg.p, seg.q)
    } else {
        (seg.q, seg.p)
    };
    let dx = q.x - p.x;
    if dx <= 0.0 {
        return Ok(Vec::new());
    }
    let two_xi = 2.0 * xi as f64;
    let z1 = (p.x * two_xi).ceil() as i64;
    let z2 = (q.x * two_xi).floor() as i64;
    let at_x = |x: f64| p + (q - p) * ((x - p.x) / dx);
    let mut out = Vec::with_capacity((z2 - z1).max(0) as usize);
    for z in z1..z2 {
        let a = at_x(z as f64 / two_xi);
        let b = at_x((z + 1) as f64 / two_xi);
        out.push(Segment::new(shear.apply(a), shear.apply(b))?);
    }
    Ok(out)
}

/// Applies [`spread_segment`] to a whole family.
pub fn spread_segments(segs: &[Segment], eta: f64, xi: u32) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    for s in segs {
        out.extend(spread_segment(s, eta, xi)?);
    }
    Ok(out)
}

/// The same extraction for a conjugated shear `A J_{η,ξ} A⁻¹`: pull the
/// family back by `A⁻¹`, spread, and push forward by `A`.
pub fn spread_segments_conjugated(
    segs: &[Segment],
    a: &Mat2Z,
    eta: f64,
    xi: u32,
) -> Result<Vec<Segment>> {
    let ainv = a.inverse();
    let pulled: Vec<Segment> = segs
        .iter()
        .map(|s| Segment::new(ainv.apply(s.p), ainv.apply(s.q)))
        .collect::<Result<_>>()?;
    spread_segments(&pulled, eta, xi)?
        .iter()
        .map(|s| Segment::new(a.apply(s.p), a.apply(s.q)))
        .collect()
}

/// Samples a segment family with spacing at most `spacing` along each segment.
pub fn sample_segments(segs: &[Segment], spacing: f64) -> Result<PointCloud> {
    if !(spacing > 0.0) {
        return Err(Error::invalid("spacing", "must be positive"));
    }
    if segs.is_empty() {
        return Err(Error::invalid("segments", "empty family"));
    }
    let mut pts: Vec<Vec2R> = Vec::new();
    let mut worst = 0.0f64;
    for s in segs {
        let n = ((s.length() / spacing).ceil() as usize).max(1);
        worst = worst.max(s.length() / n as f64);
        for k in 0..=n {
            pts.push(s.point_at(k as f64 / n as f64));
        }
    }
    PointCloud::new(pts, 0.5 * worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_span_full_half_periods() {
        let seg = Segment::new(Vec2R::new(0.1, 0.0), Vec2R::new(1.3, 0.6)).unwrap();
        let pieces = spread_segment(&seg, 0.75, 2).unwrap();
        // Half-period 1/4: projections [0.25, 0.5], …, [1.0, 1.25].
        assert_eq!(pieces.len(), 4);
        for (k, s) in pieces.iter().enumerate() {
            assert!((s.p.x - 0.25 * (k + 1) as f64).abs() < 1e-15);
            assert!((s.q.x - s.p.x - 0.25).abs() < 1e-15);
            // Slope m ± 4ηξ with m = 0.5.
            let expected = if k % 2 == 0 { 0.5 + 6.0 } else { 0.5 - 6.0 };
            assert!((s.slope() - expected).abs() < 1e-9, "{k}: {}", s.slope());
        }
    }

    #[test]
    fn short_segments_produce_nothing() {
        let seg = Segment::new(Vec2R::new(0.01, 0.0), Vec2R::new(0.02, 0.0)).unwrap();
        assert!(spread_segment(&seg, 1.0, 3).unwrap().is_empty());
        let vertical = Segment::new(Vec2R::new(0.3, 0.0), Vec2R::new(0.3, 5.0)).unwrap();
        assert!(spread_segment(&vertical, 1.0, 3).unwrap().is_empty());
    }

    #[test]
    fn conjugated_pieces_follow_the_stretch_direction() {
        let a = Mat2Z::new(1, 2, 0, 1).unwrap();
        let seg = Segment::new(Vec2R::new(0.0, 0.0), Vec2R::new(3.0, -1.0)).unwrap();
        let pieces = spread_segments_conjugated(&[seg], &a, 2.0, 5).unwrap();
        assert!(!pieces.is_empty());
        let v = Vec2R::new(2.0, 1.0);
        for s in &pieces {
            let d = crate::geom::line_angular_distance(s.direction(), v).unwrap();
            assert!(d < 0.2, "direction {} too far from v", s.direction());
        }
    }
}
