//! SVG 1.1 renderings of stage traces and rotation-estimate hulls.

use std::fmt::Write as _;

use torus_spread::geom::Vec2R;

const WIDTH: f64 = 800.0;
const MAX_HEIGHT: f64 = 1600.0;
const MARGIN_FRACTION: f64 = 0.05;
/// Cloud points drawn per layer.
pub const MAX_CLOUD_POINTS: usize = 3000;

/// One stage of a trace: the polygon `K_i` and, when computed, the cloud `D_i`.
#[derive(Clone, Debug, Default)]
pub struct StageLayer {
    pub index: usize,
    pub polygon: Vec<Vec2R>,
    pub cloud: Option<Vec<Vec2R>>,
    pub d_to_k: Option<f64>,
    pub k_to_d: Option<f64>,
}

/// One hull of a rotation-estimate series.
#[derive(Clone, Debug)]
pub struct HullLayer {
    pub label: String,
    pub hull: Vec<Vec2R>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvgError {
    #[error("nothing to render")]
    Empty,
    #[error("non-finite coordinates in layer {0}")]
    NonFinite(usize),
}

/// World-to-viewport map: uniform scale, y axis flipped.
struct Viewport {
    lo: Vec2R,
    hi: Vec2R,
    scale: f64,
    width: f64,
    height: f64,
}

impl Viewport {
    fn around<'a>(pts: impl IntoIterator<Item = &'a Vec2R>) -> Option<Self> {
        let mut lo = Vec2R::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2R::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Vec2R::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2R::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !(lo.x.is_finite() && hi.x.is_finite() && lo.y.is_finite() && hi.y.is_finite()) {
            return None;
        }
        let (mut w, mut h) = (hi.x - lo.x, hi.y - lo.y);
        // A point or an axis-parallel segment still needs a visible box.
        let floor = w.max(h).max(1e-9);
        if w < 1e-3 * floor {
            lo.x -= 0.5 * floor;
            hi.x += 0.5 * floor;
            w = floor;
        }
        if h < 1e-3 * floor {
            lo.y -= 0.5 * floor;
            hi.y += 0.5 * floor;
            h = floor;
        }
        let (mx, my) = (MARGIN_FRACTION * w, MARGIN_FRACTION * h);
        lo = Vec2R::new(lo.x - mx, lo.y - my);
        hi = Vec2R::new(hi.x + mx, hi.y + my);
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let mut scale = WIDTH / w;
        if h * scale > MAX_HEIGHT {
            scale = MAX_HEIGHT / h;
        }
        Some(Viewport {
            lo,
            hi,
            scale,
            width: w * scale,
            height: h * scale,
        })
    }

    fn map(&self, p: Vec2R) -> (f64, f64) {
        (
            (p.x - self.lo.x) * self.scale,
            (self.hi.y - p.y) * self.scale,
        )
    }

    fn header(&self, out: &mut String, title: &str) {
        writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.3} {h:.3}">"#,
            w = self.width,
            h = self.height
        )
        .unwrap();
        writeln!(out, "<title>{}</title>", escape(title)).unwrap();
        writeln!(
            out,
            r#"<rect x="0" y="0" width="{:.3}" height="{:.3}" fill="white"/>"#,
            self.width, self.height
        )
        .unwrap();
    }

    /// A path for two or more vertices, a crossed circle for a single point.
    fn polygon(&self, out: &mut String, pts: &[Vec2R], class: &str, style: &str) {
        match pts.len() {
            0 => {}
            1 => {
                let (x, y) = self.map(pts[0]);
                writeln!(
                    out,
                    r#"<g class="marker" data-layer="{class}" {style}><circle cx="{x:.3}" cy="{y:.3}" r="4" fill="none"/><line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}"/><line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}"/></g>"#,
                    x - 6.0,
                    x + 6.0,
                    y - 6.0,
                    y + 6.0
                )
                .unwrap();
            }
            n => {
                let mut d = String::new();
                for (i, &p) in pts.iter().enumerate() {
                    let (x, y) = self.map(p);
                    write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" }).unwrap();
                }
                if n > 2 {
                    d.push('Z');
                }
                writeln!(
                    out,
                    r#"<path class="{class}" d="{}" {style}/>"#,
                    d.trim_end()
                )
                .unwrap();
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn color(i: usize, n: usize) -> String {
    let hue = 360.0 * i as f64 / n.max(1) as f64;
    format!("hsl({hue:.0},70%,40%)")
}

fn check_finite(layer: usize, pts: &[Vec2R]) -> Result<(), SvgError> {
    if pts.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(SvgError::NonFinite(layer))
    }
}

/// Evenly strided subsample, keeping the order of `pts`.
fn thin(pts: &[Vec2R], max: usize) -> impl Iterator<Item = &Vec2R> {
    let stride = pts.len().div_ceil(max.max(1)).max(1);
    pts.iter().step_by(stride)
}

fn fmt_gap(g: Option<f64>) -> String {
    g.map_or_else(|| "n/a".to_string(), |g| format!("{g:.3}"))
}

/// Layered drawing of a stage trace. The viewport is the bounding box of the
/// final stage (polygon and cloud) inflated by 5%.
pub fn render_trace(stages: &[StageLayer]) -> Result<String, SvgError> {
    let last = stages.last().ok_or(SvgError::Empty)?;
    for s in stages {
        check_finite(s.index, &s.polygon)?;
        if let Some(c) = &s.cloud {
            check_finite(s.index, c)?;
        }
    }
    let final_points = last.polygon.iter().chain(last.cloud.iter().flatten());
    let vp = Viewport::around(final_points).ok_or(SvgError::Empty)?;

    let mut out = String::new();
    vp.header(&mut out, "stage trace");
    let n = stages.len();
    for (li, s) in stages.iter().enumerate() {
        let c = color(li, n);
        writeln!(out, r#"<g id="stage-{}" class="stage">"#, s.index).unwrap();
        if let Some(cloud) = &s.cloud {
            writeln!(
                out,
                r#"<g class="cloud" fill="{c}" fill-opacity="0.5" stroke="none">"#
            )
            .unwrap();
            for &p in thin(cloud, MAX_CLOUD_POINTS) {
                let (x, y) = vp.map(p);
                writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="0.8"/>"#).unwrap();
            }
            writeln!(out, "</g>").unwrap();
        }
        let style = format!(r#"fill="none" stroke="{c}" stroke-width="1.5""#);
        vp.polygon(&mut out, &s.polygon, "polygon", &style);
        writeln!(out, "</g>").unwrap();
    }
    writeln!(
        out,
        r#"<g id="legend" font-family="monospace" font-size="11">"#
    )
    .unwrap();
    for (li, s) in stages.iter().enumerate() {
        let label = format!(
            "stage {}: D→K {}, K→D {}",
            s.index,
            fmt_gap(s.d_to_k),
            fmt_gap(s.k_to_d)
        );
        writeln!(
            out,
            r#"<text x="8" y="{:.1}" fill="{}">{}</text>"#,
            16.0 + 14.0 * li as f64,
            color(li, n),
            escape(&label)
        )
        .unwrap();
    }
    writeln!(out, "</g>\n</svg>").unwrap();
    Ok(out)
}

/// Overlaid hulls with opacity increasing along the series, plus an optional
/// dashed target outline.
pub fn render_hull_series(
    hulls: &[HullLayer],
    target: Option<&[Vec2R]>,
) -> Result<String, SvgError> {
    if hulls.is_empty() {
        return Err(SvgError::Empty);
    }
    for (i, h) in hulls.iter().enumerate() {
        check_finite(i, &h.hull)?;
    }
    if let Some(t) = target {
        check_finite(hulls.len(), t)?;
    }
    let all = hulls
        .iter()
        .flat_map(|h| h.hull.iter())
        .chain(target.into_iter().flatten());
    let vp = Viewport::around(all).ok_or(SvgError::Empty)?;

    let mut out = String::new();
    vp.header(&mut out, "rotation estimates");
    if let Some(t) = target {
        vp.polygon(
            &mut out,
            t,
            "target",
            r#"fill="none" stroke="black" stroke-width="1" stroke-dasharray="6 4""#,
        );
    }
    let n = hulls.len();
    for (i, h) in hulls.iter().enumerate() {
        let opacity = 0.25 + 0.75 * (i + 1) as f64 / n as f64;
        let style = format!(
            r#"fill="steelblue" fill-opacity="{:.3}" stroke="navy" stroke-opacity="{opacity:.3}" stroke-width="1""#,
            0.3 * opacity
        );
        vp.polygon(&mut out, &h.hull, "hull", &style);
    }
    writeln!(
        out,
        r#"<g id="legend" font-family="monospace" font-size="11">"#
    )
    .unwrap();
    for (i, h) in hulls.iter().enumerate() {
        writeln!(
            out,
            r#"<text x="8" y="{:.1}">{}</text>"#,
            16.0 + 14.0 * i as f64,
            escape(&h.label)
        )
        .unwrap();
    }
    writeln!(out, "</g>\n</svg>").unwrap();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(s: f64) -> Vec<Vec2R> {
        vec![
            Vec2R::new(0.0, 0.0),
            Vec2R::new(s, 0.0),
            Vec2R::new(s, s),
            Vec2R::new(0.0, s),
        ]
    }

    #[test]
    fn single_stage_has_one_polygon_and_one_cloud() {
        let svg = render_trace(&[StageLayer {
            index: 0,
            polygon: square(1.0),
            cloud: Some(vec![Vec2R::new(0.5, 0.5)]),
            ..Default::default()
        }])
        .unwrap();
        assert_eq!(svg.matches(r#"class="polygon""#).count(), 1);
        assert_eq!(svg.matches(r#"class="cloud""#).count(), 1);
    }

    #[test]
    fn point_polygons_become_markers() {
        let svg = render_trace(&[StageLayer {
            index: 0,
            polygon: vec![Vec2R::ZERO],
            ..Default::default()
        }])
        .unwrap();
        assert!(svg.contains(r#"class="marker""#));
        assert!(!svg.contains("<path"));
    }

    #[test]
    fn viewport_is_the_inflated_final_bbox() {
        let svg = render_trace(&[
            StageLayer {
                index: 0,
                polygon: square(1.0),
                ..Default::default()
            },
            StageLayer {
                index: 1,
                polygon: square(10.0),
                ..Default::default()
            },
        ])
        .unwrap();
        // 11 world units across at 800 px: the corner (0, 0) sits at 0.5 units in.
        let scale = WIDTH / 11.0;
        let expected = format!("M{:.3} {:.3}", 0.5 * scale, 10.5 * scale);
        assert!(svg.contains(&expected), "{svg}");
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert_eq!(render_trace(&[]), Err(SvgError::Empty));
        assert_eq!(render_hull_series(&[], None), Err(SvgError::Empty));
    }
}
