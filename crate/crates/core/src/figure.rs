//! Static SVG drawing of a planar Monge configuration: the shapes, the
//! homothety centers with dashed guide lines, and the line through the
//! centers.
//!
//! Geometry is drawn inside one group carrying the y-up transform; markers
//! and labels are placed in pixel coordinates so text is not mirrored.
//! Output depends only on the input, so repeated runs are byte-identical.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::generators::Space;
use crate::monge::{run_monge, MongeConfig, MongeReport};
use crate::polytope::{vertices, Halfspace};
use crate::scalar::Tolerance;
use crate::scenario::{ScenarioFile, ScenarioKind};
use crate::shapes::Shape;

pub const MARGIN: f64 = 40.0;
/// Pixel length of the longer side of the drawing area.
pub const CANVAS: f64 = 640.0;

type P = [f64; 2];

#[derive(Debug, Clone, Copy)]
struct Frame {
    xmin: f64,
    ymin: f64,
    xmax: f64,
    ymax: f64,
}

impl Frame {
    fn around(points: &[P]) -> Self {
        let mut f = Frame {
            xmin: f64::INFINITY,
            ymin: f64::INFINITY,
            xmax: f64::NEG_INFINITY,
            ymax: f64::NEG_INFINITY,
        };
        for p in points {
            f.xmin = f.xmin.min(p[0]);
            f.xmax = f.xmax.max(p[0]);
            f.ymin = f.ymin.min(p[1]);
            f.ymax = f.ymax.max(p[1]);
        }
        let pad = 0.1 * (f.xmax - f.xmin).max(f.ymax - f.ymin).max(1.0);
        Frame {
            xmin: f.xmin - pad,
            ymin: f.ymin - pad,
            xmax: f.xmax + pad,
            ymax: f.ymax + pad,
        }
    }

    fn scale(&self) -> f64 {
        CANVAS / (self.xmax - self.xmin).max(self.ymax - self.ymin)
    }

    fn width(&self) -> f64 {
        (self.xmax - self.xmin) * self.scale() + 2.0 * MARGIN
    }

    fn height(&self) -> f64 {
        (self.ymax - self.ymin) * self.scale() + 2.0 * MARGIN
    }

    fn pixel(&self, p: P) -> P {
        let s = self.scale();
        [
            MARGIN + (p[0] - self.xmin) * s,
            self.height() - MARGIN - (p[1] - self.ymin) * s,
        ]
    }

    fn box_constraints(&self) -> Vec<Halfspace<f64>> {
        vec![
            Halfspace::new(vec![1.0, 0.0], self.xmin),
            Halfspace::new(vec![-1.0, 0.0], -self.xmax),
            Halfspace::new(vec![0.0, 1.0], self.ymin),
            Halfspace::new(vec![0.0, -1.0], -self.ymax),
        ]
    }

    /// The part of `{x : n . x = d}` inside the frame.
    fn clip_line(&self, n: [f64; 2], d: f64) -> Option<(P, P)> {
        let mut hits: Vec<P> = Vec::new();
        if n[1] != 0.0 {
            for x in [self.xmin, self.xmax] {
                let y = (d - n[0] * x) / n[1];
                if (self.ymin..=self.ymax).contains(&y) {
                    hits.push([x, y]);
                }
            }
        }
        if n[0] != 0.0 {
            for y in [self.ymin, self.ymax] {
                let x = (d - n[1] * y) / n[0];
                if (self.xmin..=self.xmax).contains(&x) {
                    hits.push([x, y]);
                }
            }
        }
        let a = *hits.first()?;
        let b = hits
            .iter()
            .copied()
            .max_by(|p, q| dist(a, *p).total_cmp(&dist(a, *q)))?;
        (dist(a, b) > 0.0).then_some((a, b))
    }
}

fn dist(a: P, b: P) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn xy(p: &[f64]) -> P {
    [p[0], p[1]]
}

/// Convex hull, counter-clockwise, by the monotone chain.
fn hull(points: &[P]) -> Vec<P> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: P, a: P, b: P| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<P> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn outline(shape: &Shape<f64>, frame: Option<&Frame>) -> Vec<P> {
    match shape {
        Shape::Ball(b) => {
            let c = xy(b.center().coords());
            let r = *b.radius();
            vec![[c[0] - r, c[1] - r], [c[0] + r, c[1] + r]]
        }
        Shape::Vertices(v) => hull(&v.points().iter().map(|p| xy(p.coords())).collect::<Vec<_>>()),
        Shape::Halfspaces(h) => {
            let mut cs = h.constraints().to_vec();
            if let Some(f) = frame {
                cs.extend(f.box_constraints());
            }
            let pts: Vec<P> = vertices(&cs, 2, Tolerance::default())
                .iter()
                .map(|p| xy(p.coords()))
                .collect();
            hull(&pts)
        }
    }
}

/// Points where the dashed guides from `c` touch the shape: the two tangent
/// points of a ball, or the two extreme vertices of a polygon as seen
/// from `c`.
fn guide_points(shape: &Shape<f64>, outline: &[P], c: P) -> Vec<P> {
    if let Shape::Ball(b) = shape {
        let o = xy(b.center().coords());
        let r = *b.radius();
        let d = dist(o, c);
        if d <= r {
            return Vec::new();
        }
        let theta = (c[1] - o[1]).atan2(c[0] - o[0]);
        let alpha = (r / d).acos();
        return [theta - alpha, theta + alpha]
            .iter()
            .map(|t| [o[0] + r * t.cos(), o[1] + r * t.sin()])
            .collect();
    }
    if outline.is_empty() {
        return Vec::new();
    }
    let m = outline.len() as f64;
    let mid = [
        outline.iter().map(|p| p[0]).sum::<f64>() / m,
        outline.iter().map(|p| p[1]).sum::<f64>() / m,
    ];
    let base = (mid[1] - c[1]).atan2(mid[0] - c[0]);
    let rel = |p: &P| {
        let mut a = (p[1] - c[1]).atan2(p[0] - c[0]) - base;
        while a > PI {
            a -= 2.0 * PI;
        }
        while a < -PI {
            a += 2.0 * PI;
        }
        a
    };
    let lo = outline.iter().min_by(|a, b| rel(a).total_cmp(&rel(b)));
    let hi = outline.iter().max_by(|a, b| rel(a).total_cmp(&rel(b)));
    match (lo, hi) {
        (Some(a), Some(b)) if dist(*a, c) > 0.0 && dist(*b, c) > 0.0 => vec![*a, *b],
        _ => Vec::new(),
    }
}

/// Renders a 2D Euclidean shape scenario.
pub fn render_figure(file: &ScenarioFile, tol: Tolerance) -> Result<String> {
    if file.geometry != Space::Euclidean || file.kind != ScenarioKind::Shapes || file.dimension != 2 {
        return Err(Error::InvalidScenario(
            "figures need a 2D Euclidean shape scenario".into(),
        ));
    }
    let config = MongeConfig::new(file.shapes::<f64>(tol)?, tol)?;
    let report = run_monge(&config, tol)?;
    Ok(render(&config, &report))
}

fn render(config: &MongeConfig<f64>, report: &MongeReport<f64>) -> String {
    let mut extent: Vec<P> = config.shapes().iter().flat_map(|s| outline(s, None)).collect();
    extent.extend(report.centers.values().map(|c| xy(c.coords())));
    let frame = Frame::around(&extent);
    let outlines: Vec<Vec<P>> = config.shapes().iter().map(|s| outline(s, Some(&frame))).collect();
    let s = frame.scale();
    let (w, h) = (frame.width(), frame.height());

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    );
    out.push_str(concat!(
        "<style>\n",
        ".shape { fill: #dbe7f3; fill-opacity: 0.6; stroke: #1f4e79; stroke-width: 1.5; }\n",
        ".guide { fill: none; stroke: #7f7f7f; stroke-width: 1; stroke-dasharray: 5 4; }\n",
        ".monge-line { fill: none; stroke: #c00000; stroke-width: 2; }\n",
        ".center { fill: #c00000; stroke: none; }\n",
        ".label { font-family: sans-serif; font-size: 12px; fill: #000000; }\n",
        "</style>\n",
    ));
    let _ = writeln!(
        out,
        r#"<g transform="translate({} {}) scale({} {}) translate({} {})">"#,
        num(MARGIN),
        num(h - MARGIN),
        num(s),
        num(-s),
        num(-frame.xmin),
        num(-frame.ymin)
    );
    for (shape, poly) in config.shapes().iter().zip(&outlines) {
        match shape {
            Shape::Ball(b) => {
                let c = b.center().coords();
                let _ = writeln!(
                    out,
                    r#"<circle class="shape" cx="{}" cy="{}" r="{}" vector-effect="non-scaling-stroke"/>"#,
                    num(c[0]),
                    num(c[1]),
                    num(*b.radius())
                );
            }
            _ => {
                let pts: Vec<String> = poly.iter().map(|p| format!("{},{}", num(p[0]), num(p[1]))).collect();
                let _ = writeln!(
                    out,
                    r#"<polygon class="shape" points="{}" vector-effect="non-scaling-stroke"/>"#,
                    pts.join(" ")
                );
            }
        }
    }
    for (&(i, _), c) in &report.centers {
        let c = xy(c.coords());
        for t in guide_points(&config.shapes()[i], &outlines[i], c) {
            let _ = writeln!(
                out,
                r#"<line class="guide" x1="{}" y1="{}" x2="{}" y2="{}" vector-effect="non-scaling-stroke"/>"#,
                num(c[0]),
                num(c[1]),
                num(t[0]),
                num(t[1])
            );
        }
    }
    if let Some(hp) = &report.hyperplane {
        let n = [hp.normal()[0], hp.normal()[1]];
        if let Some((a, b)) = frame.clip_line(n, *hp.offset()) {
            let _ = writeln!(
                out,
                r#"<line class="monge-line" x1="{}" y1="{}" x2="{}" y2="{}" vector-effect="non-scaling-stroke"/>"#,
                num(a[0]),
                num(a[1]),
                num(b[0]),
                num(b[1])
            );
        }
    }
    out.push_str("</g>\n");
    for (&(i, j), c) in &report.centers {
        let p = frame.pixel(xy(c.coords()));
        let _ = writeln!(
            out,
            r#"<circle class="center" cx="{}" cy="{}" r="4"/>"#,
            num(p[0]),
            num(p[1])
        );
        let _ = writeln!(
            out,
            r#"<text class="label" x="{}" y="{}">({},{})</text>"#,
            num(p[0] + 6.0),
            num(p[1] - 6.0),
            report.order[i] + 1,
            report.order[j] + 1
        );
    }
    out.push_str("</svg>\n");
    out
}
