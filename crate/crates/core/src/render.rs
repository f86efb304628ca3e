//! SVG pictures of circle polyhedra by stereographic projection.

use std::fmt::Write as _;

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpolyhedron::{analyze, CPolyhedron, Shallowness};
use crate::disk::{pencil_point, Disk, DiskError, SpherePoint};
use crate::properness::{classify_link, vertex_polygon, LinkVertexKind, PropernessError};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("projection pole must be a nonzero finite 3-vector")]
    InvalidPole,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("a circle passes through the pole and nudging did not help")]
    PoleOnCircle,
    #[error(transparent)]
    Properness(#[from] PropernessError),
    #[error(transparent)]
    Disk(#[from] DiskError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Style {
    pub stroke: String,
    pub fill: String,
    pub stroke_width: f64,
}

impl Style {
    fn new(stroke: &str, fill: &str, stroke_width: f64) -> Self {
        Self { stroke: stroke.into(), fill: fill.into(), stroke_width }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Styles {
    pub disk: Style,
    pub orthocircle: Style,
    pub link: Style,
    pub tangency: Style,
}

impl Default for Styles {
    fn default() -> Self {
        Self {
            disk: Style::new("#1f4e79", "none", 1.5),
            orthocircle: Style::new("#b03a2e", "none", 1.0),
            link: Style::new("#1e8449", "none", 2.0),
            tangency: Style::new("none", "#000000", 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layers {
    pub disks: bool,
    pub orthocircles: bool,
    /// Link of this vertex: its half-plane boundaries and link points.
    pub link: Option<usize>,
    pub tangency: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Self { disks: true, orthocircles: false, link: None, tangency: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub pole: [f64; 3],
    /// Tilt the pole off any circle passing within `1e−6` of it. On by
    /// default; with it off such circles are drawn as lines.
    pub auto_nudge: bool,
    /// `[x_min, y_min, x_max, y_max]` in the projection plane; fitted to the
    /// picture when absent.
    pub viewport: Option<[f64; 4]>,
    pub layers: Layers,
    pub styles: Styles,
    /// Output width in pixels.
    pub width: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            pole: [0.0, 0.0, 1.0],
            auto_nudge: true,
            viewport: None,
            layers: Layers::default(),
            styles: Styles::default(),
            width: 800.0,
        }
    }
}

/// Image of a circle on `S²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Planar {
    Circle { center: [f64; 2], radius: f64 },
    /// `a·X + b·Y = c`.
    Line { a: f64, b: f64, c: f64 },
}

impl Planar {
    /// Distance from `q` to the curve.
    pub fn distance(&self, q: [f64; 2]) -> f64 {
        match *self {
            Planar::Circle { center, radius } => ((q[0] - center[0]).hypot(q[1] - center[1]) - radius).abs(),
            Planar::Line { a, b, c } => (a * q[0] + b * q[1] - c).abs() / a.hypot(b),
        }
    }
}

/// Stereographic projection from a chosen pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    rot: Rotation3<f64>,
}

impl Projection {
    pub fn new(pole: [f64; 3]) -> Result<Self, RenderError> {
        let n = Vector3::from(pole);
        let len = n.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(RenderError::InvalidPole);
        }
        let n = n / len;
        let e3 = Vector3::z();
        let rot = Rotation3::rotation_between(&n, &e3)
            .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI));
        Ok(Self { rot })
    }

    fn rotate(&self, x: [f64; 3]) -> [f64; 3] {
        let y = self.rot * Vector3::from(x);
        [y.x, y.y, y.z]
    }

    pub fn point(&self, x: [f64; 3]) -> [f64; 2] {
        let y = self.rotate(x);
        [y[0] / (1.0 - y[2]), y[1] / (1.0 - y[2])]
    }

    /// Signed gap `u₃ − h` between the pole and the circle, after rotation.
    pub fn pole_gap(&self, d: Disk) -> Result<f64, RenderError> {
        let c = d.to_cap()?;
        Ok(self.rotate(c.u)[2] - c.h)
    }

    pub fn circle(&self, d: Disk) -> Result<Planar, RenderError> {
        let c = d.to_cap()?;
        let u = self.rotate(c.u);
        let gap = u[2] - c.h;
        Ok(if gap.abs() <= 1e-12 {
            Planar::Line { a: u[0], b: u[1], c: c.h }
        } else {
            Planar::Circle {
                center: [-u[0] / gap, -u[1] / gap],
                radius: (1.0 - c.h * c.h).sqrt() / gap.abs(),
            }
        })
    }
}

/// The Möbius-invariant part of an analysis, embedded in the SVG.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub n: usize,
    pub strictly_convex: bool,
    pub convex: bool,
    pub edge_determinant_sign: i8,
    pub hyperbolic: bool,
    pub unitary_edges: Vec<(usize, usize)>,
    pub shallowness: Shallowness,
    pub proper: Option<bool>,
    pub witnesses: Vec<[usize; 3]>,
}

impl InvariantSummary {
    pub fn of(p: &CPolyhedron) -> Self {
        let r = analyze(p);
        Self {
            n: r.n,
            strictly_convex: r.strictly_convex,
            convex: r.convex,
            edge_determinant_sign: r.edge_determinant_sign,
            hyperbolic: r.hyperbolic,
            unitary_edges: r.unitary_edges,
            shallowness: r.shallowness,
            proper: r.proper,
            witnesses: r
                .properness_witnesses
                .iter()
                .map(|w| [w.vertex, w.point_neighbor, w.disk_neighbor])
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rendering {
    pub svg: String,
    pub pole: [f64; 3],
    pub nudged: bool,
    pub viewport: [f64; 4],
    pub disks: Vec<Planar>,
    pub dots: Vec<[f64; 2]>,
}

const NUDGE_ANGLE: f64 = 0.25;
const MAX_NUDGES: usize = 32;
const AUTO_EXTENT: f64 = 20.0;

fn choose_pole(p: &CPolyhedron, spec: &RenderSpec) -> Result<([f64; 3], bool), RenderError> {
    let mut pole = Vector3::from(spec.pole);
    if !(pole.norm() > 0.0 && pole.iter().all(|x| x.is_finite())) {
        return Err(RenderError::InvalidPole);
    }
    pole.normalize_mut();
    if !spec.auto_nudge {
        return Ok((pole.into(), false));
    }
    for k in 0..=MAX_NUDGES {
        let proj = Projection::new(pole.into())?;
        let mut clear = true;
        for d in p.disks() {
            if proj.pole_gap(*d)?.abs() < 1e-6 {
                clear = false;
                break;
            }
        }
        if clear {
            return Ok((pole.into(), k > 0));
        }
        // Deterministic tilt about an axis that moves with k.
        let axis = Vector3::new(1.0, 0.5 + k as f64 * 0.37, 0.25).normalize();
        pole = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), NUDGE_ANGLE) * pole;
    }
    Err(RenderError::PoleOnCircle)
}

fn fit_viewport(curves: &[Planar], dots: &[[f64; 2]]) -> [f64; 4] {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |x: f64, y: f64| {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    };
    for c in curves {
        if let Planar::Circle { center, radius } = *c {
            grow(center[0] - radius, center[1] - radius);
            grow(center[0] + radius, center[1] + radius);
        }
    }
    for d in dots {
        grow(d[0], d[1]);
    }
    if !x0.is_finite() {
        return [-2.0, -2.0, 2.0, 2.0];
    }
    let clamp = |v: f64| v.clamp(-AUTO_EXTENT, AUTO_EXTENT);
    let (x0, y0, x1, y1) = (clamp(x0), clamp(y0), clamp(x1), clamp(y1));
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-3);
    [x0 - pad, y0 - pad, x1 + pad, y1 + pad]
}

struct Canvas {
    view: [f64; 4],
    scale: f64,
    out: String,
}

impl Canvas {
    fn map(&self, q: [f64; 2]) -> (f64, f64) {
        ((q[0] - self.view[0]) * self.scale, (self.view[3] - q[1]) * self.scale)
    }

    fn curve(&mut self, c: &Planar, style: &Style, class: &str) {
        let attrs = format!(
            r#"class="{class}" stroke="{}" fill="{}" stroke-width="{:.3}""#,
            style.stroke, style.fill, style.stroke_width
        );
        match *c {
            Planar::Circle { center, radius } => {
                let (x, y) = self.map(center);
                let _ = writeln!(self.out, r#"  <circle cx="{x:.6}" cy="{y:.6}" r="{:.6}" {attrs}/>"#, radius * self.scale);
            }
            Planar::Line { a, b, c } => {
                let nn = a * a + b * b;
                let foot = [a * c / nn, b * c / nn];
                let dir = [-b / nn.sqrt(), a / nn.sqrt()];
                let reach = 4.0 * ((self.view[2] - self.view[0]).hypot(self.view[3] - self.view[1]) + foot[0].hypot(foot[1]));
                let (xa, ya) = self.map([foot[0] - reach * dir[0], foot[1] - reach * dir[1]]);
                let (xb, yb) = self.map([foot[0] + reach * dir[0], foot[1] + reach * dir[1]]);
                let _ = writeln!(
                    self.out,
                    r#"  <line x1="{xa:.6}" y1="{ya:.6}" x2="{xb:.6}" y2="{yb:.6}" {attrs}/>"#
                );
            }
        }
    }

    fn dot(&mut self, q: [f64; 2], style: &Style, class: &str) {
        let (x, y) = self.map(q);
        let _ = writeln!(
            self.out,
            r#"  <circle class="{class}" cx="{x:.6}" cy="{y:.6}" r="3" fill="{}" stroke="{}"/>"#,
            style.fill, style.stroke
        );
    }
}

/// Renders `p` as an SVG 1.1 document.
pub fn render(p: &CPolyhedron, spec: &RenderSpec) -> Result<Rendering, RenderError> {
    if let Some(v) = spec.layers.link {
        if v >= p.n() {
            return Err(RenderError::VertexOutOfRange(v));
        }
    }
    let (pole, nudged) = choose_pole(p, spec)?;
    let proj = Projection::new(pole)?;

    let disks = p.disks().iter().map(|d| proj.circle(*d)).collect::<Result<Vec<_>, _>>()?;
    let orthos = if spec.layers.orthocircles {
        (0..p.triangulation().faces().len())
            .filter_map(|f| p.face_orthodisk(f).ok())
            .map(|d| proj.circle(d))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let mut dots = Vec::new();
    if spec.layers.tangency {
        for e in p.unitary_edges(tolerance::UNITARY) {
            let (i, j) = p.triangulation().edges()[e];
            let x = pencil_point(p.disk(i), p.disk(j))?;
            dots.push(proj.point(x.coords()));
        }
    }
    let mut link_curves = Vec::new();
    let mut link_dots = Vec::new();
    if let Some(v) = spec.layers.link {
        let poly = vertex_polygon(p, v)?;
        for h in &poly.half_planes {
            link_curves.push(proj.circle(*h)?);
        }
        for lv in classify_link(p, v)? {
            match lv.kind {
                LinkVertexKind::Visible { point } | LinkVertexKind::Ideal { point } => {
                    link_dots.push(proj.point(point_on_sphere(point)));
                }
                LinkVertexKind::Hyperideal { perpendicular, .. } => {
                    link_curves.push(proj.circle(perpendicular)?);
                }
            }
        }
    }

    let view = spec.viewport.unwrap_or_else(|| {
        let mut all = disks.clone();
        all.extend(link_curves.iter().copied());
        let mut pts = dots.clone();
        pts.extend(link_dots.iter().copied());
        fit_viewport(&all, &pts)
    });
    let scale = spec.width / (view[2] - view[0]);
    let height = (view[3] - view[1]) * scale;
    let summary = serde_json::to_string(&InvariantSummary::of(p)).expect("plain data serializes");

    let mut c = Canvas { view, scale, out: String::new() };
    let _ = writeln!(c.out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        c.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.3}" height="{height:.3}" viewBox="0 0 {:.3} {height:.3}">"#,
        spec.width, spec.width
    );
    let _ = writeln!(c.out, "  <metadata><![CDATA[{summary}]]></metadata>");
    let _ = writeln!(c.out, r##"  <rect width="100%" height="100%" fill="#ffffff"/>"##);
    if spec.layers.orthocircles {
        for o in &orthos {
            c.curve(o, &spec.styles.orthocircle, "orthocircle");
        }
    }
    if spec.layers.disks {
        for d in &disks {
            c.curve(d, &spec.styles.disk, "disk");
        }
    }
    for l in &link_curves {
        c.curve(l, &spec.styles.link, "link");
    }
    for q in &link_dots {
        c.dot(*q, &spec.styles.link, "link-vertex");
    }
    for q in &dots {
        c.dot(*q, &spec.styles.tangency, "tangency");
    }
    c.out.push_str("</svg>\n");

    Ok(Rendering { svg: c.out, pole, nudged, viewport: view, disks, dots })
}

fn point_on_sphere(x: SpherePoint) -> [f64; 3] {
    x.coords()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{cap_to_disk, Cap};
    use crate::generate;
    use crate::moebius::random_moebius;

    #[test]
    fn koebe_tetrahedron_picture() {
        let p = generate::tetra_koebe();
        let r = render(&p, &RenderSpec::default()).unwrap();
        // Two of the circles and one tangency meet the default pole.
        assert!(r.nudged);
        assert_eq!(r.svg.matches("<line").count(), 0);
        assert_eq!(r.svg.matches(r#"class="disk""#).count(), 4);
        assert_eq!(r.svg.matches(r#"class="tangency""#).count(), 6);
        let scale = (r.viewport[2] - r.viewport[0]).max(r.viewport[3] - r.viewport[1]);
        for (e, dot) in p.unitary_edges(tolerance::UNITARY).iter().zip(&r.dots) {
            let (i, j) = p.triangulation().edges()[*e];
            assert!(r.disks[i].distance(*dot) < 1e-3 * scale);
            assert!(r.disks[j].distance(*dot) < 1e-3 * scale);
        }
    }

    #[test]
    fn projected_circles_pass_through_projected_points() {
        // Sample points of each circle and compare with the closed form.
        let p = generate::transported(&generate::octa_koebe(), 12, 0.8);
        let proj = Projection::new([0.3, -0.2, 0.9]).unwrap();
        for d in p.disks() {
            let c = d.to_cap().unwrap();
            let u = Vector3::from(c.u);
            let a = u.cross(&Vector3::new(0.3, 0.7, -0.1)).normalize();
            let b = u.cross(&a);
            let planar = proj.circle(*d).unwrap();
            let rho = (1.0 - c.h * c.h).sqrt();
            for k in 0..12 {
                let th = k as f64 * 0.5;
                let x = u * c.h + (a * th.cos() + b * th.sin()) * rho;
                let q = proj.point([x.x, x.y, x.z]);
                assert!(planar.distance(q) < 1e-9 * (1.0 + q[0].hypot(q[1])));
            }
        }
    }

    #[test]
    fn circle_through_pole_is_a_line() {
        let tilted = cap_to_disk(Cap::new([1.0, 0.0, 0.5], 0.5 / 1.25_f64.sqrt())).unwrap();
        let proj = Projection::new([0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(proj.circle(tilted).unwrap(), Planar::Line { .. }));

        let base = generate::octa_koebe();
        // A great circle through the pole.
        let through = cap_to_disk(Cap::new([0.0, 1.0, 0.0], 0.0)).unwrap();
        let mut vs = base.vectors();
        vs[2] = through.vector();
        let p = CPolyhedron::new(base.triangulation().clone(), vs).unwrap();
        let r = render(&p, &RenderSpec { auto_nudge: false, ..RenderSpec::default() }).unwrap();
        assert_eq!(r.svg.matches("<line").count(), 1);
        assert!(!r.nudged);

        let nudged = render(&p, &RenderSpec::default()).unwrap();
        assert!(nudged.nudged);
        assert_eq!(nudged.svg.matches("<line").count(), 0);
    }

    #[test]
    fn deterministic_and_invariant_metadata() {
        let p = generate::octa_koebe();
        let spec = RenderSpec {
            layers: Layers { orthocircles: true, link: Some(0), ..Layers::default() },
            ..RenderSpec::default()
        };
        let a = render(&p, &spec).unwrap();
        assert_eq!(a.svg, render(&p, &spec).unwrap().svg);
        assert!(a.svg.contains(r#"class="orthocircle""#));
        assert!(a.svg.contains(r#"class="link-vertex""#));

        let q = p.transform(&random_moebius(9, 0.6)).unwrap();
        let b = render(&q, &spec).unwrap();
        assert_ne!(a.svg, b.svg);
        let meta = |s: &str| {
            let start = s.find("<![CDATA[").unwrap() + 9;
            let end = s.find("]]>").unwrap();
            serde_json::from_str::<InvariantSummary>(&s[start..end]).unwrap()
        };
        assert_eq!(meta(&a.svg), meta(&b.svg));
    }

    #[test]
    fn render_errors() {
        let p = generate::tetra_koebe();
        let bad = RenderSpec { pole: [0.0; 3], ..RenderSpec::default() };
        assert_eq!(render(&p, &bad).unwrap_err(), RenderError::InvalidPole);
        let link = RenderSpec { layers: Layers { link: Some(7), ..Layers::default() }, ..RenderSpec::default() };
        assert_eq!(render(&p, &link).unwrap_err(), RenderError::VertexOutOfRange(7));
    }
}
