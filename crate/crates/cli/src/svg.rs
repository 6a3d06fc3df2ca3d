use std::fmt::Write;

use radlim_core::domains::{ScherkPolygon, SideLabel};
use radlim_core::{MetricModel, Point};

pub const VIEW: f64 = 1000.0;
/// Radius of the disc boundary in viewport units.
const DISC_PX: f64 = 470.0;

struct Frame {
    scale: f64,
}

impl Frame {
    fn px(&self, p: Point) -> (f64, f64) {
        (0.5 * VIEW + self.scale * p.x, 0.5 * VIEW - self.scale * p.y)
    }
}

/// Node samples `(p, u)` read from a field CSV.
pub type Samples = [(Point, f64)];

pub fn render(d: &ScherkPolygon, field: Option<&Samples>) -> String {
    let r = d.disc.model_radius();
    let f = Frame { scale: DISC_PX / r };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW}" height="{VIEW}" viewBox="0 0 {VIEW} {VIEW}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    if let Some(samples) = field {
        heatmap(&mut s, &f, samples);
    }
    let _ = writeln!(
        s,
        r##"<circle class="boundary" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#222222" stroke-width="2"/>"##,
        0.5 * VIEW,
        0.5 * VIEW,
        DISC_PX
    );
    for i in 0..d.len() {
        side(&mut s, &f, d, i);
    }
    s.push_str("</svg>\n");
    s
}

fn side(s: &mut String, f: &Frame, d: &ScherkPolygon, i: usize) {
    let arc = d.side_arc(i);
    let (a, b) = (f.px(arc.start), f.px(arc.end));
    let (class, style) = match d.labels[i] {
        SideLabel::A => ("a", r##"stroke="#c0392b" stroke-width="4""##),
        SideLabel::B => ("b", r##"stroke="#1f5fae" stroke-width="4" stroke-dasharray="14 8""##),
    };
    let path = match d.model() {
        MetricModel::Euclidean => format!("M {:.3} {:.3} L {:.3} {:.3}", a.0, a.1, b.0, b.1),
        MetricModel::Hyperbolic => {
            let m = f.px(arc.midpoint());
            match circumcircle(a, m, b) {
                Some((rad, sweep)) => {
                    format!("M {:.3} {:.3} A {rad:.3} {rad:.3} 0 0 {sweep} {:.3} {:.3}", a.0, a.1, b.0, b.1)
                }
                None => format!("M {:.3} {:.3} L {:.3} {:.3}", a.0, a.1, b.0, b.1),
            }
        }
    };
    let _ = writeln!(s, r#"<path class="side {class}" d="{path}" fill="none" {style}/>"#);
}

/// Radius of the circle through three screen points and the SVG sweep flag
/// for going `a → m → b`; `None` when they are collinear (a diameter).
fn circumcircle(a: (f64, f64), m: (f64, f64), b: (f64, f64)) -> Option<(f64, u8)> {
    let (ux, uy) = (m.0 - a.0, m.1 - a.1);
    let (vx, vy) = (b.0 - m.0, b.1 - m.1);
    let cross = ux * vy - uy * vx;
    let chord = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
    if cross.abs() <= 1e-9 * chord * chord {
        return None;
    }
    // R = |ab| |am| |mb| / (2 |cross|)
    let am = (ux * ux + uy * uy).sqrt();
    let mb = (vx * vx + vy * vy).sqrt();
    Some((chord * am * mb / (2.0 * cross.abs()), u8::from(cross > 0.0)))
}

fn heatmap(s: &mut String, f: &Frame, samples: &Samples) {
    let top = samples.iter().map(|(_, u)| u.abs()).fold(0.0, f64::max);
    let _ = writeln!(s, r#"<g class="heatmap">"#);
    for &(p, u) in samples {
        let (x, y) = f.px(p);
        let t = if top > 0.0 { u / top } else { 0.0 };
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="{}"/>"#, color(t));
    }
    let _ = writeln!(s, "</g>");
}

/// Blue through white to red for `t ∈ [-1, 1]`.
fn color(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let fade = |c: f64| (255.0 - (255.0 - c) * t.abs()).round() as u8;
    let (r, g, b) = if t >= 0.0 {
        (fade(192.0), fade(57.0), fade(43.0))
    } else {
        (fade(31.0), fade(95.0), fade(174.0))
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}
