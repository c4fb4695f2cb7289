use std::fmt::Write as _;

use anyhow::{bail, Result};
use euclid_core::reductions::{arrangement_from_embedding, Arrangement};
use euclid_core::{Embedding, Point, Profile, Rational};
use num_traits::ToPrimitive;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 30.0;

fn float(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

fn xy(p: &Point) -> (f64, f64) {
    (float(&p.coords()[0]), float(&p.coords()[1]))
}

struct Frame {
    min: (f64, f64),
    span: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a Point>) -> Frame {
        let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            let (x, y) = xy(p);
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        if !lo.0.is_finite() {
            return Frame { min: (-1.0, -1.0), span: 2.0 };
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9) * 1.1;
        let centre = ((lo.0 + hi.0) / 2.0, (lo.1 + hi.1) / 2.0);
        Frame { min: (centre.0 - span / 2.0, centre.1 - span / 2.0), span }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let k = (SIZE - 2.0 * MARGIN) / self.span;
        (MARGIN + (x - self.min.0) * k, SIZE - MARGIN - (y - self.min.1) * k)
    }

    /// Where `u . x = b` crosses the frame's square, if it does.
    fn clip(&self, u: (f64, f64), b: f64) -> Option<((f64, f64), (f64, f64))> {
        let (x0, y0, x1, y1) = (self.min.0, self.min.1, self.min.0 + self.span, self.min.1 + self.span);
        let mut hits: Vec<(f64, f64)> = Vec::new();
        if u.1.abs() > 1e-12 {
            for x in [x0, x1] {
                let y = (b - u.0 * x) / u.1;
                if (y0..=y1).contains(&y) {
                    hits.push((x, y));
                }
            }
        }
        if u.0.abs() > 1e-12 {
            for y in [y0, y1] {
                let x = (b - u.1 * y) / u.0;
                if (x0..=x1).contains(&x) {
                    hits.push((x, y));
                }
            }
        }
        let first = *hits.first()?;
        let far = hits.into_iter().max_by(|p, q| {
            let d = |r: &(f64, f64)| (r.0 - first.0).powi(2) + (r.1 - first.1).powi(2);
            d(p).total_cmp(&d(q))
        })?;
        Some((first, far))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG 1.1 picture of a planar embedding: voters as dots, alternatives as
/// labelled squares, and with `bisectors` the lines separating each
/// `ai`/`bi` pair of a paired profile.
pub fn render(profile: &Profile, embedding: &Embedding, bisectors: bool) -> Result<String> {
    if embedding.dimension() != 2 {
        bail!("can only render 2-dimensional embeddings, this one has dimension {}", embedding.dimension());
    }
    let lines: Option<Arrangement> = if bisectors { Some(arrangement_from_embedding(profile, embedding)?) } else { None };
    let frame = Frame::fit(embedding.voters().iter().chain(embedding.alternatives()));
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        svg,
        "<style>.voter{{fill:#1f77b4}}.alternative{{fill:#d62728}}.bisector{{stroke:#888;stroke-dasharray:4 3}}text{{font:11px sans-serif}}</style>"
    );
    let _ = writeln!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    for (i, h) in lines.iter().flat_map(|a| a.hyperplanes().iter().enumerate()) {
        let u = (float(&h.normal.coords()[0]), float(&h.normal.coords()[1]));
        if let Some((p, q)) = frame.clip(u, float(&h.offset)) {
            let ((x1, y1), (x2, y2)) = (frame.map(p), frame.map(q));
            let _ = writeln!(
                svg,
                r#"<line class="bisector" data-pair="{}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#,
                i + 1
            );
        }
    }
    for (v, p) in embedding.voters().iter().take(profile.num_voters()).enumerate() {
        let (x, y) = frame.map(xy(p));
        let _ = writeln!(svg, r#"<circle class="voter" cx="{x:.2}" cy="{y:.2}" r="3.5"><title>v{v}</title></circle>"#);
    }
    for (c, p) in embedding.alternatives().iter().take(profile.num_alternatives()).enumerate() {
        let (x, y) = frame.map(xy(p));
        let label = escape(&profile.alternative_label(c));
        let _ = writeln!(
            svg,
            r#"<rect class="alternative" x="{:.2}" y="{:.2}" width="8" height="8"><title>{label}</title></rect>"#,
            x - 4.0,
            y - 4.0
        );
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{label}</text>"#, x + 6.0, y - 6.0);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
