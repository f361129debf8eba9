//! Static SVG drawings in table coordinates (y up), fit to a bounding box
//! with a 5% margin.

use std::fmt::Write;

pub struct Svg {
    lo: (f64, f64),
    hi: (f64, f64),
    body: String,
    skipped: usize,
}

const STYLE: &str = "\
.table{fill:#f6f3ea;stroke:#222;stroke-width:1.5}\
.copy{fill:none;stroke:#999;stroke-width:1}\
.zone{fill:#e8d6d6;stroke:none}\
.orbit{fill:none;stroke:#1f5fa8;stroke-width:1.2}\
.segment{fill:none;stroke:#c23b22;stroke-width:1.5}\
.diagonal{fill:none;stroke:#2e8b57;stroke-width:1}\
.singular{stroke:#c23b22;stroke-width:1.5}\
.dot{fill:#1f5fa8}\
.miss{fill:#c23b22}\
text{font-family:sans-serif;fill:#444}\
*{vector-effect:non-scaling-stroke}";

fn finite(pts: &[(f64, f64)]) -> bool {
    pts.iter().all(|(x, y)| x.is_finite() && y.is_finite())
}

impl Svg {
    /// Canvas covering the points, or the unit square if there are none.
    pub fn fit(pts: &[(f64, f64)]) -> Self {
        let pts: Vec<(f64, f64)> = pts.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        let (mut lo, mut hi) = ((0.0, 0.0), (1.0, 1.0));
        if let Some(&first) = pts.first() {
            lo = first;
            hi = first;
            for &(x, y) in &pts {
                lo = (lo.0.min(x), lo.1.min(y));
                hi = (hi.0.max(x), hi.1.max(y));
            }
        }
        Svg { lo, hi, body: String::new(), skipped: 0 }
    }

    fn extent(&self) -> f64 {
        (self.hi.0 - self.lo.0).max(self.hi.1 - self.lo.1).max(1e-9)
    }

    fn flip(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (x, self.hi.1 + self.lo.1 - y)
    }

    fn coords(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.flip(p);
                format!("{x:.6},{y:.6}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], class: &str) {
        if !finite(pts) {
            self.skipped += 1;
            return;
        }
        let c = self.coords(pts);
        let _ = writeln!(self.body, r#"<polygon class="{class}" points="{c}"/>"#);
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], class: &str) {
        if !finite(pts) || pts.len() < 2 {
            self.skipped += 1;
            return;
        }
        let c = self.coords(pts);
        let _ = writeln!(self.body, r#"<polyline class="{class}" points="{c}"/>"#);
    }

    pub fn cross(&mut self, p: (f64, f64), class: &str) {
        if !finite(&[p]) {
            self.skipped += 1;
            return;
        }
        let r = 0.015 * self.extent();
        let (x, y) = self.flip(p);
        let _ = writeln!(
            self.body,
            r#"<path class="{class}" d="M{:.6},{:.6}L{:.6},{:.6}M{:.6},{:.6}L{:.6},{:.6}"/>"#,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        );
    }

    pub fn dot(&mut self, p: (f64, f64), class: &str) {
        if !finite(&[p]) {
            self.skipped += 1;
            return;
        }
        let r = 0.006 * self.extent();
        let (x, y) = self.flip(p);
        let _ = writeln!(self.body, r#"<circle class="{class}" cx="{x:.6}" cy="{y:.6}" r="{r:.6}"/>"#);
    }

    pub fn label(&mut self, p: (f64, f64), text: &str) {
        if !finite(&[p]) {
            self.skipped += 1;
            return;
        }
        let size = 0.035 * self.extent();
        let (x, y) = self.flip(p);
        let text: String = text
            .chars()
            .map(|c| match c {
                '<' => "&lt;".to_string(),
                '>' => "&gt;".to_string(),
                '&' => "&amp;".to_string(),
                c => c.to_string(),
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.6}" y="{y:.6}" font-size="{size:.6}" text-anchor="middle" dominant-baseline="middle">{text}</text>"#
        );
    }

    pub fn finish(self) -> String {
        let (w, h) = ((self.hi.0 - self.lo.0).max(1e-9), (self.hi.1 - self.lo.1).max(1e-9));
        let (mx, my) = (0.05 * w, 0.05 * h);
        let (vx, vy, vw, vh) = (self.lo.0 - mx, self.lo.1 - my, w + 2.0 * mx, h + 2.0 * my);
        let scale = 800.0 / vw.max(vh);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:.6} {vy:.6} {vw:.6} {vh:.6}" width="{:.0}" height="{:.0}">"#,
            vw * scale,
            vh * scale
        );
        let _ = writeln!(out, "<style>{STYLE}</style>");
        if self.skipped > 0 {
            let _ = writeln!(out, "<!-- {} non-finite elements omitted -->", self.skipped);
        }
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}
