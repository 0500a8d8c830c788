//! Minimal SVG output: the confidence-region heat map with its threshold
//! contour traced by marching squares.

use std::fmt::Write as _;

use crate::inference::ConfidenceRegion;

const WIDTH: f64 = 520.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 20.0;
const PLOT_W: f64 = 420.0;
const PLOT_H: f64 = 380.0;

fn lerp_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (lo, hi) = ((33.0, 102.0, 172.0), (247.0, 247.0, 247.0));
    let c = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        c(lo.0, hi.0),
        c(lo.1, hi.1),
        c(lo.2, hi.2)
    )
}

struct Axes {
    m: (f64, f64),
    b: (f64, f64),
}

impl Axes {
    fn x(&self, m: f64) -> f64 {
        LEFT + (m - self.m.0) / (self.m.1 - self.m.0) * PLOT_W
    }

    fn y(&self, b: f64) -> f64 {
        TOP + PLOT_H - (b - self.b.0) / (self.b.1 - self.b.0) * PLOT_H
    }
}

/// Line segments where the bilinear surface crosses `level`.
fn contour_segments(xs: &[f64], ys: &[f64], z: &[Vec<f64>], level: f64) -> Vec<[(f64, f64); 2]> {
    let cap = 1e12;
    let f = |i: usize, j: usize| (z[i][j] - level).clamp(-cap, cap);
    let cross = |a: (f64, f64, f64), b: (f64, f64, f64)| {
        let t = a.2 / (a.2 - b.2);
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    };
    let mut out = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        for j in 0..ys.len().saturating_sub(1) {
            let corners = [
                (xs[i], ys[j], f(i, j)),
                (xs[i + 1], ys[j], f(i + 1, j)),
                (xs[i + 1], ys[j + 1], f(i + 1, j + 1)),
                (xs[i], ys[j + 1], f(i, j + 1)),
            ];
            let points: Vec<(f64, f64)> = (0..4)
                .filter_map(|k| {
                    let (a, b) = (corners[k], corners[(k + 1) % 4]);
                    ((a.2 <= 0.0) != (b.2 <= 0.0)).then(|| cross(a, b))
                })
                .collect();
            for pair in points.chunks_exact(2) {
                out.push([pair[0], pair[1]]);
            }
        }
    }
    out
}

pub fn region_svg(region: &ConfidenceRegion<f64>) -> String {
    let (ms, bs) = (&region.m_grid, &region.b_grid);
    let n = ms.len();
    let half = |g: &[f64]| (g[1] - g[0]) / 2.0;
    let axes = Axes {
        m: (ms[0] - half(ms), ms[n - 1] + half(ms)),
        b: (bs[0] - half(bs), bs[bs.len() - 1] + half(bs)),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    let (cw, ch) = (PLOT_W / n as f64, PLOT_H / bs.len() as f64);
    for (i, &m) in ms.iter().enumerate() {
        for (j, &b) in bs.iter().enumerate() {
            let t = region.w_values[i][j] / (2.0 * region.threshold);
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                axes.x(m) - cw / 2.0,
                axes.y(b) - ch / 2.0,
                cw + 0.05,
                ch + 0.05,
                lerp_color(t)
            );
        }
    }
    let _ = writeln!(s, "</g>");

    let mut path = String::new();
    for [a, b] in contour_segments(ms, bs, &region.w_values, region.threshold) {
        let _ = write!(
            path,
            "M{:.2} {:.2}L{:.2} {:.2}",
            axes.x(a.0),
            axes.y(a.1),
            axes.x(b.0),
            axes.y(b.1)
        );
    }
    if !path.is_empty() {
        let _ = writeln!(
            s,
            r#"<path d="{path}" stroke="black" stroke-width="1.5" fill="none"/>"#
        );
    }

    let (em, eb) = region.estimate;
    if em.is_finite() && eb.is_finite() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
            axes.x(em),
            axes.y(eb)
        );
    }
    if (axes.m.0..=axes.m.1).contains(&0.0) && (axes.b.0..=axes.b.1).contains(&0.0) {
        let (x, y) = (axes.x(0.0), axes.y(0.0));
        let _ = writeln!(
            s,
            r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="firebrick" stroke-width="2"/>"#,
            x - 5.0,
            y - 5.0,
            x + 5.0,
            y + 5.0,
            x - 5.0,
            y + 5.0,
            x + 5.0,
            y - 5.0
        );
    }

    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#
    );
    let bottom = TOP + PLOT_H;
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let m = axes.m.0 + t * (axes.m.1 - axes.m.0);
        let b = axes.b.0 + t * (axes.b.1 - axes.b.0);
        let (x, y) = (axes.x(m), axes.y(b));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick(m)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            tick(b)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Difference in means among the observed</text>"#,
        LEFT + PLOT_W / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">Log odds ratio of being observed</text>"#,
        TOP + PLOT_H / 2.0
    );
    s.push_str("</svg>\n");
    s
}

fn tick(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_contour_crosses_at_radius() {
        let g: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
        let z: Vec<Vec<f64>> = g
            .iter()
            .map(|&x| g.iter().map(|&y| x * x + y * y).collect())
            .collect();
        let segs = contour_segments(&g, &g, &z, 1.0);
        assert!(!segs.is_empty());
        for seg in segs {
            for (x, y) in seg {
                let r = (x * x + y * y).sqrt();
                assert!((r - 1.0).abs() < 0.03, "r = {r}");
            }
        }
    }
}
