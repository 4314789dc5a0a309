//! Static SVG drawing of a network with nodes colored by treatment.

use std::fmt::Write as _;

use rand::Rng as _;

use crate::criteria::Design;
use crate::error::Result;
use crate::netgraph::Network;
use crate::rng::rng_from_seed;

pub const COLOR_A: &str = "#d62728";
pub const COLOR_B: &str = "#1f77b4";
const COLOR_NONE: &str = "#7f7f7f";

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub seed: u64,
    pub iterations: usize,
    pub size: f64,
    pub node_radius: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 300,
            size: 600.0,
            node_radius: 6.0,
        }
    }
}

/// Fruchterman–Reingold layout in the unit square, seeded initial positions,
/// linear cooling.
pub fn force_layout(net: &Network, seed: u64, iterations: usize) -> Vec<(f64, f64)> {
    let n = net.n();
    let mut rng = rng_from_seed(seed);
    let mut pos: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    if n < 2 {
        return pos;
    }
    let k = (1.0 / n as f64).sqrt();
    let mut temp = 0.1;
    let cool = temp / (iterations.max(1) as f64 + 1.0);
    let mut disp = vec![(0.0, 0.0); n];
    for _ in 0..iterations {
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let dist = (dx * dx + dy * dy).sqrt().max(1e-6);
                let f = k * k / dist;
                let (fx, fy) = (dx / dist * f, dy / dist * f);
                disp[i].0 += fx;
                disp[i].1 += fy;
                disp[j].0 -= fx;
                disp[j].1 -= fy;
            }
        }
        for (i, j) in net.edges() {
            let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
            let dist = (dx * dx + dy * dy).sqrt().max(1e-6);
            let f = dist * dist / k;
            let (fx, fy) = (dx / dist * f, dy / dist * f);
            disp[i].0 -= fx;
            disp[i].1 -= fy;
            disp[j].0 += fx;
            disp[j].1 += fy;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt();
            if len > 0.0 {
                let step = len.min(temp);
                p.0 += d.0 / len * step;
                p.1 += d.1 / len * step;
            }
        }
        temp -= cool;
    }
    // Rescale into [0, 1]².
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pos {
        lo_x = lo_x.min(x);
        hi_x = hi_x.max(x);
        lo_y = lo_y.min(y);
        hi_y = hi_y.max(y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    pos.iter()
        .map(|&(x, y)| ((x - lo_x) / span, (y - lo_y) / span))
        .collect()
}

/// Standalone SVG document. Treatment A (+1) nodes use [`COLOR_A`], B (−1)
/// nodes [`COLOR_B`]; without a design every node is grey.
pub fn render_svg(net: &Network, design: Option<&Design>, opts: &RenderOptions) -> Result<String> {
    if let Some(d) = design {
        d.check_len(net.n())?;
    }
    let pos = force_layout(net, opts.seed, opts.iterations);
    let margin = 2.0 * opts.node_radius;
    let scale = opts.size - 2.0 * margin;
    let at = |i: usize| (margin + pos[i].0 * scale, margin + pos[i].1 * scale);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s:.0}" height="{s:.0}" viewBox="0 0 {s:.0} {s:.0}">"#,
        s = opts.size
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r##"<g stroke="#999999" stroke-width="1">"##);
    for (i, j) in net.edges() {
        let ((x1, y1), (x2, y2)) = (at(i), at(j));
        let _ = writeln!(out, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#);
    }
    out.push_str("</g>\n<g stroke=\"black\" stroke-width=\"0.5\">\n");
    for i in 0..net.n() {
        let (x, y) = at(i);
        let fill = match design.map(|d| d.get(i)) {
            Some(1) => COLOR_A,
            Some(_) => COLOR_B,
            None => COLOR_NONE,
        };
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"><title>{label}</title></circle>"#,
            r = opts.node_radius,
            label = escape(&net.label(i))
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_colors() {
        let tri = Network::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = Design::new(vec![1, 1, -1]).unwrap();
        let svg = render_svg(&tri, Some(&d), &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches(COLOR_A).count(), 2);
        assert_eq!(svg.matches(COLOR_B).count(), 1);
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg, render_svg(&tri, Some(&d), &RenderOptions::default()).unwrap());
    }

    #[test]
    fn layout_stays_in_unit_square() {
        let net = crate::netgraph::generate_random(30, 0.2, 3).unwrap();
        for (x, y) in force_layout(&net, 1, 100) {
            assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
        }
    }
}
