//! SVG phase portraits: trajectories as solid lines, level sets of an
//! optional function as dotted contours.

use std::fmt::Write;

use polylyap::dynamics::{CompiledPoly, Trajectory};
use polylyap::poly::Polynomial;

/// Samples per axis of the contouring grid.
pub const GRID: usize = 201;
const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotError(pub String);

impl std::fmt::Display for PlotError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Line segments of the level set `{g = level}` of a function sampled on a
/// square grid, by marching squares with linear interpolation along edges.
/// `values[j][i]` is the sample at `(xs[i], ys[j])`.
pub fn contour_segments(xs: &[f64], ys: &[f64], values: &[Vec<f64>], level: f64) -> Vec<[(f64, f64); 2]> {
    let mut segs = Vec::new();
    let lerp = |a: (f64, f64, f64), b: (f64, f64, f64)| {
        let t = if (b.2 - a.2).abs() < f64::MIN_POSITIVE { 0.5 } else { (level - a.2) / (b.2 - a.2) };
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    };
    for j in 0..ys.len().saturating_sub(1) {
        for i in 0..xs.len().saturating_sub(1) {
            // corners counter-clockwise from bottom-left
            let c = [
                (xs[i], ys[j], values[j][i]),
                (xs[i + 1], ys[j], values[j][i + 1]),
                (xs[i + 1], ys[j + 1], values[j + 1][i + 1]),
                (xs[i], ys[j + 1], values[j + 1][i]),
            ];
            if c.iter().any(|p| !p.2.is_finite()) {
                continue;
            }
            let idx = c.iter().enumerate().fold(0, |acc, (k, p)| acc | (((p.2 > level) as usize) << k));
            let e = |k: usize| lerp(c[k], c[(k + 1) % 4]);
            let mut push = |a: usize, b: usize| segs.push([e(a), e(b)]);
            match idx {
                0 | 15 => {}
                1 | 14 => push(3, 0),
                2 | 13 => push(0, 1),
                3 | 12 => push(3, 1),
                4 | 11 => push(1, 2),
                6 | 9 => push(0, 2),
                7 | 8 => push(2, 3),
                5 | 10 => {
                    let center = c.iter().map(|p| p.2).sum::<f64>() / 4.0;
                    // saddle: the center decides which diagonal pair is connected
                    if (center > level) == (idx == 5) {
                        push(3, 2);
                        push(0, 1);
                    } else {
                        push(3, 0);
                        push(1, 2);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    segs
}

fn half_width(trajs: &[Trajectory]) -> f64 {
    let m = trajs
        .iter()
        .filter_map(|t| t.states.first())
        .flat_map(|x| x.iter().map(|v| v.abs()))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    if m > 0.0 {
        1.25 * m
    } else {
        1.0
    }
}

/// Renders a planar phase portrait over the square `[-r, r]²`, where `r` is
/// 1.25 times the largest initial coordinate. Level sets of `v`, when given,
/// pass through the initial states and are traced on a [`GRID`]² grid.
pub fn render_svg(trajs: &[Trajectory], v: Option<&Polynomial>) -> Result<String, PlotError> {
    if trajs.iter().any(|t| t.nvars() != 2) {
        return Err(PlotError("plots need a planar (two-variable) system".into()));
    }
    if let Some(v) = v {
        if v.nvars() != 2 {
            return Err(PlotError("the plotted function must have two variables".into()));
        }
    }
    let r = half_width(trajs);
    let scale = (SIZE - 2.0 * PAD) / (2.0 * r);
    let sx = |x: f64| PAD + (x + r) * scale;
    let sy = |y: f64| SIZE - PAD - (y + r) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="frame"><rect x="{PAD}" y="{PAD}" width="{w}" height="{w}"/></clipPath></defs>"#,
        w = SIZE - 2.0 * PAD
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<line x1="{PAD}" y1="{cy:.2}" x2="{e}" y2="{cy:.2}" stroke="#bbb"/><line x1="{cx:.2}" y1="{PAD}" x2="{cx:.2}" y2="{e}" stroke="#bbb"/>"##,
        cx = sx(0.0),
        cy = sy(0.0),
        e = SIZE - PAD
    );
    let _ = writeln!(s, r#"<g clip-path="url(#frame)">"#);
    if let Some(v) = v {
        let cv = CompiledPoly::new(v);
        let grid: Vec<f64> = (0..GRID).map(|k| -r + 2.0 * r * k as f64 / (GRID - 1) as f64).collect();
        let values: Vec<Vec<f64>> = grid.iter().map(|&y| grid.iter().map(|&x| cv.eval(&[x, y])).collect()).collect();
        let mut levels: Vec<f64> = trajs
            .iter()
            .filter_map(|t| t.states.first())
            .map(|x| cv.eval(x))
            .filter(|l| l.is_finite() && *l > 0.0)
            .collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        for level in levels {
            let mut d = String::new();
            for [a, b] in contour_segments(&grid, &grid, &values, level) {
                let _ = write!(d, "M{:.2} {:.2}L{:.2} {:.2}", sx(a.0), sy(a.1), sx(b.0), sy(b.1));
            }
            let _ = writeln!(
                s,
                r##"<path d="{d}" fill="none" stroke="#555" stroke-width="1" stroke-dasharray="2,3"/>"##
            );
        }
    }
    for t in trajs {
        let mut pts = String::new();
        for x in t.states.iter().filter(|x| x.iter().all(|v| v.is_finite() && v.abs() <= 10.0 * r)) {
            let _ = write!(pts, "{:.2},{:.2} ", sx(x[0]), sy(x[1]));
        }
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>"##,
            pts.trim_end()
        );
        if let Some(x) = t.states.first() {
            let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#c0392b"/>"##, sx(x[0]), sy(x[1]));
        }
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use polylyap::dynamics::Terminal;
    use polylyap::poly::parse_polynomial;

    fn traj(states: Vec<Vec<f64>>) -> Trajectory {
        Trajectory {
            times: (0..states.len()).map(|k| k as f64).collect(),
            states,
            terminal: Terminal::TimeLimit,
        }
    }

    #[test]
    fn circle_contour_is_closed_and_on_level() {
        let xs: Vec<f64> = (0..41).map(|k| -2.0 + 0.1 * k as f64).collect();
        let vals: Vec<Vec<f64>> = xs.iter().map(|&y| xs.iter().map(|&x| x * x + y * y).collect()).collect();
        let segs = contour_segments(&xs, &xs, &vals, 1.1);
        assert!(segs.len() > 30);
        for s in &segs {
            for p in s {
                let r = (p.0 * p.0 + p.1 * p.1).sqrt();
                assert!((r - 1.1f64.sqrt()).abs() < 0.02, "{r}");
            }
        }
        // every endpoint is shared by exactly two segments on a closed curve
        let key = |p: (f64, f64)| ((p.0 * 1e6).round() as i64, (p.1 * 1e6).round() as i64);
        let mut count = std::collections::HashMap::new();
        for s in &segs {
            for p in s {
                *count.entry(key(*p)).or_insert(0) += 1;
            }
        }
        assert!(count.values().all(|&c| c == 2));
    }

    #[test]
    fn saddle_cell_gives_two_segments() {
        let xs = [0.0, 1.0];
        let vals = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(contour_segments(&xs, &xs, &vals, 0.5).len(), 2);
    }

    #[test]
    fn svg_with_and_without_contours() {
        let t = traj(vec![vec![2.0, 2.0], vec![1.0, 0.5], vec![0.1, 0.0]]);
        let v = parse_polynomial("x1^4 + x2^4", Some(2)).unwrap();
        let with = render_svg(std::slice::from_ref(&t), Some(&v)).unwrap();
        assert!(with.contains("stroke-dasharray"));
        assert!(with.contains("<polyline"));
        let without = render_svg(&[t], None).unwrap();
        assert!(!without.contains("stroke-dasharray"));
        assert!(without.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn three_dimensional_input_is_rejected() {
        let t = traj(vec![vec![1.0, 0.0, 0.0]]);
        assert!(render_svg(&[t], None).is_err());
    }
}
