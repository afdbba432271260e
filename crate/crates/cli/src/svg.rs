//! Static SVG of a planar Tverberg partition: one hull polygon per block,
//! the input points with their indices, and the common point `z`.

use std::fmt::Write;

use num_traits::ToPrimitive;
use tverberg::{Instance, Partition, Point, Rat};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn cross(o: &Point, a: &Point, b: &Point) -> Rat {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Hull vertices of `indices` in counter-clockwise order (monotone chain,
/// exact orientation tests). Collinear points on hull edges are dropped.
pub fn convex_hull(points: &[Point], indices: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = indices.to_vec();
    idx.sort_by(|&a, &b| points[a].cmp(&points[b]));
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let ordered: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in ordered {
            while hull.len() >= start + 2 {
                let o = &points[hull[hull.len() - 2]];
                let a = &points[hull[hull.len() - 1]];
                if cross(o, a, &points[i]) > Rat::from_integer(0.into()) {
                    break;
                }
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

pub fn render(inst: &Instance, part: &Partition, z: &[Rat]) -> String {
    assert_eq!(inst.d(), 2, "SVG output is planar only");
    let coords: Vec<(f64, f64)> = inst
        .points()
        .iter()
        .map(|p| (to_f64(&p[0]), to_f64(&p[1])))
        .collect();
    let zf = (to_f64(&z[0]), to_f64(&z[1]));
    let all = coords.iter().chain(std::iter::once(&zf));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::EPSILON);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |(x, y): (f64, f64)| (MARGIN + (x - x0) * scale, SIZE - MARGIN - (y - y0) * scale);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (p, block) in part.blocks().iter().enumerate() {
        let color = PALETTE[p % PALETTE.len()];
        let hull = convex_hull(inst.points(), block);
        let pts: Vec<String> = hull
            .iter()
            .map(|&i| {
                let (x, y) = map(coords[i]);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let ids: Vec<String> = hull.iter().map(ToString::to_string).collect();
        let _ = writeln!(
            out,
            r#"<polygon class="hull" data-block="{p}" data-vertices="{}" points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="2"/>"#,
            ids.join(" "),
            pts.join(" ")
        );
    }
    for (i, &c) in coords.iter().enumerate() {
        let (x, y) = map(c);
        let color = PALETTE[part.block_of(i) % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}" font-size="12">{i}</text>"#,
            x + 6.0,
            y - 6.0
        );
    }
    let (x, y) = map(zf);
    let _ = writeln!(
        out,
        r#"<circle class="z" cx="{x:.2}" cy="{y:.2}" r="6" fill="none" stroke="black" stroke-width="2"/>"#
    );
    out.push_str("</svg>\n");
    out
}
