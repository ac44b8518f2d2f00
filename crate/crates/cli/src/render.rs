//! DOT and SVG output.

use std::fmt::Write;

use ditop_core::grid::GridComplex;
use ditop_core::scene::{Coord, CubicalScene};
use ditop_core::{LatticePath, VertexId};

use crate::report::EdgeEntry;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A multigraph with one DOT edge per unit of multiplicity.
pub fn dot(name: &str, nodes: &[String], edges: &[EdgeEntry]) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for n in nodes {
        writeln!(out, "  {};", quote(n)).unwrap();
    }
    for e in edges {
        for k in 0..e.count {
            writeln!(out, "  {} -> {} [label=\"{}\"];", quote(&e.from), quote(&e.to), k + 1).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

const SIZE: f64 = 400.0;
const MARGIN: f64 = 30.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn to_f64(c: &Coord) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

fn sx(x: &Coord) -> f64 {
    MARGIN + to_f64(x) * SIZE
}

fn sy(y: &Coord) -> f64 {
    MARGIN + (1.0 - to_f64(y)) * SIZE
}

/// Draws a 2-dimensional scene: the unit square, forbidden boxes, glued
/// hyperplanes, labelled points and one polyline per given path.
pub fn svg(grid: &GridComplex, scene: &CubicalScene, points: &[(VertexId, String)], paths: &[LatticePath]) -> String {
    let side = SIZE + 2.0 * MARGIN;
    let mut out = String::new();
    writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side}\" height=\"{side}\" viewBox=\"0 0 {side} {side}\">").unwrap();
    writeln!(out, "  <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\" stroke=\"black\"/>").unwrap();
    for b in &scene.forbidden {
        let (x0, x1) = (sx(&b.0[0].0), sx(&b.0[0].1));
        let (y0, y1) = (sy(&b.0[1].1), sy(&b.0[1].0));
        writeln!(out, "  <rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#bbbbbb\"/>", x1 - x0, y1 - y0).unwrap();
    }
    for id in &scene.identifications {
        for c in [id.source, id.target] {
            let (x1, y1, x2, y2) = if id.axis == 0 {
                (sx(&c), MARGIN, sx(&c), MARGIN + SIZE)
            } else {
                (MARGIN, sy(&c), MARGIN + SIZE, sy(&c))
            };
            writeln!(out, "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"black\" stroke-dasharray=\"4 3\"/>").unwrap();
        }
    }
    for (k, path) in paths.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut d = String::new();
        for &e in &path.steps {
            let edge = grid.edge(e);
            let from: Vec<Coord> = edge.base.iter().enumerate().map(|(a, i)| grid.coords(a)[*i]).collect();
            let mut to = from.clone();
            to[edge.axis] = grid.coords(edge.axis)[edge.base[edge.axis] + 1];
            write!(d, "M{:.2},{:.2} L{:.2},{:.2} ", sx(&from[0]), sy(&from[1]), sx(&to[0]), sy(&to[1])).unwrap();
        }
        if !d.is_empty() {
            writeln!(out, "  <path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" opacity=\"0.8\"/>", d.trim_end()).unwrap();
        }
    }
    for (v, label) in points {
        let p = grid.vertex_point(*v);
        let (x, y) = (sx(&p[0]), sy(&p[1]));
        writeln!(out, "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"black\"/>").unwrap();
        writeln!(out, "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>", x + 6.0, y - 6.0, escape(label)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
