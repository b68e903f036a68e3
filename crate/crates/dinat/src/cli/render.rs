//! Graphviz output.
//!
//! Places are `p1..`, transitions `t1..`. Covariant boundary places are white
//! squares, contravariant ones grey squares, internal places circles and
//! transitions black boxes labelled `name.variable`.

use std::fmt::Write;

use crate::dinat::{decompose, Transformation};
use crate::signature::Variance;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn place_label(t: &Transformation, p: usize) -> String {
    let g = t.graph().cospan();
    let mut parts = Vec::new();
    if let Some(i) = g.left().iter().position(|&q| q == p) {
        parts.push(format!("dom{}", i + 1));
    }
    if let Some(j) = g.right().iter().position(|&q| q == p) {
        parts.push(format!("cod{}", j + 1));
    }
    if parts.is_empty() {
        format!("p{}", p + 1)
    } else {
        parts.join("/")
    }
}

pub fn transition_label(t: &Transformation, tr: usize) -> String {
    let cs = decompose(t);
    match t.tags().get(tr) {
        Some(tag) => format!("{}.{}", cs[tag.constituent - 1].signature.name, tag.variable),
        None => format!("t{}", tr + 1),
    }
}

pub fn to_dot(t: &Transformation) -> String {
    let g = t.graph().cospan();
    let net = g.net();
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(t.name())).unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    for p in 0..net.num_places() {
        let style = match g.boundary_variance(p) {
            Some(Variance::Co) => "shape=square, style=filled, fillcolor=white",
            Some(Variance::Contra) => "shape=square, style=filled, fillcolor=grey",
            None => "shape=circle",
        };
        writeln!(out, "  p{} [{style}, label={}];", p + 1, quote(&place_label(t, p))).unwrap();
    }
    for tr in 0..net.num_transitions() {
        writeln!(
            out,
            "  t{} [shape=box, style=filled, fillcolor=black, fontcolor=white, label={}];",
            tr + 1,
            quote(&transition_label(t, tr))
        )
        .unwrap();
    }
    for tr in 0..net.num_transitions() {
        for &p in net.inputs(tr) {
            writeln!(out, "  p{} -> t{};", p + 1, tr + 1).unwrap();
        }
        for &p in net.outputs(tr) {
            writeln!(out, "  t{} -> p{};", tr + 1, p + 1).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
