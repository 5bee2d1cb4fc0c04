//! Printer for the `.pipta` model format; [`print_model`] output parses back
//! to an identical model.

use std::fmt::Write as _;

use num_traits::One;

use crate::model::{AtomicGuard, Bound, Edge, Pipta, Rel};
use crate::rational;

fn bound(m: &Pipta, b: &Bound) -> String {
    match b {
        Bound::Const(c) => rational::format(c),
        Bound::Param(p) => m.params[p.0].clone(),
    }
}

fn guard(m: &Pipta, atoms: &[AtomicGuard]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < atoms.len() {
        let a = &atoms[i];
        let clock = &m.clocks[a.clock.0];
        if let Some(b) = atoms.get(i + 1) {
            if a.rel == Rel::Ge && b.rel == Rel::Le && a.clock == b.clock && a.bound == b.bound {
                parts.push(format!("{clock} = {}", bound(m, &a.bound)));
                i += 2;
                continue;
            }
        }
        parts.push(format!("{clock} {} {}", a.rel.symbol(), bound(m, &a.bound)));
        i += 1;
    }
    parts.join(" && ")
}

fn edge(m: &Pipta, e: &Edge) -> String {
    let mut s = String::new();
    if !e.guard.atoms.is_empty() {
        let _ = write!(s, "when {} ", guard(m, &e.guard.atoms));
    }
    let _ = write!(s, "sync {} goto ", m.actions[e.action.0]);
    let entries = &e.dist.entries;
    if entries.len() == 1 && entries[0].interval.is_point() && entries[0].interval.lo.is_one() {
        let d = &entries[0];
        if d.resets.is_empty() {
            s.push_str(&m.locations[d.target.0]);
        } else {
            let r: Vec<&str> = d.resets.iter().map(|c| m.clocks[c.0].as_str()).collect();
            let _ = write!(s, "{{ reset {{{}}} -> {} }}", r.join(", "), m.locations[d.target.0]);
        }
        return s;
    }
    let branches: Vec<String> = entries
        .iter()
        .map(|d| {
            let iv = &d.interval;
            let mut b = if iv.is_point() {
                rational::format(&iv.lo)
            } else {
                format!("[{}, {}]", rational::format(&iv.lo), rational::format(&iv.hi))
            };
            if !d.resets.is_empty() {
                let r: Vec<&str> = d.resets.iter().map(|c| m.clocks[c.0].as_str()).collect();
                let _ = write!(b, " reset {{{}}}", r.join(", "));
            }
            let _ = write!(b, " -> {}", m.locations[d.target.0]);
            b
        })
        .collect();
    let _ = write!(s, "{{ {} }}", branches.join("; "));
    s
}

pub fn print_model(m: &Pipta) -> String {
    let mut out = format!("pipta {}\n", m.name);
    for (kw, names) in [("clocks", &m.clocks), ("params", &m.params), ("actions", &m.actions)] {
        if !names.is_empty() {
            let _ = writeln!(out, "{kw} {};", names.join(", "));
        }
    }
    let _ = writeln!(out, "init {};", m.locations[m.initial.0]);
    out.push('\n');
    let sorted = m.edges.windows(2).all(|w| w[0].source <= w[1].source);
    if sorted {
        for (l, name) in m.locations.iter().enumerate() {
            let es: Vec<&Edge> = m.edges.iter().filter(|e| e.source.0 == l).collect();
            write_block(&mut out, m, name, &es);
        }
    } else {
        // Declare locations first to fix their order, then keep edge order.
        for name in &m.locations {
            let _ = writeln!(out, "loc {name};");
        }
        let mut i = 0;
        while i < m.edges.len() {
            let src = m.edges[i].source;
            let run: Vec<&Edge> = m.edges[i..].iter().take_while(|e| e.source == src).collect();
            i += run.len();
            write_block(&mut out, m, &m.locations[src.0], &run);
        }
    }
    out
}

fn write_block(out: &mut String, m: &Pipta, name: &str, edges: &[&Edge]) {
    if edges.is_empty() {
        let _ = writeln!(out, "loc {name};");
        return;
    }
    let _ = writeln!(out, "loc {name} {{");
    for e in edges {
        let _ = writeln!(out, "  {}", edge(m, e));
    }
    out.push_str("}\n");
}
