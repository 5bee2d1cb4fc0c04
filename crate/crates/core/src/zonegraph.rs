//! Symbolic (parametric) zone graphs.
//!
//! A zone graph is an interval MDP whose states are (location, zone) pairs.
//! Zones are closed under time elapse, clock-only bounds are abstracted with
//! the model's largest constant, and states are identified up to set equality.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::geometry::{LinTerm, Names, PZone};
use crate::model::{ClockId, DistEntry, Edge, Interval, IntervalDistribution, LocId, Pipta, ValidationReport};
use crate::rational::{self, Rational};

pub const DEFAULT_MAX_STATES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicState {
    pub loc: LocId,
    pub zone: PZone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub state: usize,
    pub interval: Interval,
    pub resets: BTreeSet<ClockId>,
    /// Position of the originating entry in the edge's distribution.
    pub entry: usize,
}

/// One enabled model edge out of one symbolic state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicTransition {
    pub source: usize,
    pub edge: usize,
    pub targets: Vec<Target>,
}

impl SymbolicTransition {
    pub fn intervals(&self) -> Vec<Interval> {
        self.targets.iter().map(|t| t.interval.clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphStatus {
    Complete,
    TruncatedAtLimit,
}

/// What to do when two entries of one edge lead to the same symbolic state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CollisionMode {
    #[default]
    Reject,
    /// Sum the intervals, capping at 1.
    Merge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZoneGraphOptions {
    pub max_states: usize,
    pub collisions: CollisionMode,
}

impl Default for ZoneGraphOptions {
    fn default() -> Self {
        ZoneGraphOptions { max_states: DEFAULT_MAX_STATES, collisions: CollisionMode::Reject }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZoneGraphError {
    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("edge {edge} from state s{state}: entries {first} and {second} reach the same symbolic state")]
    TargetCollision { state: usize, edge: usize, first: usize, second: usize },
    #[error("zone graph is truncated")]
    Truncated,
}

/// Interval MDP over symbolic states; state 0 is initial.
#[derive(Clone, Debug)]
pub struct SymbolicImdp {
    pub states: Vec<SymbolicState>,
    pub transitions: Vec<SymbolicTransition>,
    pub status: GraphStatus,
    /// False for states left on the frontier when exploration stopped.
    pub explored: Vec<bool>,
    pub clocks: Vec<String>,
    pub params: Vec<String>,
    pub locations: Vec<String>,
    pub actions: Vec<String>,
    /// Action of each model edge, indexed like the model's edge list.
    pub edge_actions: Vec<usize>,
    pub k: Rational,
}

impl SymbolicImdp {
    pub fn names(&self) -> Names<'_> {
        Names::new(&self.clocks, &self.params)
    }

    pub fn is_complete(&self) -> bool {
        self.status == GraphStatus::Complete
    }

    /// Indices of the transitions leaving each state.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.source].push(i);
        }
        out
    }

    pub fn state_label(&self, s: usize) -> String {
        format!("s{}", s)
    }

    pub fn render_state(&self, s: usize) -> String {
        let st = &self.states[s];
        format!("{} {}: {}", self.state_label(s), self.locations[st.loc.0], st.zone.render(&self.names()))
    }

    pub fn find_state(&self, loc: LocId, zone: &PZone) -> Option<usize> {
        self.states.iter().position(|s| s.loc == loc && s.zone.same_set(zone))
    }
}

fn initial_zone(m: &Pipta) -> PZone {
    let n = m.clocks.len();
    let start = PZone::from_ineqs(n, m.params.len(), (0..n).map(|c| crate::geometry::Ineq::le(crate::geometry::LinTerm::var(c))));
    start.time_elapse()
}

/// Explores the zone graph breadth first.
pub fn build_zone_graph(m: &Pipta, opts: &ZoneGraphOptions) -> Result<SymbolicImdp, ZoneGraphError> {
    let report = m.validate();
    if !report.is_ok() {
        return Err(ZoneGraphError::InvalidModel(report));
    }
    let nclocks = m.clocks.len();
    let nparams = m.params.len();
    let k = m.max_constant();
    let frozen = m.parametric_clocks();
    let abstraction = |z: PZone| z.k_extrapolate(&k, &frozen);

    let mut states = vec![SymbolicState { loc: m.initial, zone: abstraction(initial_zone(m)) }];
    // States bucketed by location and affine hull; equal sets share a bucket.
    let mut by_loc: Buckets = HashMap::new();
    by_loc.insert((m.initial, states[0].zone.affine_hull()), vec![0]);
    let mut explored = vec![false];
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut status = GraphStatus::Complete;

    while let Some(s) = queue.pop_front() {
        let loc = states[s].loc;
        let zone = states[s].zone.clone();
        // Compute all successors first so a state is either fully explored or not at all.
        let mut pending: Vec<(usize, Vec<Successor>)> = Vec::new();
        for (ei, e) in m.outgoing(loc) {
            let enabled = zone.constrain(e.guard.to_ineqs(nclocks));
            if enabled.is_empty() {
                continue;
            }
            let mut succ = Vec::new();
            for (j, d) in e.dist.entries.iter().enumerate() {
                let resets: Vec<usize> = d.resets.iter().map(|c| c.0).collect();
                let z = abstraction(enabled.reset(&resets).time_elapse());
                let hull = z.affine_hull();
                succ.push((z, hull, d.target, d, j));
            }
            pending.push((ei, succ));
        }
        let mut fresh: Vec<(LocId, &PZone, &Vec<LinTerm>)> = Vec::new();
        for (_, succ) in &pending {
            for (z, h, l, _, _) in succ {
                if find(&states, &by_loc, *l, z, h).is_none()
                    && !fresh.iter().any(|(fl, fz, fh)| fl == l && fh == &h && fz.same_set(z))
                {
                    fresh.push((*l, z, h));
                }
            }
        }
        if states.len() + fresh.len() > opts.max_states {
            status = GraphStatus::TruncatedAtLimit;
            break;
        }
        for (ei, succ) in pending {
            let mut targets: Vec<Target> = Vec::new();
            for (z, h, l, d, j) in succ {
                let id = match find(&states, &by_loc, l, &z, &h) {
                    Some(id) => id,
                    None => {
                        states.push(SymbolicState { loc: l, zone: z });
                        explored.push(false);
                        let id = states.len() - 1;
                        by_loc.entry((l, h)).or_default().push(id);
                        queue.push_back(id);
                        id
                    }
                };
                if let Some(prev) = targets.iter_mut().find(|t| t.state == id) {
                    match opts.collisions {
                        CollisionMode::Reject => {
                            return Err(ZoneGraphError::TargetCollision { state: s, edge: ei, first: prev.entry, second: j });
                        }
                        CollisionMode::Merge => {
                            let cap = |v: Rational| if v > Rational::one() { Rational::one() } else { v };
                            prev.interval = Interval::new(
                                cap(&prev.interval.lo + &d.interval.lo),
                                cap(&prev.interval.hi + &d.interval.hi),
                            );
                            continue;
                        }
                    }
                }
                targets.push(Target { state: id, interval: d.interval.clone(), resets: d.resets.clone(), entry: j });
            }
            transitions.push(SymbolicTransition { source: s, edge: ei, targets });
        }
        explored[s] = true;
    }
    if !queue.is_empty() {
        status = GraphStatus::TruncatedAtLimit;
    }
    debug_assert!(states.iter().all(|s| s.zone.params() == nparams));
    Ok(SymbolicImdp {
        states,
        transitions,
        status,
        explored,
        clocks: m.clocks.clone(),
        params: m.params.clone(),
        locations: m.locations.clone(),
        actions: m.actions.clone(),
        edge_actions: m.edges.iter().map(|e| e.action.0).collect(),
        k,
    })
}

type Buckets = HashMap<(LocId, Vec<LinTerm>), Vec<usize>>;

/// Successor zone with its affine hull, target, entry and entry index.
type Successor<'a> = (PZone, Vec<LinTerm>, LocId, &'a DistEntry, usize);

fn find(states: &[SymbolicState], by_loc: &Buckets, loc: LocId, z: &PZone, hull: &[LinTerm]) -> Option<usize> {
    let cands = by_loc.get(&(loc, hull.to_vec()))?;
    // Canonical forms make structural equality the common fast path.
    cands
        .iter()
        .copied()
        .find(|&i| &states[i].zone == z)
        .or_else(|| cands.iter().copied().find(|&i| states[i].zone.same_set(z)))
}

/// Parameter valuations under which state `s` is reachable.
pub fn reachability_condition(g: &SymbolicImdp, s: usize) -> PZone {
    g.states[s].zone.project_params()
}

/// Location names for the reconstructed model: the first state of each
/// location keeps the name, later ones get `_2`, `_3`, ... suffixes.
pub fn state_names(g: &SymbolicImdp) -> Vec<String> {
    let mut count: BTreeMap<LocId, usize> = BTreeMap::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut names = Vec::with_capacity(g.states.len());
    for st in &g.states {
        let n = count.entry(st.loc).or_insert(0);
        *n += 1;
        let base = &g.locations[st.loc.0];
        let mut name = if *n == 1 { base.clone() } else { format!("{base}_{n}") };
        while taken.contains(&name) {
            *n += 1;
            name = format!("{base}_{n}");
        }
        taken.insert(name.clone());
        names.push(name);
    }
    names
}

/// A model with one location per symbolic state and the same guards, whose
/// zone graph is isomorphic to `g`.
pub fn reconstruct(g: &SymbolicImdp, source: &Pipta) -> Result<Pipta, ZoneGraphError> {
    if !g.is_complete() {
        return Err(ZoneGraphError::Truncated);
    }
    let edges = g
        .transitions
        .iter()
        .map(|t| {
            let e = &source.edges[t.edge];
            Edge {
                source: LocId(t.source),
                guard: e.guard.clone(),
                action: e.action,
                dist: IntervalDistribution::new(
                    t.targets
                        .iter()
                        .map(|x| DistEntry { resets: x.resets.clone(), target: LocId(x.state), interval: x.interval.clone() })
                        .collect(),
                ),
            }
        })
        .collect();
    Ok(Pipta {
        name: format!("{}_zones", source.name),
        clocks: source.clocks.clone(),
        params: source.params.clone(),
        actions: source.actions.clone(),
        locations: state_names(g),
        initial: LocId(0),
        edges,
    })
}

/// Checks that two graphs are equal up to state numbering, matching states
/// breadth first from the initial ones. Returns a description of the first
/// mismatch.
pub fn isomorphic(a: &SymbolicImdp, b: &SymbolicImdp) -> Result<(), String> {
    if a.states.len() != b.states.len() {
        return Err(format!("{} states vs {}", a.states.len(), b.states.len()));
    }
    if a.transitions.len() != b.transitions.len() {
        return Err(format!("{} transitions vs {}", a.transitions.len(), b.transitions.len()));
    }
    let (oa, ob) = (a.outgoing(), b.outgoing());
    let mut map: Vec<Option<usize>> = vec![None; a.states.len()];
    let mut used = vec![false; b.states.len()];
    map[0] = Some(0);
    used[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(sa) = queue.pop_front() {
        let sb = map[sa].expect("mapped");
        if !a.states[sa].zone.same_set(&b.states[sb].zone) {
            return Err(format!("zones of s{sa} and s{sb} differ"));
        }
        if oa[sa].len() != ob[sb].len() {
            return Err(format!("s{sa} has {} transitions, s{sb} has {}", oa[sa].len(), ob[sb].len()));
        }
        for (ta, tb) in oa[sa].iter().zip(&ob[sb]) {
            let (ta, tb) = (&a.transitions[*ta], &b.transitions[*tb]);
            if ta.targets.len() != tb.targets.len() {
                return Err(format!("transition from s{sa}: branching differs"));
            }
            for (xa, xb) in ta.targets.iter().zip(&tb.targets) {
                if xa.interval != xb.interval || xa.resets != xb.resets {
                    return Err(format!("transition from s{sa}: target labels differ"));
                }
                match map[xa.state] {
                    Some(m) if m == xb.state => {}
                    Some(m) => return Err(format!("s{} maps to s{m} and s{}", xa.state, xb.state)),
                    None => {
                        if used[xb.state] {
                            return Err(format!("s{} is matched twice", xb.state));
                        }
                        map[xa.state] = Some(xb.state);
                        used[xb.state] = true;
                        queue.push_back(xa.state);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Graphviz rendering; probabilistic branching goes through point nodes.
pub fn export_dot(g: &SymbolicImdp) -> String {
    let names = g.names();
    let mut out = String::from("digraph zonegraph {\n  rankdir=LR;\n");
    for (i, st) in g.states.iter().enumerate() {
        let label = format!("{} {}\\n{}", g.state_label(i), g.locations[st.loc.0], st.zone.render(&names));
        let shape = if i == 0 { "doublecircle" } else { "box" };
        let _ = writeln!(out, "  s{i} [shape={shape}, label=\"{}\"];", label.replace('"', "'"));
    }
    for (i, t) in g.transitions.iter().enumerate() {
        let action = &g.actions[g.edge_actions[t.edge]];
        let _ = writeln!(out, "  t{i} [shape=point];");
        let _ = writeln!(out, "  s{} -> t{i} [label=\"{action}\", arrowhead=none];", t.source);
        for x in &t.targets {
            let mut label = x.interval.to_string();
            if !x.resets.is_empty() {
                let r: Vec<&str> = x.resets.iter().map(|c| g.clocks[c.0].as_str()).collect();
                let _ = write!(label, " {}:=0", r.join(","));
            }
            let _ = writeln!(out, "  t{i} -> s{} [label=\"{label}\"];", x.state);
        }
    }
    out.push_str("}\n");
    out
}

/// Sum of interval lower bounds; used in diagnostics.
pub fn lower_mass(t: &SymbolicTransition) -> Rational {
    t.targets.iter().fold(Rational::zero(), |a, x| a + &x.interval.lo)
}

pub fn format_interval(iv: &Interval) -> String {
    format!("[{}, {}]", rational::format(&iv.lo), rational::format(&iv.hi))
}
