//! Parameter synthesis: valuations making a parametric interval model
//! consistent, consistent while reaching a goal, and the emptiness check for
//! lower/upper-bound models.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::consistency::{feasible_supports, FeasibleSupports};
use crate::geometry::{PZone, ParamRegion};
use crate::model::{Edge, IntervalDistribution, LocId, LuClass, Pipta};
use crate::rational::{self, Rational};
use crate::zonegraph::{build_zone_graph, reachability_condition, SymbolicImdp, ZoneGraphError, ZoneGraphOptions};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("zone graph is truncated; rerun with a larger state limit or allow an under-approximation")]
    Truncated,
    #[error("transition {transition}: target zones project to different parameter sets")]
    ProjectionMismatch { transition: usize },
    #[error("parameter `{0}` is compared both as a lower and as an upper bound")]
    NotLu(String),
    #[error(transparent)]
    ZoneGraph(#[from] ZoneGraphError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Accept a truncated zone graph; the result is then an under-approximation.
    pub allow_truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub region: ParamRegion,
    /// Number of parameter cells examined.
    pub assignments_explored: usize,
    /// False when computed on a truncated graph.
    pub complete: bool,
}

/// Valuations under which transition `t` is disabled: the complement of the
/// common projection of its target zones.
pub fn forbid_d(g: &SymbolicImdp, t: usize) -> Result<ParamRegion, SynthesisError> {
    Ok(ParamRegion::from_zone(transition_projection(g, t)?).complement())
}

fn transition_projection(g: &SymbolicImdp, t: usize) -> Result<PZone, SynthesisError> {
    let tr = &g.transitions[t];
    let first = reachability_condition(g, tr.targets[0].state);
    for x in &tr.targets[1..] {
        if !reachability_condition(g, x.state).same_set(&first) {
            return Err(SynthesisError::ProjectionMismatch { transition: t });
        }
    }
    Ok(first)
}

/// Feasible supports of each transition, as sets of target states.
fn supports_by_state(g: &SymbolicImdp) -> Vec<Vec<BTreeSet<usize>>> {
    g.transitions
        .iter()
        .map(|tr| {
            let fs: FeasibleSupports = feasible_supports(&tr.intervals());
            fs.supports.iter().map(|s| s.iter().map(|&j| tr.targets[j].state).collect()).collect()
        })
        .collect()
}

fn support_within(support: &BTreeSet<usize>, source: usize, kept: &[bool]) -> bool {
    support.iter().all(|&s| s == source || kept[s])
}

/// The valuations making `kept` a consistent choice of states: each kept
/// state's transitions are disabled or have a feasible support inside the kept
/// set (the state itself aside). Empty when the initial state is not kept.
pub fn cons_contribution(g: &SymbolicImdp, kept: &[bool]) -> Result<ParamRegion, SynthesisError> {
    let np = g.params.len();
    if !kept[0] {
        return Ok(ParamRegion::bottom(np));
    }
    let fs = supports_by_state(g);
    let mut acc = ParamRegion::top(np);
    for (t, tr) in g.transitions.iter().enumerate() {
        if !kept[tr.source] {
            continue;
        }
        if fs[t].iter().any(|s| support_within(s, tr.source, kept)) {
            continue;
        }
        acc = acc.intersect(&forbid_d(g, t)?);
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Shared preparation: per-transition supports and projections, grouped into
/// distinct atoms so each parameter cell fixes which transitions are enabled.
struct Cells {
    supports: Vec<Vec<BTreeSet<usize>>>,
    out: Vec<Vec<usize>>,
    atom_of: Vec<usize>,
    atoms: Vec<PZone>,
    allowed: Vec<bool>,
}

impl Cells {
    fn new(g: &SymbolicImdp, opts: &SynthesisOptions) -> Result<Cells, SynthesisError> {
        if !g.is_complete() && !opts.allow_truncated {
            return Err(SynthesisError::Truncated);
        }
        let mut atoms: Vec<PZone> = Vec::new();
        let mut atom_of = Vec::with_capacity(g.transitions.len());
        for t in 0..g.transitions.len() {
            let p = transition_projection(g, t)?;
            let idx = match atoms.iter().position(|a| *a == p || a.same_set(&p)) {
                Some(i) => i,
                None => {
                    atoms.push(p);
                    atoms.len() - 1
                }
            };
            atom_of.push(idx);
        }
        Ok(Cells { supports: supports_by_state(g), out: g.outgoing(), atom_of, atoms, allowed: g.explored.clone() })
    }

    /// Calls `leaf` on every nonempty cell of the arrangement of atoms, with
    /// the set of atoms holding in that cell.
    fn for_each_cell(&self, np: usize, mut leaf: impl FnMut(&ParamRegion, &[bool])) -> usize {
        let mut holds = vec![false; self.atoms.len()];
        let mut count = 0;
        self.descend(0, ParamRegion::top(np), &mut holds, &mut leaf, &mut count);
        count
    }

    fn descend(
        &self,
        i: usize,
        region: ParamRegion,
        holds: &mut Vec<bool>,
        leaf: &mut impl FnMut(&ParamRegion, &[bool]),
        count: &mut usize,
    ) {
        if region.is_empty() {
            return;
        }
        if i == self.atoms.len() {
            *count += 1;
            leaf(&region, holds);
            return;
        }
        let atom = ParamRegion::from_zone(self.atoms[i].clone());
        let inside = region.intersect(&atom);
        if inside.same_set(&region) {
            holds[i] = true;
            self.descend(i + 1, region, holds, leaf, count);
            return;
        }
        let outside = region.difference(&atom);
        holds[i] = true;
        self.descend(i + 1, inside, holds, leaf, count);
        holds[i] = false;
        self.descend(i + 1, outside, holds, leaf, count);
    }

    fn enabled(&self, holds: &[bool]) -> Vec<bool> {
        self.atom_of.iter().map(|&a| holds[a]).collect()
    }

    /// Largest set of states whose enabled transitions all have a feasible
    /// support inside the set. Valid sets are closed under union, so this is
    /// the greatest fixpoint of the removal step.
    fn greatest_kept(&self, g: &SymbolicImdp, enabled: &[bool]) -> Vec<bool> {
        let mut kept = self.allowed.clone();
        loop {
            let mut changed = false;
            for s in 0..g.states.len() {
                if !kept[s] {
                    continue;
                }
                let ok = self.out[s]
                    .iter()
                    .all(|&t| !enabled[t] || self.supports[t].iter().any(|sup| support_within(sup, s, &kept)));
                if !ok {
                    kept[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return kept;
            }
        }
    }
}

/// Valuations for which the parametric interval model is consistent.
pub fn const_synth(g: &SymbolicImdp, opts: &SynthesisOptions) -> Result<SynthesisResult, SynthesisError> {
    let np = g.params.len();
    let cells = Cells::new(g, opts)?;
    let mut pieces = Vec::new();
    let explored = cells.for_each_cell(np, |region, holds| {
        let kept = cells.greatest_kept(g, &cells.enabled(holds));
        if kept[0] {
            pieces.extend(region.disjuncts().iter().cloned());
        }
    });
    Ok(SynthesisResult {
        region: ParamRegion::from_disjuncts(np, pieces),
        assignments_explored: explored,
        complete: g.is_complete(),
    })
}

/// Finite rank per state: BFS distance to the goal along consistent steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankAssignment {
    pub rank: Vec<Option<usize>>,
}

fn goal_ranks(g: &SymbolicImdp, cells: &Cells, enabled: &[bool], kept: &[bool], goal: &BTreeSet<LocId>) -> RankAssignment {
    let n = g.states.len();
    let is_goal = |s: usize| goal.contains(&g.states[s].loc);
    // Reverse BFS: s gets rank r+1 if some consistent step leads to a state of rank r.
    let mut rank: Vec<Option<usize>> = (0..n).map(|s| (kept[s] && is_goal(s)).then_some(0)).collect();
    let mut frontier: Vec<usize> = (0..n).filter(|&s| rank[s] == Some(0)).collect();
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let reached: BTreeSet<usize> = frontier.iter().copied().collect();
        let mut next = Vec::new();
        for s in 0..n {
            if rank[s].is_some() || !kept[s] || is_goal(s) {
                continue;
            }
            let steps = cells.out[s].iter().any(|&t| {
                enabled[t]
                    && cells.supports[t]
                        .iter()
                        .any(|sup| support_within(sup, s, kept) && sup.iter().any(|x| reached.contains(x)))
            });
            if steps {
                rank[s] = Some(level);
                next.push(s);
            }
        }
        frontier = next;
    }
    RankAssignment { rank }
}

/// Valuations for which the model is consistent and some implementation
/// reaches a goal location with positive probability.
pub fn const_ef_synth(
    g: &SymbolicImdp,
    goal: &BTreeSet<LocId>,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult, SynthesisError> {
    let np = g.params.len();
    let cells = Cells::new(g, opts)?;
    let mut pieces = Vec::new();
    let explored = cells.for_each_cell(np, |region, holds| {
        let enabled = cells.enabled(holds);
        let kept = cells.greatest_kept(g, &enabled);
        if kept[0] && goal_ranks(g, &cells, &enabled, &kept, goal).rank[0].is_some() {
            pieces.extend(region.disjuncts().iter().cloned());
        }
    });
    Ok(SynthesisResult {
        region: ParamRegion::from_disjuncts(np, pieces),
        assignments_explored: explored,
        complete: g.is_complete(),
    })
}

/// Every way of restricting each edge to one of its feasible supports. Edges
/// without a feasible support are kept unchanged.
pub fn comb_fs(m: &Pipta) -> Vec<Pipta> {
    let options: Vec<Vec<IntervalDistribution>> = m
        .edges
        .iter()
        .map(|e| {
            let fs = e.dist.feasible_supports();
            if fs.is_empty() {
                vec![e.dist.clone()]
            } else {
                fs.supports
                    .iter()
                    .map(|s| IntervalDistribution::new(s.iter().map(|&j| e.dist.entries[j].clone()).collect()))
                    .collect()
            }
        })
        .collect();
    let mut out = vec![Vec::<IntervalDistribution>::new()];
    for opts in &options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for d in opts {
                let mut p = prefix.clone();
                p.push(d.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|dists| Pipta {
            edges: m.edges.iter().zip(dists).map(|(e, d)| Edge { dist: d, ..e.clone() }).collect(),
            ..m.clone()
        })
        .collect()
}

/// Replaces probabilities by nondeterminism. Each inconsistent edge is
/// redirected to a fresh sink location; the sinks form the returned set.
pub fn make_non_det(m: &Pipta) -> (Pipta, BTreeSet<LocId>) {
    let mut locations = m.locations.clone();
    let mut acc = BTreeSet::new();
    let mut edges = Vec::new();
    for e in &m.edges {
        if e.dist.is_consistent() {
            for d in &e.dist.entries {
                edges.push(Edge {
                    dist: IntervalDistribution::dirac(d.resets.clone(), d.target),
                    ..e.clone()
                });
            }
        } else {
            let mut name = format!("{}'", m.locations[e.source.0]);
            while locations.contains(&name) {
                name.push('\'');
            }
            locations.push(name);
            let sink = LocId(locations.len() - 1);
            acc.insert(sink);
            edges.push(Edge { dist: IntervalDistribution::dirac(BTreeSet::new(), sink), ..e.clone() });
        }
    }
    edges.sort_by_key(|e| e.source);
    (Pipta { locations, edges, name: format!("{}_nondet", m.name), ..m.clone() }, acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        }
    }
}

/// Whether the goal is reachable for every parameter valuation.
///
/// Decided exactly on a complete parametric zone graph. On a truncated one,
/// a universal partial answer is still exact; otherwise the valuation setting
/// upper-bound parameters to 0 and the others to one above the largest
/// constant is checked, and a reachable goal there yields `Unknown`.
pub fn ef_univ(m: &Pipta, goal: &BTreeSet<LocId>, opts: &ZoneGraphOptions) -> Result<Verdict, SynthesisError> {
    if goal.contains(&m.initial) {
        return Ok(Verdict::True);
    }
    let np = m.params.len();
    let g = build_zone_graph(m, opts)?;
    let mut reach = ParamRegion::bottom(np);
    for (s, st) in g.states.iter().enumerate() {
        if goal.contains(&st.loc) {
            reach = reach.union(&ParamRegion::from_zone(reachability_condition(&g, s)));
        }
    }
    let universal = reach.complement().is_empty();
    if universal {
        return Ok(Verdict::True);
    }
    if g.is_complete() {
        return Ok(Verdict::False);
    }
    let high = m.max_constant() + Rational::from_integer(1.into());
    let values: Vec<Rational> = m
        .classify_lu()
        .iter()
        .map(|c| match c {
            LuClass::UpperOnly | LuClass::Unused => rational::zero(),
            LuClass::LowerOnly | LuClass::Mixed => high.clone(),
        })
        .collect();
    let inst = m.instantiate(&values);
    let h = build_zone_graph(&inst, opts)?;
    let hit = h.states.iter().any(|s| goal.contains(&s.loc));
    if !hit && h.is_complete() {
        // A concrete valuation where the goal is unreachable.
        return Ok(Verdict::False);
    }
    Ok(Verdict::Unknown)
}

/// Whether no parameter valuation makes the lower/upper-bound model
/// consistent. Elements of the support combination are checked in order and
/// the first one admitting a consistent valuation ends the search.
pub fn lu_consistency_empty(m: &Pipta, opts: &ZoneGraphOptions) -> Result<Verdict, SynthesisError> {
    lu_consistency_empty_jobs(m, opts, 1)
}

pub fn lu_consistency_empty_jobs(m: &Pipta, opts: &ZoneGraphOptions, jobs: usize) -> Result<Verdict, SynthesisError> {
    if let Some(p) = m.classify_lu().iter().position(|c| *c == LuClass::Mixed) {
        return Err(SynthesisError::NotLu(m.params[p].clone()));
    }
    let combos = comb_fs(m);
    let check = |c: &Pipta| -> Result<Verdict, SynthesisError> {
        let (nd, acc) = make_non_det(c);
        ef_univ(&nd, &acc, opts)
    };
    let mut unknown = false;
    for chunk in combos.chunks(jobs.max(1)) {
        let results: Vec<Result<Verdict, SynthesisError>> = if chunk.len() == 1 {
            vec![check(&chunk[0])]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = chunk.iter().map(|c| scope.spawn(|| check(c))).collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            })
        };
        for r in results {
            match r? {
                Verdict::False => return Ok(Verdict::False),
                Verdict::Unknown => unknown = true,
                Verdict::True => {}
            }
        }
    }
    Ok(if unknown { Verdict::Unknown } else { Verdict::True })
}

/// Builds the parametric zone graph and runs [`const_synth`].
pub fn synthesize(m: &Pipta, zg: &ZoneGraphOptions, opts: &SynthesisOptions) -> Result<(SymbolicImdp, SynthesisResult), SynthesisError> {
    let g = build_zone_graph(m, zg)?;
    let r = const_synth(&g, opts)?;
    Ok((g, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::geometry::Names;

    fn zg() -> ZoneGraphOptions {
        ZoneGraphOptions::default()
    }

    #[test]
    fn example_region_is_p_below_two() {
        let m = bundled::example_pipta();
        let (g, r) = synthesize(&m, &zg(), &SynthesisOptions::default()).unwrap();
        let names = Names::new(&g.clocks, &g.params);
        assert_eq!(r.region.render_disjuncts(&names), vec!["0 <= p < 2".to_string()]);
        assert!(r.complete);
    }

    #[test]
    fn lu_example_region() {
        let m = bundled::lu_pipta();
        let (g, r) = synthesize(&m, &zg(), &SynthesisOptions::default()).unwrap();
        let names = Names::new(&g.clocks, &g.params);
        assert_eq!(r.region.render_disjuncts(&names), vec!["0 <= p1 <= 2 && p2 >= 0".to_string()]);
    }

    #[test]
    fn support_combinations() {
        assert_eq!(comb_fs(&bundled::example_pipta()).len(), 4);
        assert_eq!(comb_fs(&bundled::lu_pipta()).len(), 2);
    }

    #[test]
    fn non_det_sinks() {
        let (nd, acc) = make_non_det(&bundled::lu_pipta());
        let names: BTreeSet<&str> = acc.iter().map(|l| nd.loc_name(*l)).collect();
        assert_eq!(names, BTreeSet::from(["l1'", "l2'"]));
        assert!(nd.is_point_model());
    }

    #[test]
    fn lu_emptiness() {
        assert_eq!(lu_consistency_empty(&bundled::lu_pipta(), &zg()).unwrap(), Verdict::False);
        assert_eq!(lu_consistency_empty(&bundled::counter_example_lu(), &zg()).unwrap(), Verdict::True);
        assert_eq!(lu_consistency_empty_jobs(&bundled::lu_pipta(), &zg(), 4).unwrap(), Verdict::False);
    }

    #[test]
    fn truncated_graphs_need_permission() {
        let m = bundled::example_pipta();
        let g = build_zone_graph(&m, &ZoneGraphOptions { max_states: 3, ..zg() }).unwrap();
        assert_eq!(const_synth(&g, &SynthesisOptions::default()).unwrap_err(), SynthesisError::Truncated);
        let r = const_synth(&g, &SynthesisOptions { allow_truncated: true }).unwrap();
        assert!(!r.complete);
    }
}
