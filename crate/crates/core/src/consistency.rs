//! Consistency of interval MDPs: feasible supports, pruning of locally
//! inconsistent states, and witness implementations.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::model::{DistEntry, Edge, Interval, IntervalDistribution, LocId, Pipta};
use crate::rational::Rational;
use crate::zonegraph::{self, build_zone_graph, SymbolicImdp, ZoneGraphError, ZoneGraphOptions};

/// Subsets of the entries of an interval distribution (by position) that are
/// the support of some distribution within the intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleSupports {
    pub supports: Vec<BTreeSet<usize>>,
}

impl FeasibleSupports {
    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }
}

/// An interval after pruning: still a range, or contradictory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrunedInterval {
    Range(Interval),
    Empty,
}

impl PrunedInterval {
    /// Intersection with `[0, 0]`.
    pub fn forbid(&self) -> PrunedInterval {
        match self {
            PrunedInterval::Range(iv) if iv.lo.is_zero() => PrunedInterval::Range(Interval::point(Rational::zero())),
            _ => PrunedInterval::Empty,
        }
    }
}

/// Enumerates the feasible supports of an interval list.
///
/// `S` is feasible when entries outside it can be zero, entries inside can be
/// positive, the lower bounds of `S` sum to at most one and its upper bounds
/// to at least one, and when the lower bounds already sum to exactly one they
/// are all positive. Entries forced positive (`lo > 0`) are always in `S`, so
/// only the optional ones are enumerated.
pub fn feasible_supports(intervals: &[Interval]) -> FeasibleSupports {
    let pruned: Vec<PrunedInterval> = intervals.iter().cloned().map(PrunedInterval::Range).collect();
    feasible_supports_pruned(&pruned)
}

pub fn feasible_supports_pruned(intervals: &[PrunedInterval]) -> FeasibleSupports {
    let mut forced = Vec::new();
    let mut optional = Vec::new();
    for (i, iv) in intervals.iter().enumerate() {
        match iv {
            PrunedInterval::Empty => return FeasibleSupports { supports: Vec::new() },
            PrunedInterval::Range(iv) => {
                if iv.lo.is_positive() {
                    forced.push(i);
                } else if iv.hi.is_positive() {
                    optional.push(i);
                }
            }
        }
    }
    assert!(optional.len() < 31, "too many optional entries to enumerate supports");
    let range = |i: usize| match &intervals[i] {
        PrunedInterval::Range(iv) => iv,
        PrunedInterval::Empty => unreachable!(),
    };
    let forced_lo: Rational = forced.iter().map(|&i| range(i).lo.clone()).sum();
    let forced_hi: Rational = forced.iter().map(|&i| range(i).hi.clone()).sum();
    let one = Rational::one();
    let mut supports = Vec::new();
    for mask in 0u32..(1u32 << optional.len()) {
        let mut hi = forced_hi.clone();
        let mut set: BTreeSet<usize> = forced.iter().copied().collect();
        for (b, &i) in optional.iter().enumerate() {
            if mask & (1 << b) != 0 {
                hi += &range(i).hi;
                set.insert(i);
            }
        }
        if set.is_empty() || forced_lo > one || hi < one {
            continue;
        }
        // Optional members have lo = 0, so they cannot be positive if the forced mass is already 1.
        if forced_lo == one && mask != 0 {
            continue;
        }
        supports.push(set);
    }
    supports.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    FeasibleSupports { supports }
}

impl IntervalDistribution {
    pub fn feasible_supports(&self) -> FeasibleSupports {
        feasible_supports(&self.intervals())
    }

    pub fn is_consistent(&self) -> bool {
        locally_consistent(&self.intervals())
    }
}

/// Some distribution lies within the intervals: `Σlo ≤ 1 ≤ Σhi`.
pub fn locally_consistent(intervals: &[Interval]) -> bool {
    let lo: Rational = intervals.iter().map(|i| i.lo.clone()).sum();
    let hi: Rational = intervals.iter().map(|i| i.hi.clone()).sum();
    intervals.iter().all(|i| i.lo <= i.hi) && lo <= Rational::one() && hi >= Rational::one()
}

/// A point distribution within the intervals: lower bounds plus the missing
/// mass shared in proportion to each entry's slack.
pub fn witness_distribution(intervals: &[Interval]) -> Option<Vec<Rational>> {
    if !locally_consistent(intervals) {
        return None;
    }
    let lo: Rational = intervals.iter().map(|i| i.lo.clone()).sum();
    let slack: Rational = intervals.iter().map(|i| &i.hi - &i.lo).sum();
    let deficit = Rational::one() - lo;
    Some(
        intervals
            .iter()
            .map(|i| {
                if deficit.is_zero() {
                    i.lo.clone()
                } else {
                    &i.lo + &deficit * (&i.hi - &i.lo) / &slack
                }
            })
            .collect(),
    )
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConsistencyError {
    #[error("the model has parameters; bind them before checking consistency")]
    NotParameterFree,
    #[error(transparent)]
    ZoneGraph(#[from] ZoneGraphError),
}

/// One transition of a witness implementation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTransition {
    pub transition: usize,
    pub source: usize,
    /// (target state, probability) for every positive-probability target.
    pub probabilities: Vec<(usize, Rational)>,
}

/// A Markov decision process implementing the pruned interval MDP,
/// restricted to the states it reaches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessMdp {
    pub states: Vec<usize>,
    pub transitions: Vec<WitnessTransition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyVerdict {
    pub consistent: bool,
    /// Pruned states in removal order.
    pub pruned: Vec<usize>,
    /// Transition intervals after pruning, indexed like the graph's transitions.
    pub intervals: Vec<Vec<PrunedInterval>>,
    pub witness: Option<WitnessMdp>,
}

fn state_inconsistent(out: &[usize], intervals: &[Vec<PrunedInterval>]) -> bool {
    out.iter().any(|&t| feasible_supports_pruned(&intervals[t]).is_empty())
}

/// Iteratively prunes locally inconsistent states, lowest index first.
pub fn prune_imdp(g: &SymbolicImdp) -> ConsistencyVerdict {
    prune_imdp_by(g, |inc| *inc.iter().next().expect("non-empty"))
}

/// Pruning with a caller-chosen order; the verdict does not depend on it.
pub fn prune_imdp_by(g: &SymbolicImdp, mut pick: impl FnMut(&BTreeSet<usize>) -> usize) -> ConsistencyVerdict {
    let out = g.outgoing();
    let mut intervals: Vec<Vec<PrunedInterval>> = g
        .transitions
        .iter()
        .map(|t| t.targets.iter().map(|x| PrunedInterval::Range(x.interval.clone())).collect())
        .collect();
    let mut passed: Vec<usize> = Vec::new();
    let mut in_passed = vec![false; g.states.len()];
    loop {
        let inc: BTreeSet<usize> = (0..g.states.len())
            .filter(|&s| !in_passed[s] && state_inconsistent(&out[s], &intervals))
            .collect();
        if inc.is_empty() || in_passed[0] {
            break;
        }
        let s = pick(&inc);
        assert!(inc.contains(&s), "picked state must be inconsistent");
        passed.push(s);
        in_passed[s] = true;
        for (t, tr) in g.transitions.iter().enumerate() {
            for (j, x) in tr.targets.iter().enumerate() {
                if x.state == s {
                    intervals[t][j] = intervals[t][j].forbid();
                }
            }
        }
    }
    let consistent = !in_passed[0];
    let witness = consistent.then(|| build_witness(g, &out, &intervals));
    ConsistencyVerdict { consistent, pruned: passed, intervals, witness }
}

fn build_witness(g: &SymbolicImdp, out: &[Vec<usize>], intervals: &[Vec<PrunedInterval>]) -> WitnessMdp {
    let mut kept = vec![false; g.states.len()];
    kept[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut transitions = Vec::new();
    while let Some(s) = queue.pop_front() {
        for &t in &out[s] {
            let ivs: Vec<Interval> = intervals[t]
                .iter()
                .map(|p| match p {
                    PrunedInterval::Range(iv) => iv.clone(),
                    PrunedInterval::Empty => unreachable!("kept states have feasible transitions"),
                })
                .collect();
            let mu = witness_distribution(&ivs).expect("kept states are locally consistent");
            let mut probabilities = Vec::new();
            for (x, p) in g.transitions[t].targets.iter().zip(mu) {
                if p.is_positive() {
                    if !kept[x.state] {
                        kept[x.state] = true;
                        queue.push_back(x.state);
                    }
                    probabilities.push((x.state, p));
                }
            }
            transitions.push(WitnessTransition { transition: t, source: s, probabilities });
        }
    }
    transitions.sort_by_key(|t| t.transition);
    WitnessMdp { states: (0..g.states.len()).filter(|&s| kept[s]).collect(), transitions }
}

impl WitnessMdp {
    /// Checks the witness against the graph: distributions sum to one, respect
    /// the original intervals, and every kept state has all its transitions.
    pub fn check(&self, g: &SymbolicImdp) -> Result<(), String> {
        let kept: BTreeSet<usize> = self.states.iter().copied().collect();
        if !kept.contains(&0) {
            return Err("initial state missing".into());
        }
        let out = g.outgoing();
        for &s in &self.states {
            for &t in &out[s] {
                let Some(w) = self.transitions.iter().find(|w| w.transition == t) else {
                    return Err(format!("transition {t} of kept state s{s} missing"));
                };
                let total: Rational = w.probabilities.iter().map(|(_, p)| p.clone()).sum();
                if !total.is_one() {
                    return Err(format!("transition {t} sums to {total}"));
                }
                for x in &g.transitions[t].targets {
                    let p = w.probabilities.iter().find(|(s2, _)| *s2 == x.state).map(|(_, p)| p.clone()).unwrap_or_else(Rational::zero);
                    if !x.interval.contains(&p) {
                        return Err(format!("transition {t}: probability {p} outside {}", x.interval));
                    }
                    if p.is_positive() && !kept.contains(&x.state) {
                        return Err(format!("transition {t} reaches unkept s{}", x.state));
                    }
                }
            }
        }
        Ok(())
    }

    /// The witness as a point-interval model, one location per kept state.
    pub fn to_model(&self, g: &SymbolicImdp, source: &Pipta) -> Pipta {
        let names = zonegraph::state_names(g);
        let index: std::collections::BTreeMap<usize, usize> = self.states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let edges = self
            .transitions
            .iter()
            .map(|w| {
                let tr = &g.transitions[w.transition];
                let e = &source.edges[tr.edge];
                let entries = tr
                    .targets
                    .iter()
                    .filter_map(|x| {
                        let p = w.probabilities.iter().find(|(s, _)| *s == x.state)?.1.clone();
                        Some(DistEntry { resets: x.resets.clone(), target: LocId(index[&x.state]), interval: Interval::point(p) })
                    })
                    .collect();
                Edge { source: LocId(index[&w.source]), guard: e.guard.clone(), action: e.action, dist: IntervalDistribution::new(entries) }
            })
            .collect();
        Pipta {
            name: format!("{}_impl", source.name),
            clocks: source.clocks.clone(),
            params: source.params.clone(),
            actions: source.actions.clone(),
            locations: self.states.iter().map(|s| names[*s].clone()).collect(),
            initial: LocId(0),
            edges,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IptaConsistency {
    pub graph: SymbolicImdp,
    pub verdict: ConsistencyVerdict,
    /// A probabilistic timed automaton implementing the model, when consistent.
    pub implementation: Option<Pipta>,
}

/// Decides consistency of a parameter-free interval model through its zone graph.
pub fn ipta_consistent(m: &Pipta, opts: &ZoneGraphOptions) -> Result<IptaConsistency, ConsistencyError> {
    if m.is_parametric() {
        return Err(ConsistencyError::NotParameterFree);
    }
    let graph = build_zone_graph(m, opts)?;
    if !graph.is_complete() {
        return Err(ZoneGraphError::Truncated.into());
    }
    let verdict = prune_imdp(&graph);
    let implementation = verdict.witness.as_ref().map(|w| w.to_model(&graph, m));
    Ok(IptaConsistency { graph, verdict, implementation })
}
