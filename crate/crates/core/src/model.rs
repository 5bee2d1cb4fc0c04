//! Model types: parametric interval probabilistic timed automata.
//!
//! Plain timed automata, probabilistic timed automata and interval models are
//! all represented by [`Pipta`]; they differ only in whether parameters occur
//! and whether every interval is a single point.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::geometry::{Ineq, LinTerm, PZone};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Const(Rational),
    Param(ParamId),
}

/// `clock rel bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomicGuard {
    pub clock: ClockId,
    pub rel: Rel,
    pub bound: Bound,
}

impl AtomicGuard {
    pub fn new(clock: ClockId, rel: Rel, bound: Bound) -> Self {
        AtomicGuard { clock, rel, bound }
    }

    /// The atom as a linear inequality over `clocks` clocks followed by the parameters.
    pub fn to_ineq(&self, clocks: usize) -> Ineq {
        let x = LinTerm::var(self.clock.0);
        let b = match &self.bound {
            Bound::Const(c) => LinTerm::constant(c.clone()),
            Bound::Param(p) => LinTerm::var(clocks + p.0),
        };
        match self.rel {
            Rel::Le => Ineq::le(x - b),
            Rel::Lt => Ineq::lt(x - b),
            Rel::Ge => Ineq::le(b - x),
            Rel::Gt => Ineq::lt(b - x),
        }
    }
}

/// Conjunction of atoms; the empty conjunction is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Guard {
    pub atoms: Vec<AtomicGuard>,
}

impl Guard {
    pub fn truth() -> Self {
        Guard::default()
    }

    pub fn new(atoms: Vec<AtomicGuard>) -> Self {
        Guard { atoms }
    }

    pub fn to_ineqs(&self, clocks: usize) -> Vec<Ineq> {
        self.atoms.iter().map(|a| a.to_ineq(clocks)).collect()
    }

    pub fn params(&self) -> impl Iterator<Item = ParamId> + '_ {
        self.atoms.iter().filter_map(|a| match a.bound {
            Bound::Param(p) => Some(p),
            Bound::Const(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn point(p: Rational) -> Self {
        Interval { lo: p.clone(), hi: p }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rational::format(&self.lo), rational::format(&self.hi))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistEntry {
    pub resets: BTreeSet<ClockId>,
    pub target: LocId,
    pub interval: Interval,
}

/// Interval distribution over (reset set, target location) pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalDistribution {
    pub entries: Vec<DistEntry>,
}

impl IntervalDistribution {
    pub fn new(entries: Vec<DistEntry>) -> Self {
        IntervalDistribution { entries }
    }

    pub fn dirac(resets: BTreeSet<ClockId>, target: LocId) -> Self {
        IntervalDistribution {
            entries: vec![DistEntry { resets, target, interval: Interval::point(Rational::one()) }],
        }
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.entries.iter().map(|e| e.interval.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: LocId,
    pub guard: Guard,
    pub action: ActionId,
    pub dist: IntervalDistribution,
}

/// A parametric interval probabilistic timed automaton.
///
/// Names are interned: ids index into the name vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pipta {
    pub name: String,
    pub clocks: Vec<String>,
    pub params: Vec<String>,
    pub actions: Vec<String>,
    pub locations: Vec<String>,
    pub initial: LocId,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateName { kind: &'static str, name: String },
    NoLocations,
    InitialOutOfRange,
    BadSource { edge: usize },
    BadAction { edge: usize },
    BadClock { edge: usize },
    BadParam { edge: usize },
    NegativeConstant { edge: usize },
    EmptyDistribution { edge: usize },
    BadTarget { edge: usize, entry: usize },
    BadReset { edge: usize, entry: usize },
    LoAboveHi { edge: usize, entry: usize },
    OutsideUnit { edge: usize, entry: usize },
    ZeroInterval { edge: usize, entry: usize },
    DuplicateKey { edge: usize, entry: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateName { kind, name } => write!(f, "duplicate {kind} name `{name}`"),
            Violation::NoLocations => write!(f, "model has no locations"),
            Violation::InitialOutOfRange => write!(f, "initial location is not declared"),
            Violation::BadSource { edge } => write!(f, "edge {edge}: unknown source location"),
            Violation::BadAction { edge } => write!(f, "edge {edge}: unknown action"),
            Violation::BadClock { edge } => write!(f, "edge {edge}: guard uses an unknown clock"),
            Violation::BadParam { edge } => write!(f, "edge {edge}: guard uses an unknown parameter"),
            Violation::NegativeConstant { edge } => write!(f, "edge {edge}: guard constant is negative"),
            Violation::EmptyDistribution { edge } => write!(f, "edge {edge}: distribution has no entries"),
            Violation::BadTarget { edge, entry } => write!(f, "edge {edge} entry {entry}: unknown target location"),
            Violation::BadReset { edge, entry } => write!(f, "edge {edge} entry {entry}: reset of an unknown clock"),
            Violation::LoAboveHi { edge, entry } => write!(f, "edge {edge} entry {entry}: lower bound exceeds upper bound"),
            Violation::OutsideUnit { edge, entry } => write!(f, "edge {edge} entry {entry}: interval not within [0, 1]"),
            Violation::ZeroInterval { edge, entry } => write!(f, "edge {edge} entry {entry}: interval is [0, 0]"),
            Violation::DuplicateKey { edge, entry } => {
                write!(f, "edge {edge} entry {entry}: reset set and target repeat an earlier entry")
            }
        }
    }
}

/// Static sanity report; empty means the model is well formed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// How a parameter occurs in guards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LuClass {
    LowerOnly,
    UpperOnly,
    Unused,
    Mixed,
}

impl Pipta {
    pub fn clock(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name).map(ClockId)
    }

    pub fn param(&self, name: &str) -> Option<ParamId> {
        self.params.iter().position(|c| c == name).map(ParamId)
    }

    pub fn location(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|c| c == name).map(LocId)
    }

    pub fn action(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|c| c == name).map(ActionId)
    }

    pub fn loc_name(&self, l: LocId) -> &str {
        &self.locations[l.0]
    }

    pub fn is_parametric(&self) -> bool {
        !self.params.is_empty()
    }

    /// True when every interval is a single point.
    pub fn is_point_model(&self) -> bool {
        self.edges.iter().all(|e| e.dist.entries.iter().all(|d| d.interval.is_point()))
    }

    /// Largest guard constant, rounded up to an integer; zero without constants.
    pub fn max_constant(&self) -> Rational {
        let mut k = Rational::zero();
        for e in &self.edges {
            for a in &e.guard.atoms {
                if let Bound::Const(c) = &a.bound {
                    let c = c.abs().ceil();
                    if c > k {
                        k = c;
                    }
                }
            }
        }
        k
    }

    /// Clocks compared against a parameter somewhere in the model.
    pub fn parametric_clocks(&self) -> Vec<bool> {
        let mut out = vec![false; self.clocks.len()];
        for e in &self.edges {
            for a in &e.guard.atoms {
                if matches!(a.bound, Bound::Param(_)) && a.clock.0 < out.len() {
                    out[a.clock.0] = true;
                }
            }
        }
        out
    }

    pub fn outgoing(&self, l: LocId) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.source == l)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        for (kind, names) in [
            ("clock", &self.clocks),
            ("parameter", &self.params),
            ("action", &self.actions),
            ("location", &self.locations),
        ] {
            let mut seen = BTreeSet::new();
            for n in names.iter() {
                if !seen.insert(n) {
                    v.push(Violation::DuplicateName { kind, name: n.clone() });
                }
            }
        }
        if self.locations.is_empty() {
            v.push(Violation::NoLocations);
        }
        if self.initial.0 >= self.locations.len() && !self.locations.is_empty() {
            v.push(Violation::InitialOutOfRange);
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.source.0 >= self.locations.len() {
                v.push(Violation::BadSource { edge: i });
            }
            if e.action.0 >= self.actions.len() {
                v.push(Violation::BadAction { edge: i });
            }
            for a in &e.guard.atoms {
                if a.clock.0 >= self.clocks.len() {
                    v.push(Violation::BadClock { edge: i });
                }
                match &a.bound {
                    Bound::Param(p) if p.0 >= self.params.len() => v.push(Violation::BadParam { edge: i }),
                    Bound::Const(c) if c.is_negative() => v.push(Violation::NegativeConstant { edge: i }),
                    _ => {}
                }
            }
            if e.dist.entries.is_empty() {
                v.push(Violation::EmptyDistribution { edge: i });
            }
            let mut keys = BTreeSet::new();
            for (j, d) in e.dist.entries.iter().enumerate() {
                if d.target.0 >= self.locations.len() {
                    v.push(Violation::BadTarget { edge: i, entry: j });
                }
                if d.resets.iter().any(|c| c.0 >= self.clocks.len()) {
                    v.push(Violation::BadReset { edge: i, entry: j });
                }
                let iv = &d.interval;
                if iv.lo > iv.hi {
                    v.push(Violation::LoAboveHi { edge: i, entry: j });
                }
                if iv.lo.is_negative() || iv.hi > Rational::one() {
                    v.push(Violation::OutsideUnit { edge: i, entry: j });
                }
                if iv.lo.is_zero() && iv.hi.is_zero() {
                    v.push(Violation::ZeroInterval { edge: i, entry: j });
                }
                if !keys.insert((d.resets.clone(), d.target)) {
                    v.push(Violation::DuplicateKey { edge: i, entry: j });
                }
            }
        }
        ValidationReport { violations: v }
    }

    /// Classifies every parameter by the direction of the guards it bounds.
    pub fn classify_lu(&self) -> Vec<LuClass> {
        let mut lower = vec![false; self.params.len()];
        let mut upper = vec![false; self.params.len()];
        for e in &self.edges {
            for a in &e.guard.atoms {
                if let Bound::Param(p) = a.bound {
                    match a.rel {
                        Rel::Lt | Rel::Le => upper[p.0] = true,
                        Rel::Gt | Rel::Ge => lower[p.0] = true,
                    }
                }
            }
        }
        lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| match (l, u) {
                (true, true) => LuClass::Mixed,
                (true, false) => LuClass::LowerOnly,
                (false, true) => LuClass::UpperOnly,
                (false, false) => LuClass::Unused,
            })
            .collect()
    }

    pub fn is_lu(&self) -> bool {
        !self.classify_lu().contains(&LuClass::Mixed)
    }

    /// Substitutes `values` for the parameters and drops edges whose guard
    /// becomes unsatisfiable over nonnegative clock values.
    ///
    /// Panics if `values` does not bind every parameter.
    pub fn instantiate(&self, values: &[Rational]) -> Pipta {
        assert_eq!(values.len(), self.params.len(), "one value per parameter");
        let nclocks = self.clocks.len();
        let mut edges = Vec::new();
        for e in &self.edges {
            let atoms: Vec<AtomicGuard> = e
                .guard
                .atoms
                .iter()
                .map(|a| AtomicGuard {
                    clock: a.clock,
                    rel: a.rel,
                    bound: match &a.bound {
                        Bound::Param(p) => Bound::Const(values[p.0].clone()),
                        b => b.clone(),
                    },
                })
                .collect();
            let guard = Guard { atoms };
            if PZone::from_ineqs(nclocks, 0, guard.to_ineqs(nclocks)).is_empty() {
                continue;
            }
            edges.push(Edge { guard, ..e.clone() });
        }
        Pipta { params: Vec::new(), edges, ..self.clone() }
    }

    /// Edge list sorted by source location (stable).
    pub fn sorted_edges(mut self) -> Pipta {
        self.edges.sort_by_key(|e| e.source);
        self
    }
}
