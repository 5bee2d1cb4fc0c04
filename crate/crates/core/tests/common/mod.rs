//! Test support: independent oracles and random model generators.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use pipta::geometry::{Ineq, LinTerm, ParamRegion};
use pipta::model::{
    ActionId, AtomicGuard, Bound, ClockId, DistEntry, Edge, Guard, Interval, IntervalDistribution, LocId, ParamId, Pipta, Rel,
};
use pipta::rational::{int, ratio, Rational};
use pipta::synthesis::cons_contribution;
use pipta::zonegraph::SymbolicImdp;
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// Linear programming by vertex enumeration.

/// Solves the square system `m · x = rhs` exactly; `None` if singular.
fn solve(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for c in col..n {
            m[col][c] = &m[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..n {
                    let v = &m[col][c] * &f;
                    m[r][c] -= v;
                }
                let v = &rhs[col] * &f;
                rhs[r] -= v;
            }
        }
    }
    Some(rhs)
}

fn combinations(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        combinations(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Exact feasibility of `ineqs` over `dim` nonnegative variables, strictness
/// included. Maximises a slack `t <= 1` subtracted from every strict row over
/// the vertices of the (pointed) feasible polyhedron; feasible iff `t > 0` is
/// attainable.
pub fn lp_feasible(dim: usize, ineqs: &[Ineq]) -> bool {
    let t = dim;
    let n = dim + 1;
    // Rows a·z <= b over z = (x, t).
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for i in ineqs {
        let mut a = vec![Rational::zero(); n];
        for (v, c) in i.term.coeffs() {
            a[v] = c.clone();
        }
        if i.strict {
            a[t] = Rational::one();
        }
        rows.push((a, -i.term.constant_part().clone()));
    }
    for v in 0..dim {
        let mut a = vec![Rational::zero(); n];
        a[v] = -Rational::one();
        rows.push((a, Rational::zero()));
    }
    let mut cap = vec![Rational::zero(); n];
    cap[t] = Rational::one();
    rows.push((cap, Rational::one()));
    let mut subsets = Vec::new();
    combinations(rows.len(), n, 0, &mut Vec::new(), &mut subsets);
    let mut best: Option<Rational> = None;
    for s in subsets {
        let m: Vec<Vec<Rational>> = s.iter().map(|&r| rows[r].0.clone()).collect();
        let rhs: Vec<Rational> = s.iter().map(|&r| rows[r].1.clone()).collect();
        let Some(z) = solve(m, rhs) else { continue };
        let ok = rows.iter().all(|(a, b)| {
            let lhs: Rational = a.iter().zip(&z).map(|(x, y)| x * y).sum();
            lhs <= *b
        });
        if ok && best.as_ref().is_none_or(|b| z[t] > *b) {
            best = Some(z[t].clone());
        }
    }
    best.is_some_and(|b| b.is_positive())
}

/// Membership of a parameter valuation in the projection of the system
/// `ineqs` over `c` clocks, decided by fixing the parameters and solving the
/// clock system.
pub fn lp_projection_contains(c: usize, ineqs: &[Ineq], point: &[Rational]) -> bool {
    let mut sys = Vec::new();
    for i in ineqs {
        let mut term = i.term.clone();
        for (p, v) in point.iter().enumerate() {
            term = term.substitute(c + p, &LinTerm::constant(v.clone()));
        }
        sys.push(Ineq { term, strict: i.strict });
    }
    lp_feasible(c, &sys)
}

// ---------------------------------------------------------------------------
// Feasible supports by construction.

/// Support sets admitting an explicit distribution, found by building one
/// for every subset and checking it exactly.
pub fn fs_oracle(ivs: &[Interval]) -> Vec<BTreeSet<usize>> {
    let n = ivs.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if let Some(mu) = construct(ivs, &s) {
            assert_eq!(mu.iter().cloned().sum::<Rational>(), Rational::one());
            out.push(s.into_iter().collect());
        }
    }
    out.sort_by(|a: &BTreeSet<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn construct(ivs: &[Interval], s: &[usize]) -> Option<Vec<Rational>> {
    let n = ivs.len();
    if (0..n).any(|i| !s.contains(&i) && ivs[i].lo.is_positive()) {
        return None;
    }
    let lo: Rational = s.iter().map(|&i| ivs[i].lo.clone()).sum();
    let zeros: Vec<usize> = s.iter().copied().filter(|&i| ivs[i].lo.is_zero()).collect();
    let mut mu = vec![Rational::zero(); n];
    let mut eps = (Rational::one() - &lo) / int(zeros.len() as i64 + 1);
    for &i in &zeros {
        if ivs[i].hi < eps {
            eps = ivs[i].hi.clone();
        }
    }
    for &i in s {
        mu[i] = if ivs[i].lo.is_zero() { eps.clone() } else { ivs[i].lo.clone() };
    }
    let mut deficit = Rational::one() - mu.iter().cloned().sum::<Rational>();
    for &i in s {
        if !deficit.is_positive() {
            break;
        }
        let room = &ivs[i].hi - &mu[i];
        let add = if room < deficit { room } else { deficit.clone() };
        mu[i] += &add;
        deficit -= add;
    }
    let ok = mu.iter().cloned().sum::<Rational>() == Rational::one()
        && (0..n).all(|i| {
            let inside = ivs[i].contains(&mu[i]);
            if s.contains(&i) {
                inside && mu[i].is_positive()
            } else {
                mu[i].is_zero() && ivs[i].lo.is_zero()
            }
        });
    ok.then_some(mu)
}

// ---------------------------------------------------------------------------
// Synthesis by exhaustive enumeration.

fn kept_sets(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1u64 << n)).filter(|m| m & 1 == 1).map(move |m| (0..n).map(|i| m & (1 << i) != 0).collect())
}

/// Union over every choice of kept states of its consistency condition.
pub fn brute_force_const_synth(g: &SymbolicImdp) -> ParamRegion {
    let mut acc = ParamRegion::bottom(g.params.len());
    for kept in kept_sets(g.states.len()) {
        acc = acc.union(&cons_contribution(g, &kept).unwrap());
    }
    acc
}

fn transition_projection(g: &SymbolicImdp, t: usize) -> ParamRegion {
    ParamRegion::from_zone(g.states[g.transitions[t].targets[0].state].zone.project_params())
}

/// Union over kept sets of: consistency condition, intersected with the
/// union over simple paths to a goal of the path's enabling conditions.
pub fn brute_force_const_ef_synth(g: &SymbolicImdp, goal: &BTreeSet<LocId>) -> ParamRegion {
    let np = g.params.len();
    let n = g.states.len();
    let is_goal = |s: usize| goal.contains(&g.states[s].loc);
    let out = g.outgoing();
    let supports: Vec<Vec<BTreeSet<usize>>> = g
        .transitions
        .iter()
        .map(|t| {
            fs_oracle(&t.intervals()).into_iter().map(|s| s.iter().map(|&j| t.targets[j].state).collect()).collect()
        })
        .collect();
    let mut acc = ParamRegion::bottom(np);
    for kept in kept_sets(n) {
        let cons = cons_contribution(g, &kept).unwrap();
        if cons.is_empty() {
            continue;
        }
        if is_goal(0) {
            acc = acc.union(&cons);
            continue;
        }
        let mut paths = ParamRegion::bottom(np);
        let mut stack = vec![(0usize, vec![0usize], ParamRegion::top(np))];
        while let Some((s, visited, cond)) = stack.pop() {
            for &t in &out[s] {
                for sup in &supports[t] {
                    if !sup.iter().all(|x| *x == s || kept[*x]) {
                        continue;
                    }
                    for &next in sup {
                        if visited.contains(&next) {
                            continue;
                        }
                        let c = cond.intersect(&transition_projection(g, t));
                        if c.is_empty() {
                            continue;
                        }
                        if is_goal(next) {
                            paths = paths.union(&c);
                        } else {
                            let mut v = visited.clone();
                            v.push(next);
                            stack.push((next, v, c));
                        }
                    }
                }
            }
        }
        acc = acc.union(&cons.intersect(&paths));
    }
    acc
}

// ---------------------------------------------------------------------------
// Random inputs.

pub fn probability_grid() -> Vec<Rational> {
    [0, 1, 2, 3, 4, 5, 6, 8, 10].iter().map(|n| ratio(*n, 10)).collect()
}

pub fn random_interval(rng: &mut impl Rng) -> Interval {
    let grid = probability_grid();
    loop {
        let a = grid.choose(rng).unwrap().clone();
        let b = grid.choose(rng).unwrap().clone();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if hi.is_positive() {
            return Interval::new(lo, hi);
        }
    }
}

pub fn random_intervals(rng: &mut impl Rng, max_len: usize) -> Vec<Interval> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| random_interval(rng)).collect()
}

/// A random zone over up to 3 clocks and 2 parameters, mixing difference
/// constraints with parametric bounds and general linear rows.
pub fn random_zone_ineqs(rng: &mut impl Rng, clocks: usize, params: usize) -> Vec<Ineq> {
    let m = rng.gen_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..m {
        let mut t = LinTerm::constant(int(rng.gen_range(-4..=4)));
        if rng.gen_bool(0.5) {
            // x - y ⋈ c (+ p)
            let x = rng.gen_range(0..clocks);
            t.add_coeff(x, if rng.gen_bool(0.5) { int(1) } else { int(-1) });
            if clocks > 1 && rng.gen_bool(0.5) {
                let y = (x + 1 + rng.gen_range(0..clocks - 1)) % clocks;
                t.add_coeff(y, -t.coeff(x));
            }
            if params > 0 && rng.gen_bool(0.5) {
                t.add_coeff(clocks + rng.gen_range(0..params), int(rng.gen_range(-1..=1)));
            }
        } else {
            for v in 0..clocks + params {
                t.add_coeff(v, int(rng.gen_range(-2..=2)));
            }
        }
        out.push(Ineq { term: t, strict: rng.gen_bool(0.4) });
    }
    out
}

pub struct ModelShape {
    pub clocks: usize,
    pub params: usize,
    pub locations: usize,
    pub max_edges: usize,
    pub max_branches: usize,
    /// Parameters only appear as upper (first half) or lower (second half) bounds.
    pub lu: bool,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape { clocks: 1, params: 1, locations: 4, max_edges: 2, max_branches: 3, lu: false }
    }
}

pub fn random_model(rng: &mut impl Rng, shape: &ModelShape) -> Pipta {
    let names = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let mut edges = Vec::new();
    for l in 0..shape.locations {
        for _ in 0..rng.gen_range(0..=shape.max_edges) {
            let mut atoms = Vec::new();
            for _ in 0..rng.gen_range(0..=2) {
                let clock = ClockId(rng.gen_range(0..shape.clocks));
                let use_param = shape.params > 0 && rng.gen_bool(0.5);
                let (rel, bound) = if use_param {
                    let p = rng.gen_range(0..shape.params);
                    let upper = if shape.lu { p < shape.params.div_ceil(2) } else { rng.gen_bool(0.5) };
                    let rel = match (upper, rng.gen_bool(0.5)) {
                        (true, true) => Rel::Le,
                        (true, false) => Rel::Lt,
                        (false, true) => Rel::Ge,
                        (false, false) => Rel::Gt,
                    };
                    (rel, Bound::Param(ParamId(p)))
                } else {
                    let rel = [Rel::Lt, Rel::Le, Rel::Ge, Rel::Gt][rng.gen_range(0..4)];
                    (rel, Bound::Const(int(rng.gen_range(0..=3))))
                };
                atoms.push(AtomicGuard::new(clock, rel, bound));
            }
            let mut entries: Vec<DistEntry> = Vec::new();
            for _ in 0..rng.gen_range(1..=shape.max_branches) {
                let resets: BTreeSet<ClockId> = (0..shape.clocks).filter(|_| rng.gen_bool(0.4)).map(ClockId).collect();
                let target = LocId(rng.gen_range(0..shape.locations));
                if entries.iter().any(|e| e.resets == resets && e.target == target) {
                    continue;
                }
                entries.push(DistEntry { resets, target, interval: random_interval(rng) });
            }
            edges.push(Edge {
                source: LocId(l),
                guard: Guard::new(atoms),
                action: ActionId(rng.gen_range(0..2)),
                dist: IntervalDistribution::new(entries),
            });
        }
    }
    Pipta {
        name: "random".into(),
        clocks: names("x", shape.clocks),
        params: names("p", shape.params),
        actions: names("a", 2),
        locations: names("l", shape.locations),
        initial: LocId(0),
        edges,
    }
}

/// Grid of parameter valuations used for sampling.
pub fn valuation_grid(params: usize) -> Vec<Vec<Rational>> {
    let axis: Vec<Rational> = if params <= 1 {
        vec![int(0), ratio(1, 2), int(1), ratio(3, 2), int(2), ratio(5, 2), int(3), int(4)]
    } else {
        vec![int(0), int(1), ratio(5, 2), int(4)]
    };
    let mut out = vec![Vec::new()];
    for _ in 0..params {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Rational>| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    out
}
