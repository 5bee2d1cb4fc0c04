use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::linear::{eliminate, feasible, project_out, reduce, Ineq, LinTerm};
use crate::rational::{self, Rational};

/// Convex set over clocks and parameters, described by a canonical list of
/// linear inequalities. Every variable is implicitly nonnegative.
///
/// Canonical form: implicit equalities in reduced echelon form with their
/// pivots substituted elsewhere, redundant constraints removed, the rest
/// sorted. Equal sets normally get equal forms; strict constraints that are
/// not facets of the closure can still differ, so [`PZone::same_set`] stays
/// the semantic comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PZone {
    clocks: usize,
    params: usize,
    ineqs: Vec<Ineq>,
    empty: bool,
}

fn sort_key(i: &Ineq) -> (Vec<usize>, Vec<Rational>, Rational, bool) {
    (
        i.term.vars().collect(),
        i.term.coeffs().map(|(_, c)| c.clone()).collect(),
        i.term.constant_part().clone(),
        i.strict,
    )
}

fn canonical_order(a: &Ineq, b: &Ineq) -> Ordering {
    sort_key(a).cmp(&sort_key(b))
}

/// Pivot preference: clocks from the last one down, then parameters likewise.
fn pivot_rank(clocks: usize, v: usize) -> (bool, std::cmp::Reverse<usize>) {
    (v >= clocks, std::cmp::Reverse(v))
}

/// Separates the implicit equalities of a satisfiable system from the other
/// constraints. Equalities come back as `(pivot, row)` with `row = 0`, the
/// pivot having coefficient 1 and appearing in no other row.
fn split_equalities(clocks: usize, sys: Vec<Ineq>) -> (Vec<(usize, LinTerm)>, Vec<Ineq>) {
    let mut rows: Vec<(usize, LinTerm)> = Vec::new();
    let mut rest = Vec::new();
    for i in &sys {
        let tight = !i.strict && {
            let mut probe = sys.clone();
            probe.push(Ineq::lt(i.term.clone()));
            !feasible(probe)
        };
        if !tight {
            rest.push(i.clone());
            continue;
        }
        let mut t = i.term.clone();
        for (v, row) in &rows {
            let k = t.coeff(*v);
            if !k.is_zero() {
                t = t.add_scaled(row, &-k);
            }
        }
        let Some(v) = t.vars().min_by_key(|&v| pivot_rank(clocks, v)) else { continue };
        let t = t.scale(&t.coeff(v).recip());
        for (_, row) in &mut rows {
            let k = row.coeff(v);
            if !k.is_zero() {
                *row = row.add_scaled(&t, &-k);
            }
        }
        rows.push((v, t));
    }
    rows.sort_by_key(|(v, _)| pivot_rank(clocks, *v));
    (rows, rest)
}

impl PZone {
    /// All nonnegative valuations.
    pub fn universe(clocks: usize, params: usize) -> Self {
        PZone { clocks, params, ineqs: Vec::new(), empty: false }
    }

    pub fn empty(clocks: usize, params: usize) -> Self {
        PZone { clocks, params, ineqs: Vec::new(), empty: true }
    }

    pub fn from_ineqs(clocks: usize, params: usize, ineqs: impl IntoIterator<Item = Ineq>) -> Self {
        let dim = clocks + params;
        let mut all: Vec<Ineq> = ineqs.into_iter().collect();
        debug_assert!(all.iter().all(|i| i.term.vars().all(|v| v < dim)), "variable out of range");
        all.extend((0..dim).map(Ineq::nonneg));
        let Some(sys) = reduce(all) else {
            return PZone::empty(clocks, params);
        };
        if !feasible(sys.clone()) {
            return PZone::empty(clocks, params);
        }
        // Implicit equalities are kept in reduced echelon form and their pivots
        // substituted away elsewhere, so lower dimensional zones have a single
        // representation too.
        let (hull, rest) = split_equalities(clocks, sys);
        let substituted = rest.into_iter().map(|i| {
            let term = hull.iter().fold(i.term, |t, (v, row)| {
                let k = t.coeff(*v);
                if k.is_zero() { t } else { t.add_scaled(row, &-k) }
            });
            Ineq { term, strict: i.strict }
        });
        let equalities: Vec<Ineq> = hull.iter().flat_map(|(_, row)| [Ineq::le(row.clone()), Ineq::le(-row.clone())]).collect();
        let Some(mut sys) = reduce(substituted.chain(equalities.iter().cloned())) else {
            unreachable!("substitution preserves satisfiability")
        };
        sys.sort_by(canonical_order);
        let is_equality = |i: &Ineq, sys: &[Ineq]| !i.strict && sys.contains(&Ineq::le(-i.term.clone()));
        // What is left after dropping redundant constraints one at a time is
        // the set of facets, whatever the order.
        let mut i = sys.len();
        while i > 0 {
            i -= 1;
            if is_equality(&sys[i], &sys) {
                continue;
            }
            let mut probe: Vec<Ineq> = sys.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
            probe.push(sys[i].negate());
            if !feasible(probe) {
                sys.remove(i);
            }
        }
        PZone { clocks, params, ineqs: sys, empty: false }
    }

    pub fn clocks(&self) -> usize {
        self.clocks
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.clocks + self.params
    }

    pub fn ineqs(&self) -> &[Ineq] {
        &self.ineqs
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn is_universe(&self) -> bool {
        !self.empty && self.ineqs.is_empty()
    }

    /// Stored constraints together with the implicit nonnegativity ones.
    pub fn with_nonneg(&self) -> Vec<Ineq> {
        let mut v = self.ineqs.clone();
        v.extend((0..self.dim()).map(Ineq::nonneg));
        v
    }

    fn same_shape(&self, other: &PZone) {
        assert!(
            self.clocks == other.clocks && self.params == other.params,
            "zones over different variables"
        );
    }

    pub fn intersect(&self, other: &PZone) -> PZone {
        self.same_shape(other);
        if self.empty || other.empty {
            return PZone::empty(self.clocks, self.params);
        }
        self.constrain(other.ineqs.iter().cloned())
    }

    pub fn constrain(&self, extra: impl IntoIterator<Item = Ineq>) -> PZone {
        if self.empty {
            return self.clone();
        }
        let mut v = self.ineqs.clone();
        v.extend(extra);
        PZone::from_ineqs(self.clocks, self.params, v)
    }

    /// Future of the zone: all clocks advance by the same delay.
    pub fn time_elapse(&self) -> PZone {
        if self.empty {
            return self.clone();
        }
        let d = self.dim();
        let mut sys = Vec::new();
        for i in self.with_nonneg() {
            // A point x is in the future iff x - d is in the zone for some d >= 0.
            let shift: Rational = (0..self.clocks).map(|c| i.term.coeff(c)).fold(Rational::zero(), |a, b| a + b);
            let term = i.term.add_scaled(&LinTerm::var(d), &-shift);
            sys.push(Ineq { term, strict: i.strict });
        }
        sys.push(Ineq::nonneg(d));
        match eliminate(reduce(sys).expect("zone is satisfiable"), d) {
            Some(s) => PZone::from_ineqs(self.clocks, self.params, s),
            None => PZone::empty(self.clocks, self.params),
        }
    }

    /// Sets the given clocks to zero.
    pub fn reset(&self, clocks: &[usize]) -> PZone {
        if self.empty || clocks.is_empty() {
            return self.clone();
        }
        let Some(mut sys) = project_out(self.with_nonneg(), clocks) else {
            return PZone::empty(self.clocks, self.params);
        };
        sys.extend(clocks.iter().map(|c| Ineq::le(LinTerm::var(*c))));
        PZone::from_ineqs(self.clocks, self.params, sys)
    }

    /// Projection onto the parameters; the result has no clocks.
    pub fn project_params(&self) -> PZone {
        if self.empty {
            return PZone::empty(0, self.params);
        }
        let clocks: Vec<usize> = (0..self.clocks).collect();
        match project_out(self.with_nonneg(), &clocks) {
            None => PZone::empty(0, self.params),
            Some(sys) => {
                let shift = self.clocks;
                PZone::from_ineqs(0, self.params, sys.into_iter().map(|i| Ineq {
                    term: i.term.remap(|v| v - shift),
                    strict: i.strict,
                }))
            }
        }
    }

    /// Lifts a parameter-only zone to one with `clocks` unconstrained clocks.
    pub fn lift(&self, clocks: usize) -> PZone {
        assert_eq!(self.clocks, 0, "only parameter zones can be lifted");
        if self.empty {
            return PZone::empty(clocks, self.params);
        }
        PZone::from_ineqs(
            clocks,
            self.params,
            self.ineqs.iter().map(|i| Ineq { term: i.term.remap(|v| v + clocks), strict: i.strict }),
        )
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &PZone) -> bool {
        self.same_shape(other);
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        let base = other.with_nonneg();
        self.ineqs.iter().all(|i| {
            let mut probe = base.clone();
            probe.push(i.negate());
            !feasible(probe)
        })
    }

    /// Equalities holding everywhere on the zone, in reduced row echelon form.
    /// Equal sets have equal hulls. The empty zone yields the row `1`.
    pub fn affine_hull(&self) -> Vec<LinTerm> {
        if self.empty {
            return vec![LinTerm::constant(rational::one())];
        }
        split_equalities(self.clocks, self.with_nonneg()).0.into_iter().map(|(_, row)| row).collect()
    }

    pub fn same_set(&self, other: &PZone) -> bool {
        self.includes(other) && other.includes(self)
    }

    pub fn contains_point(&self, point: &[Rational]) -> bool {
        assert_eq!(point.len(), self.dim(), "point dimension");
        !self.empty && point.iter().all(|v| !v.is_negative()) && self.ineqs.iter().all(|i| i.holds_at(point))
    }

    /// Fixes the parameters to `values`; the result is a clock-only zone.
    pub fn substitute_params(&self, values: &[Rational]) -> PZone {
        assert_eq!(values.len(), self.params, "one value per parameter");
        if self.empty {
            return PZone::empty(self.clocks, 0);
        }
        let mut sys = Vec::new();
        for i in &self.ineqs {
            let mut t = i.term.clone();
            for (p, v) in values.iter().enumerate() {
                t = t.substitute(self.clocks + p, &LinTerm::constant(v.clone()));
            }
            sys.push(Ineq { term: t, strict: i.strict });
        }
        if values.iter().any(|v| v.is_negative()) {
            return PZone::empty(self.clocks, 0);
        }
        PZone::from_ineqs(self.clocks, 0, sys)
    }

    /// Least upper bound of `form` over the zone as `(value, strict)`; `None` when unbounded.
    ///
    /// Panics on the empty zone.
    pub fn supremum(&self, form: &LinTerm) -> Option<(Rational, bool)> {
        assert!(!self.empty, "supremum of the empty zone");
        let t = self.dim();
        let mut sys = self.with_nonneg();
        sys.push(Ineq::le(LinTerm::var(t) - form.clone()));
        sys.push(Ineq::le(form.clone() - LinTerm::var(t)));
        let vars: Vec<usize> = (0..t).collect();
        let rest = project_out(sys, &vars).expect("zone is satisfiable");
        let mut best: Option<(Rational, bool)> = None;
        for i in rest {
            let a = i.term.coeff(t);
            if !a.is_positive() {
                continue;
            }
            // a·t + c ⋈ 0  ⇒  t ⋈ -c/a
            let v = -i.term.constant_part() / a;
            let better = match &best {
                None => true,
                Some((b, s)) => v < *b || (v == *b && i.strict && !s),
            };
            if better {
                best = Some((v, i.strict));
            }
        }
        best
    }

    /// Classical maximal-constant abstraction applied to clock-only bounds.
    ///
    /// For every form `x`, `-x`, `x - y` over clocks not in `frozen`, the
    /// tightest bound implied by the zone is dropped when above `k` and
    /// relaxed to `< -k` when below `-k`. Constraints mentioning a parameter
    /// or a frozen clock are kept verbatim. The result contains the input.
    pub fn k_extrapolate(&self, k: &Rational, frozen: &[bool]) -> PZone {
        if self.empty {
            return self.clone();
        }
        let is_frozen = |c: usize| frozen.get(c).copied().unwrap_or(false);
        let unit_free = |i: &Ineq| -> bool {
            let vs: Vec<usize> = i.term.vars().collect();
            if vs.iter().any(|v| *v >= self.clocks || is_frozen(*v)) {
                return false;
            }
            let unit = i.term.coeffs().all(|(_, c)| c.abs().is_one());
            match vs.len() {
                1 => unit,
                2 => unit && i.term.coeff(vs[0]) == -i.term.coeff(vs[1]),
                _ => false,
            }
        };
        let mut out: Vec<Ineq> = self.ineqs.iter().filter(|i| !unit_free(i)).cloned().collect();
        let free: Vec<usize> = (0..self.clocks).filter(|c| !is_frozen(*c)).collect();
        let mut forms = Vec::new();
        for &x in &free {
            forms.push(LinTerm::var(x));
            forms.push(-LinTerm::var(x));
            for &y in &free {
                if x != y {
                    forms.push(LinTerm::var(x) - LinTerm::var(y));
                }
            }
        }
        for f in forms {
            let Some((c, strict)) = self.supremum(&f) else { continue };
            if &c > k {
                continue;
            }
            if c < -k.clone() {
                out.push(Ineq::lt(f + LinTerm::constant(k.clone())));
            } else {
                out.push(Ineq { term: f - LinTerm::constant(c), strict });
            }
        }
        PZone::from_ineqs(self.clocks, self.params, out)
    }

    /// Some point of the zone, found by back-substitution: each variable takes
    /// its lower bound when that bound is attained, otherwise the midpoint of
    /// its range (or the lower bound plus one when unbounded above).
    pub fn sample_point(&self) -> Option<Vec<Rational>> {
        if self.empty {
            return None;
        }
        let n = self.dim();
        let mut stages = Vec::with_capacity(n);
        let mut sys = reduce(self.with_nonneg())?;
        for v in 0..n {
            stages.push(sys.clone());
            sys = eliminate(sys, v)?;
        }
        let mut point = vec![Rational::zero(); n];
        for v in (0..n).rev() {
            let mut lower: Option<(Rational, bool)> = None;
            let mut upper: Option<(Rational, bool)> = None;
            for i in &stages[v] {
                let a = i.term.coeff(v);
                if a.is_zero() {
                    continue;
                }
                let rest = i.term.substitute(v, &LinTerm::zero());
                let mut val = rest.constant_part().clone();
                for (w, c) in rest.coeffs() {
                    val += c * &point[w];
                }
                let bound = -val / &a;
                if a.is_positive() {
                    let tighter = match &upper {
                        None => true,
                        Some((u, s)) => bound < *u || (bound == *u && i.strict && !s),
                    };
                    if tighter {
                        upper = Some((bound, i.strict));
                    }
                } else {
                    let tighter = match &lower {
                        None => true,
                        Some((l, s)) => bound > *l || (bound == *l && i.strict && !s),
                    };
                    if tighter {
                        lower = Some((bound, i.strict));
                    }
                }
            }
            let (lo, lo_strict) = lower.unwrap_or((Rational::zero(), false));
            point[v] = if !lo_strict {
                lo
            } else {
                match upper {
                    Some((hi, _)) => (lo + hi) / rational::int(2),
                    None => lo + Rational::one(),
                }
            };
        }
        debug_assert!(self.contains_point(&point));
        Some(point)
    }
}
