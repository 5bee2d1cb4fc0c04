use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Sparse affine term `Σ coeff·var + constant` over variable indices.
///
/// Zones use indices `0..clocks` for clocks and `clocks..clocks+params` for
/// parameters; auxiliary variables live above that.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinTerm {
    coeffs: BTreeMap<usize, Rational>,
    constant: Rational,
}

impl LinTerm {
    pub fn zero() -> Self {
        LinTerm::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinTerm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(v: usize) -> Self {
        LinTerm::monomial(v, Rational::one())
    }

    pub fn monomial(v: usize, c: Rational) -> Self {
        let mut t = LinTerm::zero();
        t.add_coeff(v, c);
        t
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (usize, Rational)>, constant: Rational) -> Self {
        let mut t = LinTerm::constant(constant);
        for (v, c) in coeffs {
            t.add_coeff(v, c);
        }
        t
    }

    pub fn coeff(&self, v: usize) -> Rational {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(v, c)| (*v, c))
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mentions(&self, v: usize) -> bool {
        self.coeffs.contains_key(&v)
    }

    pub fn add_coeff(&mut self, v: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(v).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn scale(&self, k: &Rational) -> LinTerm {
        if k.is_zero() {
            return LinTerm::zero();
        }
        LinTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, other: &LinTerm, k: &Rational) -> LinTerm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_coeff(*v, c * k);
        }
        out.constant += &other.constant * k;
        out
    }

    /// Replaces `v` by `replacement`.
    pub fn substitute(&self, v: usize, replacement: &LinTerm) -> LinTerm {
        match self.coeffs.get(&v) {
            None => self.clone(),
            Some(c) => {
                let c = c.clone();
                let mut rest = self.clone();
                rest.coeffs.remove(&v);
                rest.add_scaled(replacement, &c)
            }
        }
    }

    /// Renumbers variables.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> LinTerm {
        LinTerm::from_parts(self.coeffs.iter().map(|(v, c)| (f(*v), c.clone())), self.constant.clone())
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * &point[*v];
        }
        acc
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.coeffs.iter().next().map(|(v, c)| (*v, c))
    }

    /// Splits into the part over variables `< split` and the rest (including the constant).
    pub fn split_at(&self, split: usize) -> (LinTerm, LinTerm) {
        let mut low = LinTerm::zero();
        let mut high = LinTerm::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            if *v < split {
                low.add_coeff(*v, c.clone());
            } else {
                high.add_coeff(*v, c.clone());
            }
        }
        (low, high)
    }

    pub fn without_constant(&self) -> LinTerm {
        LinTerm { coeffs: self.coeffs.clone(), constant: Rational::zero() }
    }

    pub(crate) fn coeff_map(&self) -> &BTreeMap<usize, Rational> {
        &self.coeffs
    }
}

impl Add for LinTerm {
    type Output = LinTerm;
    fn add(self, rhs: LinTerm) -> LinTerm {
        self.add_scaled(&rhs, &Rational::one())
    }
}

impl Sub for LinTerm {
    type Output = LinTerm;
    fn sub(self, rhs: LinTerm) -> LinTerm {
        self.add_scaled(&rhs, &-Rational::one())
    }
}

impl Neg for LinTerm {
    type Output = LinTerm;
    fn neg(self) -> LinTerm {
        self.scale(&-Rational::one())
    }
}

/// `term < 0` when strict, `term <= 0` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ineq {
    pub term: LinTerm,
    pub strict: bool,
}

impl Ineq {
    pub fn le(term: LinTerm) -> Self {
        Ineq { term, strict: false }
    }

    pub fn lt(term: LinTerm) -> Self {
        Ineq { term, strict: true }
    }

    /// Scales so that the leading coefficient is ±1.
    pub fn normalized(self) -> Ineq {
        match self.term.leading() {
            Some((_, c)) if !c.abs().is_one() => {
                let k = c.abs().recip();
                Ineq { term: self.term.scale(&k), strict: self.strict }
            }
            _ => self,
        }
    }

    /// The complement `¬(t ≤ 0) = (−t < 0)`, `¬(t < 0) = (−t ≤ 0)`.
    pub fn negate(&self) -> Ineq {
        Ineq { term: -self.term.clone(), strict: !self.strict }
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let v = self.term.eval(point);
        if self.strict {
            v.is_negative()
        } else {
            !v.is_positive()
        }
    }

    /// Truth value of a constraint without variables.
    pub fn trivial(&self) -> Option<bool> {
        if !self.term.is_constant() {
            return None;
        }
        let c = self.term.constant_part();
        Some(if self.strict { c.is_negative() } else { !c.is_positive() })
    }

    pub fn mentions(&self, v: usize) -> bool {
        self.term.mentions(v)
    }

    /// `-v <= 0`.
    pub fn nonneg(v: usize) -> Ineq {
        Ineq::le(LinTerm::monomial(v, -Rational::one()))
    }

    pub fn is_nonneg_of(&self) -> Option<usize> {
        if self.strict || !self.term.constant_part().is_zero() {
            return None;
        }
        let mut it = self.term.coeffs();
        match (it.next(), it.next()) {
            (Some((v, c)), None) if c.is_negative() => Some(v),
            _ => None,
        }
    }
}

/// Normalises, drops tautologies and keeps only the tightest constraint per
/// coefficient vector. `None` signals a trivially false constraint.
pub(crate) fn reduce(ineqs: impl IntoIterator<Item = Ineq>) -> Option<Vec<Ineq>> {
    let mut best: BTreeMap<BTreeMap<usize, Rational>, (Rational, bool)> = BTreeMap::new();
    for i in ineqs {
        let i = i.normalized();
        match i.trivial() {
            Some(true) => continue,
            Some(false) => return None,
            None => {}
        }
        let key = i.term.coeff_map().clone();
        let c = i.term.constant_part().clone();
        match best.get_mut(&key) {
            None => {
                best.insert(key, (c, i.strict));
            }
            Some(slot) => {
                // f + c ⋈ 0: a larger constant is tighter; strict wins ties.
                if c > slot.0 || (c == slot.0 && i.strict) {
                    *slot = (c, i.strict);
                }
            }
        }
    }
    Some(
        best.into_iter()
            .map(|(coeffs, (c, strict))| Ineq {
                term: LinTerm { coeffs, constant: c },
                strict,
            })
            .collect(),
    )
}

/// Fourier–Motzkin elimination of `v`. `None` when the system becomes infeasible.
pub(crate) fn eliminate(ineqs: Vec<Ineq>, v: usize) -> Option<Vec<Ineq>> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut rest = Vec::new();
    for i in ineqs {
        let c = i.term.coeff(v);
        if c.is_positive() {
            pos.push((c, i));
        } else if c.is_negative() {
            neg.push((-c, i));
        } else {
            rest.push(i);
        }
    }
    for (a, p) in &pos {
        for (b, n) in &neg {
            // b·p + a·n cancels v.
            let term = p.term.scale(b).add_scaled(&n.term, a);
            rest.push(Ineq { term, strict: p.strict || n.strict });
        }
    }
    reduce(rest)
}

fn occurrence_cost(ineqs: &[Ineq], v: usize) -> usize {
    let (mut p, mut n) = (0usize, 0usize);
    for i in ineqs {
        let c = i.term.coeff(v);
        if c.is_positive() {
            p += 1;
        } else if c.is_negative() {
            n += 1;
        }
    }
    p * n
}

/// Eliminates every variable in `vars`, cheapest first.
pub(crate) fn project_out(ineqs: Vec<Ineq>, vars: &[usize]) -> Option<Vec<Ineq>> {
    let mut sys = reduce(ineqs)?;
    let mut todo: Vec<usize> = vars.to_vec();
    while !todo.is_empty() {
        let (idx, _) = todo
            .iter()
            .enumerate()
            .min_by_key(|(_, v)| occurrence_cost(&sys, **v))
            .expect("non-empty");
        let v = todo.swap_remove(idx);
        sys = eliminate(sys, v)?;
    }
    Some(sys)
}

pub(crate) fn all_vars(ineqs: &[Ineq]) -> Vec<usize> {
    let mut vs: Vec<usize> = ineqs.iter().flat_map(|i| i.term.vars()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Exact feasibility over the rationals, strictness included.
pub(crate) fn feasible(ineqs: Vec<Ineq>) -> bool {
    let vars = all_vars(&ineqs);
    project_out(ineqs, &vars).is_some()
}
