use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::linear::{Ineq, LinTerm};
use super::region::ParamRegion;
use super::zone::PZone;
use crate::rational::{self, Rational};

/// Variable names used when printing zones.
#[derive(Clone, Copy, Debug)]
pub struct Names<'a> {
    pub clocks: &'a [String],
    pub params: &'a [String],
}

impl<'a> Names<'a> {
    pub fn new(clocks: &'a [String], params: &'a [String]) -> Self {
        Names { clocks, params }
    }

    fn var(&self, clocks: usize, v: usize) -> &str {
        if v < clocks {
            &self.clocks[v]
        } else {
            &self.params[v - clocks]
        }
    }
}

fn render_term(t: &LinTerm, clocks: usize, names: &Names) -> String {
    let mut out = String::new();
    // Positive terms first, so `y - x` rather than `-x + y`.
    let mut terms: Vec<(usize, &Rational)> = t.coeffs().collect();
    terms.sort_by_key(|(_, c)| c.is_negative());
    for (v, c) in terms {
        let name = names.var(clocks, v);
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&rational::format(&mag));
            out.push('*');
        }
        out.push_str(name);
    }
    let k = t.constant_part();
    if out.is_empty() {
        return rational::format(k);
    }
    if !k.is_zero() {
        out.push_str(if k.is_negative() { " - " } else { " + " });
        out.push_str(&rational::format(&k.abs()));
    }
    out
}

#[derive(Default)]
struct Group {
    lower: Vec<(LinTerm, bool)>,
    upper: Vec<(LinTerm, bool)>,
}

impl Group {
    /// True when every bound is a nonpositive combination (constant and
    /// parameter coefficients all <= 0) and some bound is nonzero; such
    /// groups read better with the form negated.
    fn reads_better_negated(&self) -> bool {
        let mut any_negative = false;
        for (b, _) in self.lower.iter().chain(&self.upper) {
            if b.constant_part().is_positive() || b.coeffs().any(|(_, c)| c.is_positive()) {
                return false;
            }
            any_negative |= b.constant_part().is_negative() || !b.is_constant();
        }
        any_negative
    }
}

/// Renders a conjunction, grouping constraints on the same clock (or
/// parameter) expression into `lo <= e < hi` chains.
fn render_ineqs(ineqs: &[Ineq], clocks: usize, names: &Names) -> String {
    if ineqs.is_empty() {
        return "true".to_string();
    }
    // key: (0 for clock forms, 1 for parameter forms; then arity and the normalised form)
    let mut groups: BTreeMap<(u8, usize, Vec<usize>, Vec<Rational>), (LinTerm, Group)> = BTreeMap::new();
    for i in ineqs {
        let (cp, rest) = i.term.split_at(clocks);
        let (form, bound, kind) = if !cp.is_zero_form() {
            (cp, rest, 0u8)
        } else {
            let b = LinTerm::constant(rest.constant_part().clone());
            (rest.without_constant(), b, 1u8)
        };
        // form + bound ⋈ 0 with a leading coefficient of ±1.
        let lead_positive = form.leading().map(|(_, c)| c.is_positive()).unwrap_or(true);
        let (form, is_upper, bound) = if lead_positive {
            (form, true, -bound)
        } else {
            (-form, false, bound)
        };
        let key = (kind, form.vars().count(), form.vars().collect(), form.coeffs().map(|(_, c)| c.clone()).collect());
        let entry = groups.entry(key).or_insert_with(|| (form.clone(), Group::default()));
        if is_upper {
            entry.1.upper.push((bound, i.strict));
        } else {
            entry.1.lower.push((bound, i.strict));
        }
    }
    let mut parts = Vec::new();
    for (_, (mut form, mut g)) in groups {
        if g.reads_better_negated() {
            form = -form;
            let lower = std::mem::take(&mut g.lower);
            let upper = std::mem::take(&mut g.upper);
            g.lower = upper.into_iter().map(|(b, s)| (-b, s)).collect();
            g.upper = lower.into_iter().map(|(b, s)| (-b, s)).collect();
        }
        let f = render_term(&form, clocks, names);
        let op = |strict: bool| if strict { "<" } else { "<=" };
        if g.lower.len() == 1 && g.upper.len() == 1 {
            let (lo, ls) = &g.lower[0];
            let (hi, hs) = &g.upper[0];
            if lo == hi && !ls && !hs {
                parts.push(render_equality(&form, lo, clocks, names));
            } else {
                parts.push(format!(
                    "{} {} {} {} {}",
                    render_term(lo, clocks, names),
                    op(*ls),
                    f,
                    op(*hs),
                    render_term(hi, clocks, names)
                ));
            }
            continue;
        }
        for (lo, s) in &g.lower {
            parts.push(format!("{} {} {}", f, if *s { ">" } else { ">=" }, render_term(lo, clocks, names)));
        }
        for (hi, s) in &g.upper {
            parts.push(format!("{} {} {}", f, op(*s), render_term(hi, clocks, names)));
        }
    }
    parts.join(" && ")
}

fn render_equality(form: &LinTerm, value: &LinTerm, clocks: usize, names: &Names) -> String {
    let vs: Vec<(usize, Rational)> = form.coeffs().map(|(v, c)| (v, c.clone())).collect();
    if vs.len() == 2 && value.is_constant() && value.constant_part().is_zero() && vs[0].1 == -vs[1].1.clone() {
        return format!("{} = {}", names.var(clocks, vs[0].0), names.var(clocks, vs[1].0));
    }
    format!("{} = {}", render_term(form, clocks, names), render_term(value, clocks, names))
}

impl LinTerm {
    fn is_zero_form(&self) -> bool {
        self.is_constant()
    }
}

impl PZone {
    pub fn render(&self, names: &Names) -> String {
        if self.is_empty() {
            return "false".to_string();
        }
        render_ineqs(self.ineqs(), self.clocks(), names)
    }

    /// Rendering without explicit parameter nonnegativity constraints.
    pub fn render_relative(&self, names: &Names) -> String {
        if self.is_empty() {
            return "false".to_string();
        }
        let kept: Vec<Ineq> = self
            .ineqs()
            .iter()
            .filter(|i| i.is_nonneg_of().map(|v| v < self.clocks()).unwrap_or(true))
            .cloned()
            .collect();
        render_ineqs(&kept, self.clocks(), names)
    }
}

impl ParamRegion {
    /// One rendered conjunction per disjunct.
    pub fn render_disjuncts(&self, names: &Names) -> Vec<String> {
        self.disjuncts().iter().map(|z| z.render(names)).collect()
    }

    /// Human form: `false`-free, nonnegativity left implicit and stated once.
    pub fn render(&self, names: &Names) -> String {
        if self.is_empty() {
            return "empty".to_string();
        }
        let body: Vec<String> = self.disjuncts().iter().map(|z| z.render_relative(names)).collect();
        let body = if body.len() == 1 {
            body[0].clone()
        } else {
            body.iter().map(|b| format!("({b})")).collect::<Vec<_>>().join(" || ")
        };
        if names.params.is_empty() {
            return body;
        }
        let nonneg: Vec<String> = names.params.iter().map(|p| format!("{p} >= 0")).collect();
        format!("{body} (with {})", nonneg.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }
    fn v(i: usize) -> LinTerm {
        LinTerm::var(i)
    }
    fn c(n: i64) -> LinTerm {
        LinTerm::constant(int(n))
    }

    #[test]
    fn renders_diagonal_chains() {
        let clocks = s(&["x", "y"]);
        let params = s(&["p"]);
        let names = Names::new(&clocks, &params);
        // 0 <= y - x < 2 && x >= 0
        let z = PZone::from_ineqs(2, 1, vec![Ineq::le(v(0) - v(1)), Ineq::lt(v(1) - v(0) - c(2))]);
        assert_eq!(z.render(&names), "x >= 0 && 0 <= y - x < 2 && p >= 0");
        let eq = PZone::from_ineqs(2, 0, vec![Ineq::le(v(0) - v(1)), Ineq::le(v(1) - v(0))]);
        assert_eq!(eq.render(&names), "x >= 0 && x = y");
        // 2 <= x - y <= p
        let pz = PZone::from_ineqs(2, 1, vec![Ineq::le(c(2) - v(0) + v(1)), Ineq::le(v(0) - v(1) - v(2))]);
        assert_eq!(pz.render(&names), "y >= 0 && 2 <= x - y <= p");
    }

    #[test]
    fn renders_regions() {
        let params = s(&["p"]);
        let names = Names::new(&[], &params);
        let r = ParamRegion::from_zone(PZone::from_ineqs(0, 1, vec![Ineq::lt(v(0) - c(2))]));
        assert_eq!(r.render_disjuncts(&names), vec!["0 <= p < 2".to_string()]);
        assert_eq!(r.render(&names), "p < 2 (with p >= 0)");
        assert_eq!(ParamRegion::bottom(1).render(&names), "empty");
        assert_eq!(ParamRegion::top(1).render(&names), "true (with p >= 0)");
    }
}
