use super::linear::Ineq;
use super::zone::PZone;
use crate::rational::Rational;

/// Finite union of convex parameter zones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamRegion {
    params: usize,
    disjuncts: Vec<PZone>,
}

impl ParamRegion {
    pub fn top(params: usize) -> Self {
        ParamRegion { params, disjuncts: vec![PZone::universe(0, params)] }
    }

    pub fn bottom(params: usize) -> Self {
        ParamRegion { params, disjuncts: Vec::new() }
    }

    pub fn from_zone(z: PZone) -> Self {
        assert_eq!(z.clocks(), 0, "regions range over parameters only");
        let params = z.params();
        ParamRegion::from_disjuncts(params, vec![z])
    }

    pub fn from_disjuncts(params: usize, zones: Vec<PZone>) -> Self {
        let mut r = ParamRegion { params, disjuncts: zones };
        r.simplify();
        r
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn disjuncts(&self) -> &[PZone] {
        &self.disjuncts
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.disjuncts.iter().any(PZone::is_universe) || self.complement().is_empty()
    }

    fn simplify(&mut self) {
        let zs: Vec<PZone> = std::mem::take(&mut self.disjuncts).into_iter().filter(|z| !z.is_empty()).collect();
        let mut keep: Vec<PZone> = Vec::new();
        for (i, z) in zs.iter().enumerate() {
            let subsumed = zs.iter().enumerate().any(|(j, w)| {
                j != i && w.includes(z) && (!z.includes(w) || j < i)
            });
            if !subsumed {
                keep.push(z.clone());
            }
        }
        keep.sort_by(|a, b| a.ineqs().cmp(b.ineqs()));
        self.disjuncts = keep;
    }

    pub fn union(&self, other: &ParamRegion) -> ParamRegion {
        assert_eq!(self.params, other.params);
        let mut d = self.disjuncts.clone();
        d.extend(other.disjuncts.iter().cloned());
        ParamRegion::from_disjuncts(self.params, d)
    }

    pub fn intersect(&self, other: &ParamRegion) -> ParamRegion {
        assert_eq!(self.params, other.params);
        let mut d = Vec::new();
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                let z = a.intersect(b);
                if !z.is_empty() {
                    d.push(z);
                }
            }
        }
        ParamRegion::from_disjuncts(self.params, d)
    }

    pub fn intersect_zone(&self, z: &PZone) -> ParamRegion {
        self.intersect(&ParamRegion::from_zone(z.clone()))
    }

    /// Complement within the nonnegative orthant.
    pub fn complement(&self) -> ParamRegion {
        let mut acc = ParamRegion::top(self.params);
        for z in &self.disjuncts {
            let pieces: Vec<PZone> = z
                .ineqs()
                .iter()
                .map(|i: &Ineq| PZone::from_ineqs(0, self.params, vec![i.negate()]))
                .collect();
            acc = acc.intersect(&ParamRegion::from_disjuncts(self.params, pieces));
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    pub fn difference(&self, other: &ParamRegion) -> ParamRegion {
        self.intersect(&other.complement())
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &ParamRegion) -> bool {
        other.difference(self).is_empty()
    }

    pub fn same_set(&self, other: &ParamRegion) -> bool {
        self.includes(other) && other.includes(self)
    }

    pub fn contains_point(&self, point: &[Rational]) -> bool {
        self.disjuncts.iter().any(|z| z.contains_point(point))
    }

    pub fn sample_point(&self) -> Option<Vec<Rational>> {
        self.disjuncts.iter().find_map(PZone::sample_point)
    }
}
