//! The nerve of the translation groupoid of `Z/2` acting on itself, and the
//! alternating subcomplex `C(d)` of the weight-zero cyclic bar window of `dZ`.

use std::collections::HashMap;

use serde::Serialize;

use super::bar::{tuple_face, tuple_label, tuple_rotate, Tuple};
use super::{SimplicialMap, SimplicialModel, SimplicialSet};
use crate::error::{Error, Result};

/// Simplices are words `c_0 … c_q` over `{0, 1}`.
pub struct NerveEZ2;

impl SimplicialModel for NerveEZ2 {
    type Simplex = Vec<u8>;

    fn dim(&self, x: &Vec<u8>) -> usize {
        x.len() - 1
    }

    fn face(&self, x: &Vec<u8>, i: usize) -> Vec<u8> {
        let mut y = x.clone();
        y.remove(i);
        y
    }

    fn degeneracy(&self, x: &Vec<u8>, i: usize) -> Vec<u8> {
        let mut y = x.clone();
        y.insert(i, x[i]);
        y
    }

    fn nondegenerate(&self, q: usize) -> Vec<Vec<u8>> {
        (0..2u8).map(|c| (0..=q).map(|j| (c + j as u8) % 2).collect()).collect()
    }

    fn contains(&self, x: &Vec<u8>) -> bool {
        !x.is_empty() && x.iter().all(|&c| c < 2)
    }

    fn cyclic(&self, x: &Vec<u8>) -> Option<Vec<u8>> {
        let mut y = x.clone();
        y.rotate_right(1);
        Some(y)
    }

    fn weight(&self, _x: &Vec<u8>) -> Option<i64> {
        Some(0)
    }

    fn label(&self, x: &Vec<u8>) -> String {
        x.iter().map(|c| c.to_string()).collect()
    }

    fn degeneracy_positions(&self, x: &Vec<u8>) -> Vec<usize> {
        (0..x.len() - 1).filter(|&i| x[i] == x[i + 1]).collect()
    }
}

pub fn nerve_ez2(top: usize) -> Result<SimplicialSet<NerveEZ2>> {
    SimplicialSet::build(NerveEZ2, top)
}

/// Tuples over `{-d, 0, d}` with cyclically alternating nonzero entries and total zero.
pub struct AltComplex {
    pub d: i64,
}

impl AltComplex {
    fn all_tuples(&self, q: usize, nondegenerate_only: bool) -> Vec<Tuple> {
        let d = self.d;
        let mut acc: Vec<Tuple> = vec![vec![]];
        for pos in 0..=q {
            let choices: &[i64] = if pos > 0 && nondegenerate_only { &[-1, 1] } else { &[-1, 0, 1] };
            acc = acc
                .into_iter()
                .flat_map(|t| {
                    choices.iter().map(move |&c| {
                        let mut t = t.clone();
                        t.push(vec![c * d]);
                        t
                    })
                })
                .collect();
        }
        acc.retain(|t| self.contains(t));
        acc
    }
}

impl SimplicialModel for AltComplex {
    type Simplex = Tuple;

    fn dim(&self, x: &Tuple) -> usize {
        x.len() - 1
    }

    fn face(&self, x: &Tuple, i: usize) -> Tuple {
        tuple_face(x, i)
    }

    fn degeneracy(&self, x: &Tuple, i: usize) -> Tuple {
        let mut y = x.clone();
        y.insert(i + 1, vec![0]);
        y
    }

    fn nondegenerate(&self, q: usize) -> Vec<Tuple> {
        self.all_tuples(q, true)
    }

    fn contains(&self, x: &Tuple) -> bool {
        if x.is_empty() || x.iter().any(|e| e.len() != 1 || !(e[0] == 0 || e[0].abs() == self.d)) {
            return false;
        }
        let nz: Vec<i64> = x.iter().map(|e| e[0]).filter(|&v| v != 0).collect();
        if nz.len() == 1 {
            return false;
        }
        (0..nz.len()).all(|i| nz[i] != nz[(i + 1) % nz.len()])
    }

    fn cyclic(&self, x: &Tuple) -> Option<Tuple> {
        Some(tuple_rotate(x))
    }

    fn weight(&self, _x: &Tuple) -> Option<i64> {
        Some(0)
    }

    fn label(&self, x: &Tuple) -> String {
        tuple_label(x)
    }

    fn degeneracy_positions(&self, x: &Tuple) -> Vec<usize> {
        (1..x.len()).filter(|&j| x[j][0] == 0).map(|j| j - 1).collect()
    }
}

pub fn alt_subcomplex_c(d: i64, top: usize) -> Result<SimplicialSet<AltComplex>> {
    if d < 1 {
        return Err(Error::InvalidMonoid(format!("scale {d} must be positive")));
    }
    SimplicialSet::build(AltComplex { d }, top)
}

/// `c ↦ (d(c_0 − c_q), d(c_1 − c_0), …, d(c_q − c_{q−1}))`.
pub fn phi(d: i64, c: &[u8]) -> Tuple {
    let q = c.len() - 1;
    (0..=q)
        .map(|j| {
            let prev = if j == 0 { c[q] } else { c[j - 1] };
            vec![d * (c[j] as i64 - prev as i64)]
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DegreeCheck {
    pub degree: usize,
    pub ez2_simplices: usize,
    pub c_simplices: usize,
    pub lands_in_c: bool,
    pub surjective: bool,
    pub zero_fiber_is_constants: bool,
    pub other_fibers_singletons: bool,
    pub commutes_with_structure: bool,
}

impl DegreeCheck {
    pub fn holds(&self) -> bool {
        self.lands_in_c
            && self.surjective
            && self.zero_fiber_is_constants
            && self.other_fibers_singletons
            && self.commutes_with_structure
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PushoutReport {
    pub d: i64,
    pub degrees: Vec<DegreeCheck>,
    pub holds: bool,
}

/// Checks, degree by degree and on all simplices, that `φ` collapses exactly
/// the two constant words and is otherwise a bijection onto `C(d)`.
pub fn verify_ez2_pushout(d: i64, max_degree: usize) -> Result<PushoutReport> {
    let c = AltComplex { d };
    if d < 1 {
        return Err(Error::InvalidMonoid(format!("scale {d} must be positive")));
    }
    if max_degree > 16 {
        return Err(Error::WindowTooSmall("degree cap for the pushout check is 16".into()));
    }
    let mut degrees = Vec::new();
    for q in 0..=max_degree {
        let words: Vec<Vec<u8>> =
            (0..1u32 << (q + 1)).map(|bits| (0..=q).map(|j| ((bits >> j) & 1) as u8).collect()).collect();
        let targets = c.all_tuples(q, false);
        let mut fibers: HashMap<Tuple, Vec<Vec<u8>>> = HashMap::new();
        let mut lands = true;
        let mut commutes = true;
        for w in &words {
            let img = phi(d, w);
            lands &= c.contains(&img);
            commutes &= phi(d, &NerveEZ2.cyclic(w).unwrap()) == tuple_rotate(&img);
            if q > 0 {
                for i in 0..=q {
                    commutes &= phi(d, &NerveEZ2.face(w, i)) == tuple_face(&img, i);
                }
            }
            for i in 0..=q {
                commutes &= phi(d, &NerveEZ2.degeneracy(w, i)) == c.degeneracy(&img, i);
            }
            fibers.entry(img).or_default().push(w.clone());
        }
        let zero: Tuple = vec![vec![0]; q + 1];
        let mut zf = fibers.get(&zero).cloned().unwrap_or_default();
        zf.sort();
        let consts = vec![vec![0u8; q + 1], vec![1u8; q + 1]];
        degrees.push(DegreeCheck {
            degree: q,
            ez2_simplices: words.len(),
            c_simplices: targets.len(),
            lands_in_c: lands,
            surjective: targets.iter().all(|t| fibers.contains_key(t)),
            zero_fiber_is_constants: zf == consts,
            other_fibers_singletons: fibers.iter().all(|(t, f)| *t == zero || f.len() == 1),
            commutes_with_structure: commutes,
        });
    }
    let holds = degrees.iter().all(DegreeCheck::holds);
    Ok(PushoutReport { d, degrees, holds })
}

/// `φ` as a validated map between materialized sets.
pub fn phi_map<'a>(
    ez: &'a SimplicialSet<NerveEZ2>,
    c: &'a SimplicialSet<AltComplex>,
) -> Result<SimplicialMap<'a, NerveEZ2, AltComplex>> {
    let d = c.model().d;
    SimplicialMap::new(ez, c, move |w: &Vec<u8>| phi(d, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{DegreeSet, GradedCommMonoid};
    use crate::sset::bcy;

    #[test]
    fn pushout_holds_through_degree_ten() {
        for d in [1, 2, 5] {
            let r = verify_ez2_pushout(d, 10).unwrap();
            assert!(r.holds, "{:?}", r.degrees.iter().find(|c| !c.holds()));
            assert_eq!(r.degrees[3].c_simplices, 16 - 2 + 1);
        }
    }

    #[test]
    fn c_is_the_bound_d_window() {
        for d in [1, 3] {
            let c = alt_subcomplex_c(d, 6).unwrap();
            c.check_identities().unwrap();
            let w = bcy(&GradedCommMonoid::named(&format!("dZ:{d}")).unwrap(), DegreeSet::single(0), d, 6).unwrap();
            for q in 0..=6 {
                assert_eq!(c.cells(q), w.cells(q));
            }
            assert_eq!(c.counts(), vec![1, 2, 2, 2, 2, 2, 2]);
        }
    }

    #[test]
    fn phi_is_a_cyclic_map() {
        let ez = nerve_ez2(6).unwrap();
        ez.check_identities().unwrap();
        let c = alt_subcomplex_c(2, 6).unwrap();
        assert!(phi_map(&ez, &c).unwrap().is_cyclic());
    }
}
