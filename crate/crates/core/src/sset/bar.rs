//! Bounded windows of the cyclic bar construction and its replete variant.
//!
//! A `q`-simplex is a tuple `(x_0, …, x_q)`; `x_1, …, x_q` are nonunits in a
//! nondegenerate simplex. A window of bound `B` keeps the tuples whose every
//! cyclically contiguous block product has sup-norm at most `B`, a condition
//! stable under faces, degeneracies and rotation.

use std::collections::HashSet;

use super::{SimplicialMap, SimplicialModel, SimplicialSet};
use crate::error::{Error, Result};
use crate::monoid::{group_completion, DegreeSet, Elem, GradedCommMonoid};

pub type Tuple = Vec<Elem>;

const MAX_ENTRIES: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarKind {
    /// Entries in `N`.
    Cyclic,
    /// Entries in `N^gp`, total product in `N`.
    Replete,
}

pub struct BarModel {
    monoid: GradedCommMonoid,
    entries: GradedCommMonoid,
    kind: BarKind,
    bound: i64,
    weights: DegreeSet,
    allowed: Vec<Elem>,
    allowed_set: HashSet<Elem>,
    members: HashSet<Elem>,
    exact: bool,
}

fn norm(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

fn add(a: &[i64], b: &[i64]) -> Elem {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Elem {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn is_unit(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// `d_i` on tuples: merge positions `i, i+1`, or `x_q·x_0` for `i = q`.
pub fn tuple_face(x: &[Elem], i: usize) -> Tuple {
    let q = x.len() - 1;
    if i < q {
        let mut y = x[..i].to_vec();
        y.push(add(&x[i], &x[i + 1]));
        y.extend_from_slice(&x[i + 2..]);
        y
    } else {
        let mut y = vec![add(&x[q], &x[0])];
        y.extend_from_slice(&x[1..q]);
        y
    }
}

pub(crate) fn tuple_degeneracy(x: &[Elem], i: usize) -> Tuple {
    let mut y = x.to_vec();
    y.insert(i + 1, vec![0; x[0].len()]);
    y
}

/// `t(x_0, …, x_q) = (x_q, x_0, …, x_{q-1})`.
pub(crate) fn tuple_rotate(x: &[Elem]) -> Tuple {
    let mut y = x.to_vec();
    y.rotate_right(1);
    y
}

pub(crate) fn tuple_label(x: &[Elem]) -> String {
    let parts: Vec<String> = x
        .iter()
        .map(|e| match e.len() {
            1 => e[0].to_string(),
            _ => format!("[{}]", e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")),
        })
        .collect();
    format!("({})", parts.join(","))
}

impl BarModel {
    pub fn new(n: &GradedCommMonoid, kind: BarKind, bound: i64, weights: DegreeSet) -> Result<Self> {
        if bound < 0 {
            return Err(Error::WindowTooSmall("negative bound".into()));
        }
        let entries = match kind {
            BarKind::Cyclic => n.clone(),
            BarKind::Replete => group_completion(n).0,
        };
        let allowed = entries.elements_in_box(bound);
        if allowed.len() > MAX_ENTRIES {
            return Err(Error::WindowTooSmall(format!("{} entries exceed the enumeration cap", allowed.len())));
        }
        let members: HashSet<Elem> = match kind {
            BarKind::Cyclic => HashSet::new(),
            BarKind::Replete => n.elements_in_box(bound).into_iter().collect(),
        };
        let exact = n.rank() == 0
            || (kind == BarKind::Cyclic
                && n.is_positively_graded()
                && weights
                    .max()
                    .is_some_and(|w| n.elements_up_to_degree(w).is_ok_and(|els| els.iter().all(|e| norm(e) <= bound))));
        let allowed_set = allowed.iter().cloned().collect();
        Ok(BarModel { monoid: n.clone(), entries, kind, bound, weights, allowed, allowed_set, members, exact })
    }

    pub fn monoid(&self) -> &GradedCommMonoid {
        &self.monoid
    }

    pub fn kind(&self) -> BarKind {
        self.kind
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn weights(&self) -> &DegreeSet {
        &self.weights
    }

    /// True when no simplex of the requested weights is cut off by the bound.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn require_exact(&self) -> Result<()> {
        if self.exact {
            Ok(())
        } else {
            Err(Error::WindowTooSmall(format!("bound {} does not capture the requested weights", self.bound)))
        }
    }

    fn total(&self, x: &[Elem]) -> Elem {
        x.iter().fold(self.entries.unit(), |acc, e| add(&acc, e))
    }

    fn total_ok(&self, total: &[i64]) -> bool {
        norm(total) <= self.bound
            && self.weights.contains(self.monoid.degree(total))
            && (self.kind == BarKind::Cyclic || self.members.contains(total))
    }

    fn blocks_ok(&self, x: &[Elem]) -> bool {
        let n = x.len();
        let total = self.total(x);
        for a in 0..n {
            let mut s = self.entries.unit();
            for b in a..n {
                s = add(&s, &x[b]);
                if norm(&s) > self.bound {
                    return false;
                }
                if a >= 1 && b + 1 < n && norm(&sub(&total, &s)) > self.bound {
                    return false;
                }
            }
        }
        true
    }

    fn extend(&self, q: usize, prefix: &mut Tuple, prefix_deg: i64, out: &mut Vec<Tuple>) {
        let k = prefix.len();
        if k == q + 1 {
            let total = self.total(prefix);
            if self.total_ok(&total) && self.blocks_ok(prefix) {
                out.push(prefix.clone());
            }
            return;
        }
        let deg_cap = (self.kind == BarKind::Cyclic && self.monoid.is_positively_graded())
            .then(|| self.weights.max())
            .flatten();
        for e in &self.allowed {
            if k >= 1 && is_unit(e) {
                continue;
            }
            let d = prefix_deg + self.monoid.degree(e);
            if deg_cap.is_some_and(|w| d > w) {
                continue;
            }
            let mut s = e.clone();
            let mut fine = norm(&s) <= self.bound;
            for j in (0..k).rev() {
                if !fine {
                    break;
                }
                s = add(&s, &prefix[j]);
                fine = norm(&s) <= self.bound;
            }
            if !fine {
                continue;
            }
            prefix.push(e.clone());
            self.extend(q, prefix, d, out);
            prefix.pop();
        }
    }
}

impl SimplicialModel for BarModel {
    type Simplex = Tuple;

    fn dim(&self, x: &Tuple) -> usize {
        x.len() - 1
    }

    fn face(&self, x: &Tuple, i: usize) -> Tuple {
        tuple_face(x, i)
    }

    fn degeneracy(&self, x: &Tuple, i: usize) -> Tuple {
        tuple_degeneracy(x, i)
    }

    fn nondegenerate(&self, q: usize) -> Vec<Tuple> {
        let mut out = Vec::new();
        self.extend(q, &mut Vec::with_capacity(q + 1), 0, &mut out);
        out
    }

    fn contains(&self, x: &Tuple) -> bool {
        !x.is_empty()
            && x.iter().all(|e| self.allowed_set.contains(e))
            && self.total_ok(&self.total(x))
            && self.blocks_ok(x)
    }

    fn cyclic(&self, x: &Tuple) -> Option<Tuple> {
        Some(tuple_rotate(x))
    }

    fn weight(&self, x: &Tuple) -> Option<i64> {
        Some(self.monoid.degree(&self.total(x)))
    }

    fn multiply(&self, a: &Tuple, b: &Tuple) -> Option<Tuple> {
        (a.len() == b.len()).then(|| a.iter().zip(b).map(|(x, y)| add(x, y)).collect())
    }

    fn label(&self, x: &Tuple) -> String {
        tuple_label(x)
    }

    fn degeneracy_positions(&self, x: &Tuple) -> Vec<usize> {
        (1..x.len()).filter(|&j| is_unit(&x[j])).map(|j| j - 1).collect()
    }
}

/// Bounded window of the cyclic bar construction of `n`, degrees `0..=top`.
pub fn bcy(n: &GradedCommMonoid, weights: DegreeSet, bound: i64, top: usize) -> Result<SimplicialSet<BarModel>> {
    SimplicialSet::build(BarModel::new(n, BarKind::Cyclic, bound, weights)?, top)
}

/// Bounded window of the replete bar construction of `n`.
pub fn brep(n: &GradedCommMonoid, weights: DegreeSet, bound: i64, top: usize) -> Result<SimplicialSet<BarModel>> {
    SimplicialSet::build(BarModel::new(n, BarKind::Replete, bound, weights)?, top)
}

/// The cyclic inclusion of the cyclic bar window into a replete one.
pub fn repletion_map<'a>(
    cy: &'a SimplicialSet<BarModel>,
    rep: &'a SimplicialSet<BarModel>,
) -> Result<SimplicialMap<'a, BarModel, BarModel>> {
    if cy.model().monoid() != rep.model().monoid() {
        return Err(Error::NotSimplicial("windows over different monoids".into()));
    }
    SimplicialMap::new(cy, rep, |x: &Tuple| x.clone())
}

impl SimplicialSet<BarModel> {
    /// Window of the cyclic bar construction of `Z` receiving the degree augmentation.
    pub fn augmentation_target(&self) -> Result<SimplicialSet<BarModel>> {
        let m = self.model();
        let scale: i64 = m.monoid().degree_functional().iter().map(|d| d.abs()).sum();
        let z = GradedCommMonoid::named("z")?;
        bcy(&z, m.weights().clone(), m.bound() * scale.max(1), self.top())
    }
}

/// Entrywise degree, into a window produced by [`SimplicialSet::augmentation_target`].
pub fn augment_to_bcy_z<'a>(
    x: &'a SimplicialSet<BarModel>,
    target: &'a SimplicialSet<BarModel>,
) -> Result<SimplicialMap<'a, BarModel, BarModel>> {
    let n = x.model().monoid().clone();
    SimplicialMap::new(x, target, move |t: &Tuple| t.iter().map(|e| vec![n.degree(e)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::all_simplices;

    /// Brute force: all tuples over the box, filtered by the window predicate.
    fn brute_nondegenerate(m: &BarModel, q: usize) -> Vec<Tuple> {
        let mut acc: Vec<Tuple> = vec![vec![]];
        for _ in 0..=q {
            acc = acc
                .into_iter()
                .flat_map(|t| {
                    m.allowed.iter().map(move |e| {
                        let mut t = t.clone();
                        t.push(e.clone());
                        t
                    })
                })
                .collect();
        }
        let mut v: Vec<Tuple> =
            acc.into_iter().filter(|t| t[1..].iter().all(|e| !is_unit(e)) && m.contains(t)).collect();
        v.sort();
        v
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let cases = [
            (GradedCommMonoid::named("free1").unwrap(), BarKind::Cyclic, 3, DegreeSet::All),
            (GradedCommMonoid::named("free2").unwrap(), BarKind::Cyclic, 1, DegreeSet::All),
            (GradedCommMonoid::named("free1").unwrap(), BarKind::Replete, 2, DegreeSet::single(1)),
            (GradedCommMonoid::named("dZ:2").unwrap(), BarKind::Cyclic, 4, DegreeSet::single(0)),
        ];
        for (n, kind, b, w) in cases {
            let m = BarModel::new(&n, kind, b, w).unwrap();
            for q in 0..4 {
                let mut got = m.nondegenerate(q);
                got.sort();
                assert_eq!(got, brute_nondegenerate(&m, q), "{kind:?} q={q}");
            }
        }
    }

    #[test]
    fn free_rank_one_weight_k_counts() {
        // Weight k, degree q: cyclic tuples of q positive parts with optional x_0.
        let x = GradedCommMonoid::named("free1").unwrap();
        let s = bcy(&x, DegreeSet::single(3), 3, 4).unwrap();
        assert!(s.model().is_exact());
        assert_eq!(s.counts(), vec![1, 3, 3, 1, 0]);
        s.check_identities().unwrap();
    }

    #[test]
    fn degenerate_count_matches_direct_enumeration() {
        let x = GradedCommMonoid::named("free1").unwrap();
        let s = bcy(&x, DegreeSet::single(2), 2, 4).unwrap();
        for q in 0..=4 {
            assert_eq!(all_simplices(s.model(), q).len(), s.total_count(q));
        }
    }

    #[test]
    fn repletion_and_augmentation_are_cyclic_maps() {
        let x = GradedCommMonoid::named("free1").unwrap();
        let cy = bcy(&x, DegreeSet::single(2), 2, 3).unwrap();
        let rep = brep(&x, DegreeSet::single(2), 2, 3).unwrap();
        assert!(!rep.model().is_exact());
        let rho = repletion_map(&cy, &rep).unwrap();
        assert!(rho.is_cyclic());
        let t = cy.augmentation_target().unwrap();
        let aug = augment_to_bcy_z(&cy, &t).unwrap();
        assert!(aug.is_cyclic());
    }
}
