//! `K ⊙ N`: pairs `(κ, n)` with `κ` a simplex of a cyclic set over the cyclic
//! bar construction of `Z` and `n` a tuple in `N` lifting `θ(κ)` degreewise.

use std::collections::HashMap;

use super::bar::{tuple_degeneracy, tuple_face, tuple_label, tuple_rotate, Tuple};
use super::{all_simplices, SimplicialModel, SimplicialSet};
use crate::error::Result;
use crate::monoid::{Elem, GradedCommMonoid};

/// The one-point cyclic set; the simplex is its dimension.
pub struct PointModel;

impl SimplicialModel for PointModel {
    type Simplex = usize;

    fn dim(&self, x: &usize) -> usize {
        *x
    }
    fn face(&self, x: &usize, _i: usize) -> usize {
        x - 1
    }
    fn degeneracy(&self, x: &usize, _i: usize) -> usize {
        x + 1
    }
    fn nondegenerate(&self, q: usize) -> Vec<usize> {
        if q == 0 {
            vec![0]
        } else {
            vec![]
        }
    }
    fn contains(&self, _x: &usize) -> bool {
        true
    }
    fn cyclic(&self, x: &usize) -> Option<usize> {
        Some(*x)
    }
    fn weight(&self, _x: &usize) -> Option<i64> {
        Some(0)
    }
    fn label(&self, _x: &usize) -> String {
        "*".into()
    }
}

type Theta<'a, S> = Box<dyn Fn(&S) -> Vec<i64> + Sync + 'a>;

pub struct OdotModel<'a, K: SimplicialModel> {
    k: K,
    theta: Theta<'a, K::Simplex>,
    n: GradedCommMonoid,
    radius: i64,
    by_degree: HashMap<i64, Vec<Elem>>,
}

impl<K: SimplicialModel> OdotModel<'_, K> {
    fn lifts(&self, degrees: &[i64]) -> Vec<Tuple> {
        let mut acc: Vec<Tuple> = vec![vec![]];
        for m in degrees {
            let Some(choices) = self.by_degree.get(m) else { return vec![] };
            acc = acc
                .into_iter()
                .flat_map(|t| {
                    choices.iter().map(move |e| {
                        let mut t = t.clone();
                        t.push(e.clone());
                        t
                    })
                })
                .collect();
        }
        acc
    }
}

/// `θ` sends a `q`-simplex of `K` to the entries of a `q`-simplex of the cyclic
/// bar construction of `Z`; `N` is searched within sup-norm `radius`.
pub fn odot<'a, K: SimplicialModel>(
    k: K,
    theta: impl Fn(&K::Simplex) -> Vec<i64> + Sync + 'a,
    n: &GradedCommMonoid,
    radius: i64,
) -> OdotModel<'a, K> {
    let mut by_degree: HashMap<i64, Vec<Elem>> = HashMap::new();
    for e in n.elements_in_box(radius) {
        by_degree.entry(n.degree(&e)).or_default().push(e);
    }
    OdotModel { k, theta: Box::new(theta), n: n.clone(), radius, by_degree }
}

impl<K: SimplicialModel> SimplicialModel for OdotModel<'_, K> {
    type Simplex = (K::Simplex, Tuple);

    fn dim(&self, x: &Self::Simplex) -> usize {
        self.k.dim(&x.0)
    }

    fn face(&self, x: &Self::Simplex, i: usize) -> Self::Simplex {
        (self.k.face(&x.0, i), tuple_face(&x.1, i))
    }

    fn degeneracy(&self, x: &Self::Simplex, i: usize) -> Self::Simplex {
        (self.k.degeneracy(&x.0, i), tuple_degeneracy(&x.1, i))
    }

    fn nondegenerate(&self, q: usize) -> Vec<Self::Simplex> {
        let mut out = Vec::new();
        for kappa in all_simplices(&self.k, q) {
            for n in self.lifts(&(self.theta)(&kappa)) {
                let x = (kappa.clone(), n);
                if self.degeneracy_positions(&x).is_empty() {
                    out.push(x);
                }
            }
        }
        out
    }

    fn contains(&self, x: &Self::Simplex) -> bool {
        let th = (self.theta)(&x.0);
        self.k.contains(&x.0)
            && x.1.len() == th.len()
            && x.1.iter().zip(&th).all(|(e, &m)| {
                e.iter().all(|v| v.abs() <= self.radius) && self.n.degree(e) == m && self.n.contains(e)
            })
    }

    fn cyclic(&self, x: &Self::Simplex) -> Option<Self::Simplex> {
        Some((self.k.cyclic(&x.0)?, tuple_rotate(&x.1)))
    }

    fn weight(&self, x: &Self::Simplex) -> Option<i64> {
        Some(x.1.iter().map(|e| self.n.degree(e)).sum())
    }

    fn label(&self, x: &Self::Simplex) -> String {
        format!("{} ⊙ {}", self.k.label(&x.0), tuple_label(&x.1))
    }
}

impl<'a, K: SimplicialModel> OdotModel<'a, K> {
    pub fn build(self, top: usize) -> Result<SimplicialSet<Self>> {
        SimplicialSet::build(self, top)
    }
}
