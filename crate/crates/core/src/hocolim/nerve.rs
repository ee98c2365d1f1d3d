//! Bousfield–Kan homotopy colimits of discrete J-spaces as nerves of
//! categories of elements.

use std::collections::HashMap;

use rayon::prelude::*;

use super::TruncatedJSpace;
use crate::error::Result;
use crate::jcat::{compose, enumerate_homs, permutations, JMorphism, JObject};
use crate::sset::{SimplicialModel, SimplicialSet};

/// Objects `(n, x)`; a morphism `(n, x) → (n', x')` is `g: n → n'` with `g·x = x'`.
#[derive(Clone, Debug)]
pub struct ElementsCategory {
    pub objects: Vec<(JObject, usize)>,
    homs: HashMap<(usize, usize), Vec<JMorphism>>,
    lookup: HashMap<(usize, usize), HashMap<JMorphism, usize>>,
    identity: Vec<usize>,
    labels: Vec<String>,
}

/// With `skeletal`, one object per automorphism orbit of each `X(n)`; the
/// inclusion of this full subcategory is an equivalence.
pub fn category_of_elements(x: &TruncatedJSpace, skeletal: bool) -> Result<ElementsCategory> {
    let mut objects = Vec::new();
    for n in x.truncation().objects() {
        let size = x.size(n);
        if size == 0 {
            continue;
        }
        if !skeletal {
            objects.extend((0..size).map(|i| (n, i)));
            continue;
        }
        let mut seen = vec![false; size];
        let autos: Vec<JMorphism> = permutations(n.m1)
            .iter()
            .flat_map(|s1| permutations(n.m2).into_iter().map(move |s2| JMorphism::permutation(n, s1, &s2).expect("automorphism")))
            .collect();
        for i in 0..size {
            if seen[i] {
                continue;
            }
            objects.push((n, i));
            for g in &autos {
                seen[x.act(g, i)] = true;
            }
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..objects.len()).flat_map(|a| (0..objects.len()).map(move |b| (a, b))).collect();
    let homs: HashMap<(usize, usize), Vec<JMorphism>> = pairs
        .par_iter()
        .filter_map(|&(a, b)| {
            let ((n, i), (m, j)) = (objects[a], objects[b]);
            let hs: Vec<JMorphism> = enumerate_homs(n, m).into_iter().filter(|g| x.act(g, i) == j).collect();
            (!hs.is_empty()).then_some(((a, b), hs))
        })
        .collect();
    let lookup = homs.iter().map(|(k, v)| (*k, v.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect())).collect();
    let identity = (0..objects.len())
        .map(|a| homs[&(a, a)].iter().position(|g| g.is_identity()).expect("identity"))
        .collect();
    let labels = objects.iter().map(|&(n, i)| format!("{n}:{}", x.label(n, i))).collect();
    Ok(ElementsCategory { objects, homs, lookup, identity, labels })
}

impl ElementsCategory {
    pub fn hom(&self, a: usize, b: usize) -> &[JMorphism] {
        self.homs.get(&(a, b)).map_or(&[], |v| v.as_slice())
    }

    pub fn morphism_count(&self) -> usize {
        self.homs.values().map(Vec::len).sum()
    }

    fn compose_idx(&self, a: usize, b: usize, c: usize, f: usize, g: usize) -> usize {
        let h = compose(&self.homs[&(b, c)][g], &self.homs[&(a, b)][f]).expect("composable");
        self.lookup[&(a, c)][&h]
    }
}

/// Simplices are chains `o_0 → o_1 → ⋯ → o_q` of morphism indices.
pub struct ElementsNerve {
    pub cat: ElementsCategory,
}

type Chain = (Vec<usize>, Vec<usize>);

impl SimplicialModel for ElementsNerve {
    type Simplex = Chain;

    fn dim(&self, x: &Chain) -> usize {
        x.0.len() - 1
    }

    fn face(&self, x: &Chain, i: usize) -> Chain {
        let (mut objs, mut mors) = x.clone();
        let q = objs.len() - 1;
        if i == 0 {
            objs.remove(0);
            mors.remove(0);
        } else if i == q {
            objs.pop();
            mors.pop();
        } else {
            let h = self.cat.compose_idx(objs[i - 1], objs[i], objs[i + 1], mors[i - 1], mors[i]);
            objs.remove(i);
            mors.remove(i);
            mors[i - 1] = h;
        }
        (objs, mors)
    }

    fn degeneracy(&self, x: &Chain, i: usize) -> Chain {
        let (mut objs, mut mors) = x.clone();
        let o = objs[i];
        objs.insert(i, o);
        mors.insert(i, self.cat.identity[o]);
        (objs, mors)
    }

    fn nondegenerate(&self, q: usize) -> Vec<Chain> {
        let n = self.cat.objects.len();
        let mut out = Vec::new();
        let mut stack: Vec<Chain> = (0..n).map(|o| (vec![o], vec![])).collect();
        while let Some((objs, mors)) = stack.pop() {
            if objs.len() == q + 1 {
                out.push((objs, mors));
                continue;
            }
            let a = *objs.last().unwrap();
            for b in 0..n {
                for g in 0..self.cat.hom(a, b).len() {
                    if a == b && g == self.cat.identity[a] {
                        continue;
                    }
                    let mut o2 = objs.clone();
                    o2.push(b);
                    let mut m2 = mors.clone();
                    m2.push(g);
                    stack.push((o2, m2));
                }
            }
        }
        out
    }

    fn contains(&self, x: &Chain) -> bool {
        x.0.len() == x.1.len() + 1 && x.1.iter().enumerate().all(|(i, &g)| g < self.cat.hom(x.0[i], x.0[i + 1]).len())
    }

    fn label(&self, x: &Chain) -> String {
        let parts: Vec<String> = x.0.iter().map(|&o| self.cat.labels[o].clone()).collect();
        parts.join(" → ")
    }

    fn degeneracy_positions(&self, x: &Chain) -> Vec<usize> {
        (0..x.1.len()).filter(|&i| x.0[i] == x.0[i + 1] && x.1[i] == self.cat.identity[x.0[i]]).collect()
    }
}

/// Nerve of the (skeletal) category of elements through degree `top`.
pub fn hocolim_nerve(x: &TruncatedJSpace, top: usize, skeletal: bool) -> Result<SimplicialSet<ElementsNerve>> {
    SimplicialSet::build(ElementsNerve { cat: category_of_elements(x, skeletal)? }, top)
}
