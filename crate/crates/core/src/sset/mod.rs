//! Finite-type truncated simplicial and cyclic sets.
//!
//! A [`SimplicialModel`] describes a simplicial set through operations on
//! labels; a [`SimplicialSet`] materializes its nondegenerate simplices up to a
//! top degree and records each face as a nondegenerate base together with a
//! canonical degeneracy word.

mod bar;
mod ez2;
mod odot;
mod stabilize;

pub use bar::{augment_to_bcy_z, bcy, brep, repletion_map, tuple_face, BarKind, BarModel, Tuple};
pub use ez2::{phi_map, alt_subcomplex_c, nerve_ez2, verify_ez2_pushout, AltComplex, DegreeCheck, NerveEZ2, PushoutReport};
pub use odot::{odot, OdotModel, PointModel};
pub use stabilize::{bounded_stabilization, StabilizationReport};

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::monoid::DegreeSet;

pub trait SimplicialModel: Sync {
    type Simplex: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn dim(&self, x: &Self::Simplex) -> usize;

    fn face(&self, x: &Self::Simplex, i: usize) -> Self::Simplex;

    fn degeneracy(&self, x: &Self::Simplex, i: usize) -> Self::Simplex;

    /// Nondegenerate `q`-simplices; order is irrelevant, the set sorts them.
    fn nondegenerate(&self, q: usize) -> Vec<Self::Simplex>;

    fn contains(&self, x: &Self::Simplex) -> bool;

    /// The cyclic operator `t_q`, for cyclic models.
    fn cyclic(&self, _x: &Self::Simplex) -> Option<Self::Simplex> {
        None
    }

    fn weight(&self, _x: &Self::Simplex) -> Option<i64> {
        None
    }

    /// Degreewise product, for simplicial monoids.
    fn multiply(&self, _a: &Self::Simplex, _b: &Self::Simplex) -> Option<Self::Simplex> {
        None
    }

    fn label(&self, x: &Self::Simplex) -> String {
        format!("{x:?}")
    }

    /// Ascending `i` with `x = s_i d_i x`; this is the index set of the
    /// canonical degeneracy word of `x`.
    fn degeneracy_positions(&self, x: &Self::Simplex) -> Vec<usize> {
        let q = self.dim(x);
        (0..q).filter(|&i| self.degeneracy(&self.face(x, i), i) == *x).collect()
    }
}

/// Splits `x` as `s_{i_k}⋯s_{i_1} y` with `y` nondegenerate; returns `(y, [i_1 < … < i_k])`.
pub fn normalize<M: SimplicialModel>(m: &M, x: &M::Simplex) -> (M::Simplex, Vec<usize>) {
    let word = m.degeneracy_positions(x);
    let mut y = x.clone();
    for &i in word.iter().rev() {
        y = m.face(&y, i);
    }
    (y, word)
}

/// `s_{i_k}⋯s_{i_1} y` for an ascending word.
pub fn degenerate<M: SimplicialModel>(m: &M, y: &M::Simplex, word: &[usize]) -> M::Simplex {
    word.iter().fold(y.clone(), |acc, &i| m.degeneracy(&acc, i))
}

/// All `q`-simplices, degenerate ones included.
pub fn all_simplices<M: SimplicialModel>(m: &M, q: usize) -> Vec<M::Simplex> {
    let mut out = Vec::new();
    for j in 0..=q {
        let words = canonical_words(j, q - j);
        for y in m.nondegenerate(j) {
            for w in &words {
                out.push(degenerate(m, &y, w));
            }
        }
    }
    out.sort();
    out
}

/// Ascending words `i_1 < … < i_k` with `i_m ≤ j + m − 1`.
fn canonical_words(j: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(j: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().map_or(0, |&l| l + 1);
        let hi = j + cur.len();
        for i in lo..=hi {
            cur.push(i);
            rec(j, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(j, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceImage {
    /// Index of the nondegenerate base in degree `q − 1 − word.len()`.
    pub base: usize,
    pub word: Vec<usize>,
}

pub struct SimplicialSet<M: SimplicialModel> {
    model: M,
    top: usize,
    cells: Vec<Vec<M::Simplex>>,
    index: Vec<HashMap<M::Simplex, usize>>,
    faces: Vec<Vec<Vec<FaceImage>>>,
}

impl<M: SimplicialModel> SimplicialSet<M> {
    /// Materializes degrees `0..=top`.
    pub fn build(model: M, top: usize) -> Result<Self> {
        let mut cells: Vec<Vec<M::Simplex>> =
            (0..=top).into_par_iter().map(|q| model.nondegenerate(q)).collect();
        for c in &mut cells {
            c.sort();
            c.dedup();
        }
        let index: Vec<HashMap<M::Simplex, usize>> = cells
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect())
            .collect();
        let mut set = SimplicialSet { model, top, cells, index, faces: Vec::new() };
        let mut faces = Vec::with_capacity(top + 1);
        for q in 0..=top {
            let fq: Result<Vec<Vec<FaceImage>>> = set.cells[q]
                .par_iter()
                .map(|x| (0..=q).filter(|_| q > 0).map(|i| set.face_image(&set.model.face(x, i))).collect())
                .collect();
            faces.push(fq?);
        }
        set.faces = faces;
        Ok(set)
    }

    fn face_image(&self, y: &M::Simplex) -> Result<FaceImage> {
        let (base, word) = normalize(&self.model, y);
        let d = self.model.dim(&base);
        match self.index.get(d).and_then(|ix| ix.get(&base)) {
            Some(&b) => Ok(FaceImage { base: b, word }),
            None => Err(Error::FaceOutsideComplex(self.model.label(y))),
        }
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn cells(&self, q: usize) -> &[M::Simplex] {
        self.cells.get(q).map_or(&[], |c| c.as_slice())
    }

    pub fn count(&self, q: usize) -> usize {
        self.cells(q).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..=self.top).map(|q| self.count(q)).collect()
    }

    pub fn index_of(&self, x: &M::Simplex) -> Option<usize> {
        let q = self.model.dim(x);
        self.index.get(q)?.get(x).copied()
    }

    /// Face table of the `j`-th nondegenerate `q`-simplex.
    pub fn faces(&self, q: usize, j: usize) -> &[FaceImage] {
        &self.faces[q][j]
    }

    /// Number of `q`-simplices including degenerate ones.
    pub fn total_count(&self, q: usize) -> usize {
        (0..=q.min(self.top)).map(|j| self.count(j) * canonical_words(j, q - j).len()).sum()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cells.iter().flatten().next().is_some_and(|x| self.model.cyclic(x).is_some())
    }

    /// Cyclic operator table in degree `q`, as `(base degree, image)`.
    pub fn cyclic_images(&self, q: usize) -> Result<Option<Vec<(usize, FaceImage)>>> {
        let mut out = Vec::new();
        for x in self.cells(q) {
            let Some(t) = self.model.cyclic(x) else { return Ok(None) };
            let img = self.face_image(&t)?;
            out.push((q - img.word.len(), img));
        }
        Ok(Some(out))
    }

    /// Checks simplicial identities and, when present, the cyclic relations
    /// and weight invariance on every stored simplex.
    pub fn check_identities(&self) -> Result<()> {
        let m = &self.model;
        let fail = |what: &str, x: &M::Simplex| Err(Error::Inconsistent(format!("{what} at {}", m.label(x))));
        for q in 0..=self.top {
            for x in self.cells(q) {
                if !m.contains(x) || m.dim(x) != q {
                    return fail("stored simplex outside model", x);
                }
                for j in 0..=q {
                    let sj = m.degeneracy(x, j);
                    if m.face(&sj, j) != *x || m.face(&sj, j + 1) != *x {
                        return fail("d s = id", x);
                    }
                    if m.weight(&sj) != m.weight(x) {
                        return fail("weight under degeneracy", x);
                    }
                }
                if q >= 1 {
                    for i in 0..=q {
                        if m.weight(&m.face(x, i)) != m.weight(x) {
                            return fail("weight under face", x);
                        }
                    }
                }
                if q >= 2 {
                    for j in 1..=q {
                        for i in 0..j {
                            if m.face(&m.face(x, j), i) != m.face(&m.face(x, i), j - 1) {
                                return fail("d_i d_j = d_{j-1} d_i", x);
                            }
                        }
                    }
                }
                if let Some(t) = m.cyclic(x) {
                    let mut y = t.clone();
                    for _ in 0..q {
                        y = m.cyclic(&y).unwrap();
                    }
                    if y != *x {
                        return fail("t^{q+1} = id", x);
                    }
                    if m.weight(&t) != m.weight(x) {
                        return fail("weight under t", x);
                    }
                    if q >= 1 {
                        for i in 1..=q {
                            if m.face(&t, i) != m.cyclic(&m.face(x, i - 1)).unwrap() {
                                return fail("d_i t = t d_{i-1}", x);
                            }
                        }
                        if m.face(&t, 0) != m.face(x, q) {
                            return fail("d_0 t = d_q", x);
                        }
                    }
                    for i in 1..=q {
                        if m.degeneracy(&t, i) != m.cyclic(&m.degeneracy(x, i - 1)).unwrap() {
                            return fail("s_i t = t s_{i-1}", x);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON view `{degrees, faces, cyclic}` with faces as `[base, word]`.
    pub fn to_json(&self) -> Value {
        let mut degrees = BTreeMap::new();
        let mut faces = BTreeMap::new();
        let mut cyclic = BTreeMap::new();
        for q in 0..=self.top {
            let labels: Vec<String> = self.cells(q).iter().map(|x| self.model.label(x)).collect();
            degrees.insert(q.to_string(), json!(labels));
            let f: Vec<Value> = self.faces[q]
                .iter()
                .map(|row| json!(row.iter().map(|fi| json!([fi.base, fi.word])).collect::<Vec<_>>()))
                .collect();
            faces.insert(q.to_string(), json!(f));
            if let Ok(Some(t)) = self.cyclic_images(q) {
                cyclic.insert(
                    q.to_string(),
                    json!(t.iter().map(|(d, fi)| json!([d, fi.base, fi.word])).collect::<Vec<_>>()),
                );
            }
        }
        json!({ "degrees": degrees, "faces": faces, "cyclic": cyclic })
    }
}

/// Restriction of a graded model to simplices whose weight lies in a set.
pub struct WeightComponent<M: SimplicialModel> {
    pub inner: M,
    pub weights: DegreeSet,
}

impl<M: SimplicialModel> SimplicialModel for WeightComponent<M> {
    type Simplex = M::Simplex;

    fn dim(&self, x: &Self::Simplex) -> usize {
        self.inner.dim(x)
    }
    fn face(&self, x: &Self::Simplex, i: usize) -> Self::Simplex {
        self.inner.face(x, i)
    }
    fn degeneracy(&self, x: &Self::Simplex, i: usize) -> Self::Simplex {
        self.inner.degeneracy(x, i)
    }
    fn nondegenerate(&self, q: usize) -> Vec<Self::Simplex> {
        let mut v = self.inner.nondegenerate(q);
        v.retain(|x| self.contains(x));
        v
    }
    fn contains(&self, x: &Self::Simplex) -> bool {
        self.inner.contains(x) && self.weights.contains(self.inner.weight(x).unwrap_or(0))
    }
    fn cyclic(&self, x: &Self::Simplex) -> Option<Self::Simplex> {
        self.inner.cyclic(x)
    }
    fn weight(&self, x: &Self::Simplex) -> Option<i64> {
        self.inner.weight(x)
    }
    fn multiply(&self, a: &Self::Simplex, b: &Self::Simplex) -> Option<Self::Simplex> {
        self.inner.multiply(a, b)
    }
    fn label(&self, x: &Self::Simplex) -> String {
        self.inner.label(x)
    }
    fn degeneracy_positions(&self, x: &Self::Simplex) -> Vec<usize> {
        self.inner.degeneracy_positions(x)
    }
}

/// Sub-cyclic-set of simplices with weight in `s`; simplices without a weight count as weight 0.
pub fn weight_component<M: SimplicialModel>(inner: M, s: DegreeSet) -> WeightComponent<M> {
    WeightComponent { inner, weights: s }
}

/// A map of simplicial sets given on labels, validated on every stored simplex.
pub struct SimplicialMap<'a, X: SimplicialModel, Y: SimplicialModel> {
    pub source: &'a SimplicialSet<X>,
    pub target: &'a SimplicialSet<Y>,
    f: Box<dyn Fn(&X::Simplex) -> Y::Simplex + Sync + 'a>,
}

impl<'a, X: SimplicialModel, Y: SimplicialModel> SimplicialMap<'a, X, Y> {
    pub fn new(
        source: &'a SimplicialSet<X>,
        target: &'a SimplicialSet<Y>,
        f: impl Fn(&X::Simplex) -> Y::Simplex + Sync + 'a,
    ) -> Result<Self> {
        let map = SimplicialMap { source, target, f: Box::new(f) };
        map.validate()?;
        Ok(map)
    }

    pub fn apply(&self, x: &X::Simplex) -> Y::Simplex {
        (self.f)(x)
    }

    fn validate(&self) -> Result<()> {
        let (xm, ym) = (self.source.model(), self.target.model());
        let top = self.source.top().min(self.target.top());
        for q in 0..=top {
            for x in self.source.cells(q) {
                let fx = self.apply(x);
                if !ym.contains(&fx) || ym.dim(&fx) != q {
                    return Err(Error::NotSimplicial(format!("image of {} not in target", xm.label(x))));
                }
                for i in (0..=q).filter(|_| q > 0) {
                    if self.apply(&xm.face(x, i)) != ym.face(&fx, i) {
                        return Err(Error::NotSimplicial(format!("d_{i} at {}", xm.label(x))));
                    }
                }
                for i in 0..=q {
                    if self.apply(&xm.degeneracy(x, i)) != ym.degeneracy(&fx, i) {
                        return Err(Error::NotSimplicial(format!("s_{i} at {}", xm.label(x))));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether the map also commutes with the cyclic operators.
    pub fn is_cyclic(&self) -> bool {
        let (xm, ym) = (self.source.model(), self.target.model());
        (0..=self.source.top().min(self.target.top())).all(|q| {
            self.source.cells(q).iter().all(|x| match (xm.cyclic(x), ym.cyclic(&self.apply(x))) {
                (Some(tx), Some(ty)) => self.apply(&tx) == ty,
                _ => false,
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_word_counts() {
        // Total simplices of Δ-type counts: words of length k on a j-simplex.
        assert_eq!(canonical_words(0, 2), vec![vec![0, 1]]);
        assert_eq!(canonical_words(1, 1).len(), 2);
        assert_eq!(canonical_words(1, 2).len(), 3);
    }
}
