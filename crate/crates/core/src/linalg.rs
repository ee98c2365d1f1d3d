//! Sparse exact elimination over F_p.
//!
//! Vectors are sorted `(index, coefficient)` lists with nonzero coefficients.
//! An [`Echelon`] keeps rows keyed by their largest index, so reduction only
//! ever clears the trailing entry.

use std::collections::HashMap;

use crate::field::Fp;

pub type SparseVec = Vec<(usize, u32)>;

/// `y + c·x`.
pub fn axpy(f: &Fp, y: &[(usize, u32)], c: u32, x: &[(usize, u32)]) -> SparseVec {
    if c == 0 {
        return y.to_vec();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        if j == x.len() || (i < y.len() && y[i].0 < x[j].0) {
            out.push(y[i]);
            i += 1;
        } else if i == y.len() || x[j].0 < y[i].0 {
            out.push((x[j].0, f.mul(c, x[j].1)));
            j += 1;
        } else {
            let v = f.add(y[i].1, f.mul(c, x[j].1));
            if v != 0 {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(f: &Fp, c: u32, x: &[(usize, u32)]) -> SparseVec {
    if c % f.p() == 0 {
        return Vec::new();
    }
    x.iter().map(|&(i, v)| (i, f.mul(c, v))).collect()
}

/// Builds a sorted sparse vector from unsorted terms, summing repeats.
pub fn collect(f: &Fp, terms: impl IntoIterator<Item = (usize, u32)>) -> SparseVec {
    let mut v: Vec<(usize, u32)> = terms.into_iter().collect();
    v.sort_unstable_by_key(|t| t.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = f.add(last.1, c),
            _ => out.push((i, c % f.p())),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

/// A sparse matrix stored by columns.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: Vec<SparseVec>) -> Self {
        SparseMatrix { rows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, f: &Fp, v: &[(usize, u32)]) -> SparseVec {
        let mut acc = Vec::new();
        for &(j, c) in v {
            acc = axpy(f, &acc, c, &self.cols[j]);
        }
        acc
    }

    pub fn rank(&self, f: &Fp) -> usize {
        let mut e = Echelon::new(*f);
        let mut r = 0;
        for c in &self.cols {
            if e.insert(c.clone(), Vec::new()) {
                r += 1;
            }
        }
        r
    }

    /// Dense row-major view, for small displays and tests.
    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut d = vec![vec![0; self.cols.len()]; self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                d[i][j] = v;
            }
        }
        d
    }
}

#[derive(Clone, Debug)]
struct Row {
    vec: SparseVec,
    tag: SparseVec,
}

/// Row echelon basis with pivot = largest index, carrying a tag vector per row.
#[derive(Clone, Debug)]
pub struct Echelon {
    f: Fp,
    rows: HashMap<usize, Row>,
}

impl Echelon {
    pub fn new(f: Fp) -> Self {
        Echelon { f, rows: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` (with tag `tag`) until its trailing index is not a pivot.
    /// Returns the remainder and the tag accumulated with the same operations.
    pub fn reduce(&self, mut v: SparseVec, mut tag: SparseVec) -> (SparseVec, SparseVec) {
        let f = &self.f;
        while let Some(&(piv, c)) = v.last() {
            let Some(row) = self.rows.get(&piv) else { break };
            let lead = row.vec.last().unwrap().1;
            let factor = f.neg(f.mul(c, f.inv(lead)));
            v = axpy(f, &v, factor, &row.vec);
            tag = axpy(f, &tag, factor, &row.tag);
        }
        (v, tag)
    }

    /// Clears every pivot index of `v`; the result is a normal form modulo the span.
    pub fn reduce_full(&self, mut v: SparseVec, mut tag: SparseVec) -> (SparseVec, SparseVec) {
        let f = &self.f;
        let mut bound = usize::MAX;
        while let Some(&(piv, c)) = v.iter().rev().find(|(i, _)| *i < bound && self.rows.contains_key(i)) {
            let row = &self.rows[&piv];
            let lead = row.vec.last().unwrap().1;
            let factor = f.neg(f.mul(c, f.inv(lead)));
            v = axpy(f, &v, factor, &row.vec);
            tag = axpy(f, &tag, factor, &row.tag);
            bound = piv;
        }
        (v, tag)
    }

    /// Inserts `v` after reduction; returns false if it was already in the span.
    pub fn insert(&mut self, v: SparseVec, tag: SparseVec) -> bool {
        let (v, tag) = self.reduce(v, tag);
        self.insert_reduced(v, tag)
    }

    /// Inserts an already reduced vector.
    pub fn insert_reduced(&mut self, v: SparseVec, tag: SparseVec) -> bool {
        match v.last() {
            None => false,
            Some(&(piv, _)) => {
                debug_assert!(!self.rows.contains_key(&piv));
                self.rows.insert(piv, Row { vec: v, tag });
                true
            }
        }
    }

    pub fn contains(&self, v: &[(usize, u32)]) -> bool {
        self.reduce(v.to_vec(), Vec::new()).0.is_empty()
    }
}

/// Kernel basis of a column matrix, as combinations of its columns, in column order.
pub fn kernel(f: &Fp, m: &SparseMatrix) -> Vec<SparseVec> {
    let mut e = Echelon::new(*f);
    let mut ker = Vec::new();
    for (j, c) in m.cols.iter().enumerate() {
        let (v, tag) = e.reduce(c.clone(), vec![(j, 1)]);
        if v.is_empty() {
            ker.push(tag);
        } else {
            e.insert_reduced(v, tag);
        }
    }
    ker
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_rank(f: &Fp, mut m: Vec<Vec<u32>>) -> usize {
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, piv);
            let inv = f.inv(m[r][c]);
            for i in 0..rows {
                if i != r && m[i][c] != 0 {
                    let factor = f.mul(m[i][c], inv);
                    for k in 0..cols {
                        let s = f.mul(factor, m[r][k]);
                        m[i][k] = f.sub(m[i][k], s);
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn rank_matches_dense_elimination() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &p in &[2u32, 3, 5] {
            let f = Fp::new(p).unwrap();
            for _ in 0..200 {
                let rows = rng.gen_range(1..7);
                let ncols = rng.gen_range(1..7);
                let cols: Vec<SparseVec> = (0..ncols)
                    .map(|_| {
                        collect(
                            &f,
                            (0..rows).filter_map(|i| {
                                let v = rng.gen_range(0..p);
                                (v != 0 && rng.gen_bool(0.5)).then_some((i, v))
                            }),
                        )
                    })
                    .collect();
                let m = SparseMatrix::new(rows, cols);
                assert_eq!(m.rank(&f), dense_rank(&f, m.to_dense()));
                let mut e = Echelon::new(f);
                for c in &m.cols {
                    e.insert(c.clone(), Vec::new());
                }
                for c in &m.cols {
                    let (w, _) = e.reduce_full(c.clone(), Vec::new());
                    assert!(w.is_empty());
                }
                let ker = kernel(&f, &m);
                assert_eq!(ker.len() + m.rank(&f), m.ncols());
                for k in &ker {
                    assert!(m.apply(&f, k).is_empty());
                }
            }
        }
    }
}
