//! Normalized chains over F_p, homology with explicit representatives,
//! induced maps, and the shuffle product on simplicial monoids.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{collect, kernel, Echelon, SparseMatrix, SparseVec};
use crate::monoid::{DegreeSet, GradedCommMonoid};
use crate::sset::{degenerate, normalize, BarKind, BarModel, SimplicialMap, SimplicialModel, SimplicialSet};

/// Chains on labels, coefficients in F_p.
pub type LabelChain<S> = BTreeMap<S, u32>;

#[derive(Clone, Debug)]
pub struct ChainComplex {
    f: Fp,
    dims: Vec<usize>,
    /// `boundary[q] : C_q → C_{q−1}`; `boundary[0]` has no rows.
    boundary: Vec<SparseMatrix>,
    /// Whether `C_{top+1} = 0`.
    complete: bool,
}

impl ChainComplex {
    pub fn new(p: u32, dims: Vec<usize>, boundary: Vec<SparseMatrix>, complete: bool) -> Result<Self> {
        let f = Fp::new(p)?;
        if boundary.len() != dims.len() {
            return Err(Error::Inconsistent("one boundary matrix per degree".into()));
        }
        for (q, b) in boundary.iter().enumerate() {
            let rows = if q == 0 { 0 } else { dims[q - 1] };
            if b.rows != rows || b.ncols() != dims[q] || b.cols.iter().flatten().any(|&(i, _)| i >= rows) {
                return Err(Error::Inconsistent(format!("boundary shape in degree {q}")));
            }
        }
        let c = ChainComplex { f, dims, boundary, complete };
        c.check_d_squared()?;
        Ok(c)
    }

    fn check_d_squared(&self) -> Result<()> {
        for q in 2..self.dims.len() {
            for (j, col) in self.boundary[q].cols.iter().enumerate() {
                if !self.boundary[q - 1].apply(&self.f, col).is_empty() {
                    return Err(Error::DSquaredNonzero { witness: format!("cell {j} in degree {q}") });
                }
            }
        }
        Ok(())
    }

    /// Normalized chains of a materialized set: `∂ = Σ (−1)^i d_i`, degenerate faces dropped.
    pub fn normalized<M: SimplicialModel>(x: &SimplicialSet<M>, p: u32) -> Result<Self> {
        let f = Fp::new(p)?;
        let dims = x.counts();
        let boundary: Vec<SparseMatrix> = (0..=x.top())
            .into_par_iter()
            .map(|q| {
                if q == 0 {
                    return SparseMatrix::new(0, vec![Vec::new(); dims[0]]);
                }
                let cols = (0..dims[q])
                    .map(|j| {
                        collect(
                            &f,
                            x.faces(q, j)
                                .iter()
                                .enumerate()
                                .filter(|(_, fi)| fi.word.is_empty())
                                .map(|(i, fi)| (fi.base, f.sign(i % 2 == 1))),
                        )
                    })
                    .collect();
                SparseMatrix::new(dims[q - 1], cols)
            })
            .collect();
        let c = ChainComplex { f, dims, boundary, complete: false };
        c.check_d_squared()?;
        Ok(c)
    }

    pub fn field(&self) -> Fp {
        self.f
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn boundary(&self, q: usize) -> &SparseMatrix {
        &self.boundary[q]
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(q, &d)| if q % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    /// Homology in degrees `0..=through`; needs `∂_{through+1}` unless the complex is complete.
    pub fn homology(&self, through: usize) -> Result<Homology> {
        if through > self.top() || (through == self.top() && !self.complete) {
            return Err(Error::WindowTooSmall(format!(
                "homology through degree {through} needs chains through degree {}",
                through + 1
            )));
        }
        let groups = (0..=through).into_par_iter().map(|q| self.group(q)).collect();
        Ok(Homology { f: self.f, groups })
    }

    fn group(&self, q: usize) -> HomologyGroup {
        let f = self.f;
        let mut reducer = Echelon::new(f);
        if q < self.top() {
            for c in &self.boundary[q + 1].cols {
                reducer.insert(c.clone(), Vec::new());
            }
        }
        let cycles: Vec<SparseVec> = if q == 0 {
            (0..self.dims[0]).map(|j| vec![(j, 1)]).collect()
        } else {
            kernel(&f, &self.boundary[q])
        };
        let mut reps = Vec::new();
        for z in cycles {
            let k = reps.len();
            let (rem, tag) = reducer.reduce(z.clone(), vec![(k, 1)]);
            if !rem.is_empty() {
                reducer.insert_reduced(rem, tag);
                reps.push(z);
            }
        }
        HomologyGroup { degree: q, dim: reps.len(), reps, reducer, cells: self.dims[q] }
    }
}

#[derive(Clone, Debug)]
pub struct HomologyGroup {
    pub degree: usize,
    pub dim: usize,
    /// Cycle representatives of a basis.
    pub reps: Vec<SparseVec>,
    reducer: Echelon,
    cells: usize,
}

#[derive(Clone, Debug)]
pub struct Homology {
    f: Fp,
    groups: Vec<HomologyGroup>,
}

impl Homology {
    pub fn dims(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.dim).collect()
    }

    pub fn group(&self, q: usize) -> &HomologyGroup {
        &self.groups[q]
    }

    pub fn through(&self) -> usize {
        self.groups.len() - 1
    }

    /// Coordinates of the class of a cycle in the representative basis.
    pub fn class_of(&self, c: &ChainComplex, q: usize, z: &[(usize, u32)]) -> Result<Vec<u32>> {
        let g = &self.groups[q];
        if z.iter().any(|&(i, _)| i >= g.cells) {
            return Err(Error::Inconsistent("chain index out of range".into()));
        }
        if q > 0 && !c.boundary(q).apply(&self.f, z).is_empty() {
            return Err(Error::Inconsistent(format!("not a cycle in degree {q}")));
        }
        let (rem, tag) = g.reducer.reduce(z.to_vec(), Vec::new());
        debug_assert!(rem.is_empty());
        let mut out = vec![0; g.dim];
        for (k, v) in tag {
            out[k] = self.f.neg(v);
        }
        Ok(out)
    }
}

/// Homology dimensions `0..=max_degree` of a set materialized through `max_degree + 1`.
pub fn homology_dims<M: SimplicialModel>(x: &SimplicialSet<M>, p: u32, max_degree: usize) -> Result<Vec<usize>> {
    Ok(ChainComplex::normalized(x, p)?.homology(max_degree)?.dims())
}

/// Converts a label chain into cell coordinates; degenerate labels vanish.
pub fn chain_from_labels<M: SimplicialModel>(
    x: &SimplicialSet<M>,
    f: &Fp,
    chain: &LabelChain<M::Simplex>,
) -> Result<SparseVec> {
    let mut terms = Vec::new();
    for (s, &c) in chain {
        if !x.model().degeneracy_positions(s).is_empty() {
            continue;
        }
        let j = x.index_of(s).ok_or_else(|| Error::FaceOutsideComplex(x.model().label(s)))?;
        terms.push((j, c));
    }
    Ok(collect(f, terms))
}

pub fn chain_to_labels<M: SimplicialModel>(x: &SimplicialSet<M>, q: usize, v: &[(usize, u32)]) -> LabelChain<M::Simplex> {
    v.iter().map(|&(j, c)| (x.cells(q)[j].clone(), c)).collect()
}

/// Matrix of `f_*` in degree `q`, rows indexed by target classes.
pub fn induced_map<X: SimplicialModel, Y: SimplicialModel>(
    map: &SimplicialMap<'_, X, Y>,
    cx: &ChainComplex,
    hx: &Homology,
    cy: &ChainComplex,
    hy: &Homology,
    q: usize,
) -> Result<Vec<Vec<u32>>> {
    let f = cx.field();
    let mut cols = Vec::new();
    for rep in &hx.group(q).reps {
        let mut terms = Vec::new();
        for &(j, c) in rep {
            let img = map.apply(&map.source.cells(q)[j]);
            let (base, word) = normalize(map.target.model(), &img);
            if word.is_empty() {
                let k = map.target.index_of(&base).ok_or_else(|| Error::FaceOutsideComplex(map.target.model().label(&base)))?;
                terms.push((k, c));
            }
        }
        cols.push(hy.class_of(cy, q, &collect(&f, terms))?);
    }
    let rows = hy.group(q).dim;
    Ok((0..rows).map(|r| cols.iter().map(|col| col[r]).collect()).collect())
}

fn shuffles(p: usize, q: usize) -> Vec<(Vec<usize>, Vec<usize>, bool)> {
    let n = p + q;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != p {
            continue;
        }
        let mu: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let nu: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
        let inversions: usize = mu.iter().map(|&m| nu.iter().filter(|&&v| v < m).count()).sum();
        out.push((mu, nu, inversions % 2 == 1));
    }
    out
}

/// Eilenberg–Zilber shuffle product `a·b = Σ sgn(μ,ν) s_ν(a)·s_μ(b)` in normalized chains.
pub fn shuffle_product<M: SimplicialModel>(
    m: &M,
    f: &Fp,
    a: &LabelChain<M::Simplex>,
    b: &LabelChain<M::Simplex>,
) -> Result<LabelChain<M::Simplex>> {
    let mut out: LabelChain<M::Simplex> = BTreeMap::new();
    let (Some(pa), Some(pb)) = (a.keys().next().map(|x| m.dim(x)), b.keys().next().map(|x| m.dim(x))) else {
        return Ok(out);
    };
    if a.keys().any(|x| m.dim(x) != pa) || b.keys().any(|x| m.dim(x) != pb) {
        return Err(Error::Inconsistent("shuffle factors must be homogeneous".into()));
    }
    if pa + pb > 24 {
        return Err(Error::WindowTooSmall("shuffle degree cap is 24".into()));
    }
    for (mu, nu, odd) in shuffles(pa, pb) {
        for (x, &cx) in a {
            let sx = degenerate(m, x, &nu);
            for (y, &cy) in b {
                let sy = degenerate(m, y, &mu);
                let prod = m.multiply(&sx, &sy).ok_or(Error::NoMonoidStructure)?;
                if !m.contains(&prod) {
                    return Err(Error::WindowTooSmall(format!("product {} leaves the window", m.label(&prod))));
                }
                if !m.degeneracy_positions(&prod).is_empty() {
                    continue;
                }
                let c = f.mul(f.sign(odd), f.mul(cx, cy));
                let e = out.entry(prod).or_insert(0);
                *e = f.add(*e, c);
            }
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightRow {
    pub weight: i64,
    pub exact: bool,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyTable {
    pub p: u32,
    pub bound: i64,
    pub max_degree: usize,
    pub rows: Vec<WeightRow>,
}

/// Homology of each weight component of a bar window, one row per weight.
pub fn bar_homology_table(
    n: &GradedCommMonoid,
    kind: BarKind,
    weights: &[i64],
    bound: i64,
    max_degree: usize,
    p: u32,
) -> Result<HomologyTable> {
    let rows = weights
        .iter()
        .map(|&w| {
            let model = BarModel::new(n, kind, bound, DegreeSet::single(w))?;
            let exact = model.is_exact();
            let x = SimplicialSet::build(model, max_degree + 1)?;
            Ok(WeightRow { weight: w, exact, dims: homology_dims(&x, p, max_degree)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomologyTable { p, bound, max_degree, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::{bcy, brep, repletion_map, PointModel};

    fn point(top: usize) -> SimplicialSet<PointModel> {
        SimplicialSet::build(PointModel, top).unwrap()
    }

    #[test]
    fn point_and_circle() {
        let c = ChainComplex::normalized(&point(4), 3).unwrap();
        assert_eq!(c.dims(), &[1, 0, 0, 0, 0]);
        assert_eq!(c.homology(3).unwrap().dims(), vec![1, 0, 0, 0]);
        let x = GradedCommMonoid::named("free1").unwrap();
        let s = bcy(&x, DegreeSet::single(2), 2, 4).unwrap();
        for p in [2, 3, 5] {
            assert_eq!(homology_dims(&s, p, 3).unwrap(), vec![1, 1, 0, 0]);
        }
    }

    #[test]
    fn homology_window_errors() {
        let c = ChainComplex::normalized(&point(2), 2).unwrap();
        assert!(matches!(c.homology(2), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn explicit_complex_rejects_d_squared() {
        let d1 = SparseMatrix::new(1, vec![vec![(0, 1)]]);
        let d2 = SparseMatrix::new(1, vec![vec![(0, 1)]]);
        let r = ChainComplex::new(2, vec![1, 1, 1], vec![SparseMatrix::new(0, vec![vec![]]), d1, d2], true);
        assert!(matches!(r, Err(Error::DSquaredNonzero { .. })));
    }

    #[test]
    fn class_coordinates_of_boundary_shifted_cycles() {
        let x = GradedCommMonoid::named("free1").unwrap();
        let s = bcy(&x, DegreeSet::single(3), 3, 4).unwrap();
        let f = Fp::new(5).unwrap();
        let c = ChainComplex::normalized(&s, 5).unwrap();
        let h = c.homology(2).unwrap();
        let z = h.group(1).reps[0].clone();
        let b = c.boundary(2).cols[0].clone();
        let shifted = crate::linalg::axpy(&f, &z, 3, &b);
        let mut coords = h.class_of(&c, 1, &shifted).unwrap();
        coords.iter_mut().for_each(|v| *v %= 5);
        assert_eq!(coords, vec![1]);
    }

    #[test]
    fn replete_contains_dx_as_product() {
        // s_0(1)·(−1, 1) = (0, 1): the unit-weight circle is a product.
        let x = GradedCommMonoid::named("free1").unwrap();
        let rep = brep(&x, DegreeSet::All, 2, 2).unwrap();
        let f = Fp::new(3).unwrap();
        let a: LabelChain<_> = [(vec![vec![1]], 1)].into();
        let b: LabelChain<_> = [(vec![vec![-1], vec![1]], 1)].into();
        let prod = shuffle_product(rep.model(), &f, &a, &b).unwrap();
        let expect: LabelChain<_> = [(vec![vec![0], vec![1]], 1)].into();
        assert_eq!(prod, expect);
    }

    #[test]
    fn shuffle_of_circle_classes_is_graded_commutative() {
        let z = GradedCommMonoid::named("free2").unwrap();
        let s = bcy(&z, DegreeSet::All, 2, 3).unwrap();
        let f = Fp::new(5).unwrap();
        let a: LabelChain<_> = [(vec![vec![0, 0], vec![1, 0]], 1)].into();
        let b: LabelChain<_> = [(vec![vec![0, 0], vec![0, 1]], 1)].into();
        let ab = shuffle_product(s.model(), &f, &a, &b).unwrap();
        let ba = shuffle_product(s.model(), &f, &b, &a).unwrap();
        let neg: LabelChain<_> = ba.into_iter().map(|(k, v)| (k, f.neg(v))).collect();
        assert_eq!(ab, neg);
        assert_eq!(ab.len(), 2);
    }

    #[test]
    fn repletion_induces_iso_in_positive_weight() {
        let x = GradedCommMonoid::named("free1").unwrap();
        let cy = bcy(&x, DegreeSet::single(2), 6, 3).unwrap();
        let rep = brep(&x, DegreeSet::single(2), 6, 3).unwrap();
        let rho = repletion_map(&cy, &rep).unwrap();
        let (cc, cr) = (ChainComplex::normalized(&cy, 3).unwrap(), ChainComplex::normalized(&rep, 3).unwrap());
        let (hc, hr) = (cc.homology(2).unwrap(), cr.homology(2).unwrap());
        assert_eq!(hc.dims(), hr.dims());
        for q in 0..=2 {
            let m = induced_map(&rho, &cc, &hc, &cr, &hr, q).unwrap();
            assert_eq!(m.len(), hc.dims()[q]);
            if !m.is_empty() {
                let cols: Vec<SparseVec> = (0..m[0].len())
                    .map(|j| (0..m.len()).filter(|&i| m[i][j] != 0).map(|i| (i, m[i][j])).collect())
                    .collect();
                assert_eq!(SparseMatrix::new(m.len(), cols).rank(&Fp::new(3).unwrap()), m.len());
            }
        }
    }
}
