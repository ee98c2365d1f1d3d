//! Finitely generated cancellative commutative monoids realized inside Z^d,
//! graded by a linear functional.
//!
//! Membership is exact for groups (lattice reduction) and for positively
//! graded monoids (search bounded by degree). Otherwise it is a breadth-first
//! search confined to the box of radius `|v|∞ + (d+1)·max|g|∞`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Elem = Vec<i64>;

const MAX_RANK: usize = 8;
const MAX_GENERATORS: usize = 64;
const MAX_ENTRY: i64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidSpec {
    pub rank: usize,
    pub generators: Vec<Vec<i64>>,
    pub degree: Vec<i64>,
    #[serde(default)]
    pub group: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedCommMonoid {
    rank: usize,
    generators: Vec<Elem>,
    degree: Vec<i64>,
    group: bool,
    basis: Vec<Elem>,
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

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Hermite normal form of the row lattice, restricting pivots to the first
/// `pivot_cols` columns. Returns `(rank, rows)`; rows past `rank` are zero on
/// the pivot columns. `None` on arithmetic overflow.
fn hermite(mut m: Vec<Vec<i64>>, pivot_cols: usize) -> Option<(usize, Vec<Vec<i64>>)> {
    fn sub_row(x: &mut [i64], q: i64, y: &[i64]) -> Option<()> {
        for (a, b) in x.iter_mut().zip(y) {
            *a = a.checked_sub(q.checked_mul(*b)?)?;
        }
        Some(())
    }
    let mut r = 0;
    for col in 0..pivot_cols {
        loop {
            let best = (r..m.len()).filter(|&i| m[i][col] != 0).min_by_key(|&i| m[i][col].unsigned_abs());
            let Some(best) = best else { break };
            m.swap(r, best);
            let mut clean = true;
            for i in r + 1..m.len() {
                if m[i][col] != 0 {
                    let q = m[i][col].div_euclid(m[r][col]);
                    let row = m[r].clone();
                    sub_row(&mut m[i], q, &row)?;
                    if m[i][col] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                if m[r][col] < 0 {
                    for x in m[r].iter_mut() {
                        *x = x.checked_neg()?;
                    }
                }
                for i in 0..r {
                    let q = m[i][col].div_euclid(m[r][col]);
                    let row = m[r].clone();
                    sub_row(&mut m[i], q, &row)?;
                }
                r += 1;
                break;
            }
        }
    }
    Some((r, m))
}

/// Canonical basis (Hermite normal form) of the subgroup generated by `gens`.
pub fn lattice_basis(gens: &[Elem], rank: usize) -> Result<Vec<Elem>> {
    if rank == 0 {
        return Ok(Vec::new());
    }
    let (r, m) = hermite(gens.to_vec(), rank).ok_or_else(overflow)?;
    Ok(m.into_iter().take(r).collect())
}

fn overflow() -> Error {
    Error::InvalidMonoid("lattice reduction overflows".into())
}

/// Coordinates of `v` in a Hermite basis, or `None` if `v` is outside the lattice.
fn lattice_coords(basis: &[Elem], v: &[i64]) -> Option<Vec<i64>> {
    let mut v = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let col = row.iter().position(|&x| x != 0).unwrap();
        if v[col] % row[col] != 0 {
            return None;
        }
        let q = v[col] / row[col];
        coords.push(q);
        v = sub(&v, &row.iter().map(|x| q * x).collect::<Vec<_>>());
    }
    v.iter().all(|&x| x == 0).then_some(coords)
}

impl GradedCommMonoid {
    pub fn new(rank: usize, generators: Vec<Elem>, degree: Vec<i64>) -> Result<Self> {
        Self::build(rank, generators, degree, false)
    }

    /// The subgroup of Z^rank generated by `generators`.
    pub fn group(rank: usize, generators: Vec<Elem>, degree: Vec<i64>) -> Result<Self> {
        Self::build(rank, generators, degree, true)
    }

    fn build(rank: usize, generators: Vec<Elem>, degree: Vec<i64>, group: bool) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::InvalidMonoid(format!("rank {rank} exceeds {MAX_RANK}")));
        }
        if generators.len() > MAX_GENERATORS {
            return Err(Error::InvalidMonoid("too many generators".into()));
        }
        if degree.len() != rank {
            return Err(Error::InvalidMonoid("degree functional has the wrong length".into()));
        }
        for g in &generators {
            if g.len() != rank {
                return Err(Error::InvalidMonoid(format!("generator {g:?} not in Z^{rank}")));
            }
            if norm(g) > MAX_ENTRY {
                return Err(Error::InvalidMonoid("generator entries too large".into()));
            }
        }
        if norm(&degree) > MAX_ENTRY {
            return Err(Error::InvalidMonoid("degree entries too large".into()));
        }
        let mut gens: Vec<Elem> = generators.into_iter().filter(|g| g.iter().any(|&x| x != 0)).collect();
        let basis = lattice_basis(&gens, rank)?;
        if group {
            gens = basis.iter().cloned().chain(basis.iter().map(|b| b.iter().map(|x| -x).collect())).collect();
        }
        gens.sort();
        gens.dedup();
        Ok(GradedCommMonoid { rank, generators: gens, degree, group, basis })
    }

    pub fn from_spec(spec: &MonoidSpec) -> Result<Self> {
        Self::build(spec.rank, spec.generators.clone(), spec.degree.clone(), spec.group)
    }

    pub fn to_spec(&self) -> MonoidSpec {
        MonoidSpec {
            rank: self.rank,
            generators: self.generators.clone(),
            degree: self.degree.clone(),
            group: self.group,
        }
    }

    /// Parses the JSON form `{rank, generators, degree, group?}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: MonoidSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).unwrap()
    }

    /// Named monoids: `trivial`, `free1`, `free2`, `z`, `dN:<d>`, `dZ:<d>`.
    pub fn named(name: &str) -> Result<Self> {
        let scaled = |d: &str| -> Result<i64> {
            d.parse::<i64>()
                .ok()
                .filter(|&d| d >= 1 && d <= MAX_ENTRY)
                .ok_or_else(|| Error::Parse(format!("bad scale in {name:?}")))
        };
        match name {
            "trivial" => Self::new(0, vec![], vec![]),
            "free1" => Self::free_rank_one(1),
            "free2" => Self::new(2, vec![vec![1, 0], vec![0, 1]], vec![1, 1]),
            "z" => Self::group(1, vec![vec![1]], vec![1]),
            _ => match name.split_once(':') {
                Some(("dN", d)) => Self::new(1, vec![vec![scaled(d)?]], vec![1]),
                Some(("dZ", d)) => Self::group(1, vec![vec![scaled(d)?]], vec![1]),
                Some(("free1", d)) => Self::free_rank_one(scaled(d)?),
                _ => Err(Error::Parse(format!("unknown monoid {name:?}"))),
            },
        }
    }

    /// `⟨x⟩ = N₀` with `deg x = d`.
    pub fn free_rank_one(d: i64) -> Result<Self> {
        Self::new(1, vec![vec![1]], vec![d])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn degree_functional(&self) -> &[i64] {
        &self.degree
    }

    pub fn is_group(&self) -> bool {
        self.group
    }

    pub fn unit(&self) -> Elem {
        vec![0; self.rank]
    }

    pub fn degree(&self, v: &[i64]) -> i64 {
        v.iter().zip(&self.degree).map(|(x, y)| x * y).sum()
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Elem {
        add(a, b)
    }

    fn positively_graded(&self) -> bool {
        self.generators.iter().all(|g| self.degree(g) > 0)
    }

    /// Not a group and every generator has positive degree; then each degree is finite.
    pub fn is_positively_graded(&self) -> bool {
        !self.group && self.positively_graded()
    }

    pub fn max_generator_norm(&self) -> i64 {
        self.max_gen_norm()
    }

    fn max_gen_norm(&self) -> i64 {
        self.generators.iter().map(|g| norm(g)).max().unwrap_or(0)
    }

    fn search_margin(&self) -> i64 {
        (self.rank as i64 + 1) * self.max_gen_norm()
    }

    /// Hermite basis of the group completion.
    pub fn group_basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.rank {
            return false;
        }
        if v.iter().all(|&x| x == 0) {
            return true;
        }
        if self.group {
            return lattice_coords(&self.basis, v).is_some();
        }
        if lattice_coords(&self.basis, v).is_none() {
            return false;
        }
        if self.positively_graded() {
            let target = self.degree(v);
            if target <= 0 {
                return false;
            }
            return self.reachable_by_degree(target).contains(v);
        }
        let radius = norm(v) + self.search_margin();
        self.reachable_in_box(radius).contains(v)
    }

    fn reachable_by_degree(&self, max_degree: i64) -> HashSet<Elem> {
        let mut seen: HashSet<Elem> = HashSet::new();
        let mut queue = VecDeque::from([self.unit()]);
        seen.insert(self.unit());
        while let Some(v) = queue.pop_front() {
            for g in &self.generators {
                let w = add(&v, g);
                if self.degree(&w) <= max_degree && seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    fn reachable_in_box(&self, radius: i64) -> HashSet<Elem> {
        let mut seen: HashSet<Elem> = HashSet::new();
        let mut queue = VecDeque::from([self.unit()]);
        seen.insert(self.unit());
        while let Some(v) = queue.pop_front() {
            for g in &self.generators {
                let w = add(&v, g);
                if norm(&w) <= radius && seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Elements of sup-norm at most `radius`, sorted lexicographically.
    pub fn elements_in_box(&self, radius: i64) -> Vec<Elem> {
        let radius = radius.max(0);
        let pool = if self.positively_graded() && !self.group {
            let dmax = radius * self.degree.iter().map(|x| x.abs()).sum::<i64>();
            self.reachable_by_degree(dmax)
        } else {
            self.reachable_in_box(radius + self.search_margin())
        };
        let mut out: Vec<Elem> = pool.into_iter().filter(|v| norm(v) <= radius).collect();
        out.sort();
        out
    }

    /// Elements of degree at most `max_degree`, when that set is finite.
    pub fn elements_up_to_degree(&self, max_degree: i64) -> Result<Vec<Elem>> {
        if !self.positively_graded() || self.group {
            return Err(Error::WindowTooSmall(
                "degree alone does not bound a monoid that is not positively graded".into(),
            ));
        }
        let mut out: Vec<Elem> = self.reachable_by_degree(max_degree).into_iter().collect();
        out.sort();
        Ok(out)
    }

    fn is_pointed_in_box(&self, radius: i64) -> bool {
        self.elements_in_box(radius)
            .iter()
            .all(|v| v.iter().all(|&x| x == 0) || !self.contains(&v.iter().map(|x| -x).collect::<Vec<_>>()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidMap {
    pub source: GradedCommMonoid,
    pub target: GradedCommMonoid,
    /// `target.rank × source.rank`.
    pub matrix: Vec<Vec<i64>>,
}

impl MonoidMap {
    pub fn new(source: GradedCommMonoid, target: GradedCommMonoid, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target.rank || matrix.iter().any(|r| r.len() != source.rank) {
            return Err(Error::InvalidMonoid("matrix shape does not match the lattices".into()));
        }
        let m = MonoidMap { source, target, matrix };
        for g in m.source.generators() {
            if !m.target.contains(&m.apply(g)) {
                return Err(Error::InvalidMonoid(format!("generator {g:?} leaves the target")));
            }
        }
        Ok(m)
    }

    /// The inclusion of a monoid into a larger one on the same lattice.
    pub fn inclusion(source: GradedCommMonoid, target: GradedCommMonoid) -> Result<Self> {
        let r = source.rank;
        let id = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
        MonoidMap::new(source, target, id)
    }

    /// The unique map to the trivial monoid.
    pub fn to_terminal(source: GradedCommMonoid) -> Self {
        let target = GradedCommMonoid::new(0, vec![], vec![]).unwrap();
        MonoidMap { source, target, matrix: Vec::new() }
    }

    pub fn apply(&self, v: &[i64]) -> Elem {
        self.matrix.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn is_graded(&self) -> bool {
        self.source
            .generators()
            .iter()
            .all(|g| self.source.degree(g) == self.target.degree(&self.apply(g)))
    }
}

/// `N → N^gp`, with the completion carrying the same grading.
pub fn group_completion(n: &GradedCommMonoid) -> (GradedCommMonoid, MonoidMap) {
    let gp = GradedCommMonoid::group(n.rank, n.generators.clone(), n.degree.clone()).unwrap();
    let map = MonoidMap::inclusion(n.clone(), gp.clone()).unwrap();
    (gp, map)
}

/// A set of integers, used both for degrees and for weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeSet {
    All,
    Finite(BTreeSet<i64>),
    AtLeast(i64),
    AtMost(i64),
}

impl DegreeSet {
    pub fn single(k: i64) -> Self {
        DegreeSet::Finite([k].into())
    }

    pub fn range(lo: i64, hi: i64) -> Self {
        DegreeSet::Finite((lo..=hi).collect())
    }

    pub fn empty() -> Self {
        DegreeSet::Finite(BTreeSet::new())
    }

    pub fn contains(&self, k: i64) -> bool {
        match self {
            DegreeSet::All => true,
            DegreeSet::Finite(s) => s.contains(&k),
            DegreeSet::AtLeast(a) => k >= *a,
            DegreeSet::AtMost(a) => k <= *a,
        }
    }

    pub fn max(&self) -> Option<i64> {
        match self {
            DegreeSet::Finite(s) => s.iter().next_back().copied(),
            DegreeSet::AtMost(a) => Some(*a),
            _ => None,
        }
    }

    pub fn min(&self) -> Option<i64> {
        match self {
            DegreeSet::Finite(s) => s.iter().next().copied(),
            DegreeSet::AtLeast(a) => Some(*a),
            _ => None,
        }
    }

    /// Parses `all`, `none`, `>=k`, `>k`, `<=k`, `<k`, `a..b`, or `a,b,c`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| -> Result<i64> {
            t.trim()
                .parse::<i64>()
                .ok()
                .filter(|v| v.abs() <= MAX_ENTRY)
                .ok_or_else(|| Error::Parse(format!("bad integer {t:?} in degree set")))
        };
        if s == "all" {
            return Ok(DegreeSet::All);
        }
        if s == "none" || s.is_empty() {
            return Ok(DegreeSet::empty());
        }
        if let Some(t) = s.strip_prefix(">=") {
            return Ok(DegreeSet::AtLeast(num(t)?));
        }
        if let Some(t) = s.strip_prefix("<=") {
            return Ok(DegreeSet::AtMost(num(t)?));
        }
        if let Some(t) = s.strip_prefix('>') {
            return Ok(DegreeSet::AtLeast(num(t)? + 1));
        }
        if let Some(t) = s.strip_prefix('<') {
            return Ok(DegreeSet::AtMost(num(t)? - 1));
        }
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b)?);
            if b < a || b - a > 10_000 {
                return Err(Error::Parse(format!("bad range {s:?}")));
            }
            return Ok(DegreeSet::range(a, b));
        }
        let vals: Result<BTreeSet<i64>> = s.split(',').map(num).collect();
        Ok(DegreeSet::Finite(vals?))
    }
}

/// Elements of degree in `s`, with `|degree| ≤ max_degree` and sup-norm `≤ radius`.
pub fn degree_component(m: &GradedCommMonoid, s: &DegreeSet, max_degree: i64, radius: i64) -> Vec<Elem> {
    m.elements_in_box(radius)
        .into_iter()
        .filter(|v| {
            let d = m.degree(v);
            d.abs() <= max_degree && s.contains(d)
        })
        .collect()
}

/// Default search radius for bounded checks on `m`.
pub fn default_radius(m: &GradedCommMonoid) -> i64 {
    2 * (m.rank as i64 + 1) * m.max_gen_norm().max(1)
}

/// The period `d` if `M = (M^gp)_{≥0}` and `M_{>0}` is nonempty; the first
/// condition is checked on the box of the given radius.
pub fn is_repetitive_within(m: &GradedCommMonoid, radius: i64) -> Option<i64> {
    let degs: Vec<i64> = m.generators.iter().map(|g| m.degree(g)).collect();
    if degs.iter().any(|&d| d < 0) || degs.iter().all(|&d| d <= 0) {
        return None;
    }
    let (gp, _) = group_completion(m);
    let all_in = gp
        .elements_in_box(radius)
        .iter()
        .filter(|v| gp.degree(v) >= 0)
        .all(|v| m.contains(v));
    if !all_in {
        return None;
    }
    Some(degs.iter().fold(0, |acc, &d| gcd(acc, d)))
}

pub fn is_repetitive(m: &GradedCommMonoid) -> Option<i64> {
    is_repetitive_within(m, default_radius(m))
}

#[derive(Clone, Debug, Serialize)]
pub struct Repletion {
    pub monoid: GradedCommMonoid,
    pub from_source: MonoidMap,
    pub to_target: MonoidMap,
}

/// `N^rep = N^gp ×_{M^gp} M`, presented on N's lattice.
///
/// The kernel of `eps` on `N^gp` enters as a group; the part over the image
/// lattice `L` is generated by lifts of the irreducible elements of `M ∩ L`
/// found in a box of radius `radius`. A target with nontrivial units that is
/// not itself a group is rejected.
pub fn repletion_within(eps: &MonoidMap, radius: i64) -> Result<Repletion> {
    let n = &eps.source;
    let m = &eps.target;
    let basis = n.group_basis().to_vec();
    let r = basis.len();
    let dm = m.rank;
    let rows: Vec<Vec<i64>> = basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut row = eps.apply(b);
            row.extend((0..r).map(|j| (i == j) as i64));
            row
        })
        .collect();
    let (rank_l, h) = hermite(rows, dm).ok_or_else(overflow)?;
    let to_ambient = |coords: &[i64]| -> Elem {
        let mut v = vec![0; n.rank];
        for (c, b) in coords.iter().zip(&basis) {
            for (x, y) in v.iter_mut().zip(b) {
                *x += c * y;
            }
        }
        v
    };
    let image_basis: Vec<Elem> = h[..rank_l].iter().map(|row| row[..dm].to_vec()).collect();
    let lifts: Vec<Elem> = h[..rank_l].iter().map(|row| to_ambient(&row[dm..])).collect();
    let kernel: Vec<Elem> = lattice_basis(
        &h[rank_l..].iter().map(|row| to_ambient(&row[dm..])).collect::<Vec<_>>(),
        n.rank,
    )?;

    let mut gens: Vec<Elem> = kernel.iter().cloned().chain(kernel.iter().map(|k| k.iter().map(|x| -x).collect())).collect();
    let lift = |w: &[i64]| -> Elem {
        let coords = lattice_coords(&image_basis, w).expect("element of the image lattice");
        let mut v = vec![0; n.rank];
        for (c, l) in coords.iter().zip(&lifts) {
            for (x, y) in v.iter_mut().zip(l) {
                *x += c * y;
            }
        }
        v
    };
    if m.is_group() {
        for w in &image_basis {
            gens.push(lift(w));
            gens.push(lift(&w.iter().map(|x| -x).collect::<Vec<_>>()));
        }
    } else {
        if !m.is_pointed_in_box(radius) {
            return Err(Error::Unsupported("repletion over a target with nontrivial units".into()));
        }
        let cands: Vec<Elem> = m
            .elements_in_box(radius)
            .into_iter()
            .filter(|w| w.iter().any(|&x| x != 0) && lattice_coords(&image_basis, w).is_some())
            .collect();
        let set: HashSet<&Elem> = cands.iter().collect();
        for w in &cands {
            let decomposable = cands.iter().any(|u| u != w && set.contains(&sub(w, u)));
            if !decomposable {
                gens.push(lift(w));
            }
        }
    }
    let rep = GradedCommMonoid::new(n.rank, gens, n.degree.clone())?;
    let from_source = MonoidMap::inclusion(n.clone(), rep.clone())?;
    let to_target = MonoidMap::new(rep.clone(), m.clone(), eps.matrix.clone())?;
    Ok(Repletion { monoid: rep, from_source, to_target })
}

pub fn repletion(eps: &MonoidMap) -> Result<Repletion> {
    let radius = default_radius(&eps.target).max(default_radius(&eps.source));
    repletion_within(eps, radius)
}
