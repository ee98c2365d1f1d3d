//! J-spaces with finite discrete values over a truncation of J.
//!
//! Values are materialized per object; structure maps are evaluated on
//! demand from the construction. Day convolution at `n` only involves
//! objects admitting a map to `n`, so it is exact inside any truncation
//! containing `n`.

mod nerve;

pub use nerve::{category_of_elements, hocolim_nerve, ElementsCategory, ElementsNerve};

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jcat::{compose, enumerate_homs, generators_from, permutations, JMorphism, JObject, Truncation};
use crate::monoid::DegreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Elem {
    Point,
    /// `(f, k)` in `J(d, n) × K`.
    Free { f: JMorphism, k: usize },
    /// Class of `(a_1, …, a_k; f: a_1 ⊔ … ⊔ a_k → n; x_1, …, x_k)`, minimal in its class.
    Day { blocks: Vec<JObject>, f: JMorphism, parts: Vec<usize> },
    Summand { k: usize, inner: Box<Elem> },
}

type DayKey = (Vec<JObject>, JMorphism, Vec<usize>);

#[derive(Debug, Default)]
struct DayTable {
    class: HashMap<DayKey, usize>,
}

#[derive(Debug)]
enum Structure {
    Empty,
    Terminal,
    Free { d: JObject },
    Day { factors: Vec<Arc<TruncatedJSpace>>, symmetric: bool, tables: BTreeMap<JObject, DayTable> },
    Coproduct(Vec<Arc<TruncatedJSpace>>),
    Restrict(Arc<TruncatedJSpace>),
}

#[derive(Debug)]
pub struct TruncatedJSpace {
    name: String,
    trunc: Truncation,
    values: BTreeMap<JObject, Vec<Elem>>,
    index: BTreeMap<JObject, HashMap<Elem, usize>>,
    structure: Structure,
}

fn concat_all(blocks: &[JObject]) -> JObject {
    blocks.iter().fold(JObject::new(0, 0), |acc, b| acc.concat(b))
}

/// `id ⊔ α ⊔ id` with `α` on block `i` of `blocks`, `α.target = blocks[i]`.
fn embed_block(blocks: &[JObject], i: usize, alpha: &JMorphism) -> JMorphism {
    let mut out = JMorphism::identity(JObject::new(0, 0));
    for (j, b) in blocks.iter().enumerate() {
        let piece = if j == i { alpha.clone() } else { JMorphism::identity(*b) };
        out = out.concat(&piece);
    }
    out
}

/// The iso `⊔ blocks∘(i i+1) → ⊔ blocks` exchanging blocks `i` and `i + 1`.
fn block_swap(blocks: &[JObject], i: usize) -> JMorphism {
    let mut out = JMorphism::identity(JObject::new(0, 0));
    let mut j = 0;
    while j < blocks.len() {
        if j == i {
            out = out.concat(&JMorphism::swap(blocks[i + 1], blocks[i]));
            j += 2;
        } else {
            out = out.concat(&JMorphism::identity(blocks[j]));
            j += 1;
        }
    }
    out
}

/// Generators of J with target `a`, with their sources.
fn generators_into(a: JObject) -> Vec<JMorphism> {
    let mut out: Vec<JMorphism> =
        generators_from(a, &Truncation::new(0)).into_iter().filter(|g| g.target == a).collect();
    if a.m1 >= 1 && a.m2 >= 1 {
        out.push(JMorphism::standard_inclusion(JObject::new(a.m1 - 1, a.m2 - 1), 1));
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.0[hi] = lo;
        }
    }
}

impl TruncatedJSpace {
    fn assemble(name: String, trunc: Truncation, values: BTreeMap<JObject, Vec<Elem>>, structure: Structure) -> Self {
        let index = values.iter().map(|(o, v)| (*o, v.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect())).collect();
        TruncatedJSpace { name, trunc, values, index, structure }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn values(&self, n: JObject) -> &[Elem] {
        self.values.get(&n).map_or(&[], |v| v.as_slice())
    }

    /// `(d1, d2)` for a free J-space.
    pub fn free_on(&self) -> Option<JObject> {
        match &self.structure {
            Structure::Free { d } => Some(*d),
            _ => None,
        }
    }

    /// Whether this is a Day power divided by block permutations.
    pub fn is_symmetric_power(&self) -> bool {
        matches!(&self.structure, Structure::Day { symmetric: true, .. })
    }

    pub fn size(&self, n: JObject) -> usize {
        self.values(n).len()
    }

    pub fn index_of(&self, n: JObject, e: &Elem) -> Option<usize> {
        self.index.get(&n)?.get(e).copied()
    }

    /// `X(g)(x)` for `x` the `i`-th element of `X(g.source)`.
    pub fn act(&self, g: &JMorphism, i: usize) -> usize {
        let x = &self.values(g.source)[i];
        let y = self.act_elem(g, x);
        self.index_of(g.target, &y).unwrap_or_else(|| panic!("{} is not closed under {g}", self.name))
    }

    fn act_elem(&self, g: &JMorphism, x: &Elem) -> Elem {
        match (&self.structure, x) {
            (Structure::Terminal, Elem::Point) => Elem::Point,
            (Structure::Free { .. }, Elem::Free { f, k }) => Elem::Free { f: compose(g, f).expect("composable"), k: *k },
            (Structure::Day { tables, .. }, Elem::Day { blocks, f, parts }) => {
                let key = (blocks.clone(), compose(g, f).expect("composable"), parts.clone());
                let c = tables[&g.target].class[&key];
                self.values[&g.target][c].clone()
            }
            (Structure::Coproduct(parts), Elem::Summand { k, inner }) => {
                let inner_space = &parts[*k];
                let i = inner_space.index_of(g.source, inner).expect("summand element");
                let j = inner_space.act(g, i);
                Elem::Summand { k: *k, inner: Box::new(inner_space.values(g.target)[j].clone()) }
            }
            (Structure::Restrict(inner), e) => inner.act_elem(g, e),
            _ => unreachable!("element does not belong to {}", self.name),
        }
    }

    pub fn label(&self, n: JObject, i: usize) -> String {
        label_elem(self, n, &self.values(n)[i])
    }

    /// Identity acts trivially and `X(g)X(f) = X(gf)`; `full` uses all morphisms
    /// instead of generators for the first factor.
    pub fn check_functoriality(&self, full: bool) -> Result<()> {
        let objs = self.trunc.objects();
        objs.par_iter().try_for_each(|&a| {
            let n = self.size(a);
            if n == 0 {
                return Ok(());
            }
            let id = JMorphism::identity(a);
            if let Some(i) = (0..n).find(|&i| self.act(&id, i) != i) {
                return Err(Error::Inconsistent(format!("identity moves {}", self.label(a, i))));
            }
            let firsts: Vec<JMorphism> = if full {
                objs.iter().filter(|b| self.trunc.contains(b)).flat_map(|&b| enumerate_homs(a, b)).collect()
            } else {
                generators_from(a, &self.trunc)
            };
            for f in &firsts {
                for g in generators_from(f.target, &self.trunc) {
                    let gf = compose(&g, f)?;
                    for i in 0..n {
                        if self.act(&g, self.act(f, i)) != self.act(&gf, i) {
                            return Err(Error::Inconsistent(format!("{} fails functoriality at {f} then {g}", self.name)));
                        }
                    }
                }
            }
            Ok(())
        })
    }

    /// `{objects: {o: [labels]}, morphisms: [{morphism, map}]}` over generators.
    pub fn to_json(&self) -> Value {
        let mut objects = serde_json::Map::new();
        let mut morphisms = Vec::new();
        for a in self.trunc.objects() {
            let n = self.size(a);
            objects.insert(a.to_string(), json!((0..n).map(|i| self.label(a, i)).collect::<Vec<_>>()));
            if n == 0 {
                continue;
            }
            for g in generators_from(a, &self.trunc) {
                morphisms.push(json!({ "morphism": g.to_string(), "map": (0..n).map(|i| self.act(&g, i)).collect::<Vec<_>>() }));
            }
        }
        json!({ "name": self.name, "truncation": self.trunc.max_size, "objects": objects, "morphisms": morphisms })
    }

    /// Class of a Day triple at `n`, for Day convolutions.
    pub fn day_class(&self, n: JObject, blocks: &[JObject], f: &JMorphism, parts: &[usize]) -> Option<usize> {
        match &self.structure {
            Structure::Day { tables, .. } => tables.get(&n)?.class.get(&(blocks.to_vec(), f.clone(), parts.to_vec())).copied(),
            _ => None,
        }
    }

    /// Action of the adjacent block swap `i` on a Day convolution of equal factors.
    pub fn swap_blocks(&self, n: JObject, c: usize, i: usize) -> Result<usize> {
        let Elem::Day { blocks, f, parts } = &self.values(n)[c] else {
            return Err(Error::Unsupported(format!("{} is not a Day convolution", self.name)));
        };
        if i + 1 >= blocks.len() {
            return Err(Error::Unsupported("block index out of range".into()));
        }
        let mut sb = blocks.clone();
        sb.swap(i, i + 1);
        let mut sp = parts.clone();
        sp.swap(i, i + 1);
        let sf = compose(f, &block_swap(blocks, i))?;
        self.day_class(n, &sb, &sf, &sp).ok_or_else(|| Error::Unsupported("factors differ".into()))
    }
}

fn label_elem(x: &TruncatedJSpace, n: JObject, e: &Elem) -> String {
    match (&x.structure, e) {
        (_, Elem::Point) => "*".into(),
        (_, Elem::Free { f, k }) => {
            if *k == 0 {
                f.to_string()
            } else {
                format!("{f}·k{k}")
            }
        }
        (Structure::Day { factors, .. }, Elem::Day { blocks, f, parts }) => {
            let inner: Vec<String> =
                factors.iter().zip(blocks).zip(parts).map(|((fx, b), p)| fx.label(*b, *p)).collect();
            format!("[{f}; {}]", inner.join(", "))
        }
        (Structure::Coproduct(ps), Elem::Summand { k, inner }) => format!("{}:{}", k, label_elem(&ps[*k], n, inner)),
        (Structure::Restrict(inner), e) => label_elem(inner, n, e),
        _ => format!("{e:?}"),
    }
}

pub fn empty_jspace(t: Truncation) -> TruncatedJSpace {
    TruncatedJSpace::assemble("∅".into(), t, BTreeMap::new(), Structure::Empty)
}

/// The terminal J-space `T` with one point everywhere.
pub fn terminal(t: Truncation) -> TruncatedJSpace {
    let values = t.objects().into_iter().map(|o| (o, vec![Elem::Point])).collect();
    TruncatedJSpace::assemble("T".into(), t, values, Structure::Terminal)
}

/// `F_{(d1,d2)}(K) = J((d1,d2), −) × K` for the discrete set `K` of `k` points.
pub fn free_jspace(d1: usize, d2: usize, k: usize, t: Truncation) -> TruncatedJSpace {
    let d = JObject::new(d1, d2);
    let values = t
        .objects()
        .into_iter()
        .map(|n| (n, enumerate_homs(d, n).into_iter().flat_map(|f| (0..k).map(move |k| Elem::Free { f: f.clone(), k })).collect()))
        .collect();
    TruncatedJSpace::assemble(format!("F({d1},{d2})"), t, values, Structure::Free { d })
}

/// `U^J = F_{(0,0)}(point)`.
pub fn unit_jspace(t: Truncation) -> TruncatedJSpace {
    let mut u = free_jspace(0, 0, 1, t);
    u.name = "U".into();
    u
}

fn block_sequences(factors: &[Arc<TruncatedJSpace>], n: JObject) -> Vec<Vec<JObject>> {
    fn rec(factors: &[Arc<TruncatedJSpace>], n: JObject, used: JObject, cur: &mut Vec<JObject>, out: &mut Vec<Vec<JObject>>) {
        let i = cur.len();
        if i == factors.len() {
            if enumerate_homs(used, n).first().is_some() {
                out.push(cur.clone());
            }
            return;
        }
        for m1 in 0..=n.m1 - used.m1 {
            for m2 in 0..=n.m2 - used.m2 {
                let a = JObject::new(m1, m2);
                if factors[i].size(a) == 0 {
                    continue;
                }
                cur.push(a);
                rec(factors, n, used.concat(&a), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(factors, n, JObject::new(0, 0), &mut Vec::new(), &mut out);
    out
}

fn parts_product(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut acc = vec![vec![]];
    for &s in sizes {
        acc = acc.into_iter().flat_map(|v| (0..s).map(move |i| [v.clone(), vec![i]].concat())).collect();
    }
    acc
}

fn day_table(factors: &[Arc<TruncatedJSpace>], symmetric: bool, n: JObject) -> (Vec<Elem>, DayTable) {
    let mut keys: Vec<DayKey> = Vec::new();
    for blocks in block_sequences(factors, n) {
        let sizes: Vec<usize> = factors.iter().zip(&blocks).map(|(x, b)| x.size(*b)).collect();
        let combos = parts_product(&sizes);
        for f in enumerate_homs(concat_all(&blocks), n) {
            for p in &combos {
                keys.push((blocks.clone(), f.clone(), p.clone()));
            }
        }
    }
    keys.sort();
    let ids: HashMap<DayKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut uf = UnionFind::new(keys.len());
    for (id, (blocks, f, parts)) in keys.iter().enumerate() {
        for i in 0..blocks.len() {
            if parts[i] != 0 {
                continue;
            }
            let xi = &factors[i];
            for alpha in generators_into(blocks[i]) {
                let c = alpha.source;
                let mut sb = blocks.clone();
                sb[i] = c;
                let sf = compose(f, &embed_block(&sb, i, &alpha)).expect("composable");
                for x in 0..xi.size(c) {
                    let mut sp = parts.clone();
                    sp[i] = x;
                    let mut tp = parts.clone();
                    tp[i] = xi.act(&alpha, x);
                    uf.union(ids[&(sb.clone(), sf.clone(), sp)], ids[&(blocks.clone(), f.clone(), tp)]);
                }
            }
        }
        if symmetric {
            for i in 0..blocks.len().saturating_sub(1) {
                let mut sb = blocks.clone();
                sb.swap(i, i + 1);
                let mut sp = parts.clone();
                sp.swap(i, i + 1);
                let sf = compose(f, &block_swap(blocks, i)).expect("composable");
                uf.union(id, ids[&(sb, sf, sp)]);
            }
        }
    }
    // Roots are minimal in their classes since keys are sorted and union keeps the smaller index.
    let mut elems = Vec::new();
    let mut root_class: HashMap<usize, usize> = HashMap::new();
    for i in 0..keys.len() {
        let r = uf.find(i);
        if r == i {
            root_class.insert(i, elems.len());
            let (blocks, f, parts) = keys[i].clone();
            elems.push(Elem::Day { blocks, f, parts });
        }
    }
    let class = keys.into_iter().enumerate().map(|(i, k)| (k, root_class[&uf.find(i)])).collect();
    (elems, DayTable { class })
}

fn day_product(factors: Vec<Arc<TruncatedJSpace>>, symmetric: bool, name: String) -> Result<TruncatedJSpace> {
    let t = factors.first().map(|f| f.trunc).ok_or_else(|| Error::Unsupported("Day product of no factors".into()))?;
    if factors.iter().any(|f| f.trunc != t) {
        return Err(Error::Unsupported("factors have different truncations".into()));
    }
    let built: Vec<(JObject, Vec<Elem>, DayTable)> =
        t.objects().into_par_iter().map(|n| {
            let (e, tb) = day_table(&factors, symmetric, n);
            (n, e, tb)
        }).collect();
    let mut values = BTreeMap::new();
    let mut tables = BTreeMap::new();
    for (n, e, tb) in built {
        values.insert(n, e);
        tables.insert(n, tb);
    }
    Ok(TruncatedJSpace::assemble(name, t, values, Structure::Day { factors, symmetric, tables }))
}

/// `X ⊠ Y` as the colimit over `(a, b, a ⊔ b → n)`.
pub fn day_convolution(x: &Arc<TruncatedJSpace>, y: &Arc<TruncatedJSpace>) -> Result<TruncatedJSpace> {
    day_product(vec![x.clone(), y.clone()], false, format!("{}⊠{}", x.name, y.name))
}

/// `X^{⊠k}`, optionally divided by the block-permutation action of `Σ_k`.
pub fn day_power(x: &Arc<TruncatedJSpace>, k: usize, symmetric: bool) -> Result<TruncatedJSpace> {
    if k == 0 {
        return Ok(unit_jspace(x.trunc));
    }
    let name = if symmetric { format!("{}^⊠{k}/Σ{k}", x.name) } else { format!("{}^⊠{k}", x.name) };
    day_product(vec![x.clone(); k], symmetric, name)
}

pub fn coproduct(parts: Vec<Arc<TruncatedJSpace>>, name: &str) -> Result<TruncatedJSpace> {
    let t = parts.first().map(|f| f.trunc).ok_or_else(|| Error::Unsupported("empty coproduct".into()))?;
    if parts.iter().any(|f| f.trunc != t) {
        return Err(Error::Unsupported("summands have different truncations".into()));
    }
    let values = t
        .objects()
        .into_iter()
        .map(|n| {
            let v = parts
                .iter()
                .enumerate()
                .flat_map(|(k, x)| x.values(n).iter().map(move |e| Elem::Summand { k, inner: Box::new(e.clone()) }))
                .collect();
            (n, v)
        })
        .collect();
    Ok(TruncatedJSpace::assemble(name.into(), t, values, Structure::Coproduct(parts)))
}

/// `∐_{k ≤ k_max} F_{(d1,d2)}(point)^{⊠k}/Σ_k`; summand `k` is the word length.
pub fn free_comm_truncation(d1: usize, d2: usize, k_max: usize, t: Truncation) -> Result<TruncatedJSpace> {
    let f = Arc::new(free_jspace(d1, d2, 1, t));
    let parts = (0..=k_max).map(|k| day_power(&f, k, true).map(Arc::new)).collect::<Result<Vec<_>>>()?;
    coproduct(parts, &format!("C({d1},{d2})≤{k_max}"))
}

/// Products of word-length summands in a free commutative truncation, when the length fits.
pub fn free_comm_multiply(c: &TruncatedJSpace, n: JObject, i: usize, m: JObject, j: usize) -> Result<Option<usize>> {
    let Structure::Coproduct(parts) = &c.structure else {
        return Err(Error::Unsupported("not a free commutative truncation".into()));
    };
    let (Elem::Summand { k: k1, inner: x }, Elem::Summand { k: k2, inner: y }) = (&c.values(n)[i], &c.values(m)[j]) else {
        unreachable!()
    };
    let nm = n.concat(&m);
    if k1 + k2 >= parts.len() || !c.trunc.contains(&nm) {
        return Ok(None);
    }
    let split = |k: usize, e: &Elem, o: JObject| -> (Vec<JObject>, JMorphism, Vec<usize>) {
        match e {
            Elem::Day { blocks, f, parts } => (blocks.clone(), f.clone(), parts.clone()),
            Elem::Free { f, .. } if k == 0 => (vec![], f.clone(), vec![]),
            _ => unreachable!("word length {k} at {o}"),
        }
    };
    let (b1, f1, p1) = split(*k1, x, n);
    let (b2, f2, p2) = split(*k2, y, m);
    let k = k1 + k2;
    let target = &parts[k];
    if k == 0 {
        let e = Elem::Summand { k: 0, inner: Box::new(Elem::Free { f: f1.concat(&f2), k: 0 }) };
        return Ok(c.index_of(nm, &e));
    }
    // Unit factors of length 0 are maps (0,0) → n absorbed into the other factor.
    let (blocks, f, ps) = match (*k1, *k2) {
        (0, _) => (b2.clone(), f1.concat(&f2), p2.clone()),
        (_, 0) => (b1.clone(), f1.concat(&f2), p1.clone()),
        _ => ([b1.clone(), b2.clone()].concat(), f1.concat(&f2), [p1.clone(), p2.clone()].concat()),
    };
    let cls = target.day_class(nm, &blocks, &f, &ps).ok_or_else(|| Error::Inconsistent("product triple missing".into()))?;
    let e = Elem::Summand { k, inner: Box::new(target.values(nm)[cls].clone()) };
    Ok(c.index_of(nm, &e))
}

/// Number of `Σ_k`-orbits on `F^{⊠k}(n)` by counting fixed points.
pub fn burnside_orbit_count(power: &TruncatedJSpace, k: usize, n: JObject) -> Result<usize> {
    let size = power.size(n);
    let swaps: Vec<Vec<usize>> =
        (0..k.saturating_sub(1)).map(|i| (0..size).map(|c| power.swap_blocks(n, c, i)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let mut fixed = 0usize;
    let mut count = 0usize;
    for sigma in permutations(k) {
        // Bubble sort writes σ as a word in adjacent transpositions.
        let mut s: Vec<u8> = sigma.clone();
        let mut word = Vec::new();
        for a in 0..k {
            for b in 0..k - 1 - a {
                if s[b] > s[b + 1] {
                    s.swap(b, b + 1);
                    word.push(b);
                }
            }
        }
        fixed += (0..size).filter(|&c| word.iter().fold(c, |acc, &i| swaps[i][acc]) == c).count();
        count += 1;
    }
    if fixed % count != 0 {
        return Err(Error::Inconsistent("fixed-point count not divisible by the group order".into()));
    }
    Ok(fixed / count)
}

/// `X_S`: values kept at objects whose degree lies in `s`.
pub fn grading_component_j(x: &Arc<TruncatedJSpace>, s: &DegreeSet) -> TruncatedJSpace {
    let values =
        x.values.iter().filter(|(o, _)| s.contains(o.degree())).map(|(o, v)| (*o, v.clone())).collect();
    TruncatedJSpace::assemble(format!("{}_S", x.name), x.trunc, values, Structure::Restrict(x.clone()))
}

#[derive(Clone, Debug)]
pub struct JSpaceMap {
    pub maps: BTreeMap<JObject, Vec<usize>>,
}

impl JSpaceMap {
    /// Checks naturality against generators of the truncation.
    pub fn new(src: &TruncatedJSpace, tgt: &TruncatedJSpace, f: impl Fn(JObject, usize) -> Option<usize>) -> Result<Self> {
        let mut maps = BTreeMap::new();
        for a in src.trunc.objects() {
            let v = (0..src.size(a))
                .map(|i| f(a, i).filter(|&j| j < tgt.size(a)).ok_or_else(|| Error::Inconsistent(format!("no image for {} at {a}", src.label(a, i)))))
                .collect::<Result<Vec<_>>>()?;
            maps.insert(a, v);
        }
        for a in src.trunc.objects() {
            for g in generators_from(a, &src.trunc) {
                for i in 0..src.size(a) {
                    if maps[&g.target][src.act(&g, i)] != tgt.act(&g, maps[&a][i]) {
                        return Err(Error::Inconsistent(format!("naturality fails at {g} on {}", src.label(a, i))));
                    }
                }
            }
        }
        Ok(JSpaceMap { maps })
    }

    pub fn is_iso(&self, tgt: &TruncatedJSpace) -> bool {
        self.maps.iter().all(|(o, v)| {
            let mut s = v.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == v.len() && v.len() == tgt.size(*o)
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaFreeRow {
    pub object: JObject,
    pub free: bool,
    /// Element and second-factor permutation fixing it.
    pub witness: Option<(String, Vec<u8>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaFreeReport {
    pub rows: Vec<SigmaFreeRow>,
    pub pass: bool,
}

/// Freeness of the `Σ_{n2}`-action through `(id, σ, ∅)` at every object of size `≤ max_size`.
pub fn sigma_free_check(x: &TruncatedJSpace, max_size: usize) -> SigmaFreeReport {
    let objs: Vec<JObject> = x.trunc.objects().into_iter().filter(|o| o.size() <= max_size).collect();
    let rows: Vec<SigmaFreeRow> = objs
        .par_iter()
        .map(|&n| {
            let id1: Vec<u8> = (1..=n.m1 as u8).collect();
            for sigma in permutations(n.m2).into_iter().skip(1) {
                let g = JMorphism::permutation(n, &id1, &sigma).expect("automorphism");
                if let Some(i) = (0..x.size(n)).find(|&i| x.act(&g, i) == i) {
                    return SigmaFreeRow { object: n, free: false, witness: Some((x.label(n, i), sigma)) };
                }
            }
            SigmaFreeRow { object: n, free: true, witness: None }
        })
        .collect();
    let pass = rows.iter().all(|r| r.free);
    SigmaFreeReport { rows, pass }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatchingReport {
    pub object: JObject,
    pub latching_size: usize,
    pub image_size: usize,
    pub injective: bool,
    pub witness: Option<(String, String)>,
}

/// `L_n X = colim` of `X` over non-isomorphisms into `n`, and injectivity of `L_n X → X(n)`.
pub fn latching_check(x: &TruncatedJSpace, n: JObject) -> Result<LatchingReport> {
    if !x.trunc.contains(&n) {
        return Err(Error::Unsupported(format!("{n} outside the truncation")));
    }
    let mut keys: Vec<(JObject, JMorphism, usize)> = Vec::new();
    for a in x.trunc.objects().into_iter().filter(|a| a.m1 < n.m1) {
        for f in enumerate_homs(a, n) {
            for i in 0..x.size(a) {
                keys.push((a, f.clone(), i));
            }
        }
    }
    let ids: HashMap<(JObject, JMorphism, usize), usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut uf = UnionFind::new(keys.len());
    for (a, f, i) in &keys {
        if *i != 0 {
            continue;
        }
        for alpha in generators_into(*a) {
            let c = alpha.source;
            let cf = compose(f, &alpha)?;
            for y in 0..x.size(c) {
                uf.union(ids[&(c, cf.clone(), y)], ids[&(*a, f.clone(), x.act(&alpha, y))]);
            }
        }
    }
    let mut image_of_class: BTreeMap<usize, usize> = BTreeMap::new();
    for (id, (_, f, i)) in keys.iter().enumerate() {
        let r = uf.find(id);
        let img = x.act(f, *i);
        if *image_of_class.entry(r).or_insert(img) != img {
            return Err(Error::Inconsistent("latching map is not well defined".into()));
        }
    }
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut witness = None;
    for (&r, &img) in &image_of_class {
        if let Some(&other) = seen.get(&img) {
            if witness.is_none() {
                let show = |k: usize| format!("{} at {}", x.label(keys[k].0, keys[k].2), keys[k].1);
                witness = Some((show(other), show(r)));
            }
        } else {
            seen.insert(img, r);
        }
    }
    Ok(LatchingReport {
        object: n,
        latching_size: image_of_class.len(),
        image_size: seen.len(),
        injective: witness.is_none(),
        witness,
    })
}

/// Objects where two truncations give the same values.
pub fn stable_objects(small: &TruncatedJSpace, large: &TruncatedJSpace) -> Vec<JObject> {
    small.trunc.objects().into_iter().filter(|o| small.values(*o) == large.values(*o)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcat::hom_count;

    fn arc(x: TruncatedJSpace) -> Arc<TruncatedJSpace> {
        Arc::new(x)
    }

    #[test]
    fn free_values_match_hom_counts() {
        let t = Truncation::new(3);
        let f = free_jspace(1, 1, 1, t);
        assert_eq!(f.size(JObject::new(1, 1)), 1);
        assert_eq!(f.size(JObject::new(2, 2)), 4);
        for n in t.objects() {
            assert_eq!(f.size(n) as u64, hom_count(JObject::new(1, 1), n));
        }
        f.check_functoriality(true).unwrap();
        free_jspace(0, 1, 2, t).check_functoriality(false).unwrap();
    }

    #[test]
    fn unit_law_and_symmetry() {
        let t = Truncation::new(3);
        let u = arc(unit_jspace(t));
        for x in [u.clone(), arc(free_jspace(1, 1, 1, t)), arc(free_jspace(0, 1, 1, t))] {
            let ux = day_convolution(&u, &x).unwrap();
            ux.check_functoriality(false).unwrap();
            let z = JObject::new(0, 0);
            let m = JSpaceMap::new(&x, &ux, |n, i| ux.day_class(n, &[z, n], &JMorphism::identity(n), &[0, i])).unwrap();
            assert!(m.is_iso(&ux), "{}", x.name());
            let xu = day_convolution(&x, &u).unwrap();
            let sym = JSpaceMap::new(&ux, &xu, |n, c| {
                let Elem::Day { blocks, f, parts } = &ux.values(n)[c] else { return None };
                let sf = compose(f, &JMorphism::swap(blocks[1], blocks[0])).ok()?;
                xu.day_class(n, &[blocks[1], blocks[0]], &sf, &[parts[1], parts[0]])
            })
            .unwrap();
            assert!(sym.is_iso(&xu));
        }
    }

    #[test]
    fn free_on_one_one_squared_is_free_on_two_two() {
        let t = Truncation::new(4);
        let f11 = arc(free_jspace(1, 1, 1, t));
        let sq = day_convolution(&f11, &f11).unwrap();
        let f22 = free_jspace(2, 2, 1, t);
        let a = JObject::new(1, 1);
        let m = JSpaceMap::new(&f22, &sq, |n, i| {
            let Elem::Free { f, .. } = &f22.values(n)[i] else { return None };
            sq.day_class(n, &[a, a], f, &[0, 0])
        })
        .unwrap();
        assert!(m.is_iso(&sq));
    }

    #[test]
    fn free_commutative_counts() {
        let t = Truncation::new(3);
        let c0 = free_comm_truncation(1, 1, 0, t).unwrap();
        let u = unit_jspace(t);
        for n in t.objects() {
            assert_eq!(c0.size(n), u.size(n));
        }
        let c = free_comm_truncation(1, 1, 2, t).unwrap();
        assert_eq!(c.size(JObject::new(1, 1)), 2);
        c.check_functoriality(false).unwrap();
        let f = arc(free_jspace(1, 1, 1, Truncation::new(4)));
        let sq = day_power(&f, 2, false).unwrap();
        let quo = day_power(&f, 2, true).unwrap();
        for n in Truncation::new(4).objects() {
            assert_eq!(burnside_orbit_count(&sq, 2, n).unwrap(), quo.size(n), "{n}");
        }
        // F(1,1)^2 at (2,2) is J((2,2),(2,2)) with Σ_2 acting freely.
        assert_eq!(quo.size(JObject::new(2, 2)), 2);
    }

    #[test]
    fn free_commutative_product_is_associative_on_units() {
        let t = Truncation::new(3);
        let c = free_comm_truncation(1, 1, 2, t).unwrap();
        let a = JObject::new(1, 1);
        let ia = c.values(a).iter().position(|e| matches!(e, Elem::Summand { k: 1, .. })).unwrap();
        let prod = free_comm_multiply(&c, a, ia, a, ia).unwrap().unwrap();
        assert!(matches!(c.values(JObject::new(2, 2))[prod], Elem::Summand { k: 2, .. }));
        let z = JObject::new(0, 0);
        let unit = c.values(z).iter().position(|e| matches!(e, Elem::Summand { k: 0, .. })).unwrap();
        assert_eq!(free_comm_multiply(&c, z, unit, a, ia).unwrap(), Some(ia));
        assert_eq!(free_comm_multiply(&c, a, ia, z, unit).unwrap(), Some(ia));
    }

    #[test]
    fn sigma_freeness() {
        let t = Truncation::new(4);
        assert!(sigma_free_check(&unit_jspace(t), 4).pass);
        let tr = sigma_free_check(&terminal(t), 2);
        let row = tr.rows.iter().find(|r| r.object == JObject::new(0, 2)).unwrap();
        assert!(!row.free);
        assert_eq!(row.witness.as_ref().unwrap().1, vec![2, 1]);
        assert!(sigma_free_check(&free_jspace(1, 1, 1, Truncation::new(3)), 3).pass);
    }

    #[test]
    fn latching_examples() {
        let t = Truncation::new(3);
        let f = free_jspace(1, 1, 1, t);
        let r = latching_check(&f, JObject::new(1, 1)).unwrap();
        assert_eq!((r.latching_size, r.injective), (0, true));
        let u = unit_jspace(t);
        let r = latching_check(&u, JObject::new(1, 1)).unwrap();
        assert_eq!((r.latching_size, r.injective), (1, true));
        let r = latching_check(&empty_jspace(t), JObject::new(2, 2)).unwrap();
        assert!(r.injective && r.latching_size == 0);
        // The terminal J-space is not cofibrant: distinct maps into (1,1) collapse.
        let r = latching_check(&terminal(t), JObject::new(2, 1)).unwrap();
        assert!(!r.injective);
    }

    #[test]
    fn grading_components() {
        let t = Truncation::new(3);
        let u = arc(unit_jspace(t));
        let u0 = grading_component_j(&u, &DegreeSet::single(0));
        for n in t.objects() {
            assert_eq!(u0.values(n), u.values(n));
        }
        let f = arc(free_jspace(1, 2, 1, t));
        let f1 = grading_component_j(&f, &DegreeSet::single(1));
        for n in t.objects() {
            assert_eq!(f1.size(n), f.size(n));
        }
        let c = arc(free_comm_truncation(0, 1, 2, t).unwrap());
        let pos = grading_component_j(&c, &DegreeSet::AtLeast(0));
        pos.check_functoriality(false).unwrap();
    }

    #[test]
    fn day_is_stable_under_enlarging_the_truncation() {
        let small = {
            let f = arc(free_jspace(1, 1, 1, Truncation::new(2)));
            day_convolution(&f, &f).unwrap()
        };
        let large = {
            let f = arc(free_jspace(1, 1, 1, Truncation::new(3)));
            day_convolution(&f, &f).unwrap()
        };
        assert_eq!(stable_objects(&small, &large), Truncation::new(2).objects());
    }
}
