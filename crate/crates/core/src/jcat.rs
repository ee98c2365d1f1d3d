//! The category J: objects are pairs of finite sets `({1..m1}, {1..m2})`, and a
//! morphism `(m1,m2) -> (n1,n2)` is a pair of injections together with a
//! bijection between their complements.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JObject {
    pub m1: usize,
    pub m2: usize,
}

impl JObject {
    pub const fn new(m1: usize, m2: usize) -> Self {
        JObject { m1, m2 }
    }

    pub fn degree(&self) -> i64 {
        self.m2 as i64 - self.m1 as i64
    }

    pub fn size(&self) -> usize {
        self.m1.max(self.m2)
    }

    /// The monoidal product `a ⊔ b`.
    pub fn concat(&self, other: &JObject) -> JObject {
        JObject::new(self.m1 + other.m1, self.m2 + other.m2)
    }

    /// Parses `"m1,m2"`.
    pub fn parse(s: &str) -> Result<JObject> {
        let mut it = s.split(',').map(|x| x.trim().parse::<usize>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) if a <= 255 && b <= 255 => Ok(JObject::new(a, b)),
            _ => Err(Error::Parse(format!("expected an object 'm1,m2', got {s:?}"))),
        }
    }
}

impl fmt::Display for JObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m1, self.m2)
    }
}

/// `(α1, α2, ρ)`. Values are 1-based; `rho` is sorted by key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JMorphism {
    pub source: JObject,
    pub target: JObject,
    pub alpha1: Vec<u8>,
    pub alpha2: Vec<u8>,
    pub rho: Vec<(u8, u8)>,
}

fn complement(image: &[u8], n: usize) -> Vec<u8> {
    let mut hit = vec![false; n + 1];
    for &v in image {
        hit[v as usize] = true;
    }
    (1..=n as u8).filter(|&i| !hit[i as usize]).collect()
}

fn is_injection(v: &[u8], n: usize) -> bool {
    let mut hit = vec![false; n + 1];
    v.iter().all(|&x| {
        let ok = x >= 1 && (x as usize) <= n && !hit[x as usize];
        if ok {
            hit[x as usize] = true;
        }
        ok
    })
}

impl JMorphism {
    pub fn new(
        source: JObject,
        target: JObject,
        alpha1: Vec<u8>,
        alpha2: Vec<u8>,
        mut rho: Vec<(u8, u8)>,
    ) -> Result<Self> {
        if target.m1 < source.m1 || source.degree() != target.degree() {
            return Err(Error::InvalidMorphism(format!("no morphisms {source} -> {target}")));
        }
        if alpha1.len() != source.m1 || !is_injection(&alpha1, target.m1) {
            return Err(Error::InvalidMorphism("alpha1 is not an injection".into()));
        }
        if alpha2.len() != source.m2 || !is_injection(&alpha2, target.m2) {
            return Err(Error::InvalidMorphism("alpha2 is not an injection".into()));
        }
        rho.sort_unstable();
        let keys: Vec<u8> = rho.iter().map(|r| r.0).collect();
        let mut vals: Vec<u8> = rho.iter().map(|r| r.1).collect();
        vals.sort_unstable();
        if keys != complement(&alpha1, target.m1) || vals != complement(&alpha2, target.m2) {
            return Err(Error::InvalidMorphism("rho is not a bijection of complements".into()));
        }
        Ok(JMorphism { source, target, alpha1, alpha2, rho })
    }

    pub fn identity(a: JObject) -> Self {
        JMorphism {
            source: a,
            target: a,
            alpha1: (1..=a.m1 as u8).collect(),
            alpha2: (1..=a.m2 as u8).collect(),
            rho: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == JMorphism::identity(self.source)
    }

    pub fn is_iso(&self) -> bool {
        self.source.m1 == self.target.m1
    }

    pub fn degree(&self) -> i64 {
        self.source.degree()
    }

    fn rho_at(&self, i: u8) -> u8 {
        let k = self.rho.binary_search_by_key(&i, |r| r.0).expect("rho is total on the complement");
        self.rho[k].1
    }

    /// The automorphism `(σ1, σ2, ∅)` of `a`; permutations are 1-based images.
    pub fn permutation(a: JObject, sigma1: &[u8], sigma2: &[u8]) -> Result<Self> {
        JMorphism::new(a, a, sigma1.to_vec(), sigma2.to_vec(), Vec::new())
    }

    /// The standard map `a -> a + (c,c)` onto the initial segments, matching the new points in order.
    pub fn standard_inclusion(a: JObject, c: usize) -> Self {
        let target = JObject::new(a.m1 + c, a.m2 + c);
        JMorphism {
            source: a,
            target,
            alpha1: (1..=a.m1 as u8).collect(),
            alpha2: (1..=a.m2 as u8).collect(),
            rho: (0..c as u8).map(|j| (a.m1 as u8 + 1 + j, a.m2 as u8 + 1 + j)).collect(),
        }
    }

    /// `f ⊔ g`, placing `f` on the initial blocks.
    pub fn concat(&self, g: &JMorphism) -> JMorphism {
        let (f, s) = (self, self.target);
        let mut alpha1 = f.alpha1.clone();
        alpha1.extend(g.alpha1.iter().map(|&v| v + s.m1 as u8));
        let mut alpha2 = f.alpha2.clone();
        alpha2.extend(g.alpha2.iter().map(|&v| v + s.m2 as u8));
        let mut rho = f.rho.clone();
        rho.extend(g.rho.iter().map(|&(k, v)| (k + s.m1 as u8, v + s.m2 as u8)));
        JMorphism {
            source: f.source.concat(&g.source),
            target: f.target.concat(&g.target),
            alpha1,
            alpha2,
            rho,
        }
    }

    /// The block swap `a ⊔ b -> b ⊔ a`.
    pub fn swap(a: JObject, b: JObject) -> JMorphism {
        let shift = |v: usize, first: usize, second: usize| -> u8 {
            if v <= first {
                (v + second) as u8
            } else {
                (v - first) as u8
            }
        };
        JMorphism {
            source: a.concat(&b),
            target: b.concat(&a),
            alpha1: (1..=a.m1 + b.m1).map(|v| shift(v, a.m1, b.m1)).collect(),
            alpha2: (1..=a.m2 + b.m2).map(|v| shift(v, a.m2, b.m2)).collect(),
            rho: Vec::new(),
        }
    }
}

impl fmt::Display for JMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rho: Vec<String> = self.rho.iter().map(|(k, v)| format!("{k}>{v}")).collect();
        write!(
            f,
            "{}->{}[{:?};{:?};{}]",
            self.source,
            self.target,
            self.alpha1,
            self.alpha2,
            rho.join(" ")
        )
    }
}

/// `g ∘ f`.
pub fn compose(g: &JMorphism, f: &JMorphism) -> Result<JMorphism> {
    if f.target != g.source {
        return Err(Error::NotComposable(format!("{} then {}", f.target, g.source)));
    }
    let alpha1: Vec<u8> = f.alpha1.iter().map(|&i| g.alpha1[i as usize - 1]).collect();
    let alpha2: Vec<u8> = f.alpha2.iter().map(|&i| g.alpha2[i as usize - 1]).collect();
    let mut beta1_inv = vec![0u8; g.target.m1 + 1];
    for (j, &v) in g.alpha1.iter().enumerate() {
        beta1_inv[v as usize] = j as u8 + 1;
    }
    let rho = complement(&alpha1, g.target.m1)
        .into_iter()
        .map(|i| match beta1_inv[i as usize] {
            0 => (i, g.rho_at(i)),
            j => (i, g.alpha2[f.rho_at(j) as usize - 1]),
        })
        .collect();
    Ok(JMorphism { source: f.source, target: g.target, alpha1, alpha2, rho })
}

fn falling(n: usize, k: usize) -> u64 {
    (n - k + 1..=n).map(|x| x as u64).product()
}

/// `|J(a,b)|`.
pub fn hom_count(a: JObject, b: JObject) -> u64 {
    if a.degree() != b.degree() || b.m1 < a.m1 {
        return 0;
    }
    let c = b.m1 - a.m1;
    falling(b.m1, a.m1) * falling(b.m2, a.m2) * falling(c, c)
}

fn injections(k: usize, n: usize) -> Vec<Vec<u8>> {
    fn rec(k: usize, n: usize, cur: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                cur.push(v as u8);
                rec(k, n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut vec![false; n + 1], &mut out);
    out
}

/// All permutations of `{1..n}` as image sequences, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    injections(n, n)
}

/// `J(a,b)` in lexicographic order of `(α1, α2, ρ)`.
pub fn enumerate_homs(a: JObject, b: JObject) -> Vec<JMorphism> {
    if hom_count(a, b) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for alpha1 in injections(a.m1, b.m1) {
        let keys = complement(&alpha1, b.m1);
        for alpha2 in injections(a.m2, b.m2) {
            let vals = complement(&alpha2, b.m2);
            for perm in permutations(keys.len()) {
                let rho = keys.iter().zip(&perm).map(|(&k, &p)| (k, vals[p as usize - 1])).collect();
                out.push(JMorphism {
                    source: a,
                    target: b,
                    alpha1: alpha1.clone(),
                    alpha2: alpha2.clone(),
                    rho,
                });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub max_size: usize,
}

impl Truncation {
    pub fn new(max_size: usize) -> Self {
        Truncation { max_size }
    }

    pub fn contains(&self, a: &JObject) -> bool {
        a.m1 <= self.max_size && a.m2 <= self.max_size
    }

    /// Objects in lexicographic order.
    pub fn objects(&self) -> Vec<JObject> {
        let n = self.max_size;
        (0..=n).flat_map(|m1| (0..=n).map(move |m2| JObject::new(m1, m2))).collect()
    }
}

/// Morphisms out of `a` that generate J under composition: adjacent
/// transpositions in each factor and the standard inclusion into `a + (1,1)`
/// when that object lies in the truncation.
pub fn generators_from(a: JObject, t: &Truncation) -> Vec<JMorphism> {
    let id1: Vec<u8> = (1..=a.m1 as u8).collect();
    let id2: Vec<u8> = (1..=a.m2 as u8).collect();
    let mut out = Vec::new();
    for i in 1..a.m1 {
        let mut s = id1.clone();
        s.swap(i - 1, i);
        out.push(JMorphism::permutation(a, &s, &id2).unwrap());
    }
    for i in 1..a.m2 {
        let mut s = id2.clone();
        s.swap(i - 1, i);
        out.push(JMorphism::permutation(a, &id1, &s).unwrap());
    }
    let up = JObject::new(a.m1 + 1, a.m2 + 1);
    if t.contains(&up) {
        out.push(JMorphism::standard_inclusion(a, 1));
    }
    out
}

/// Connected components of the truncated classifying space, keyed by degree.
pub fn connected_components(t: &Truncation) -> BTreeMap<i64, Vec<JObject>> {
    let objs = t.objects();
    let mut parent: Vec<usize> = (0..objs.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..objs.len() {
        for j in 0..objs.len() {
            if hom_count(objs[i], objs[j]) > 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<JObject>> = BTreeMap::new();
    for i in 0..objs.len() {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(objs[i]);
    }
    by_root.into_values().map(|c| (c[0].degree(), c)).collect()
}
