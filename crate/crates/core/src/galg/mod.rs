//! Free graded-commutative F_p algebras on polynomial, truncated, exterior and
//! divided-power generators, with Leibniz-extended derivations.
//!
//! A divided-power generator `x` is expanded into digit generators
//! `γ_{p^i} x`, each of height `p`; basis elements are the `γ_k x`, so that
//! `γ_a γ_b = binom(a+b, a) γ_{a+b}` holds on the nose. Gradings are
//! `(s, t, w)`: homological degree, internal degree and an auxiliary weight
//! that keeps degree-zero polynomial generators finite.

mod tor;

pub use tor::{change_of_rings, tor, tor_bar, tor_koszul, ChangeOfRings, Module, TorCaps, TorResult, TorTable};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::linalg::{collect, SparseVec};

const MAX_GENERATORS: usize = 64;
const MAX_DEGREE: i64 = 4096;
const MAX_BASIS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "height")]
pub enum Kind {
    Poly,
    Trunc(u32),
    Ext,
    Divided,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Multi {
    pub s: i64,
    pub t: i64,
    pub w: i64,
}

impl Multi {
    pub fn new(s: i64, t: i64, w: i64) -> Self {
        Multi { s, t, w }
    }

    pub fn total(&self) -> i64 {
        self.s + self.t
    }

    fn scale(&self, k: i64) -> Self {
        Multi::new(self.s * k, self.t * k, self.w * k)
    }
}

impl std::ops::Add for Multi {
    type Output = Multi;
    fn add(self, o: Multi) -> Multi {
        Multi::new(self.s + o.s, self.t + o.t, self.w + o.w)
    }
}

impl std::ops::Sub for Multi {
    type Output = Multi;
    fn sub(self, o: Multi) -> Multi {
        Multi::new(self.s - o.s, self.t - o.t, self.w - o.w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Generator {
    pub name: String,
    pub deg: Multi,
    pub kind: Kind,
}

impl Generator {
    pub fn new(name: &str, s: i64, t: i64, w: i64, kind: Kind) -> Self {
        Generator { name: name.into(), deg: Multi::new(s, t, w), kind }
    }
}

/// JSON form `{name, degree, kind, height?, homological?, weight?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: i64,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    #[serde(default)]
    pub homological: i64,
    #[serde(default)]
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub p: u32,
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGCA {
    f: Fp,
    gens: Vec<Generator>,
}

impl FreeGCA {
    pub fn new(p: u32, gens: Vec<Generator>) -> Result<Self> {
        let f = Fp::new(p)?;
        if gens.len() > MAX_GENERATORS {
            return Err(Error::InvalidAlgebra(format!("at most {MAX_GENERATORS} generators")));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty() || g.name.chars().any(|c| c.is_whitespace() || "*+^-".contains(c)) {
                return Err(Error::InvalidAlgebra(format!("bad generator name {:?}", g.name)));
            }
            if gens[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidAlgebra(format!("duplicate generator {}", g.name)));
            }
            let d = g.deg;
            if d.s < 0 || d.t < 0 || d.w < 0 || d.total() > MAX_DEGREE || d.w > MAX_DEGREE {
                return Err(Error::InvalidAlgebra(format!("degree of {} out of range", g.name)));
            }
            if let Kind::Trunc(h) = g.kind {
                if h < 2 || h > 1 << 16 {
                    return Err(Error::InvalidAlgebra(format!("height of {} must lie in 2..=65536", g.name)));
                }
            }
            if p != 2 && d.total() % 2 == 1 && g.kind != Kind::Ext {
                return Err(Error::InvalidAlgebra(format!("odd generator {} must be exterior", g.name)));
            }
            if d.total() == 0 && d.w == 0 && matches!(g.kind, Kind::Poly | Kind::Divided) {
                return Err(Error::InvalidAlgebra(format!("{} has degree 0 and weight 0", g.name)));
            }
        }
        Ok(FreeGCA { f, gens })
    }

    /// Generators graded by total degree only.
    pub fn simple(p: u32, gens: &[(&str, i64, Kind)]) -> Result<Self> {
        Self::new(p, gens.iter().map(|&(n, d, k)| Generator::new(n, 0, d, 0, k)).collect())
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        let gens = spec
            .generators
            .iter()
            .map(|g| {
                let kind = match (g.kind.as_str(), g.height) {
                    ("poly", None) => Kind::Poly,
                    ("ext", None) => Kind::Ext,
                    ("divided", None) => Kind::Divided,
                    ("trunc", Some(h)) => Kind::Trunc(h),
                    _ => return Err(Error::Parse(format!("bad kind for {}", g.name))),
                };
                Ok(Generator::new(&g.name, g.homological, g.degree, g.weight, kind))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec.p, gens)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: AlgebraSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        let generators = self
            .gens
            .iter()
            .map(|g| {
                let (kind, height) = match g.kind {
                    Kind::Poly => ("poly", None),
                    Kind::Ext => ("ext", None),
                    Kind::Divided => ("divided", None),
                    Kind::Trunc(h) => ("trunc", Some(h)),
                };
                GeneratorSpec {
                    name: g.name.clone(),
                    degree: g.deg.t,
                    kind: kind.into(),
                    height,
                    homological: g.deg.s,
                    weight: g.deg.w,
                }
            })
            .collect();
        AlgebraSpec { p: self.f.p(), generators }
    }

    pub fn p(&self) -> u32 {
        self.f.p()
    }

    pub fn field(&self) -> Fp {
        self.f
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.gens.iter().find(|g| g.name == name)
    }

    /// Tensor product; generator names must be disjoint.
    pub fn tensor(&self, other: &FreeGCA) -> Result<FreeGCA> {
        if self.p() != other.p() {
            return Err(Error::InvalidAlgebra("tensor of algebras over different primes".into()));
        }
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        FreeGCA::new(self.p(), gens)
    }

    fn reject_degree_zero_poly(&self) -> Result<()> {
        match self.gens.iter().find(|g| g.deg.total() == 0 && matches!(g.kind, Kind::Poly | Kind::Divided)) {
            Some(g) => Err(Error::InvalidAlgebra(format!("{} has total degree 0; graded pieces are infinite", g.name))),
            None => Ok(()),
        }
    }

    /// Labeled basis per total degree `0..=cap`.
    pub fn basis(&self, cap: i64) -> Result<Vec<Vec<String>>> {
        self.reject_degree_zero_poly()?;
        let w = Window::new(self, cap, None)?;
        let mut out = vec![Vec::new(); (cap.max(-1) + 1) as usize];
        for m in w.basis() {
            out[w.degree(m).total() as usize].push(w.label(m));
        }
        Ok(out)
    }

    /// Dimensions per total degree, by monomial enumeration.
    pub fn poincare_series(&self, cap: i64) -> Result<Vec<usize>> {
        Ok(self.basis(cap)?.iter().map(Vec::len).collect())
    }

    /// Dimensions per total degree, from the product of one-generator series.
    pub fn poincare_by_product(&self, cap: i64) -> Result<Vec<usize>> {
        self.reject_degree_zero_poly()?;
        let len = (cap.max(-1) + 1) as usize;
        let mut acc = vec![0usize; len];
        if len > 0 {
            acc[0] = 1;
        }
        for g in &self.gens {
            let n = g.deg.total() as usize;
            let max_k = match g.kind {
                Kind::Poly | Kind::Divided => usize::MAX,
                Kind::Ext => 1,
                Kind::Trunc(h) => h as usize - 1,
            };
            let mut next = vec![0usize; len];
            for (d, &c) in acc.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mut k = 0;
                while k <= max_k && d + k * n < len {
                    next[d + k * n] += c;
                    if n == 0 {
                        break;
                    }
                    k += 1;
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Dimensions per `(s, t)` with `s + t ≤ cap`.
    pub fn bigraded_dims(&self, cap: i64) -> Result<BTreeMap<(i64, i64), usize>> {
        self.reject_degree_zero_poly()?;
        let w = Window::new(self, cap, None)?;
        let mut out = BTreeMap::new();
        for m in w.basis() {
            let d = w.degree(m);
            *out.entry((d.s, d.t)).or_insert(0) += 1;
        }
        Ok(out)
    }
}

impl fmt::Display for FreeGCA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "F_{}", self.p());
        }
        let parts: Vec<String> = self
            .gens
            .iter()
            .map(|g| match g.kind {
                Kind::Poly => format!("P({})", g.name),
                Kind::Trunc(h) => format!("P_{h}({})", g.name),
                Kind::Ext => format!("E({})", g.name),
                Kind::Divided => format!("Γ({})", g.name),
            })
            .collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// One factor of the expanded algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digit {
    pub gen: usize,
    /// `i` for the digit `γ_{p^i}` of a divided generator, else 0.
    pub level: u32,
    pub deg: Multi,
    pub max_exp: Option<u32>,
    pub divided: bool,
    pub odd: bool,
}

pub type Mono = Vec<u32>;
pub type AElem = BTreeMap<Mono, u32>;

/// Monomial written by generator names; for divided generators the exponent is the divided-power index.
pub type MonoSpec = Vec<(String, u32)>;

/// The expanded algebra restricted to total degree `≤ cap` and weight `≤ weight_cap`.
#[derive(Clone, Debug)]
pub struct Window {
    f: Fp,
    alg: FreeGCA,
    digits: Vec<Digit>,
    cap: i64,
    weight_cap: Option<i64>,
    basis: Vec<Mono>,
    index: HashMap<Mono, usize>,
    slices: BTreeMap<Multi, Vec<usize>>,
    slot: Vec<usize>,
}

impl Window {
    pub fn new(alg: &FreeGCA, cap: i64, weight_cap: Option<i64>) -> Result<Self> {
        let p = alg.p() as i64;
        let mut digits = Vec::new();
        for (gi, g) in alg.gens.iter().enumerate() {
            let n = g.deg.total();
            let finite = n > 0 || (g.deg.w > 0 && weight_cap.is_some());
            if !finite && matches!(g.kind, Kind::Poly | Kind::Divided) {
                return Err(Error::WindowTooSmall(format!("{} needs a weight cap", g.name)));
            }
            let odd = n % 2 == 1 && p != 2;
            match g.kind {
                Kind::Divided => {
                    let mut level = 0u32;
                    let mut scale = 1i64;
                    loop {
                        let deg = g.deg.scale(scale);
                        if deg.total() > cap || weight_cap.is_some_and(|wc| deg.w > wc) {
                            break;
                        }
                        digits.push(Digit { gen: gi, level, deg, max_exp: Some(p as u32 - 1), divided: true, odd });
                        level += 1;
                        scale = scale.saturating_mul(p);
                        if level > 40 {
                            break;
                        }
                    }
                }
                _ => {
                    let max_exp = match g.kind {
                        Kind::Poly => None,
                        Kind::Ext => Some(1),
                        Kind::Trunc(h) => Some(h - 1),
                        Kind::Divided => unreachable!(),
                    };
                    digits.push(Digit { gen: gi, level: 0, deg: g.deg, max_exp, divided: false, odd });
                }
            }
        }
        let mut w = Window {
            f: alg.f,
            alg: alg.clone(),
            digits,
            cap,
            weight_cap,
            basis: Vec::new(),
            index: HashMap::new(),
            slices: BTreeMap::new(),
            slot: Vec::new(),
        };
        let mut basis = Vec::new();
        let mut cur = vec![0u32; w.digits.len()];
        w.enumerate(0, Multi::default(), &mut cur, &mut basis)?;
        basis.sort_by(|a, b| w.degree(a).cmp(&w.degree(b)).then_with(|| a.cmp(b)));
        for (i, m) in basis.iter().enumerate() {
            w.index.insert(m.clone(), i);
            let d = w.degree(m);
            let sl = w.slices.entry(d).or_default();
            w.slot.push(sl.len());
            sl.push(i);
        }
        w.basis = basis;
        Ok(w)
    }

    fn enumerate(&self, j: usize, deg: Multi, cur: &mut Mono, out: &mut Vec<Mono>) -> Result<()> {
        if j == self.digits.len() {
            if out.len() >= MAX_BASIS {
                return Err(Error::WindowTooSmall("basis exceeds the enumeration cap".into()));
            }
            out.push(cur.clone());
            return Ok(());
        }
        let dg = self.digits[j].deg;
        let mut e = 0u32;
        let mut d = deg;
        loop {
            cur[j] = e;
            self.enumerate(j + 1, d, cur, out)?;
            e += 1;
            d = d + dg;
            let over = d.total() > self.cap || self.weight_cap.is_some_and(|wc| d.w > wc);
            if over || self.digits[j].max_exp.is_some_and(|m| e > m) || (dg.total() == 0 && dg.w == 0 && self.digits[j].max_exp.is_none()) {
                break;
            }
        }
        cur[j] = 0;
        Ok(())
    }

    pub fn algebra(&self) -> &FreeGCA {
        &self.alg
    }

    pub fn field(&self) -> Fp {
        self.f
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }

    pub fn weight_cap(&self) -> Option<i64> {
        self.weight_cap
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn basis(&self) -> &[Mono] {
        &self.basis
    }

    pub fn slices(&self) -> &BTreeMap<Multi, Vec<usize>> {
        &self.slices
    }

    pub fn slice(&self, d: Multi) -> &[usize] {
        self.slices.get(&d).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, m: &Mono) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Position of basis element `i` inside its slice.
    pub fn slot(&self, i: usize) -> usize {
        self.slot[i]
    }

    pub fn unit(&self) -> Mono {
        vec![0; self.digits.len()]
    }

    pub fn degree(&self, m: &Mono) -> Multi {
        m.iter().zip(&self.digits).fold(Multi::default(), |acc, (&e, d)| acc + d.deg.scale(e as i64))
    }

    pub fn digit_index(&self, gen: &str, level: u32) -> Option<usize> {
        let gi = self.alg.gens.iter().position(|g| g.name == gen)?;
        self.digits.iter().position(|d| d.gen == gi && d.level == level)
    }

    /// Product of monomials, `None` when it vanishes.
    pub fn mono_mul(&self, a: &Mono, b: &Mono) -> Option<(u32, Mono)> {
        let f = &self.f;
        let mut coef = 1u32;
        let mut out = Vec::with_capacity(a.len());
        for (j, d) in self.digits.iter().enumerate() {
            let e = a[j] + b[j];
            if d.max_exp.is_some_and(|m| e > m) {
                return None;
            }
            if d.divided {
                coef = f.mul(coef, f.binom(e as u64, a[j] as u64));
                if coef == 0 {
                    return None;
                }
            }
            out.push(e);
        }
        if f.p() != 2 {
            // Moving each odd factor of b left past the odd factors of a standing after it.
            let mut odd_a_after = 0u32;
            let mut parity = 0u32;
            for j in (0..self.digits.len()).rev() {
                if self.digits[j].odd {
                    parity += b[j] * odd_a_after;
                    odd_a_after += a[j];
                }
            }
            if parity % 2 == 1 {
                coef = f.neg(coef);
            }
        }
        Some((coef, out))
    }

    pub fn mul(&self, x: &AElem, y: &AElem) -> AElem {
        let f = &self.f;
        let mut out = AElem::new();
        for (a, &ca) in x {
            for (b, &cb) in y {
                if let Some((c, m)) = self.mono_mul(a, b) {
                    let e = out.entry(m).or_insert(0);
                    *e = f.add(*e, f.mul(c, f.mul(ca, cb)));
                }
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn add(&self, x: &AElem, y: &AElem) -> AElem {
        let mut out = x.clone();
        for (m, &c) in y {
            let e = out.entry(m.clone()).or_insert(0);
            *e = self.f.add(*e, c);
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn scale(&self, c: u32, x: &AElem) -> AElem {
        let c = c % self.f.p();
        if c == 0 {
            return AElem::new();
        }
        x.iter().map(|(m, &v)| (m.clone(), self.f.mul(c, v))).collect()
    }

    pub fn mono_elem(m: Mono) -> AElem {
        [(m, 1)].into()
    }

    pub fn one(&self) -> AElem {
        Self::mono_elem(self.unit())
    }

    /// `g^k`, or `γ_k g` for a divided generator; zero past a truncation.
    pub fn power(&self, gen: &str, k: u32) -> Result<AElem> {
        let gi = self
            .alg
            .gens
            .iter()
            .position(|g| g.name == gen)
            .ok_or_else(|| Error::InvalidAlgebra(format!("unknown generator {gen}")))?;
        let g = &self.alg.gens[gi];
        let mut m = self.unit();
        if g.kind == Kind::Divided {
            let p = self.f.p();
            let (mut k, mut level) = (k, 0u32);
            while k > 0 {
                let digit = k % p;
                if digit > 0 {
                    let j = self
                        .digits
                        .iter()
                        .position(|d| d.gen == gi && d.level == level)
                        .ok_or_else(|| Error::WindowTooSmall(format!("γ-digit {level} of {gen} beyond the cap")))?;
                    m[j] = digit;
                }
                k /= p;
                level += 1;
            }
            return Ok(Self::mono_elem(m));
        }
        let j = self.digits.iter().position(|d| d.gen == gi).unwrap();
        if self.digits[j].max_exp.is_some_and(|mx| k > mx) {
            return Ok(AElem::new());
        }
        m[j] = k;
        Ok(Self::mono_elem(m))
    }

    pub fn eval_mono(&self, spec: &[(String, u32)]) -> Result<AElem> {
        spec.iter().try_fold(self.one(), |acc, (g, k)| Ok(self.mul(&acc, &self.power(g, *k)?)))
    }

    /// `Σ c_i m_i` from coefficient/monomial pairs.
    pub fn eval(&self, terms: &[(i64, MonoSpec)]) -> Result<AElem> {
        terms.iter().try_fold(AElem::new(), |acc, (c, m)| {
            Ok(self.add(&acc, &self.scale(self.f.reduce(*c), &self.eval_mono(m)?)))
        })
    }

    pub fn label(&self, m: &Mono) -> String {
        let p = self.f.p() as u64;
        let mut parts = Vec::new();
        for (gi, g) in self.alg.gens.iter().enumerate() {
            let mut k = 0u64;
            let mut any = false;
            for (j, d) in self.digits.iter().enumerate().filter(|(_, d)| d.gen == gi) {
                if m[j] > 0 {
                    any = true;
                    k += m[j] as u64 * p.pow(d.level);
                }
            }
            if !any {
                continue;
            }
            parts.push(match (g.kind, k) {
                (_, 1) => g.name.clone(),
                (Kind::Divided, k) => format!("γ{k}{}", g.name),
                (_, k) => format!("{}^{k}", g.name),
            });
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("·")
        }
    }

    pub fn elem_label(&self, x: &AElem) -> String {
        if x.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> =
            x.iter().map(|(m, &c)| if c == 1 { self.label(m) } else { format!("{c}·{}", self.label(m)) }).collect();
        parts.join(" + ")
    }

    /// Coordinates of a homogeneous element in its slice.
    pub fn coords(&self, x: &AElem, d: Multi) -> Result<SparseVec> {
        let mut terms = Vec::with_capacity(x.len());
        for (m, &c) in x {
            let i = self.index_of(m).ok_or_else(|| Error::WindowTooSmall(format!("{} beyond the cap", self.label(m))))?;
            if self.degree(m) != d {
                return Err(Error::Inconsistent(format!("{} is not in degree {d:?}", self.label(m))));
            }
            terms.push((self.slot[i], c));
        }
        Ok(collect(&self.f, terms))
    }

    pub fn from_coords(&self, d: Multi, v: &[(usize, u32)]) -> AElem {
        let sl = self.slice(d);
        v.iter().map(|&(k, c)| (self.basis[sl[k]].clone(), c)).collect()
    }
}

/// A derivation of odd total degree, given on digits and extended by Leibniz.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub shift: Multi,
    /// Image of each digit of the window it was built for.
    pub images: Vec<AElem>,
}

impl Derivation {
    pub fn zero(w: &Window, shift: Multi) -> Self {
        Derivation { shift, images: vec![AElem::new(); w.digits.len()] }
    }

    /// Checks that every image is homogeneous of the shifted degree.
    pub fn check_degrees(&self, w: &Window) -> Result<()> {
        if self.shift.total().rem_euclid(2) != 1 && w.f.p() != 2 {
            return Err(Error::Inconsistent("derivation must have odd total degree".into()));
        }
        for (j, img) in self.images.iter().enumerate() {
            let want = w.digits[j].deg + self.shift;
            if let Some(m) = img.keys().find(|m| w.degree(m) != want) {
                return Err(Error::Inconsistent(format!(
                    "image of digit {} has term {} outside degree {want:?}",
                    j,
                    w.label(m)
                )));
            }
        }
        Ok(())
    }

    pub fn apply_mono(&self, w: &Window, m: &Mono) -> AElem {
        let f = &w.f;
        let mut out = AElem::new();
        let mut prefix_parity = 0i64;
        for (j, d) in w.digits.iter().enumerate() {
            let a = m[j];
            if a > 0 && !self.images[j].is_empty() {
                let coef = if d.divided { 1 } else { f.reduce(a as i64) };
                if coef != 0 {
                    // m = P·z_j·S with P before j; d(z_j) = coef·z_j'·d(g_j).
                    let mut left = w.unit();
                    left[..j].copy_from_slice(&m[..j]);
                    left[j] = a - 1;
                    let mut right = w.unit();
                    right[j + 1..].copy_from_slice(&m[j + 1..]);
                    let sign = f.sign(prefix_parity % 2 == 1 && f.p() != 2);
                    let t = w.mul(&w.mul(&Window::mono_elem(left), &self.images[j]), &Window::mono_elem(right));
                    out = w.add(&out, &w.scale(f.mul(sign, coef), &t));
                }
            }
            prefix_parity += a as i64 * d.deg.total();
        }
        out
    }

    pub fn apply(&self, w: &Window, x: &AElem) -> AElem {
        x.iter().fold(AElem::new(), |acc, (m, &c)| w.add(&acc, &w.scale(c, &self.apply_mono(w, m))))
    }

    /// First basis monomial with `d(d m) ≠ 0`, if any.
    pub fn square_witness(&self, w: &Window) -> Option<String> {
        w.basis.iter().find(|m| !self.apply(w, &self.apply_mono(w, m)).is_empty()).map(|m| w.label(m))
    }

    /// Matrix from slice `src` to slice `src + shift`, columns in slice order.
    pub fn matrix(&self, w: &Window, src: Multi) -> Result<crate::linalg::SparseMatrix> {
        let tgt = src + self.shift;
        let cols = w
            .slice(src)
            .iter()
            .map(|&i| w.coords(&self.apply_mono(w, &w.basis[i]), tgt))
            .collect::<Result<Vec<_>>>()?;
        Ok(crate::linalg::SparseMatrix::new(w.slice(tgt).len(), cols))
    }
}

/// Parses `c*a^2*b + d - e` into coefficient/monomial pairs.
pub fn parse_expr(s: &str) -> Result<Vec<(i64, MonoSpec)>> {
    let s = s.trim();
    if s.is_empty() || s.len() > 4096 {
        return Err(Error::Parse("empty or oversized expression".into()));
    }
    if s == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut rest = s;
    loop {
        let rest_trim = rest.trim_start();
        let cut = rest_trim.find(['+', '-']).unwrap_or(rest_trim.len());
        let (term, tail) = rest_trim.split_at(cut);
        if term.trim().is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let mut coef = sign;
        let mut mono = MonoSpec::new();
        for factor in term.split('*').map(str::trim) {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in {s:?}")));
            }
            if let Ok(c) = factor.parse::<i64>() {
                coef = coef.checked_mul(c).ok_or_else(|| Error::Parse("coefficient overflow".into()))?;
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n.trim(), e.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                None => (factor, 1),
            };
            if name.is_empty() || name.chars().any(|c| c.is_whitespace()) {
                return Err(Error::Parse(format!("bad factor {factor:?}")));
            }
            mono.push((name.to_string(), exp));
        }
        terms.push((coef, mono));
        if tail.is_empty() {
            break;
        }
        sign = if tail.starts_with('-') { -1 } else { 1 };
        rest = &tail[1..];
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_exts(p: u32) -> FreeGCA {
        FreeGCA::simple(p, &[("e", 1, Kind::Ext), ("u", 2, Kind::Poly), ("g", 2, Kind::Divided), ("v", 4, Kind::Trunc(3))])
            .unwrap()
    }

    #[test]
    fn series_by_enumeration_and_product_agree() {
        for p in [2, 3, 5] {
            let a = all_exts(p);
            assert_eq!(a.poincare_series(30).unwrap(), a.poincare_by_product(30).unwrap());
        }
    }

    #[test]
    fn series_examples() {
        let a = FreeGCA::simple(3, &[("e0", 1, Kind::Ext), ("m0", 2, Kind::Poly)]).unwrap();
        assert!(a.poincare_series(20).unwrap().iter().all(|&c| c == 1));
        let g = FreeGCA::simple(5, &[("x", 2, Kind::Divided)]).unwrap();
        let s = g.poincare_series(40).unwrap();
        assert!(s.iter().enumerate().all(|(n, &c)| c == usize::from(n % 2 == 0)));
        assert_eq!(FreeGCA::simple(3, &[]).unwrap().poincare_series(3).unwrap(), vec![1, 0, 0, 0]);
        let p0 = FreeGCA::new(3, vec![Generator::new("p", 0, 0, 1, Kind::Poly)]).unwrap();
        assert!(p0.basis(4).is_err());
    }

    #[test]
    fn divided_power_law_and_commutativity() {
        for p in [2u32, 3, 5] {
            let a = all_exts(p);
            let w = Window::new(&a, 2 * (p * p) as i64 * 2, None).unwrap();
            let f = w.field();
            let cap = 2 * p * p;
            for i in 0..=cap {
                for j in 0..=cap - i {
                    let lhs = w.mul(&w.power("g", i).unwrap(), &w.power("g", j).unwrap());
                    let rhs = w.scale(f.binom((i + j) as u64, i as u64), &w.power("g", i + j).unwrap());
                    assert_eq!(lhs, rhs, "p={p} i={i} j={j}");
                }
            }
            let small: Vec<&Mono> = w.basis().iter().filter(|m| w.degree(m).total() <= 9).collect();
            for a in &small {
                for b in &small {
                    let ab = w.mul(&Window::mono_elem((*a).clone()), &Window::mono_elem((*b).clone()));
                    let ba = w.mul(&Window::mono_elem((*b).clone()), &Window::mono_elem((*a).clone()));
                    let odd = w.degree(a).total() * w.degree(b).total() % 2 == 1;
                    assert_eq!(ab, w.scale(f.sign(odd), &ba));
                }
            }
        }
    }

    #[test]
    fn associativity_on_small_basis() {
        let w = Window::new(&all_exts(3), 12, None).unwrap();
        let small: Vec<AElem> =
            w.basis().iter().filter(|m| w.degree(m).total() <= 5).map(|m| Window::mono_elem(m.clone())).collect();
        for a in &small {
            for b in &small {
                for c in &small {
                    assert_eq!(w.mul(&w.mul(a, b), c), w.mul(a, &w.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn leibniz_divided_rule_matches_closed_form() {
        // d γ_k = λ γ_{k-p} when d γ_{p^i} = λ γ_{p^i - p} for i ≥ 1.
        for p in [2u32, 3, 5] {
            let a = FreeGCA::simple(p, &[("l", 2 * p as i64 - 1, Kind::Ext), ("g", 2, Kind::Divided)])
                .unwrap();
            let cap = 4 * (p * p) as i64;
            let w = Window::new(&a, cap, None).unwrap();
            let mut d = Derivation::zero(&w, Multi::new(0, -1, 0));
            for (j, dg) in w.digits().iter().enumerate() {
                if dg.divided && dg.level >= 1 {
                    let k = p.pow(dg.level) - p;
                    d.images[j] = w.mul(&w.power("l", 1).unwrap(), &w.power("g", k).unwrap());
                }
            }
            for k in 0..=(cap / 2) as u32 {
                let lhs = d.apply(&w, &w.power("g", k).unwrap());
                let rhs = if k >= p { w.mul(&w.power("l", 1).unwrap(), &w.power("g", k - p).unwrap()) } else { AElem::new() };
                assert_eq!(lhs, rhs, "p={p} k={k}");
            }
            assert_eq!(d.square_witness(&w), None);
        }
    }

    #[test]
    fn expression_parser() {
        let e = parse_expr("2*a^3*b - c + 0*d").unwrap();
        assert_eq!(e[0], (2, vec![("a".into(), 3), ("b".into(), 1)]));
        assert_eq!(e[1], (-1, vec![("c".into(), 1)]));
        assert!(parse_expr("a + + b").is_err());
        assert!(parse_expr("a^x").is_err());
        assert_eq!(parse_expr("0").unwrap(), vec![]);
    }

    #[test]
    fn json_roundtrip_and_rejections() {
        let a = all_exts(3);
        let js = serde_json::to_string(&a.to_spec()).unwrap();
        assert_eq!(FreeGCA::from_json(&js).unwrap(), a);
        assert!(FreeGCA::simple(3, &[("x", 3, Kind::Poly)]).is_err());
        assert!(FreeGCA::simple(2, &[("x", 3, Kind::Poly)]).is_ok());
        assert!(FreeGCA::simple(3, &[("x", 2, Kind::Poly), ("x", 4, Kind::Ext)]).is_err());
        assert!(FreeGCA::from_json("{\"p\":4,\"generators\":[]}").is_err());
    }
}
