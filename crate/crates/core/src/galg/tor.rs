//! Tor over a free graded-commutative algebra by two independent routes: the
//! two-sided Koszul complex and the normalized two-sided bar complex.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{AElem, Derivation, FreeGCA, Generator, Kind, MonoSpec, Multi, Window};
use crate::error::{Error, Result};
use crate::linalg::{collect, SparseMatrix};

/// An algebra with an action of the base ring given by generator images.
#[derive(Clone, Debug)]
pub struct Module {
    pub alg: FreeGCA,
    /// Image of each named ring generator; absent generators act by zero.
    pub action: Vec<(String, Vec<(i64, MonoSpec)>)>,
}

impl Module {
    pub fn trivial(alg: FreeGCA) -> Self {
        Module { alg, action: Vec::new() }
    }

    pub fn ground(p: u32) -> Result<Self> {
        Ok(Module::trivial(FreeGCA::new(p, Vec::new())?))
    }

    pub fn is_trivial(&self) -> bool {
        self.action.iter().all(|(_, e)| e.iter().all(|(c, _)| c.rem_euclid(self.alg.p() as i64) == 0))
    }

    fn image(&self, gen: &str) -> &[(i64, MonoSpec)] {
        self.action.iter().find(|(g, _)| g == gen).map_or(&[], |(_, e)| e.as_slice())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TorCaps {
    /// Tor is reported for total degree `≤ total`.
    pub total: i64,
    pub weight: Option<i64>,
    pub bar_total: i64,
    pub bar_weight: Option<i64>,
}

impl TorCaps {
    pub fn uniform(total: i64, weight: Option<i64>) -> Self {
        TorCaps { total, weight, bar_total: total, bar_weight: weight }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TorTable {
    pub p: u32,
    pub route: &'static str,
    pub total_cap: i64,
    pub weight_cap: Option<i64>,
    /// Nonzero dimensions per `(s, t, w)`.
    pub dims: BTreeMap<Multi, usize>,
}

impl TorTable {
    pub fn dim(&self, m: Multi) -> usize {
        self.dims.get(&m).copied().unwrap_or(0)
    }

    pub fn covers(&self, m: Multi) -> bool {
        m.total() <= self.total_cap && self.weight_cap.is_none_or(|w| m.w <= w)
    }

    pub fn by_bidegree(&self) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        for (m, &d) in &self.dims {
            *out.entry((m.s, m.t)).or_insert(0) += d;
        }
        out
    }

    pub fn by_total(&self) -> Vec<usize> {
        let mut out = vec![0; (self.total_cap.max(-1) + 1) as usize];
        for (m, &d) in &self.dims {
            out[m.total() as usize] += d;
        }
        out
    }
}

/// Homology dimensions of a window under a degree `(-1, 0, 0)` derivation, through `cap`.
fn window_homology(w: &Window, d: &Derivation, cap: i64) -> Result<BTreeMap<Multi, usize>> {
    let slices: Vec<Multi> = w.slices().keys().copied().collect();
    let ranks: HashMap<Multi, usize> = slices
        .par_iter()
        .map(|&m| Ok((m, d.matrix(w, m)?.rank(&w.field()))))
        .collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for &m in slices.iter().filter(|m| m.total() <= cap) {
        let up = m - d.shift;
        let h = w.slice(m).len() - ranks[&m] - ranks.get(&up).copied().unwrap_or(0);
        if h > 0 {
            out.insert(m, h);
        }
    }
    Ok(out)
}

struct Resolution {
    gens: Vec<Generator>,
    /// For each ring generator: name of `[x]`, and of the divided class `φ[x]` in bidegree `(2, h|x|)` for truncated `x`.
    classes: Vec<(String, Option<(String, u32)>)>,
}

fn resolution_generators(r: &FreeGCA) -> Result<Resolution> {
    let p = r.p();
    let mut gens = Vec::new();
    let mut classes = Vec::new();
    for x in r.generators() {
        if x.deg.s != 0 {
            return Err(Error::Unsupported(format!("ring generator {} has homological degree", x.name)));
        }
        let bx = format!("[{}]", x.name);
        let even = x.deg.total() % 2 == 0 || p == 2;
        let (s1, t, w) = (1, x.deg.t, x.deg.w);
        match x.kind {
            Kind::Poly if even => {
                gens.push(Generator::new(&bx, s1, t, w, Kind::Ext));
                classes.push((bx, None));
            }
            Kind::Ext => {
                gens.push(Generator::new(&bx, s1, t, w, Kind::Divided));
                classes.push((bx, None));
            }
            Kind::Trunc(h) if even => {
                let hx = format!("φ[{}]", x.name);
                gens.push(Generator::new(&bx, s1, t, w, Kind::Ext));
                gens.push(Generator::new(&hx, 2, t * h as i64, w * h as i64, Kind::Divided));
                classes.push((bx, Some((hx, h))));
            }
            _ => return Err(Error::Unsupported(format!("no Koszul resolution for generator {}", x.name))),
        }
    }
    Ok(Resolution { gens, classes })
}

/// Renames right-hand generators that clash with left-hand ones.
fn right_names(a: &FreeGCA, b: &FreeGCA) -> HashMap<String, String> {
    b.generators()
        .iter()
        .map(|g| {
            let mut n = g.name.clone();
            while a.generator(&n).is_some() {
                n.push('\'');
            }
            (g.name.clone(), n)
        })
        .collect()
}

fn rename(spec: &[(i64, MonoSpec)], names: &HashMap<String, String>) -> Vec<(i64, MonoSpec)> {
    spec.iter()
        .map(|(c, m)| (*c, m.iter().map(|(g, k)| (names.get(g).cloned().unwrap_or_else(|| g.clone()), *k)).collect()))
        .collect()
}

/// The two-sided Koszul complex `A ⊗ Λ ⊗ B` as a free algebra with its derivation.
fn koszul_complex(r: &FreeGCA, a: &Module, b: &Module, cap: i64, weight_cap: Option<i64>) -> Result<(Window, Derivation)> {
    let res = resolution_generators(r)?;
    let names = right_names(&a.alg, &b.alg);
    let mut gens = a.alg.generators().to_vec();
    gens.extend(b.alg.generators().iter().map(|g| Generator { name: names[&g.name].clone(), ..g.clone() }));
    for g in &res.gens {
        if gens.iter().any(|h| h.name == g.name) {
            return Err(Error::InvalidAlgebra(format!("generator name {} is reserved", g.name)));
        }
    }
    gens.extend(res.gens.iter().cloned());
    let k = FreeGCA::new(r.p(), gens)?;
    let w = Window::new(&k, cap, weight_cap)?;
    let f = w.field();
    let mut d = Derivation::zero(&w, Multi::new(-1, 0, 0));
    for (x, (bx, hx)) in r.generators().iter().zip(&res.classes) {
        let pa = w.eval(a.image(&x.name))?;
        let pb = w.eval(&rename(b.image(&x.name), &names))?;
        let c = w.add(&pa, &w.scale(f.neg(1), &pb));
        let bx_digits: Vec<usize> = (0..w.digits().len()).filter(|&j| k.generators()[w.digits()[j].gen].name == *bx).collect();
        for &j in &bx_digits {
            let level = w.digits()[j].level;
            d.images[j] = if w.digits()[j].divided {
                let lower = f.p().pow(level) - 1;
                w.mul(&c, &w.power(bx, lower)?)
            } else {
                c.clone()
            };
        }
        if let Some((hname, h)) = hx {
            let mut cp = AElem::new();
            for i in 0..*h {
                let t = w.mul(&pow_elem(&w, &pa, i), &pow_elem(&w, &pb, h - 1 - i));
                cp = w.add(&cp, &t);
            }
            let cx = w.mul(&cp, &w.power(bx, 1)?);
            for j in 0..w.digits().len() {
                if k.generators()[w.digits()[j].gen].name == *hname {
                    let lower = f.p().pow(w.digits()[j].level) - 1;
                    d.images[j] = w.mul(&cx, &w.power(hname, lower)?);
                }
            }
        }
    }
    d.check_degrees(&w)?;
    if let Some(witness) = d.square_witness(&w) {
        return Err(Error::DSquaredNonzero { witness });
    }
    Ok((w, d))
}

fn pow_elem(w: &Window, x: &AElem, k: u32) -> AElem {
    (0..k).fold(w.one(), |acc, _| w.mul(&acc, x))
}

/// Tor by the two-sided Koszul complex; the ring must be a tensor of
/// polynomial, exterior and truncated factors in homological degree 0.
pub fn tor_koszul(r: &FreeGCA, a: &Module, b: &Module, total: i64, weight: Option<i64>) -> Result<TorTable> {
    let (w, d) = koszul_complex(r, a, b, total + 1, weight)?;
    Ok(TorTable { p: r.p(), route: "koszul", total_cap: total, weight_cap: weight, dims: window_homology(&w, &d, total)? })
}

type BarCell = (usize, Vec<usize>, usize);

struct BarData {
    ra: Window,
    rbar: Vec<usize>,
    wa: Window,
    wb: Window,
    phi_a: Vec<AElem>,
    phi_b: Vec<AElem>,
}

fn algebra_map(r: &Window, target: &Window, m: &Module, names: Option<&HashMap<String, String>>) -> Result<Vec<AElem>> {
    let mut gen_images = Vec::new();
    for dg in r.digits() {
        let g = &r.algebra().generators()[dg.gen];
        if dg.divided {
            return Err(Error::Unsupported(format!("bar route over divided generator {}", g.name)));
        }
        let spec = match names {
            Some(n) => rename(m.image(&g.name), n),
            None => m.image(&g.name).to_vec(),
        };
        gen_images.push(target.eval(&spec)?);
    }
    Ok(r.basis()
        .iter()
        .map(|mono| {
            mono.iter()
                .zip(&gen_images)
                .fold(target.one(), |acc, (&e, img)| target.mul(&acc, &pow_elem(target, img, e)))
        })
        .collect())
}

/// Tor by the normalized two-sided bar complex `A ⊗ R̄^{⊗s} ⊗ B`.
pub fn tor_bar(r: &FreeGCA, a: &Module, b: &Module, total: i64, weight: Option<i64>) -> Result<TorTable> {
    for (what, alg) in [("ring", r), ("left module", &a.alg), ("right module", &b.alg)] {
        if alg.generators().iter().any(|g| g.deg.s != 0) {
            return Err(Error::Unsupported(format!("{what} has generators of homological degree")));
        }
    }
    if a.is_trivial() && b.is_trivial() && !(a.alg.generators().is_empty() && b.alg.generators().is_empty()) {
        // B(A, R, B) = A ⊗ B(F, R, F) ⊗ B as complexes.
        let ground = Module::ground(r.p())?;
        let core = tor_bar(r, &ground, &ground, total, weight)?;
        let wa = Window::new(&a.alg, total, weight)?;
        let wb = Window::new(&b.alg, total, weight)?;
        let mut dims = BTreeMap::new();
        for (&ma, va) in wa.slices() {
            for (&mb, vb) in wb.slices() {
                for (&mc, &dc) in &core.dims {
                    let m = ma + mb + mc;
                    if m.total() <= total && weight.is_none_or(|wc| m.w <= wc) {
                        *dims.entry(m).or_insert(0) += va.len() * vb.len() * dc;
                    }
                }
            }
        }
        return Ok(TorTable { p: r.p(), route: "bar", total_cap: total, weight_cap: weight, dims });
    }
    let cap = total + 1;
    let ra = Window::new(r, cap, weight)?;
    let wa = Window::new(&a.alg, cap, weight)?;
    let wb = Window::new(&b.alg, cap, weight)?;
    let phi_a = algebra_map(&ra, &wa, a, None)?;
    let phi_b = algebra_map(&ra, &wb, b, None)?;
    let unit = ra.unit();
    let rbar: Vec<usize> = (0..ra.basis().len()).filter(|&i| ra.basis()[i] != unit).collect();
    let data = BarData { ra, rbar, wa, wb, phi_a, phi_b };
    let cells = enumerate_bar(&data, cap, weight)?;
    let index: HashMap<Multi, HashMap<BarCell, usize>> = cells
        .iter()
        .map(|(m, v)| (*m, v.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()))
        .collect();
    let f = r.field();
    let keys: Vec<Multi> = cells.keys().copied().collect();
    let mats: HashMap<Multi, SparseMatrix> = keys
        .par_iter()
        .map(|&m| {
            let tgt = Multi::new(m.s - 1, m.t, m.w);
            let empty = HashMap::new();
            let tindex = index.get(&tgt).unwrap_or(&empty);
            let cols = cells[&m]
                .iter()
                .map(|c| bar_boundary(&data, c, tindex).map(|terms| collect(&f, terms)))
                .collect::<Result<Vec<_>>>()?;
            Ok((m, SparseMatrix::new(tindex.len(), cols)))
        })
        .collect::<Result<_>>()?;
    for (m, mat) in &mats {
        if let Some(lower) = mats.get(&Multi::new(m.s - 1, m.t, m.w)) {
            if let Some(j) = mat.cols.iter().position(|c| !lower.apply(&f, c).is_empty()) {
                return Err(Error::DSquaredNonzero { witness: format!("bar cell {j} in degree {m:?}") });
            }
        }
    }
    let ranks: HashMap<Multi, usize> = mats.par_iter().map(|(m, mat)| (*m, mat.rank(&f))).collect();
    let mut dims = BTreeMap::new();
    for &m in keys.iter().filter(|m| m.total() <= total) {
        let up = Multi::new(m.s + 1, m.t, m.w);
        let h = cells[&m].len() - ranks[&m] - ranks.get(&up).copied().unwrap_or(0);
        if h > 0 {
            dims.insert(m, h);
        }
    }
    Ok(TorTable { p: r.p(), route: "bar", total_cap: total, weight_cap: weight, dims })
}

fn enumerate_bar(data: &BarData, cap: i64, weight: Option<i64>) -> Result<BTreeMap<Multi, Vec<BarCell>>> {
    let mut out: BTreeMap<Multi, Vec<BarCell>> = BTreeMap::new();
    let ok = |m: Multi| m.total() <= cap && weight.is_none_or(|wc| m.w <= wc);
    let mut count = 0usize;
    for (ia, ma) in data.wa.basis().iter().enumerate() {
        let da = data.wa.degree(ma);
        for (ib, mb) in data.wb.basis().iter().enumerate() {
            let base = da + data.wb.degree(mb);
            if !ok(base) {
                continue;
            }
            let mut stack: Vec<(Vec<usize>, Multi)> = vec![(Vec::new(), base)];
            while let Some((bars, deg)) = stack.pop() {
                count += 1;
                if count > 4_000_000 {
                    return Err(Error::WindowTooSmall("bar complex exceeds the enumeration cap".into()));
                }
                out.entry(deg).or_default().push((ia, bars.clone(), ib));
                for &ri in &data.rbar {
                    let nd = deg + data.ra.degree(&data.ra.basis()[ri]) + Multi::new(1, 0, 0);
                    if ok(nd) {
                        let mut nb = bars.clone();
                        nb.push(ri);
                        stack.push((nb, nd));
                    }
                }
            }
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    Ok(out)
}

/// `d(a[r_1|…|r_k]b) = ±a·r_1[…]b + Σ ±a[…|r_{i−1}r_i|…]b ± a[…]r_k·b`.
fn bar_boundary(data: &BarData, cell: &BarCell, tindex: &HashMap<BarCell, usize>) -> Result<Vec<(usize, u32)>> {
    let (ia, bars, ib) = cell;
    let f = data.ra.field();
    let k = bars.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let (wa, wb, ra) = (&data.wa, &data.wb, &data.ra);
    let deg_a = wa.degree(&wa.basis()[*ia]).total();
    let rdeg = |ri: usize| ra.degree(&ra.basis()[ri]).total();
    let eps = |i: usize| deg_a + bars[..i - 1].iter().map(|&r| rdeg(r) + 1).sum::<i64>();
    let mut terms = Vec::new();
    let mut push = |cell: BarCell, c: u32| -> Result<()> {
        let idx = tindex.get(&cell).ok_or_else(|| Error::WindowTooSmall("bar boundary leaves the window".into()))?;
        terms.push((*idx, c));
        Ok(())
    };
    let a_elem = Window::mono_elem(wa.basis()[*ia].clone());
    let left = wa.mul(&a_elem, &data.phi_a[bars[0]]);
    let s0 = f.sign(deg_a % 2 == 1);
    for (m, c) in &left {
        let j = wa.index_of(m).ok_or_else(|| Error::WindowTooSmall("action leaves the window".into()))?;
        push((j, bars[1..].to_vec(), *ib), f.mul(s0, *c))?;
    }
    for i in 2..=k {
        let (x, y) = (&ra.basis()[bars[i - 2]], &ra.basis()[bars[i - 1]]);
        if let Some((c, prod)) = ra.mono_mul(x, y) {
            let Some(pi) = ra.index_of(&prod) else { continue };
            let mut nb = bars[..i - 2].to_vec();
            nb.push(pi);
            nb.extend_from_slice(&bars[i..]);
            push((*ia, nb, *ib), f.mul(f.sign(eps(i) % 2 == 1), c))?;
        }
    }
    let b_elem = Window::mono_elem(wb.basis()[*ib].clone());
    let right = wb.mul(&data.phi_b[bars[k - 1]], &b_elem);
    let sk = f.neg(f.sign(eps(k) % 2 == 1));
    for (m, c) in &right {
        let j = wb.index_of(m).ok_or_else(|| Error::WindowTooSmall("action leaves the window".into()))?;
        push((*ia, bars[..k - 1].to_vec(), j), f.mul(sk, *c))?;
    }
    Ok(terms)
}

#[derive(Clone, Debug)]
pub struct TorResult {
    pub koszul: TorTable,
    pub bar: TorTable,
    /// `A ⊗ B ⊗ Tor^R(F_p, F_p)` when both actions are trivial.
    pub presentation: Option<FreeGCA>,
}

/// Tor by both routes, checked to agree on the bar window; for trivial
/// actions the Künneth presentation is checked against the Koszul dimensions.
pub fn tor(r: &FreeGCA, a: &Module, b: &Module, caps: TorCaps) -> Result<TorResult> {
    let koszul = tor_koszul(r, a, b, caps.total, caps.weight)?;
    let bar = tor_bar(r, a, b, caps.bar_total, caps.bar_weight)?;
    let common = |m: &Multi| koszul.covers(*m) && bar.covers(*m);
    for m in koszul.dims.keys().chain(bar.dims.keys()).filter(|m| common(m)) {
        if koszul.dim(*m) != bar.dim(*m) {
            return Err(Error::Inconsistent(format!(
                "Koszul and bar Tor differ at {m:?}: {} vs {}",
                koszul.dim(*m),
                bar.dim(*m)
            )));
        }
    }
    let presentation = if a.is_trivial() && b.is_trivial() {
        let names = right_names(&a.alg, &b.alg);
        let mut gens = a.alg.generators().to_vec();
        gens.extend(b.alg.generators().iter().map(|g| Generator { name: names[&g.name].clone(), ..g.clone() }));
        gens.extend(resolution_generators(r)?.gens);
        let pres = FreeGCA::new(r.p(), gens)?;
        let w = Window::new(&pres, caps.total, caps.weight)?;
        let pd: BTreeMap<Multi, usize> = w.slices().iter().map(|(m, v)| (*m, v.len())).collect();
        if pd != koszul.dims {
            return Err(Error::Inconsistent("Künneth presentation disagrees with the Koszul complex".into()));
        }
        Some(pres)
    } else {
        None
    };
    Ok(TorResult { koszul, bar, presentation })
}

#[derive(Clone, Debug)]
pub struct ChangeOfRings {
    pub ring: FreeGCA,
    pub left: Module,
    pub right: Module,
    pub factor: String,
}

/// For `x` polynomial in `R` acting by zero on `A`, with `B = P(x) ⊗ B'` free
/// over `P(x)`: `Tor^R(A, B) ≅ Tor^{R/(x)}(A, B')`, the action on `B'` taken mod `x`.
pub fn change_of_rings(r: &FreeGCA, a: &Module, b: &Module, x: &str) -> Result<ChangeOfRings> {
    let gx = r.generator(x).ok_or_else(|| Error::InvalidAlgebra(format!("{x} is not a ring generator")))?;
    if gx.kind != Kind::Poly {
        return Err(Error::InvalidAlgebra(format!("{x} is not polynomial")));
    }
    let bx = b.alg.generator(x).ok_or_else(|| Error::InvalidAlgebra(format!("right module has no factor {x}")))?;
    if bx.kind != Kind::Poly || bx.deg != gx.deg {
        return Err(Error::InvalidAlgebra(format!("right factor {x} does not match the ring generator")));
    }
    let p = r.p() as i64;
    let nonzero = |e: &[(i64, MonoSpec)]| e.iter().any(|(c, _)| c.rem_euclid(p) != 0);
    if nonzero(a.image(x)) {
        return Err(Error::InvalidAlgebra(format!("{x} must act by zero on the left module")));
    }
    let img = b.image(x);
    if !(img.len() == 1 && img[0].0.rem_euclid(p) == 1 && img[0].1 == vec![(x.to_string(), 1)]) {
        return Err(Error::InvalidAlgebra(format!("{x} must act on the right module by its own generator")));
    }
    let ring = FreeGCA::new(r.p(), r.generators().iter().filter(|g| g.name != x).cloned().collect())?;
    let balg = FreeGCA::new(b.alg.p(), b.alg.generators().iter().filter(|g| g.name != x).cloned().collect())?;
    let action = b
        .action
        .iter()
        .filter(|(g, _)| g != x)
        .map(|(g, e)| (g.clone(), e.iter().filter(|(_, m)| m.iter().all(|(n, k)| n != x || *k == 0)).cloned().collect()))
        .collect();
    let left = Module { alg: a.alg.clone(), action: a.action.iter().filter(|(g, _)| g != x).cloned().collect() };
    Ok(ChangeOfRings { ring, left, right: Module { alg: balg, action }, factor: x.into() })
}
