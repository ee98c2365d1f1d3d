//! Multiplicative homologically graded spectral sequences presented at the
//! algebra level.
//!
//! A [`Page`] stores, for every bidegree `(s, t)` of an `E²` algebra, a cycle
//! space `Z_r` and a boundary space `B_r ⊂ Z_r` inside the `E²` slice; the
//! page entry is `Z_r / B_r`. Differentials are given on algebra generators
//! and extended by Leibniz. `d^r` has bidegree `(−r, r − 1)`.
//!
//! A page built for `deg_max = D` keeps an `E²` window through total degree
//! `D + 1`; entries are exact through total degree `D`.

mod scenario;
mod solver;

pub use scenario::{base_ring, gamma_family, log_module, scenario, thh_z, Scenario, SCENARIOS};
pub use solver::{mutation_suite, unique_differential_solver, CandidateFamily, Mutation, SolverReport};

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galg::{AElem, Derivation, FreeGCA, Generator, Kind, MonoSpec, Multi, Window};
use crate::linalg::{kernel, Echelon, SparseMatrix, SparseVec};

#[derive(Clone, Debug, Default)]
struct Entry {
    z: Vec<SparseVec>,
    b: Vec<SparseVec>,
}

#[derive(Clone, Debug)]
pub struct Page {
    r: usize,
    w: Arc<Window>,
    entries: BTreeMap<(i64, i64), Entry>,
}

/// `d^page(γ_{p^level} g) = unit · image`, or `d^page(g)` for level 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialRule {
    pub page: usize,
    pub generator: String,
    #[serde(default)]
    pub level: u32,
    #[serde(default = "one")]
    pub unit: i64,
    pub image: Vec<(i64, MonoSpec)>,
}

fn one() -> i64 {
    1
}

impl DifferentialRule {
    /// Exponents on divided generators are divided-power indices, as in [`Window::power`].
    pub fn label(&self, w: &Window) -> String {
        let p = w.field().p();
        let src = if self.level == 0 {
            self.generator.clone()
        } else {
            format!("γ{}{}", (p as u64).pow(self.level), self.generator)
        };
        let img = match w.eval(&self.image) {
            Ok(x) if x.is_empty() => "0".to_string(),
            Ok(x) => w.elem_label(&x),
            Err(_) => format!("{:?}", self.image),
        };
        let unit = if self.unit == 1 { String::new() } else { format!("{}·", self.unit) };
        format!("d{}({src}) = {unit}{img}", self.page)
    }

    pub fn is_zero(&self) -> bool {
        self.image.is_empty()
    }
}

/// Shift of `d^r`.
pub fn shift(r: usize) -> Multi {
    Multi::new(-(r as i64), r as i64 - 1, 0)
}

fn echelon(w: &Window, vs: &[SparseVec]) -> Echelon {
    let mut e = Echelon::new(w.field());
    for v in vs {
        e.insert(v.clone(), Vec::new());
    }
    e
}

fn key(m: Multi) -> (i64, i64) {
    (m.s, m.t)
}

fn at(k: (i64, i64)) -> Multi {
    Multi::new(k.0, k.1, 0)
}

impl Page {
    /// `E²` page of `alg` with every weight discarded. Entries exact through total degree `deg_max`.
    pub fn e2(alg: &FreeGCA, deg_max: i64) -> Result<Page> {
        if deg_max < 0 {
            return Err(Error::WindowTooSmall("deg_max must be non-negative".into()));
        }
        let gens: Vec<Generator> = alg.generators().iter().map(|g| Generator { deg: Multi::new(g.deg.s, g.deg.t, 0), ..g.clone() }).collect();
        if let Some(g) = gens.iter().find(|g| g.deg.s < 0 || g.deg.t < 0) {
            return Err(Error::InvalidAlgebra(format!("{} lies outside the first quadrant", g.name)));
        }
        let flat = FreeGCA::new(alg.p(), gens)?;
        let w = Window::new(&flat, deg_max + 1, None)?;
        let entries = w
            .slices()
            .iter()
            .map(|(m, v)| (key(*m), Entry { z: (0..v.len()).map(|i| vec![(i, 1)]).collect(), b: Vec::new() }))
            .collect();
        Ok(Page { r: 2, w: Arc::new(w), entries })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> u32 {
        self.w.field().p()
    }

    pub fn deg_max(&self) -> i64 {
        self.w.cap() - 1
    }

    pub fn window(&self) -> &Window {
        &self.w
    }

    pub fn algebra(&self) -> &FreeGCA {
        self.w.algebra()
    }

    pub fn dim(&self, s: i64, t: i64) -> usize {
        self.entries.get(&(s, t)).map_or(0, |e| e.z.len() - e.b.len())
    }

    /// Nonzero entries with total degree `≤ deg_max`.
    pub fn dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.entries
            .keys()
            .filter(|k| k.0 + k.1 <= self.deg_max())
            .map(|&k| (k, self.dim(k.0, k.1)))
            .filter(|(_, d)| *d > 0)
            .collect()
    }

    /// `Σ_{s+t=n} dim E_{s,t}` for `n ≤ deg_max`.
    pub fn total_dims(&self) -> Vec<usize> {
        let mut out = vec![0; self.deg_max() as usize + 1];
        for ((s, t), d) in self.dims() {
            out[(s + t) as usize] += d;
        }
        out
    }

    /// Cycle vectors completing a basis of `B_r` to one of `Z_r`.
    pub fn representatives(&self, s: i64, t: i64) -> Vec<AElem> {
        let Some(e) = self.entries.get(&(s, t)) else { return Vec::new() };
        let mut ech = echelon(&self.w, &e.b);
        e.z.iter().filter(|z| ech.insert((*z).clone(), Vec::new())).map(|z| self.w.from_coords(at((s, t)), z)).collect()
    }

    /// Whether a homogeneous element is a cycle on this page that is not a boundary.
    pub fn is_nonzero_class(&self, x: &AElem) -> Result<bool> {
        let Some(m) = x.keys().next() else { return Ok(false) };
        let d = self.w.degree(m);
        let v = self.w.coords(x, d)?;
        let Some(e) = self.entries.get(&key(d)) else { return Ok(false) };
        Ok(echelon(&self.w, &e.z).contains(&v) && !echelon(&self.w, &e.b).contains(&v))
    }

    /// Leibniz extension of the rules living on this page.
    pub fn derivation(&self, rules: &[DifferentialRule]) -> Result<Derivation> {
        let w = &*self.w;
        let mut d = Derivation::zero(w, shift(self.r));
        for rule in rules.iter().filter(|r| r.page == self.r) {
            if w.algebra().generator(&rule.generator).is_none() {
                return Err(Error::InvalidAlgebra(format!("rule on unknown generator {}", rule.generator)));
            }
            let Some(j) = w.digit_index(&rule.generator, rule.level) else { continue };
            let f = w.field();
            let img = w.scale(f.reduce(rule.unit), &w.eval(&rule.image)?);
            d.images[j] = w.add(&d.images[j], &img);
        }
        d.check_degrees(w).map_err(|e| Error::Inconsistent(format!("illegal bidegree on page {}: {e}", self.r)))?;
        Ok(d)
    }

    /// Homology of the Leibniz-extended `d^r`, after checking it is defined on
    /// the page and squares to zero there.
    pub fn page_turn(&self, rules: &[DifferentialRule]) -> Result<Page> {
        let r = self.r;
        if rules.iter().all(|x| x.page != r || x.is_zero()) {
            return Ok(Page { r: r + 1, ..self.clone() });
        }
        let delta = self.derivation(rules)?;
        let w = &*self.w;
        let sh = shift(r);
        let keys: Vec<(i64, i64)> = self.entries.keys().copied().collect();
        let mats: BTreeMap<(i64, i64), SparseMatrix> =
            keys.par_iter().map(|&k| Ok((k, delta.matrix(w, at(k))?))).collect::<Result<_>>()?;
        let zech: BTreeMap<(i64, i64), Echelon> =
            keys.par_iter().map(|&k| (k, echelon(w, &self.entries[&k].z))).collect();
        let bech: BTreeMap<(i64, i64), Echelon> =
            keys.par_iter().map(|&k| (k, echelon(w, &self.entries[&k].b))).collect();
        let f = w.field();
        let apply = |k: (i64, i64), v: &SparseVec| mats[&k].apply(&f, v);
        let tgt = |k: (i64, i64)| key(at(k) + sh);

        let new: Vec<((i64, i64), Entry)> = keys
            .par_iter()
            .map(|&k| -> Result<((i64, i64), Entry)> {
                let e = &self.entries[&k];
                let tk = tgt(k);
                let zt = zech.get(&tk);
                let bt = bech.get(&tk);
                let in_span = |m: Option<&Echelon>, v: &SparseVec| v.is_empty() || m.is_some_and(|m| m.contains(v));
                let images: Vec<SparseVec> = e.z.iter().map(|z| apply(k, z)).collect();
                for (z, dz) in e.z.iter().zip(&images) {
                    if !in_span(zt, dz) {
                        return Err(Error::Inconsistent(format!(
                            "d{r} of {} leaves the cycles of page {r}",
                            w.elem_label(&w.from_coords(at(k), z))
                        )));
                    }
                    if !dz.is_empty() {
                        let ddz = apply(tk, dz);
                        if !in_span(bech.get(&tgt(tk)), &ddz) {
                            return Err(Error::DSquaredNonzero { witness: w.elem_label(&w.from_coords(at(k), z)) });
                        }
                    }
                }
                for b in &e.b {
                    if !in_span(bt, &apply(k, b)) {
                        return Err(Error::Inconsistent(format!(
                            "d{r} of the boundary {} is not a boundary",
                            w.elem_label(&w.from_coords(at(k), b))
                        )));
                    }
                }
                // Z_{r+1}: cycles whose image is a boundary.
                let rows = w.slice(at(tk)).len();
                let nf: Vec<SparseVec> =
                    images.iter().map(|dz| bt.map_or(dz.clone(), |b| b.reduce_full(dz.clone(), Vec::new()).0)).collect();
                let ker = kernel(&f, &SparseMatrix::new(rows, nf));
                let z: Vec<SparseVec> = ker
                    .iter()
                    .map(|c| crate::linalg::collect(&f, c.iter().flat_map(|&(i, a)| e.z[i].iter().map(move |&(j, x)| (j, f.mul(a, x))))))
                    .collect();
                // B_{r+1}: old boundaries plus images of incoming cycles.
                let mut bb = bech[&k].clone();
                let mut b = e.b.clone();
                let sk = key(at(k) - sh);
                if let Some(src) = self.entries.get(&sk) {
                    for zz in &src.z {
                        let v = apply(sk, zz);
                        if bb.insert(v.clone(), Vec::new()) {
                            b.push(v);
                        }
                    }
                }
                Ok((k, Entry { z, b }))
            })
            .collect::<Result<_>>()?;
        Ok(Page { r: r + 1, w: self.w.clone(), entries: new.into_iter().collect() })
    }

    /// `(source, target)` bidegrees with nonzero entries that `d^r` could connect below the cap.
    pub fn fitting_pairs(&self, r: usize) -> Vec<((i64, i64), (i64, i64))> {
        let dims = self.dims();
        dims.keys()
            .filter_map(|&k| {
                let t = key(at(k) + shift(r));
                dims.contains_key(&t).then_some((k, t))
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .dims()
            .iter()
            .map(|(&(s, t), &dim)| {
                let basis: Vec<String> = self.representatives(s, t).iter().map(|x| self.w.elem_label(x)).collect();
                serde_json::json!({ "s": s, "t": t, "dim": dim, "basis": basis })
            })
            .collect();
        serde_json::json!({ "r": self.r, "entries": entries })
    }
}

/// Turns pages through the last rule page, then requires that no further
/// differential fits below the cap unless the abutment already forces it to vanish.
pub fn run_to_einfty(e2: &Page, rules: &[DifferentialRule], abutment: Option<&AbutmentSpec>) -> Result<Page> {
    let last = rules.iter().map(|r| r.page).max().unwrap_or(e2.r).max(e2.r);
    let mut page = e2.clone();
    while page.r <= last {
        page = page.page_turn(rules)?;
    }
    let s_max = page.dims().keys().map(|k| k.0).max().unwrap_or(0).max(0) as usize;
    for r in page.r..=s_max.max(page.r) {
        if let Some((a, b)) = page.fitting_pairs(r).first() {
            let forced = match abutment {
                Some(ab) => abutment_check(&page, ab)?.pass,
                None => false,
            };
            if forced {
                break;
            }
            return Err(Error::Ambiguity(format!("a d{r} from {a:?} to {b:?} is not excluded")));
        }
    }
    Ok(page)
}

/// `equals` holds in the abutment: `base^power ≐ unit · equals`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub base: String,
    pub power: u32,
    pub equals: String,
    #[serde(default = "one")]
    pub unit: i64,
    /// Name of the promoted polynomial generator.
    pub rename: String,
}

#[derive(Clone, Debug)]
pub struct AbutmentSpec {
    pub target: FreeGCA,
    pub extensions: Vec<Extension>,
    /// Page generator name to abutment generator name.
    pub aliases: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbutmentReport {
    pub deg_max: i64,
    /// `(n, page dimension, target dimension)`.
    pub rows: Vec<(i64, usize, usize)>,
    pub mismatches: Vec<i64>,
    pub pass: bool,
}

pub fn abutment_check(page: &Page, spec: &AbutmentSpec) -> Result<AbutmentReport> {
    let d = page.deg_max();
    let target = spec.target.poincare_series(d)?;
    let have = page.total_dims();
    let rows: Vec<(i64, usize, usize)> = (0..=d).map(|n| (n, have[n as usize], target[n as usize])).collect();
    let mismatches: Vec<i64> = rows.iter().filter(|r| r.1 != r.2).map(|r| r.0).collect();
    Ok(AbutmentReport { deg_max: d, pass: mismatches.is_empty(), rows, mismatches })
}

#[derive(Clone, Debug, Serialize)]
pub struct Promotion {
    pub generator: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Free algebra on the surviving generators, bigraded.
    pub einfty: FreeGCA,
    /// Totally graded algebra after extensions and aliases.
    pub abutment: FreeGCA,
    pub promotions: Vec<Promotion>,
    pub series: Vec<usize>,
    pub target_series: Vec<usize>,
    /// Same generators, degrees and kinds as the target, up to order.
    pub same_presentation: bool,
    pub matches: bool,
}

fn kind_name(k: Kind) -> String {
    match k {
        Kind::Poly => "poly".into(),
        Kind::Ext => "ext".into(),
        Kind::Divided => "divided".into(),
        Kind::Trunc(h) => format!("trunc({h})"),
    }
}

/// Reads off `E^∞` as a free algebra on surviving digit generators, checks
/// that its monomials give a basis of every entry, then applies extensions.
pub fn reconstruct_abutment(page: &Page, spec: &AbutmentSpec) -> Result<Reconstruction> {
    let w = &*page.w;
    let p = page.p();
    let d_max = page.deg_max();
    let mut gens = Vec::new();
    let mut digit_of = Vec::new();
    for (j, dg) in w.digits().iter().enumerate() {
        if dg.deg.total() > d_max {
            continue;
        }
        let mut m = w.unit();
        m[j] = 1;
        if !page.is_nonzero_class(&Window::mono_elem(m))? {
            continue;
        }
        let g = &w.algebra().generators()[dg.gen];
        let (name, kind) = if dg.divided {
            let name = if dg.level == 0 { g.name.clone() } else { format!("γ{}{}", (p as u64).pow(dg.level), g.name) };
            (name, Kind::Trunc(p))
        } else {
            (g.name.clone(), g.kind)
        };
        gens.push(Generator { name, deg: dg.deg, kind });
        digit_of.push(j);
    }
    let einfty = FreeGCA::new(p, gens.clone())?;
    // Every monomial in the survivors must be a nonzero class, independent within its entry.
    let ew = Window::new(&einfty, d_max, None)?;
    for (m, idx) in ew.slices() {
        let Some(entry) = page.entries.get(&key(*m)) else {
            return Err(Error::Inconsistent(format!("E∞ monomials in the empty entry {:?}", key(*m))));
        };
        if idx.len() != entry.z.len() - entry.b.len() {
            return Err(Error::Inconsistent(format!(
                "entry {:?} has dimension {} but the survivors give {}",
                key(*m),
                entry.z.len() - entry.b.len(),
                idx.len()
            )));
        }
        let zech = echelon(w, &entry.z);
        let mut bech = echelon(w, &entry.b);
        for &i in idx {
            let mut mono = w.unit();
            for (a, &j) in digit_of.iter().enumerate() {
                mono[j] = ew.basis()[i][a];
            }
            let v = w.coords(&Window::mono_elem(mono), *m)?;
            if !zech.contains(&v) || !bech.insert(v, Vec::new()) {
                return Err(Error::Inconsistent(format!("{} is not a basis element of E∞", ew.label(&ew.basis()[i]))));
            }
        }
    }
    if let Some(k) = page.dims().keys().find(|k| ew.slice(at(**k)).is_empty()) {
        return Err(Error::Inconsistent(format!("entry {k:?} is not generated by surviving generators")));
    }

    let mut total: Vec<Generator> = gens.iter().map(|g| Generator { deg: Multi::new(0, g.deg.total(), 0), ..g.clone() }).collect();
    let mut promotions = Vec::new();
    for ext in &spec.extensions {
        let bi = total
            .iter()
            .position(|g| g.name == ext.base)
            .ok_or_else(|| Error::Inconsistent(format!("extension base {} does not survive", ext.base)))?;
        let ei = total
            .iter()
            .position(|g| g.name == ext.equals)
            .ok_or_else(|| Error::Inconsistent(format!("extension target {} does not survive", ext.equals)))?;
        if total[bi].kind != Kind::Trunc(ext.power) {
            return Err(Error::Inconsistent(format!(
                "{} has kind {}, not trunc({})",
                ext.base,
                kind_name(total[bi].kind),
                ext.power
            )));
        }
        if total[bi].deg.total() * ext.power as i64 != total[ei].deg.total() {
            return Err(Error::Inconsistent(format!("{}^{} and {} differ in degree", ext.base, ext.power, ext.equals)));
        }
        if ext.unit.rem_euclid(p as i64) == 0 {
            return Err(Error::Inconsistent("extension unit vanishes mod p".into()));
        }
        promotions.push(Promotion { generator: ext.base.clone(), from: kind_name(total[bi].kind), to: format!("poly as {}", ext.rename) });
        total[bi].kind = Kind::Poly;
        total[bi].name = ext.rename.clone();
        total.remove(ei);
    }
    for g in &mut total {
        if let Some((_, to)) = spec.aliases.iter().find(|(from, _)| *from == g.name) {
            g.name = to.clone();
        }
    }
    let abutment = FreeGCA::new(p, total)?;
    let series = abutment.poincare_series(d_max)?;
    let target_series = spec.target.poincare_series(d_max)?;
    let sig = |a: &FreeGCA| {
        let mut v: Vec<(String, i64, String)> =
            a.generators().iter().map(|g| (g.name.clone(), g.deg.total(), kind_name(g.kind))).collect();
        v.sort();
        v
    };
    let same_presentation = sig(&abutment) == sig(&spec.target);
    Ok(Reconstruction { matches: series == target_series, einfty, abutment, promotions, series, target_series, same_presentation })
}
