//! One check per acceptance criterion, each printed as a PASS/FAIL line.
//! Expected values come from independent counting oracles in this file.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use logthh_core::field::Fp;
use logthh_core::galg::{tor, Module, TorCaps};
use logthh_core::hocolim::{free_jspace, hocolim_nerve, latching_check, sigma_free_check, terminal, unit_jspace};
use logthh_core::homology::{bar_homology_table, chain_from_labels, homology_dims, induced_map, shuffle_product, ChainComplex, LabelChain};
use logthh_core::jcat::{compose, connected_components, enumerate_homs, hom_count, JMorphism, JObject, Truncation};
use logthh_core::monoid::{DegreeSet, GradedCommMonoid};
use logthh_core::sset::{
    alt_subcomplex_c, bcy, bounded_stabilization, brep, odot, repletion_map, verify_ez2_pushout,
    BarKind, BarModel, PointModel, SimplicialMap, SimplicialSet, Tuple,
};
use logthh_core::specseq::{
    abutment_check, base_ring, mutation_suite, reconstruct_abutment, scenario, thh_z, unique_differential_solver,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, Box<dyn std::error::Error>>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+).into());
        }
    };
}

const PRIMES: [u32; 3] = [2, 3, 5];
const TRIPLES: usize = 10_000;
const SEED: u64 = 0x5eed_1a11;
/// Bar-route weight cap for the Tor comparison; the bar complex is infinite at fixed `s` without one.
const BAR_WEIGHT: i64 = 10;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn circle(n: usize) -> Vec<usize> {
    let mut v = vec![0; n + 1];
    v[0] = 1;
    if n >= 1 {
        v[1] = 1;
    }
    v
}

fn free1() -> GradedCommMonoid {
    GradedCommMonoid::named("free1").unwrap()
}

fn label(t: &[i64]) -> Tuple {
    t.iter().map(|&e| vec![e]).collect()
}

fn single(t: Tuple) -> LabelChain<Tuple> {
    BTreeMap::from([(t, 1)])
}

/// Homology class of a labelled cycle in a materialized window.
fn class(x: &SimplicialSet<BarModel>, p: u32, q: usize, chain: &LabelChain<Tuple>) -> Result<Vec<u32>, Box<dyn std::error::Error>> {
    let c = ChainComplex::normalized(x, p)?;
    let h = c.homology(q)?;
    let z = chain_from_labels(x, &Fp::new(p)?, chain)?;
    Ok(h.class_of(&c, q, &z)?)
}

/// `c · u == v` for some unit `c`.
fn proportional(p: u32, u: &[u32], v: &[u32]) -> bool {
    (1..p).any(|c| u.iter().zip(v).all(|(a, b)| (a * c) % p == *b)) && u.iter().any(|&a| a != 0)
}

fn rank_mod(p: u32, m: &[Vec<u32>]) -> usize {
    let mut rows: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let p = p as u64;
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] % p != 0) else { continue };
        rows.swap(rank, piv);
        let inv = (1..p).find(|i| rows[rank][c] * i % p == 1).unwrap();
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let k = rows[r][c];
                for j in 0..cols {
                    rows[r][j] = (rows[r][j] + p * p - k * rows[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn c1() -> Check {
    for p in PRIMES {
        let t = bar_homology_table(&free1(), BarKind::Cyclic, &[1, 2, 3, 4, 5, 6], 6, 8, p)?;
        for row in &t.rows {
            ensure!(row.exact, "p={p} weight {} window is not exact", row.weight);
            ensure!(row.dims == circle(8), "p={p} weight {}: {:?}", row.weight, row.dims);
        }
    }
    Ok("weights 1..6 are (1,1,0,...) through degree 8 at p=2,3,5".into())
}

fn c2() -> Check {
    let x = free1();
    let max = 3;
    for p in [2u32, 3] {
        let st = bounded_stabilization(|b| brep(&x, DegreeSet::single(0), b, max + 1), &[2, 3, 4], max, p)?;
        for (b, dims) in &st.rows {
            ensure!(*dims == circle(max), "p={p} bound {b}: weight 0 gives {dims:?}");
        }
        for w in 1..=6i64 {
            let cy = bcy(&x, DegreeSet::single(w), w, max + 1)?;
            let rep = brep(&x, DegreeSet::single(w), w + 2, max + 1)?;
            let rho = repletion_map(&cy, &rep)?;
            let (ccy, crep) = (ChainComplex::normalized(&cy, p)?, ChainComplex::normalized(&rep, p)?);
            let (hcy, hrep) = (ccy.homology(max)?, crep.homology(max)?);
            ensure!(hcy.dims() == hrep.dims(), "p={p} weight {w}: {:?} vs {:?}", hcy.dims(), hrep.dims());
            for q in 0..=max {
                let m = induced_map(&rho, &ccy, &hcy, &crep, &hrep, q)?;
                let n = hcy.dims()[q];
                ensure!(rank_mod(p, &m) == n, "p={p} weight {w}: ρ_* not injective in degree {q}");
            }
        }
        // ρ_*(x) = x and ρ_*(dx) ≐ x · dlog x, in weight 1.
        let cy = bcy(&x, DegreeSet::single(1), 1, max + 1)?;
        let rep = brep(&x, DegreeSet::single(1), 3, max + 1)?;
        let rho = repletion_map(&cy, &rep)?;
        let (ccy, crep) = (ChainComplex::normalized(&cy, p)?, ChainComplex::normalized(&rep, p)?);
        let (hcy, hrep) = (ccy.homology(max)?, crep.homology(max)?);
        let xv = single(label(&[1]));
        let dx = single(label(&[0, 1]));
        for (q, chain) in [(0usize, &xv), (1, &dx)] {
            let src = class(&cy, p, q, chain)?;
            let m = induced_map(&rho, &ccy, &hcy, &crep, &hrep, q)?;
            let img: Vec<u32> = m.iter().map(|r| r.iter().zip(&src).map(|(a, b)| a * b).sum::<u32>() % p).collect();
            let mapped: LabelChain<Tuple> = chain.iter().map(|(t, c)| (rho.apply(t), *c)).collect();
            ensure!(img == class(&rep, p, q, &mapped)?, "p={p}: ρ_* disagrees with the chain map in degree {q}");
            if q == 0 {
                ensure!(img == class(&rep, p, 0, &xv)? && img.iter().any(|&c| c != 0), "p={p}: ρ_*(x) ≠ x");
            } else {
                let dlog = single(label(&[-1, 1]));
                let w0 = brep(&x, DegreeSet::single(0), 2, max + 1)?;
                ensure!(class(&w0, p, 1, &dlog)?.iter().any(|&c| c != 0), "p={p}: dlog x is zero");
                let prod = shuffle_product(rep.model(), &Fp::new(p)?, &xv, &dlog)?;
                let shuffle = class(&rep, p, 1, &prod)?;
                ensure!(proportional(p, &img, &shuffle), "p={p}: ρ_*(dx) = {img:?}, x·dlog x = {shuffle:?}");
            }
        }
    }
    Ok("weight 0 is a circle at bounds 2,3,4; ρ_* iso on weights 1..6; ρ_*(x)=x, ρ_*(dx) ≐ x·dlog x".into())
}

/// `P(x) ⊗ E(y)` with `|x| = (0, 1)` and `|y| = (1, wy)`, as (weight, degree) counts.
fn poly_ext_table(wy: i64, max_w: i64, max_d: usize) -> BTreeMap<i64, Vec<usize>> {
    let mut out: BTreeMap<i64, Vec<usize>> = (0..=max_w).map(|w| (w, vec![0; max_d + 1])).collect();
    for a in 0..=max_w {
        for e in 0..=1i64 {
            let w = a + e * wy;
            if w <= max_w && (e as usize) <= max_d {
                out.get_mut(&w).unwrap()[e as usize] += 1;
            }
        }
    }
    out
}

fn c3() -> Check {
    let (max_w, max_d) = (6i64, 4usize);
    let weights: Vec<i64> = (0..=max_w).collect();
    for (kind, wy, bound, name) in [(BarKind::Cyclic, 1, max_w, "cyclic"), (BarKind::Replete, 0, max_w + 2, "replete")] {
        let want = poly_ext_table(wy, max_w, max_d);
        for p in [2u32, 3] {
            let t = bar_homology_table(&free1(), kind, &weights, bound, max_d, p)?;
            for row in &t.rows {
                ensure!(row.dims == want[&row.weight], "{name} p={p} weight {}: {:?} vs {:?}", row.weight, row.dims, want[&row.weight]);
            }
        }
    }
    Ok("cyclic ≅ P(x)⊗E(dx), replete ≅ P(x)⊗E(dlog x) for weight ≤ 6, degree ≤ 4".into())
}

/// `E(λ1) ⊗ P(μ1) ⊗ E([p]) ⊗ Γ([dp])` by exponents, over `(s, t)` with `s + t ≤ cap`.
fn tor_oracle(p: i64, cap: i64) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for l in 0..=1 {
        for a in 0..=cap {
            for e in 0..=1 {
                for k in 0..=cap {
                    let (s, t) = (e + k, l * (2 * p - 1) + a * 2 * p + k);
                    if s + t <= cap {
                        *out.entry((s, t)).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    out
}

fn c4() -> Check {
    let mut compared = 0;
    for p in [2u32, 3] {
        let cap = 4 * (p as i64).pow(2);
        let caps = TorCaps { total: cap, weight: None, bar_total: cap, bar_weight: Some(BAR_WEIGHT) };
        let r = tor(&base_ring(p)?, &Module::trivial(thh_z(p)?), &Module::ground(p)?, caps)?;
        ensure!(r.koszul.by_bidegree() == tor_oracle(p as i64, cap), "p={p}: Koszul Tor differs from the product");
        let common: Vec<_> = r.bar.dims.keys().filter(|m| r.koszul.covers(**m) && r.bar.covers(**m)).collect();
        ensure!(!common.is_empty(), "p={p}: empty bar window");
        for m in &common {
            ensure!(r.bar.dim(**m) == r.koszul.dim(**m), "p={p}: bar and Koszul differ at {m:?}");
        }
        let all_bar: usize = r.bar.dims.values().sum();
        let all_k: usize = r.koszul.dims.iter().filter(|(m, _)| r.bar.covers(**m)).map(|(_, d)| d).sum();
        ensure!(all_bar == all_k, "p={p}: bar window totals {all_bar} vs {all_k}");
        compared += common.len();
    }
    Ok(format!("matches the product through 4p² for p=2,3; bar agrees on {compared} tridegrees of weight ≤ {BAR_WEIGHT}"))
}

/// `P(μ1) ⊗ E(odd) ⊗ P_p([dp])` by exponents.
fn einfty_oracle(p: i64, odd: (i64, i64), d: i64) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for a in 0..=d {
        for e in 0..=1 {
            for j in 0..p {
                let (s, t) = (e * odd.0 + j, a * 2 * p + e * odd.1 + j);
                if s + t <= d {
                    *out.entry((s, t)).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

fn c5() -> Check {
    let d = 30;
    for p in PRIMES {
        let sc = scenario("thh-z-mod-p", p, d)?;
        let e = sc.run()?;
        ensure!(e.dims() == einfty_oracle(p as i64, (1, 0), d), "p={p}: E^∞ is not P(μ1)⊗E([p])⊗P_p([dp])");
        let rep = abutment_check(&e, &sc.abutment)?;
        ensure!(rep.pass, "p={p}: abutment mismatches at {:?}", rep.mismatches);
        ensure!(rep.rows.iter().all(|r| r.1 == 1 && r.2 == 1), "p={p}: not one class per degree");
    }
    Ok(format!("E^∞ and E(ε0)⊗P(μ0) agree through {d} for p=2,3,5"))
}

fn c6() -> Check {
    let d = 30;
    for p in [2u32, 3] {
        let sc = scenario("thh-z-log-p", p, d)?;
        let e = sc.run()?;
        ensure!(e.dims() == einfty_oracle(p as i64, (0, 1), d), "p={p}: E^∞ is not P(μ1)⊗E(dlog p)⊗P_p([dp])");
        let rec = reconstruct_abutment(&e, &sc.abutment)?;
        // E(dlog p) ⊗ P(κ0), |dlog p| = 1, |κ0| = 2.
        let want: Vec<usize> = (0..=d).map(|n| (0..=1).filter(|e| (n - e) % 2 == 0).count()).collect();
        ensure!(rec.series == want && rec.matches && rec.same_presentation, "p={p}: reconstruction gives {}", rec.abutment);
    }
    Ok(format!("[dp]^p ≐ μ1 yields E(dlog p)⊗P(κ0) through {d} for p=2,3"))
}

fn c7() -> Check {
    let mut out = Vec::new();
    for p in [3u32, 2] {
        let d = 2 * (p as i64).pow(2) - 1;
        let sc = scenario("thh-z-mod-p", p, d)?;
        let fam = sc.candidate_families();
        let rep = unique_differential_solver(&sc.e2, &fam, &sc.abutment)?;
        ensure!(rep.survivors == vec![vec![1; fam.len()]], "p={p} D={d}: survivors {:?}", rep.survivors);
        let muts = mutation_suite(&sc.e2, &sc.rules, &sc.abutment)?;
        ensure!(!muts.is_empty() && muts.iter().all(|m| m.detected()), "p={p}: undetected deletion {muts:?}");
        out.push(format!("p={p} D={d}: 1 of {} survives, {} deletions caught", rep.tried, muts.len()));
    }
    Ok(out.join("; "))
}

fn c8() -> Check {
    let max = 3;
    for d in [1i64, 2, 8] {
        let rep = verify_ez2_pushout(d, 10)?;
        ensure!(rep.holds, "d={d}: pushout fails {:?}", rep.degrees.iter().find(|c| !c.holds()));
        let c = alt_subcomplex_c(d, 6)?;
        ensure!(homology_dims(&c, 2, 5)? == circle(5), "d={d}: C(d) is not a circle");
        let z = GradedCommMonoid::named(&format!("dZ:{d}"))?;
        for p in [2u32, 3] {
            let c = alt_subcomplex_c(d, max + 1)?;
            let w = bcy(&z, DegreeSet::single(0), 2 * d, max + 1)?;
            let inc = SimplicialMap::new(&c, &w, |t: &Tuple| t.clone())?;
            let (cc, cw) = (ChainComplex::normalized(&c, p)?, ChainComplex::normalized(&w, p)?);
            let (hc, hw) = (cc.homology(max)?, cw.homology(max)?);
            ensure!(hc.dims() == hw.dims(), "d={d} p={p}: {:?} vs {:?}", hc.dims(), hw.dims());
            for q in 0..=max {
                ensure!(rank_mod(p, &induced_map(&inc, &cc, &hc, &cw, &hw, q)?) == hc.dims()[q], "d={d} p={p}: not iso in degree {q}");
            }
        }
        // N = dN₀, whose degree-zero part is trivial.
        let n = GradedCommMonoid::named(&format!("dN:{d}"))?;
        let top = 6;
        let lhs = odot(PointModel, |q: &usize| vec![0; q + 1], &n, 2 * d).build(top)?;
        let rhs = bcy(&GradedCommMonoid::named("trivial")?, DegreeSet::All, 1, top)?;
        for q in 0..=top {
            let mapped: Vec<Tuple> = lhs.cells(q).iter().map(|x| x.1.clone()).collect();
            ensure!(mapped.len() == rhs.cells(q).len(), "d={d}: point ⊙ N differs in degree {q}");
            ensure!(mapped.iter().all(|t| t.iter().all(|e| e.iter().all(|&c| c == 0))), "d={d}: non-unit simplex in point ⊙ N");
        }
        let k = BarModel::new(&z, BarKind::Cyclic, 2 * d, DegreeSet::single(0))?;
        let lhs = odot(k, |t: &Tuple| t.iter().map(|e| e[0]).collect(), &n, 2 * d).build(top)?;
        let rhs = bcy(&n, DegreeSet::single(0), 2 * d, top)?;
        for q in 0..=top {
            let mapped: Vec<Tuple> = lhs.cells(q).iter().map(|x| x.1.clone()).collect();
            ensure!(mapped == rhs.cells(q), "d={d}: B^cy_0(dZ) ⊙ N differs in degree {q}");
        }
        SimplicialMap::new(&lhs, &rhs, |x: &(Tuple, Tuple)| x.1.clone())?;
    }
    Ok("pushout through 10, C(d) a circle and ≃ B^cy_0(dZ) through 3, both ⊙ isos through 6, d=1,2,8".into())
}

/// Injections `[m] → [n]` as 1-based images, by filtering all functions.
fn injections(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (n.max(1)).pow(m as u32);
    if n == 0 && m > 0 {
        return out;
    }
    for code in 0..total {
        let f: Vec<usize> = (0..m).map(|i| code / n.max(1).pow(i as u32) % n.max(1) + 1).collect();
        if f.iter().collect::<BTreeSet<_>>().len() == m {
            out.push(f);
        }
    }
    out
}

/// `(α1, α2, ρ)` with `ρ` a bijection of complements, counted without the library.
fn brute_hom_count(a: JObject, b: JObject) -> u64 {
    if b.m1 < a.m1 || b.m2 < a.m2 || b.m1 - a.m1 != b.m2 - a.m2 {
        return 0;
    }
    let c = b.m1 - a.m1;
    (injections(a.m1, b.m1).len() * injections(a.m2, b.m2).len() * injections(c, c).len()) as u64
}

fn c9() -> Check {
    let t4 = Truncation::new(4);
    let objs = t4.objects();
    let mut pairs = 0;
    for &a in &objs {
        for &b in &objs {
            let n = hom_count(a, b);
            ensure!(n == brute_hom_count(a, b), "{a}→{b}: {n} vs {}", brute_hom_count(a, b));
            let homs = enumerate_homs(a, b);
            ensure!(homs.len() as u64 == n && homs.iter().collect::<BTreeSet<_>>().len() == homs.len(), "{a}→{b}: enumeration");
            pairs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let by_degree = connected_components(&t4);
    let mut done = 0;
    while done < TRIPLES {
        let comp: Vec<&Vec<JObject>> = by_degree.values().collect();
        let objs = comp[rng.gen_range(0..comp.len())];
        let pick: Vec<JObject> = (0..4).map(|_| objs[rng.gen_range(0..objs.len())]).collect();
        let hs: Vec<Vec<JMorphism>> = (0..3).map(|i| enumerate_homs(pick[i], pick[i + 1])).collect();
        if hs.iter().any(Vec::is_empty) {
            continue;
        }
        let [f, g, h] = [0, 1, 2].map(|i| hs[i][rng.gen_range(0..hs[i].len())].clone());
        let left = compose(&h, &compose(&g, &f)?)?;
        let right = compose(&compose(&h, &g)?, &f)?;
        ensure!(left == right, "associativity fails for {f:?}, {g:?}, {h:?}");
        done += 1;
    }
    let k = connected_components(&Truncation::new(3)).len();
    ensure!(k == 7, "truncation 3 has {k} components");
    Ok(format!("{pairs} hom counts match brute force, {TRIPLES} triples associate, 7 components at truncation 3"))
}

fn c10() -> Check {
    let t4 = Truncation::new(4);
    let u = sigma_free_check(&unit_jspace(t4), 4);
    ensure!(u.pass, "U^J not Σ-free at {:?}", u.rows.iter().find(|r| !r.free));
    let term = sigma_free_check(&terminal(t4), 4);
    let at = term.rows.iter().find(|r| r.object == JObject::new(0, 2)).ok_or("no row at (0,2)")?;
    ensure!(!at.free, "terminal is Σ-free at (0,2)");
    let t3 = Truncation::new(3);
    let mut checked = 0;
    for d in t3.objects() {
        let f = free_jspace(d.m1, d.m2, 1, t3);
        for n in t3.objects() {
            let l = latching_check(&f, n)?;
            ensure!(l.injective, "F_{d} latching at {n}: {:?}", l.witness);
            checked += 1;
        }
    }
    Ok(format!("U^J Σ-free through size 4, terminal fails at (0,2), {checked} latching maps injective"))
}

fn c11() -> Check {
    for t in [4usize, 5] {
        let x = free_jspace(1, 1, 1, Truncation::new(t));
        let h = homology_dims(&hocolim_nerve(&x, 2, true)?, 2, 1)?;
        ensure!(h == vec![1, 0], "truncation {t}: {h:?}");
    }
    Ok("H0 = 1, H1 = 0 at truncations 4 and 5".into())
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "cyclic bar of a free monoid", limit: Duration::from_secs(10), run: c1 },
        Criterion { id: 2, name: "repletion", limit: Duration::from_secs(30), run: c2 },
        Criterion { id: 3, name: "bigraded tables", limit: Duration::from_secs(60), run: c3 },
        Criterion { id: 4, name: "Tor by bar and Koszul", limit: Duration::from_secs(60), run: c4 },
        Criterion { id: 5, name: "THH(Z) mod p", limit: Duration::from_secs(60), run: c5 },
        Criterion { id: 6, name: "log THH(Z)", limit: Duration::from_secs(60), run: c6 },
        Criterion { id: 7, name: "unique differentials", limit: Duration::from_secs(60), run: c7 },
        Criterion { id: 8, name: "EZ2 pushout and odot", limit: Duration::from_secs(120), run: c8 },
        Criterion { id: 9, name: "category J", limit: Duration::from_secs(60), run: c9 },
        Criterion { id: 10, name: "sigma freeness and latching", limit: Duration::from_secs(120), run: c10 },
        Criterion { id: 11, name: "hocolim of F(1,1)", limit: Duration::from_secs(120), run: c11 },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(c.run));
        let dt = start.elapsed();
        let (ok, detail) = match out {
            Ok(Ok(s)) if dt <= c.limit => (true, s),
            Ok(Ok(s)) => (false, format!("{s}; over the time limit")),
            Ok(Err(e)) => (false, e.to_string()),
            Err(_) => (false, "panicked".into()),
        };
        println!(
            "criterion {:>2} {}: {} ({:.2}s, limit {}s)  {}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
        if !ok {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
