//! The two logarithmic THH spectral sequences over the integers at a prime.

use super::{run_to_einfty, AbutmentSpec, CandidateFamily, DifferentialRule, Extension, Page};
use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::galg::{change_of_rings, tor, tor_koszul, FreeGCA, Generator, Kind, Module, TorCaps, TorResult};

pub const SCENARIOS: [&str; 2] = ["thh-z-mod-p", "thh-z-log-p"];

/// Weight cap for the bar route when a scenario is built.
const BAR_WEIGHT: i64 = 6;

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub p: u32,
    pub deg_max: i64,
    pub e2: Page,
    pub rules: Vec<DifferentialRule>,
    pub abutment: AbutmentSpec,
    pub tor: TorResult,
}

impl Scenario {
    pub fn run(&self) -> Result<Page> {
        run_to_einfty(&self.e2, &self.rules, Some(&self.abutment))
    }

    /// Each rule may be zero or its stated value.
    pub fn candidate_families(&self) -> Vec<CandidateFamily> {
        let w = self.e2.window();
        self.rules
            .iter()
            .filter(|r| w.digit_index(&r.generator, r.level).is_some())
            .map(|r| CandidateFamily {
                page: r.page,
                generator: r.generator.clone(),
                level: r.level,
                unit: r.unit,
                options: vec![vec![], r.image.clone()],
            })
            .collect()
    }
}

/// `P(p) ⊗ E(dp)` with `p` in weight 1 and degree 0.
pub fn base_ring(p: u32) -> Result<FreeGCA> {
    FreeGCA::new(p, vec![Generator::new("p", 0, 0, 1, Kind::Poly), Generator::new("dp", 0, 1, 1, Kind::Ext)])
}

/// `E(λ1) ⊗ P(μ1)`, `|λ1| = 2p − 1`, `|μ1| = 2p`.
pub fn thh_z(p: u32) -> Result<FreeGCA> {
    let p1 = p as i64;
    FreeGCA::simple(p, &[("λ1", 2 * p1 - 1, Kind::Ext), ("μ1", 2 * p1, Kind::Poly)])
}

/// `P(p) ⊗ E(dlogp)` with `dp ↦ p · dlogp`.
pub fn log_module(p: u32) -> Result<Module> {
    let alg = FreeGCA::new(p, vec![Generator::new("p", 0, 0, 1, Kind::Poly), Generator::new("dlogp", 0, 1, 0, Kind::Ext)])?;
    Ok(Module {
        alg,
        action: vec![
            ("p".into(), vec![(1, vec![("p".into(), 1)])]),
            ("dp".into(), vec![(1, vec![("p".into(), 1), ("dlogp".into(), 1)])]),
        ],
    })
}

/// `d^p(γ_{p^i}[dp]) = λ1 · γ_{p^i − p}[dp]` for every `i ≥ 1` with source inside the window.
pub fn gamma_family(p: u32, deg_max: i64) -> Vec<DifferentialRule> {
    let mut out = Vec::new();
    let mut i = 1u32;
    while 2 * (p as i64).pow(i) <= deg_max + 1 {
        let k = p.pow(i);
        out.push(DifferentialRule {
            page: p as usize,
            generator: "[dp]".into(),
            level: i,
            unit: 1,
            image: vec![(1, vec![("λ1".into(), 1), ("[dp]".into(), k - p)])],
        });
        i += 1;
    }
    out
}

pub fn scenario(name: &str, p: u32, deg_max: i64) -> Result<Scenario> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if !(0..=4096).contains(&deg_max) {
        return Err(Error::WindowTooSmall(format!("deg_max {deg_max} outside 0..=4096")));
    }
    let cap = deg_max + 1;
    let caps = TorCaps { total: cap, weight: None, bar_total: cap, bar_weight: Some(BAR_WEIGHT) };
    let r = base_ring(p)?;
    let a = Module::trivial(thh_z(p)?);
    let (tor, target, rename, aliases) = match name {
        "thh-z-mod-p" => {
            let tor = tor(&r, &a, &Module::ground(p)?, caps)?;
            let target = FreeGCA::simple(p, &[("ε0", 1, Kind::Ext), ("μ0", 2, Kind::Poly)])?;
            (tor, target, "μ0", vec![("[p]".to_string(), "ε0".to_string())])
        }
        "thh-z-log-p" => {
            let b = log_module(p)?;
            let cr = change_of_rings(&r, &a, &b, "p")?;
            // The reduction agrees with the unreduced complex on a weight-capped window.
            let small = cap.min(14);
            let full = tor_koszul(&r, &a, &b, small, Some(4))?;
            let reduced = tor_koszul(&cr.ring, &cr.left, &cr.right, small, Some(4))?;
            if full.dims != reduced.dims {
                return Err(Error::Inconsistent("change of rings disagrees with the unreduced Koszul complex".into()));
            }
            let tor = tor(&cr.ring, &cr.left, &cr.right, caps)?;
            let target = FreeGCA::simple(p, &[("dlogp", 1, Kind::Ext), ("κ0", 2, Kind::Poly)])?;
            (tor, target, "κ0", vec![])
        }
        other => return Err(Error::InvalidAlgebra(format!("unknown scenario {other}; expected one of {SCENARIOS:?}"))),
    };
    let pres = tor.presentation.clone().ok_or_else(|| Error::Inconsistent("E² has no product presentation".into()))?;
    let e2 = Page::e2(&pres, deg_max)?;
    let abutment = AbutmentSpec {
        target,
        extensions: vec![Extension { base: "[dp]".into(), power: p, equals: "μ1".into(), unit: 1, rename: rename.into() }],
        aliases,
    };
    Ok(Scenario { name: name.into(), p, deg_max, e2, rules: gamma_family(p, deg_max), abutment, tor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specseq::{abutment_check, mutation_suite, reconstruct_abutment, unique_differential_solver};
    use std::collections::BTreeMap;

    /// `P(μ1) ⊗ X ⊗ P_p([dp])` counted by exponents.
    fn expected_einfty(p: u32, odd: (i64, i64), d: i64) -> BTreeMap<(i64, i64), usize> {
        let p1 = p as i64;
        let mut out = BTreeMap::new();
        for a in 0..=d {
            for e in 0..=1 {
                for c in 0..p1 {
                    let (s, t) = (e * odd.0 + c, 2 * p1 * a + e * odd.1 + c);
                    if s + t <= d {
                        *out.entry((s, t)).or_insert(0) += 1;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn mod_p_einfty_and_abutment() {
        for p in [2u32, 3, 5] {
            let sc = scenario("thh-z-mod-p", p, 30).unwrap();
            let e = sc.run().unwrap();
            assert_eq!(e.dims(), expected_einfty(p, (1, 0), 30), "p={p}");
            let r = abutment_check(&e, &sc.abutment).unwrap();
            assert!(r.pass);
            assert!(r.rows.iter().all(|row| row.1 == 1));
            let rec = reconstruct_abutment(&e, &sc.abutment).unwrap();
            assert!(rec.matches && rec.same_presentation, "{}", rec.abutment);
        }
    }

    #[test]
    fn log_einfty_and_reconstruction() {
        for p in [2u32, 3] {
            let sc = scenario("thh-z-log-p", p, 30).unwrap();
            let e = sc.run().unwrap();
            assert_eq!(e.dims(), expected_einfty(p, (0, 1), 30), "p={p}");
            let rec = reconstruct_abutment(&e, &sc.abutment).unwrap();
            assert!(rec.matches && rec.same_presentation, "{}", rec.abutment);
            assert_eq!(rec.promotions[0].to, "poly as κ0");
        }
    }

    #[test]
    fn e2_is_the_expected_tensor_product() {
        let sc = scenario("thh-z-mod-p", 3, 20).unwrap();
        assert_eq!(sc.e2.algebra().to_string(), "E(λ1)⊗P(μ1)⊗E([p])⊗Γ([dp])");
        let sc = scenario("thh-z-log-p", 3, 20).unwrap();
        assert_eq!(sc.e2.algebra().to_string(), "E(λ1)⊗P(μ1)⊗E(dlogp)⊗Γ([dp])");
    }

    #[test]
    fn degree_five_loses_lambda_at_p3() {
        let sc = scenario("thh-z-mod-p", 3, 12).unwrap();
        let mut page = sc.e2.clone();
        assert_eq!(page.total_dims()[5], 2);
        while page.r() <= 3 {
            page = page.page_turn(&sc.rules).unwrap();
        }
        assert_eq!(page.total_dims()[5], 1);
        assert_eq!(page.representatives(3, 2).len(), 1);
    }

    #[test]
    fn gamma_family_bidegrees() {
        for p in [2u32, 3, 5] {
            let sc = scenario("thh-z-mod-p", p, 60).unwrap();
            let w = sc.e2.window();
            let d = sc.e2.clone();
            let mut e = d;
            while e.r() < p as usize {
                e = e.page_turn(&[]).unwrap();
            }
            let delta = e.derivation(&sc.rules).unwrap();
            for k in 0..=30u32 {
                let Ok(g) = w.power("[dp]", k) else { continue };
                let img = delta.apply(w, &g);
                let want = if k >= p { w.mul(&w.power("λ1", 1).unwrap(), &w.power("[dp]", k - p).unwrap()) } else { Default::default() };
                assert_eq!(img, want, "p={p} k={k}");
                for m in img.keys() {
                    let deg = w.degree(m);
                    assert_eq!((deg.s, deg.t), (k as i64 - p as i64, k as i64 + p as i64 - 1));
                }
            }
        }
    }

    #[test]
    fn solver_finds_only_the_full_family() {
        for (p, d) in [(3u32, 17i64), (2, 7)] {
            let sc = scenario("thh-z-mod-p", p, d).unwrap();
            let fam = sc.candidate_families();
            assert_eq!(fam.len(), 2);
            let rep = unique_differential_solver(&sc.e2, &fam, &sc.abutment).unwrap();
            assert_eq!(rep.survivors, vec![vec![1; fam.len()]], "p={p}");
            let muts = mutation_suite(&sc.e2, &sc.rules, &sc.abutment).unwrap();
            assert_eq!(muts.len(), 2);
            assert!(muts.iter().all(|m| m.detected() && m.mismatches.iter().all(|&n| n <= d)), "{muts:?}");
        }
    }

    #[test]
    fn solver_against_e2_abutment_keeps_only_zero() {
        let sc = scenario("thh-z-mod-p", 3, 17).unwrap();
        let mut ab = sc.abutment.clone();
        ab.target = sc.e2.algebra().clone();
        let flat: Vec<Generator> =
            ab.target.generators().iter().map(|g| Generator::new(&g.name, 0, g.deg.total(), 0, g.kind)).collect();
        ab.target = FreeGCA::new(3, flat).unwrap();
        let rep = unique_differential_solver(&sc.e2, &sc.candidate_families(), &ab).unwrap();
        assert_eq!(rep.survivors, vec![vec![0, 0]]);
    }

    #[test]
    fn both_scenarios_pass_at_p2_d20() {
        for name in SCENARIOS {
            let sc = scenario(name, 2, 20).unwrap();
            assert!(abutment_check(&sc.run().unwrap(), &sc.abutment).unwrap().pass, "{name}");
        }
    }

    #[test]
    fn missing_rules_leave_ambiguity() {
        let sc = scenario("thh-z-mod-p", 3, 17).unwrap();
        assert!(matches!(run_to_einfty(&sc.e2, &[], Some(&sc.abutment)), Err(Error::Ambiguity(_))));
    }
}
