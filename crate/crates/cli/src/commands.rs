//! One function per subcommand; each returns a [`Report`].

use serde_json::{json, Value};

use logthh_core::field::Fp;
use logthh_core::hocolim::{
    empty_jspace, free_comm_truncation, free_jspace, hocolim_nerve, latching_check, sigma_free_check, terminal,
    unit_jspace, TruncatedJSpace,
};
use logthh_core::homology::{bar_homology_table, homology_dims, induced_map, ChainComplex};
use logthh_core::jcat::{connected_components, enumerate_homs, hom_count, JObject, Truncation};
use logthh_core::linalg::SparseMatrix;
use logthh_core::monoid::{default_radius, degree_component, is_repetitive, DegreeSet, GradedCommMonoid};
use logthh_core::specseq::{
    abutment_check, mutation_suite, reconstruct_abutment, scenario, unique_differential_solver, Page, Scenario,
};
use logthh_core::sset::{
    alt_subcomplex_c, bcy, bounded_stabilization, brep, nerve_ez2, repletion_map, verify_ez2_pushout, BarKind,
    BarModel, SimplicialModel, SimplicialSet,
};

use crate::cli::{BarCmd, Command, HocolimCmd, HomologyCmd, JcatCmd, Kind, MonoidCmd, SpecseqCmd};
use crate::config::RunConfig;
use crate::report::{Report, Table};
use crate::CliError;

type Out = Result<Report, CliError>;

const DEFAULT_P: u32 = 2;

pub fn run(cmd: &Command, cfg: &RunConfig) -> Out {
    match cmd {
        Command::Jcat { cmd } => jcat(cmd, cfg),
        Command::Monoid { cmd } => monoid(cmd, cfg),
        Command::Bar { cmd } => bar(cmd, cfg),
        Command::Homology { cmd } => homology(cmd, cfg),
        Command::Hocolim { cmd } => hocolim(cmd, cfg),
        Command::Specseq { cmd } => specseq(cmd, cfg),
    }
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

fn object(arg: &str) -> Result<JObject, CliError> {
    Ok(JObject::parse(arg)?)
}

fn truncation(cfg: &RunConfig, default: usize) -> Result<Truncation, CliError> {
    let t = cfg.trunc.unwrap_or(default);
    if t > 8 {
        return Err(CliError { code: crate::EXIT_RESOURCE, message: format!("--trunc {t} exceeds the supported 8") });
    }
    Ok(Truncation::new(t))
}

fn jcat(cmd: &JcatCmd, cfg: &RunConfig) -> Out {
    match cmd {
        JcatCmd::HomCount { from, to } => {
            let (a, b) = (object(from)?, object(to)?);
            let mut r = Report::new("jcat hom-count");
            let mut t = Table::new("hom_count", &["from", "to", "count"]);
            t.push(vec![s(a), s(b), s(hom_count(a, b))]);
            r.tables.push(t);
            Ok(r)
        }
        JcatCmd::Homs { from, to } => {
            let (a, b) = (object(from)?, object(to)?);
            if a.size().max(b.size()) > 6 {
                return Err(CliError { code: crate::EXIT_RESOURCE, message: "listing is limited to size 6".into() });
            }
            let mut r = Report::new("jcat homs");
            let mut t = Table::new("morphisms", &["alpha1", "alpha2", "rho"]);
            for g in enumerate_homs(a, b) {
                let rho: Vec<String> = g.rho.iter().map(|(k, v)| format!("{k}>{v}")).collect();
                t.push(vec![format!("{:?}", g.alpha1), format!("{:?}", g.alpha2), rho.join(" ")]);
            }
            r.tables.push(t);
            Ok(r)
        }
        JcatCmd::Components => {
            let tr = truncation(cfg, 3)?;
            let mut r = Report::new("jcat components");
            let mut t = Table::new("components", &["degree", "objects", "count"]);
            for (d, objs) in connected_components(&tr) {
                let names: Vec<String> = objs.iter().map(|o| o.to_string()).collect();
                t.push(vec![s(d), names.join(" "), s(objs.len())]);
            }
            r.tables.push(t);
            Ok(r)
        }
    }
}

/// A name, inline JSON, or `@path` to a JSON file.
fn parse_monoid(arg: &str) -> Result<GradedCommMonoid, CliError> {
    if let Some(path) = arg.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))?;
        return Ok(GradedCommMonoid::from_json(&text)?);
    }
    if arg.trim_start().starts_with('{') {
        return Ok(GradedCommMonoid::from_json(arg)?);
    }
    Ok(GradedCommMonoid::named(arg)?)
}

fn monoid(cmd: &MonoidCmd, cfg: &RunConfig) -> Out {
    let MonoidCmd::Show { monoid } = cmd;
    let m = parse_monoid(monoid)?;
    let d = cfg.deg_max.unwrap_or(4);
    let radius = cfg.bound.unwrap_or_else(|| default_radius(&m));
    let mut r = Report::new("monoid show");
    let mut t = Table::new("monoid", &["property", "value"]);
    t.push(vec!["json".into(), m.to_json()]);
    t.push(vec!["rank".into(), s(m.rank())]);
    t.push(vec!["group".into(), s(m.is_group())]);
    t.push(vec!["positively graded".into(), s(m.is_positively_graded())]);
    t.push(vec!["repetitive period".into(), is_repetitive(&m).map_or("none".into(), s)]);
    r.tables.push(t);
    let mut e = Table::new("elements", &["degree", "count"]);
    for k in -d..=d {
        e.push(vec![s(k), s(degree_component(&m, &DegreeSet::single(k), d, radius).len())]);
    }
    r.tables.push(e);
    Ok(r)
}

fn bar_kind(k: Kind) -> BarKind {
    match k {
        Kind::Cyclic => BarKind::Cyclic,
        Kind::Replete => BarKind::Replete,
    }
}

fn degree_columns(d: usize) -> Vec<String> {
    (0..=d).map(|q| format!("H{q}")).collect()
}

fn bar(cmd: &BarCmd, cfg: &RunConfig) -> Out {
    let p = cfg.p_or(DEFAULT_P);
    let d = cfg.deg_max.unwrap_or(4) as usize;
    match cmd {
        BarCmd::Homology { monoid, kind } => {
            let m = parse_monoid(monoid)?;
            let weights = cfg.weight_list("0")?;
            let top = weights.iter().map(|w| w.abs()).max().unwrap_or(0).max(1);
            let bound = cfg.bound.unwrap_or(match kind {
                Kind::Cyclic => top,
                Kind::Replete => top + 2,
            });
            let table = bar_homology_table(&m, bar_kind(*kind), &weights, bound, d, p)?;
            if *kind == Kind::Cyclic {
                if let Some(row) = table.rows.iter().find(|r| !r.exact) {
                    return Err(CliError {
                        code: crate::EXIT_RESOURCE,
                        message: format!("bound {bound} does not cover weight {}", row.weight),
                    });
                }
            }
            let mut r = Report::new("bar homology");
            let mut cols = vec!["weight".to_string(), "exact".to_string()];
            cols.extend(degree_columns(d));
            let mut t = Table { name: "homology".into(), columns: cols, rows: Vec::new() };
            for row in &table.rows {
                let mut cells = vec![s(row.weight), s(row.exact)];
                cells.extend(row.dims.iter().map(|x| s(x)));
                t.push(cells);
            }
            r.tables.push(t);
            r.data = json!({ "p": p, "bound": bound, "kind": format!("{kind:?}").to_lowercase() });
            Ok(r)
        }
        BarCmd::Repletion { monoid } => {
            let m = parse_monoid(monoid)?;
            let f = Fp::new(p)?;
            let mut r = Report::new("bar repletion");
            let mut t = Table::new("repletion", &["weight", "degree", "dim_cyclic", "dim_replete", "rank", "full"]);
            let mut all = true;
            for w in cfg.weight_list("1..6")? {
                let cy_bound = w.abs().max(1);
                let cy = bcy(&m, DegreeSet::single(w), cy_bound, d + 1)?;
                cy.model().require_exact()?;
                let rep = brep(&m, DegreeSet::single(w), cfg.bound.unwrap_or(cy_bound + 2), d + 1)?;
                let rho = repletion_map(&cy, &rep)?;
                let (ccy, crep) = (ChainComplex::normalized(&cy, p)?, ChainComplex::normalized(&rep, p)?);
                let (hcy, hrep) = (ccy.homology(d)?, crep.homology(d)?);
                for q in 0..=d {
                    let mat = induced_map(&rho, &ccy, &hcy, &crep, &hrep, q)?;
                    let rank = dense_rank(&f, &mat, hcy.dims()[q]);
                    let (a, b) = (hcy.dims()[q], hrep.dims()[q]);
                    let full = rank == a && rank == b;
                    all &= full;
                    t.push(vec![s(w), s(q), s(a), s(b), s(rank), s(full)]);
                }
            }
            r.tables.push(t);
            r.verdict = Some(all);
            Ok(r)
        }
    }
}

fn dense_rank(f: &Fp, rows: &[Vec<u32>], ncols: usize) -> usize {
    let cols = (0..ncols)
        .map(|j| rows.iter().enumerate().filter(|(_, r)| r[j] != 0).map(|(i, r)| (i, r[j])).collect())
        .collect();
    SparseMatrix::new(rows.len(), cols).rank(f)
}

fn homology_table<M: SimplicialModel>(x: &SimplicialSet<M>, p: u32, d: usize) -> Result<Table, CliError> {
    let dims = homology_dims(x, p, d)?;
    let mut t = Table::new("homology", &["degree", "simplices", "dim"]);
    for (q, h) in dims.iter().enumerate() {
        t.push(vec![s(q), s(x.count(q)), s(h)]);
    }
    Ok(t)
}

fn homology(cmd: &HomologyCmd, cfg: &RunConfig) -> Out {
    let p = cfg.p_or(DEFAULT_P);
    match cmd {
        HomologyCmd::Complex { complex, d, monoid } => {
            let deg = cfg.deg_max.unwrap_or(4) as usize;
            let w = cfg.weights.clone().unwrap_or(DegreeSet::single(0));
            let bound = || cfg.bound.unwrap_or_else(|| w.max().map_or(2, |m| m.abs().max(1)));
            let t = match complex.as_str() {
                "ez2" => homology_table(&nerve_ez2(deg + 1)?, p, deg)?,
                "c" => homology_table(&alt_subcomplex_c(*d, deg + 1)?, p, deg)?,
                "bcy" => homology_table(&bcy(&parse_monoid(monoid)?, w.clone(), bound(), deg + 1)?, p, deg)?,
                "brep" => homology_table(&brep(&parse_monoid(monoid)?, w.clone(), bound() + 2, deg + 1)?, p, deg)?,
                other => return Err(CliError::usage(format!("unknown complex {other:?}; expected ez2, c, bcy or brep"))),
            };
            let mut r = Report::new("homology complex");
            r.tables.push(t);
            Ok(r)
        }
        HomologyCmd::Pushout { d } => {
            let rep = verify_ez2_pushout(*d, cfg.deg_max.unwrap_or(10) as usize)?;
            let mut r = Report::new("homology pushout");
            let mut t = Table::new("pushout", &["degree", "ez2_simplices", "c_simplices", "holds"]);
            for c in &rep.degrees {
                t.push(vec![s(c.degree), s(c.ez2_simplices), s(c.c_simplices), s(c.holds())]);
            }
            r.tables.push(t);
            r.data = serde_json::to_value(&rep).map_err(|e| CliError::internal(e.to_string()))?;
            r.verdict = Some(rep.holds);
            Ok(r)
        }
        HomologyCmd::Stabilize { monoid, kind, bounds } => {
            let m = parse_monoid(monoid)?;
            let deg = cfg.deg_max.unwrap_or(3) as usize;
            let w = cfg.weights.clone().unwrap_or(DegreeSet::single(0));
            let bs: Vec<i64> = bounds
                .split(',')
                .map(|b| b.trim().parse().map_err(|_| CliError::usage(format!("bad bound {b:?}"))))
                .collect::<Result<_, _>>()?;
            let kind = bar_kind(*kind);
            let build = |b| SimplicialSet::build(BarModel::new(&m, kind, b, w.clone())?, deg + 1);
            let rep = bounded_stabilization(build, &bs, deg, p)?;
            let mut r = Report::new("homology stabilize");
            let mut cols = vec!["bound".to_string()];
            cols.extend(degree_columns(deg));
            let mut t = Table { name: "stabilization".into(), columns: cols, rows: Vec::new() };
            for (b, dims) in &rep.rows {
                let mut cells = vec![s(b)];
                cells.extend(dims.iter().map(|x| s(x)));
                t.push(cells);
            }
            r.tables.push(t);
            r.data = json!({ "stable_from": rep.stable_from });
            r.verdict = Some(rep.stable_from == bs.first().copied());
            Ok(r)
        }
    }
}

fn pair(s: &str) -> Result<(usize, usize), CliError> {
    let o = JObject::parse(s)?;
    Ok((o.m1, o.m2))
}

/// `empty`, `terminal`, `unit`, `free:d1,d2[:k]`, `freecomm:d1,d2:k`.
fn parse_space(arg: &str, t: Truncation) -> Result<TruncatedJSpace, CliError> {
    let parts: Vec<&str> = arg.split(':').collect();
    let k = |i: usize, default: usize| -> Result<usize, CliError> {
        parts.get(i).map_or(Ok(default), |v| v.parse().map_err(|_| CliError::usage(format!("bad count {v:?}"))))
    };
    match parts[0] {
        "empty" if parts.len() == 1 => Ok(empty_jspace(t)),
        "terminal" if parts.len() == 1 => Ok(terminal(t)),
        "unit" if parts.len() == 1 => Ok(unit_jspace(t)),
        "free" if (2..=3).contains(&parts.len()) => {
            let (d1, d2) = pair(parts[1])?;
            Ok(free_jspace(d1, d2, k(2, 1)?, t))
        }
        "freecomm" if parts.len() == 3 => {
            let (d1, d2) = pair(parts[1])?;
            Ok(free_comm_truncation(d1, d2, k(2, 1)?, t)?)
        }
        _ => Err(CliError::usage(format!("unknown space {arg:?}"))),
    }
}

fn hocolim(cmd: &HocolimCmd, cfg: &RunConfig) -> Out {
    let tr = truncation(cfg, 3)?;
    match cmd {
        HocolimCmd::Values { space } => {
            let x = parse_space(space, tr)?;
            let mut r = Report::new("hocolim values");
            let mut t = Table::new("values", &["object", "size"]);
            for n in tr.objects() {
                t.push(vec![s(n), s(x.size(n))]);
            }
            r.tables.push(t);
            Ok(r)
        }
        HocolimCmd::Nerve { space, full } => {
            let x = parse_space(space, tr)?;
            let d = cfg.deg_max.unwrap_or(1) as usize;
            let nerve = hocolim_nerve(&x, d + 1, !full)?;
            let mut r = Report::new("hocolim nerve");
            r.tables.push(homology_table(&nerve, cfg.p_or(DEFAULT_P), d)?);
            r.data = json!({ "objects": nerve.model().cat.objects.len(), "morphisms": nerve.model().cat.morphism_count() });
            Ok(r)
        }
        HocolimCmd::SigmaFree { space } => {
            let x = parse_space(space, tr)?;
            let rep = sigma_free_check(&x, tr.max_size);
            let mut r = Report::new("hocolim sigma-free");
            let mut t = Table::new("sigma_free", &["object", "free", "witness"]);
            for row in &rep.rows {
                let w = row.witness.as_ref().map_or(String::new(), |(e, g)| format!("{e} fixed by {g:?}"));
                t.push(vec![s(row.object), s(row.free), w]);
            }
            r.tables.push(t);
            r.verdict = Some(rep.pass);
            Ok(r)
        }
        HocolimCmd::Latching { space } => {
            let x = parse_space(space, tr)?;
            let mut r = Report::new("hocolim latching");
            let mut t = Table::new("latching", &["object", "latching_size", "image_size", "injective"]);
            let mut all = true;
            for n in tr.objects() {
                let l = latching_check(&x, n)?;
                all &= l.injective;
                t.push(vec![s(n), s(l.latching_size), s(l.image_size), s(l.injective)]);
            }
            r.tables.push(t);
            r.verdict = Some(all);
            Ok(r)
        }
    }
}

fn page_table(page: &Page) -> Table {
    let mut t = Table::new(&format!("E{}", page.r()), &["s", "t", "dim", "basis"]);
    let json = page.to_json();
    for e in json["entries"].as_array().into_iter().flatten() {
        let basis: Vec<&str> = e["basis"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
        t.push(vec![s(&e["s"]), s(&e["t"]), s(&e["dim"]), basis.join(" ")]);
    }
    t
}

fn load_scenario(cfg: &RunConfig, default_deg: i64) -> Result<Scenario, CliError> {
    let name = cfg.scenario.as_deref().unwrap_or("thh-z-mod-p");
    Ok(scenario(name, cfg.p_or(3), cfg.deg_max.unwrap_or(default_deg))?)
}

fn specseq(cmd: &SpecseqCmd, cfg: &RunConfig) -> Out {
    match cmd {
        SpecseqCmd::Run { rules } => {
            let mut sc = load_scenario(cfg, 30)?;
            if let Some(path) = rules {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
                sc.rules = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad rules file: {e}")))?;
            }
            let last = sc.rules.iter().map(|r| r.page).max().unwrap_or(2);
            let mut pages = vec![sc.e2.clone()];
            while pages.last().unwrap().r() <= last {
                let next = pages.last().unwrap().page_turn(&sc.rules)?;
                pages.push(next);
            }
            let einfty = sc.run()?;
            if einfty.dims() != pages.last().unwrap().dims() {
                return Err(CliError::internal("page turns disagree with the E^∞ run".into()));
            }
            let ab = abutment_check(&einfty, &sc.abutment)?;
            let rec = reconstruct_abutment(&einfty, &sc.abutment)?;
            let mut r = Report::new("specseq run");
            let mut rules = Table::new("differentials", &["rule"]);
            for rule in &sc.rules {
                rules.push(vec![rule.label(sc.e2.window())]);
            }
            r.tables.push(rules);
            let n = pages.len();
            for (i, page) in pages.iter().enumerate() {
                let mut t = page_table(page);
                if i + 1 == n {
                    t.name = "Einf".into();
                }
                r.tables.push(t);
            }
            let mut a = Table::new("abutment", &["degree", "page", "target"]);
            for (k, have, want) in &ab.rows {
                a.push(vec![s(k), s(have), s(want)]);
            }
            r.tables.push(a);
            let mut ext = Table::new("reconstruction", &["property", "value"]);
            ext.push(vec!["E2".into(), s(sc.e2.algebra())]);
            ext.push(vec!["Einf".into(), s(&rec.einfty)]);
            ext.push(vec!["abutment".into(), s(&rec.abutment)]);
            ext.push(vec!["target".into(), s(&sc.abutment.target)]);
            for pr in &rec.promotions {
                ext.push(vec![format!("promotion {}", pr.generator), format!("{} to {}", pr.from, pr.to)]);
            }
            r.tables.push(ext);
            r.data = json!({
                "scenario": sc.name,
                "p": sc.p,
                "deg_max": sc.deg_max,
                "pages": pages.iter().map(Page::to_json).collect::<Vec<_>>(),
                "abutment": ab,
                "series": rec.series,
                "target_series": rec.target_series,
            });
            r.verdict = Some(ab.pass && rec.matches);
            Ok(r)
        }
        SpecseqCmd::Solve => {
            let sc = load_scenario(cfg, 2 * (cfg.p_or(3) as i64).pow(2) - 1)?;
            let fam = sc.candidate_families();
            let rep = unique_differential_solver(&sc.e2, &fam, &sc.abutment)?;
            let w = sc.e2.window();
            let mut r = Report::new("specseq solve");
            let mut f = Table::new("families", &["family", "page", "source", "options"]);
            for (i, c) in fam.iter().enumerate() {
                let opts: Vec<String> = c
                    .options
                    .iter()
                    .map(|o| match w.eval(o) {
                        Ok(x) if !x.is_empty() => w.elem_label(&x),
                        _ => "0".into(),
                    })
                    .collect();
                let src = if c.level == 0 { c.generator.clone() } else { format!("γ{}{}", sc.p.pow(c.level), c.generator) };
                f.push(vec![s(i), s(c.page), src, opts.join(" | ")]);
            }
            r.tables.push(f);
            let mut sv = Table::new("survivors", &["assignment"]);
            for a in &rep.survivors {
                sv.push(vec![a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")]);
            }
            r.tables.push(sv);
            let mut c = Table::new("counts", &["tried", "rejected_square", "rejected_ill_defined", "rejected_abutment", "survivors"]);
            c.push(vec![
                s(rep.tried),
                s(rep.rejected_square),
                s(rep.rejected_ill_defined),
                s(rep.rejected_abutment),
                s(rep.survivors.len()),
            ]);
            r.tables.push(c);
            r.verdict = Some(rep.survivors.len() == 1);
            Ok(r)
        }
        SpecseqCmd::Mutate => {
            let sc = load_scenario(cfg, 2 * (cfg.p_or(3) as i64).pow(2) - 1)?;
            let muts = mutation_suite(&sc.e2, &sc.rules, &sc.abutment)?;
            let mut r = Report::new("specseq mutate");
            let mut t = Table::new("mutations", &["deleted", "detected", "mismatches", "error"]);
            for m in &muts {
                let mm: Vec<String> = m.mismatches.iter().map(|x| x.to_string()).collect();
                t.push(vec![m.deleted.clone(), s(m.detected()), mm.join(" "), m.error.clone().unwrap_or_default()]);
            }
            r.tables.push(t);
            r.verdict = Some(!muts.is_empty() && muts.iter().all(|m| m.detected()));
            Ok(r)
        }
    }
}
