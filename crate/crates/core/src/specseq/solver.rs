//! Exhaustive search over candidate differentials.

use rayon::prelude::*;
use serde::Serialize;

use super::{abutment_check, AbutmentSpec, DifferentialRule, Page};
use crate::error::{Error, Result};
use crate::galg::MonoSpec;

const MAX_ASSIGNMENTS: usize = 1 << 20;

/// `d^page` of one generator digit ranges over `unit · option`; an empty option is zero.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateFamily {
    pub page: usize,
    pub generator: String,
    pub level: u32,
    pub unit: i64,
    pub options: Vec<Vec<(i64, MonoSpec)>>,
}

impl CandidateFamily {
    fn rule(&self, choice: usize) -> DifferentialRule {
        DifferentialRule {
            page: self.page,
            generator: self.generator.clone(),
            level: self.level,
            unit: self.unit,
            image: self.options[choice].clone(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SolverReport {
    pub deg_max: i64,
    pub tried: usize,
    pub rejected_square: usize,
    pub rejected_ill_defined: usize,
    pub rejected_abutment: usize,
    /// Option index per family, for each surviving assignment.
    pub survivors: Vec<Vec<usize>>,
}

enum Verdict {
    Square,
    IllDefined,
    Abutment,
    Pass,
}

/// Turns every page up to the last rule page.
pub(crate) fn turn_all(e2: &Page, rules: &[DifferentialRule]) -> Result<Page> {
    let last = rules.iter().map(|r| r.page).max().unwrap_or(e2.r());
    let mut page = e2.clone();
    while page.r() <= last {
        page = page.page_turn(rules)?;
    }
    Ok(page)
}

fn judge(e2: &Page, rules: &[DifferentialRule], abutment: &AbutmentSpec) -> Result<Verdict> {
    match turn_all(e2, rules) {
        Err(Error::DSquaredNonzero { .. }) => Ok(Verdict::Square),
        Err(Error::Inconsistent(_)) => Ok(Verdict::IllDefined),
        Err(e) => Err(e),
        Ok(page) => Ok(if abutment_check(&page, abutment)?.pass { Verdict::Pass } else { Verdict::Abutment }),
    }
}

/// Every assignment passing the square-zero and abutment filters through `e2.deg_max()`.
pub fn unique_differential_solver(e2: &Page, families: &[CandidateFamily], abutment: &AbutmentSpec) -> Result<SolverReport> {
    let mut total = 1usize;
    for f in families {
        if f.options.is_empty() {
            return Err(Error::InvalidAlgebra(format!("family for {} has no options", f.generator)));
        }
        total = total
            .checked_mul(f.options.len())
            .filter(|&t| t <= MAX_ASSIGNMENTS)
            .ok_or_else(|| Error::WindowTooSmall("too many candidate assignments".into()))?;
    }
    let verdicts: Vec<(Vec<usize>, Verdict)> = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut choice = Vec::with_capacity(families.len());
            for f in families {
                choice.push(code % f.options.len());
                code /= f.options.len();
            }
            let rules: Vec<DifferentialRule> = families.iter().zip(&choice).map(|(f, &c)| f.rule(c)).collect();
            Ok((choice, judge(e2, &rules, abutment)?))
        })
        .collect::<Result<_>>()?;
    let mut rep = SolverReport { deg_max: e2.deg_max(), tried: total, ..Default::default() };
    for (choice, v) in verdicts {
        match v {
            Verdict::Square => rep.rejected_square += 1,
            Verdict::IllDefined => rep.rejected_ill_defined += 1,
            Verdict::Abutment => rep.rejected_abutment += 1,
            Verdict::Pass => rep.survivors.push(choice),
        }
    }
    rep.survivors.sort();
    if rep.survivors.is_empty() {
        return Err(Error::NoSurvivor);
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct Mutation {
    pub deleted: String,
    /// Total degrees where the mutated `E^∞` misses the abutment.
    pub mismatches: Vec<i64>,
    /// Set when the mutated family is not a differential at all.
    pub error: Option<String>,
}

impl Mutation {
    pub fn detected(&self) -> bool {
        self.error.is_some() || !self.mismatches.is_empty()
    }
}

/// Deletes each nonzero rule acting inside the window in turn.
pub fn mutation_suite(e2: &Page, rules: &[DifferentialRule], abutment: &AbutmentSpec) -> Result<Vec<Mutation>> {
    let w = e2.window();
    let live: Vec<usize> = (0..rules.len())
        .filter(|&i| !rules[i].is_zero() && w.digit_index(&rules[i].generator, rules[i].level).is_some())
        .collect();
    live.par_iter()
        .map(|&i| {
            let rest: Vec<DifferentialRule> =
                rules.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
            let deleted = rules[i].label(w);
            match turn_all(e2, &rest) {
                Err(e @ (Error::DSquaredNonzero { .. } | Error::Inconsistent(_))) => {
                    Ok(Mutation { deleted, mismatches: vec![], error: Some(e.to_string()) })
                }
                Err(e) => Err(e),
                Ok(page) => Ok(Mutation { deleted, mismatches: abutment_check(&page, abutment)?.mismatches, error: None }),
            }
        })
        .collect()
}
