//! Homology of a family of windows indexed by an increasing bound.

use serde::Serialize;

use super::{SimplicialModel, SimplicialSet};
use crate::error::{Error, Result};
use crate::homology::homology_dims;

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub p: u32,
    pub max_degree: usize,
    pub rows: Vec<(i64, Vec<usize>)>,
    /// First bound from which every row equals the last one.
    pub stable_from: Option<i64>,
}

/// Builds one window per bound, checks each includes the previous, and
/// reports homology through `max_degree`.
pub fn bounded_stabilization<M, F>(build: F, bounds: &[i64], max_degree: usize, p: u32) -> Result<StabilizationReport>
where
    M: SimplicialModel,
    F: Fn(i64) -> Result<SimplicialSet<M>>,
{
    let mut rows = Vec::new();
    let mut prev: Option<SimplicialSet<M>> = None;
    for w in bounds.windows(2) {
        if w[1] < w[0] {
            return Err(Error::NonMonotone("bounds must increase".into()));
        }
    }
    for &b in bounds {
        let x = build(b)?;
        if x.top() < max_degree + 1 {
            return Err(Error::WindowTooSmall(format!("window for bound {b} stops below degree {}", max_degree + 1)));
        }
        if let Some(small) = &prev {
            for q in 0..=small.top().min(x.top()) {
                if let Some(c) = small.cells(q).iter().find(|c| x.index_of(c).is_none()) {
                    return Err(Error::NonMonotone(format!("{} missing at bound {b}", small.model().label(c))));
                }
            }
        }
        rows.push((b, homology_dims(&x, p, max_degree)?));
        prev = Some(x);
    }
    let stable_from = rows
        .last()
        .map(|(_, last)| rows.iter().rev().take_while(|(_, d)| d == last).last().map(|r| r.0).unwrap());
    Ok(StabilizationReport { p, max_degree, rows, stable_from })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{DegreeSet, GradedCommMonoid};
    use crate::sset::bcy;

    #[test]
    fn weight_zero_window_of_dz_is_a_circle() {
        let z = GradedCommMonoid::named("dZ:2").unwrap();
        let r = bounded_stabilization(|b| bcy(&z, DegreeSet::single(0), b, 4), &[2, 4, 6], 3, 3).unwrap();
        for (_, dims) in &r.rows {
            assert_eq!(dims, &vec![1, 1, 0, 0]);
        }
        assert_eq!(r.stable_from, Some(2));
    }
}
