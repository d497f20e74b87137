use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::exact;
use crate::geometry::{ConeRegion, PlaneCone, Subspace, Vector};
use crate::math;
use crate::refinable::triadic::{cantor_one_sided, CantorWeights, RationalInterval};
use crate::refinable::{MeasureBound, RefinableMeasure, Resolution};
use crate::symbolic::Coding;

use super::profile::{conical_dims, local_dims, DimEstimate, DimSummary, SlopeEntry};

fn entry(n: u32, v: &RationalInterval) -> SlopeEntry {
    let r = math::powi(3.0, -(n as i32));
    let b = MeasureBound { lower: exact::to_f64(&v.lo), upper: exact::to_f64(&v.hi), ..MeasureBound::exact(0.0) };
    SlopeEntry::new(r, b)
}

/// Two-sided and one-sided slope estimates at one Cantor point.
#[derive(Clone, Debug, PartialEq)]
pub struct OneSidedRow {
    /// Eventually constant codings are endpoints of construction intervals.
    pub flagged: bool,
    /// log μ([x−h, x+h]) / log h with h = 3^{-n}.
    pub two_sided: DimEstimate,
    /// log μ([x, x+h]) / log h.
    pub one_sided: DimEstimate,
}

impl OneSidedRow {
    /// Lower-dimension proxies (two-sided, one-sided): midpoint minima over the last half.
    pub fn lower_proxies(&self) -> Option<(f64, f64)> {
        let a = self.two_sided.summary?;
        let b = self.one_sided.summary?;
        Some((a.min_mid, b.min_mid))
    }
}

/// Exact triadic slopes of two- and one-sided balls for each coding and n in `ns`.
pub fn one_sided_dim_check(w: &CantorWeights, codings: &[Coding], ns: &[u32]) -> Result<Vec<OneSidedRow>> {
    if ns.is_empty() || ns.windows(2).any(|p| p[1] <= p[0]) || ns[0] == 0 {
        return Err(invalid("ns", "must be positive and strictly increasing"));
    }
    let mut rows = Vec::with_capacity(codings.len());
    for c in codings {
        let flagged = c.is_eventually_constant();
        let mut two = Vec::with_capacity(ns.len());
        let mut one = Vec::with_capacity(ns.len());
        if !flagged {
            for &n in ns {
                let v = cantor_one_sided(w, c, n)?;
                two.push(entry(n, &v.two_sided));
                one.push(entry(n, &v.one_sided));
            }
        }
        rows.push(OneSidedRow {
            flagged,
            two_sided: DimEstimate::from_entries(two),
            one_sided: DimEstimate::from_entries(one),
        });
    }
    Ok(rows)
}

/// Conical slopes for the twisted cone X^β(x, V, α) against the bound
/// m(β−1) + lower local dimension, m = codim V.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedCheck {
    pub conical: DimEstimate,
    pub local: DimEstimate,
    pub m: usize,
    pub beta: f64,
}

impl TwistedCheck {
    /// m(β−1) plus the midpoint lower-dimension proxy.
    pub fn bound(&self) -> Option<f64> {
        let s = self.local.summary?;
        Some(self.m as f64 * (self.beta - 1.0) + s.min_mid)
    }

    pub fn conical_summary(&self) -> Option<DimSummary> {
        self.conical.summary
    }
}

/// Slopes of μ(B(0, r) ∩ X^β(0, V, α)) and μ(B(0, r)) for a measure localized at its point.
pub fn twisted_dim_check<M, S>(
    m: &M,
    beta: f64,
    alpha: f64,
    v: Subspace,
    scales: &[f64],
    mut res: S,
) -> Result<TwistedCheck>
where
    M: RefinableMeasure,
    S: FnMut(usize, f64) -> Resolution,
{
    let o = Vector::zeros(m.dim());
    let cone = PlaneCone::new(o, v, alpha, beta)?;
    let local = local_dims(m, o, scales, &mut res)?;
    let conical = conical_dims(m, scales, |r| Ok(alloc::vec![ConeRegion::ball(o, r)?.with_include(cone)?]), &mut res)?;
    Ok(TwistedCheck { conical, local, m: v.codim(), beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use crate::refinable::{LocalizedMeasure, ProductMeasure};
    use crate::symbolic::{cantor13, unit_interval, SymbolWord};

    #[test]
    fn endpoint_flagged() {
        let w = CantorWeights::natural();
        let rows = one_sided_dim_check(&w, &["(1)".parse().unwrap(), "1(2)".parse().unwrap()], &[1, 2, 3]).unwrap();
        assert!(rows.iter().all(|r| r.flagged && r.lower_proxies().is_none()));
    }

    #[test]
    fn one_sided_dominates() {
        let w = CantorWeights::natural();
        let c = cantor13();
        let codings: Vec<Coding> = (0..20)
            .map(|i| Coding::periodic(c.sample_word(40, i), SymbolWord::from_symbols(alloc::vec![1, 2])).unwrap())
            .collect();
        let ns: Vec<u32> = (1..=30).collect();
        for row in one_sided_dim_check(&w, &codings, &ns).unwrap() {
            assert!(!row.flagged);
            for (a, b) in row.one_sided.entries.iter().zip(&row.two_sided.entries) {
                assert!(a.bound.upper <= b.bound.upper);
            }
            let (two, one) = row.lower_proxies().unwrap();
            assert!(one >= two);
        }
    }

    #[test]
    fn untwisted_cone_bound() {
        // With β = 1 the bound is the lower local dimension itself.
        let u = unit_interval();
        let c = cantor13();
        let p = ProductMeasure::new(
            LocalizedMeasure::new(&u, &"12(21)".parse().unwrap(), 60).unwrap(),
            LocalizedMeasure::new(&c, &"21(12)".parse().unwrap(), 40).unwrap(),
        )
        .unwrap();
        let scales: Vec<f64> = (3..=8).map(|k| 3f64.powi(-k)).collect();
        let v = Subspace::line(&Direction::axis(2, 1));
        let res = |_: usize, r: f64| Resolution { depth_cap: (-r.log2()) as u32 + 10, max_cells: 400_000 };
        let t = twisted_dim_check(&p, 1.0, 0.5, v, &scales, res).unwrap();
        assert_eq!(t.m, 1);
        assert_eq!(t.bound(), Some(t.local.summary.unwrap().min_mid));
        for (a, b) in t.conical.entries.iter().zip(&t.local.entries) {
            assert!(a.bound.upper <= b.bound.upper);
        }
    }
}
