use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geometry::{ConeRegion, Vector};
use crate::math;
use crate::refinable::{measure_region_with, MeasureBound, RatioBound, RefinableMeasure, Resolution, SlopeBound};

use super::gauge::Gauge;

/// r_k = ρ^k for k = 1..=k_max.
pub fn geometric_scales(rho: f64, k_max: u32) -> Result<Vec<f64>> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid("rho", "must lie in (0, 1)"));
    }
    Ok((1..=k_max as i32).map(|k| math::powi(rho, k)).collect())
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(invalid("scales", "must lie in (0, 1)"));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("scales", "must be strictly decreasing"));
    }
    Ok(())
}

/// One row of a ratio profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileEntry {
    pub scale: f64,
    pub region: MeasureBound,
    pub ball: MeasureBound,
    /// μ(region) / (f(r) μ(B(x, r))).
    pub ratio: RatioBound,
}

impl ProfileEntry {
    /// The ball is certified empty.
    pub fn empty_ball(&self) -> bool {
        self.ratio.empty
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioProfile {
    pub entries: Vec<ProfileEntry>,
}

/// Ratio μ(region_r) / (f(r) μ(B(x, r))) along the scales.
///
/// `region(r)` must return a region inside B(x, r) centered at `point`;
/// `res(k, r)` gives the engine resolution for the k-th scale.
pub fn ratio_profile<M, R, S>(
    m: &M,
    point: Vector,
    scales: &[f64],
    mut region: R,
    g: &Gauge,
    mut res: S,
) -> Result<RatioProfile>
where
    M: RefinableMeasure,
    R: FnMut(f64) -> Result<ConeRegion>,
    S: FnMut(usize, f64) -> Resolution,
{
    check_scales(scales)?;
    let mut entries = Vec::with_capacity(scales.len());
    for (k, &r) in scales.iter().enumerate() {
        let q = res(k, r);
        let ball = measure_region_with(m, &ConeRegion::ball(point, r)?, q)?;
        let reg = region(r)?;
        let num = measure_region_with(m, &reg, q)?;
        let f = g.eval(r);
        let ratio = if f > 0.0 {
            RatioBound::new(&num, &ball).scaled(1.0 / f)
        } else {
            RatioBound { lo: f64::INFINITY, hi: f64::INFINITY, unbounded: true, empty: ball.upper <= 0.0 }
        };
        entries.push(ProfileEntry { scale: r, region: num, ball, ratio });
    }
    Ok(RatioProfile { entries })
}

/// A slope log μ / log r at one scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeEntry {
    pub scale: f64,
    pub bound: MeasureBound,
    pub slope: SlopeBound,
}

impl SlopeEntry {
    pub fn new(scale: f64, bound: MeasureBound) -> Self {
        SlopeEntry { scale, bound, slope: bound.slope(scale) }
    }

    /// The slope interval is not finite (a bound of the measure is zero).
    pub fn flagged(&self) -> bool {
        self.slope.lo.is_none() || self.slope.hi.is_none()
    }

    /// Slope of the geometric mean of the bounds.
    pub fn mid(&self) -> Option<f64> {
        match (self.slope.lo, self.slope.hi) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            _ => None,
        }
    }
}

/// Extremes of the slopes over the last half of the scales.
///
/// `max` and `min` are intervals: `max.0` is the largest lower slope bound,
/// `max.1` the largest upper slope bound, and likewise for `min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimSummary {
    pub max: (f64, f64),
    pub min: (f64, f64),
    /// Same extremes for the midpoint slopes.
    pub max_mid: f64,
    pub min_mid: f64,
    pub used: usize,
    pub flagged: usize,
}

impl DimSummary {
    pub fn of(entries: &[SlopeEntry]) -> Option<Self> {
        let tail = &entries[entries.len() / 2..];
        let mut s = DimSummary {
            max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
            min: (f64::INFINITY, f64::INFINITY),
            max_mid: f64::NEG_INFINITY,
            min_mid: f64::INFINITY,
            used: 0,
            flagged: 0,
        };
        for e in tail {
            let (Some(lo), Some(hi)) = (e.slope.lo, e.slope.hi) else {
                s.flagged += 1;
                continue;
            };
            s.used += 1;
            s.max = (s.max.0.max(lo), s.max.1.max(hi));
            s.min = (s.min.0.min(lo), s.min.1.min(hi));
            let mid = 0.5 * (lo + hi);
            s.max_mid = s.max_mid.max(mid);
            s.min_mid = s.min_mid.min(mid);
        }
        if s.used == 0 {
            None
        } else {
            Some(s)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimEstimate {
    pub entries: Vec<SlopeEntry>,
    /// `None` when every entry of the last half is flagged.
    pub summary: Option<DimSummary>,
}

impl DimEstimate {
    pub fn from_entries(entries: Vec<SlopeEntry>) -> Self {
        let summary = DimSummary::of(&entries);
        DimEstimate { entries, summary }
    }
}

/// Slopes log μ(B(x, r)) / log r.
pub fn local_dims<M, S>(m: &M, point: Vector, scales: &[f64], mut res: S) -> Result<DimEstimate>
where
    M: RefinableMeasure,
    S: FnMut(usize, f64) -> Resolution,
{
    check_scales(scales)?;
    let mut entries = Vec::with_capacity(scales.len());
    for (k, &r) in scales.iter().enumerate() {
        let b = measure_region_with(m, &ConeRegion::ball(point, r)?, res(k, r))?;
        entries.push(SlopeEntry::new(r, b));
    }
    Ok(DimEstimate::from_entries(entries))
}

/// Slopes of the smallest measure over a family of regions at each scale.
///
/// With the family indexed by a net of directions or subspaces this is the
/// sup over the net of log μ(region) / log r. The minimum of the enclosures
/// is [min lower, min upper], which contains the true minimum.
pub fn conical_dims<M, F, S>(m: &M, scales: &[f64], mut family: F, mut res: S) -> Result<DimEstimate>
where
    M: RefinableMeasure,
    F: FnMut(f64) -> Result<Vec<ConeRegion>>,
    S: FnMut(usize, f64) -> Resolution,
{
    check_scales(scales)?;
    let mut entries = Vec::with_capacity(scales.len());
    for (k, &r) in scales.iter().enumerate() {
        let regions = family(r)?;
        if regions.is_empty() {
            return Err(invalid("family", "needs at least one region per scale"));
        }
        let q = res(k, r);
        let mut best: Option<MeasureBound> = None;
        for reg in &regions {
            let b = measure_region_with(m, reg, q)?;
            best = Some(match best {
                None => b,
                Some(a) => MeasureBound {
                    lower: a.lower.min(b.lower),
                    upper: a.upper.min(b.upper),
                    unresolved_mass: a.unresolved_mass.max(b.unresolved_mass),
                    unresolved_cells: a.unresolved_cells.max(b.unresolved_cells),
                    visited_cells: a.visited_cells + b.visited_cells,
                },
            });
        }
        entries.push(SlopeEntry::new(r, best.unwrap()));
    }
    Ok(DimEstimate::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Direction, HalfCone};
    use crate::refinable::{LocalizedMeasure, ProductMeasure};
    use crate::symbolic::{cantor13, unit_interval};

    fn depth(n: u32) -> impl FnMut(usize, f64) -> Resolution {
        move |_, _| Resolution::depth(n)
    }

    #[test]
    fn cantor_left_ratio() {
        let c = cantor13();
        let m = LocalizedMeasure::new(&c, &"(1)".parse().unwrap(), 40).unwrap();
        let o = Vector::x(0.0);
        let r = 3f64.powi(-5);
        // Left of 0 there is no mass, so the right half-ball carries everything.
        let right = |r: f64| -> Result<ConeRegion> {
            ConeRegion::ball(o, r)?.with_exclude(HalfCone::new(o, Direction::axis(1, 0).flipped(), 0.0)?)
        };
        let p = ratio_profile(&m, o, &[r], right, &Gauge::LogPow(2.0), depth(30)).unwrap();
        let e = p.entries[0];
        let want = (5.0 * 3f64.ln()).powi(2);
        assert!(e.ratio.lo <= want && want <= e.ratio.hi && e.ratio.hi - e.ratio.lo < 1e-6 * want, "{e:?}");
        let full =
            ratio_profile(&m, o, &[0.1, 0.01], |r| ConeRegion::ball(o, r), &Gauge::Constant(1.0), depth(30)).unwrap();
        for e in &full.entries {
            assert!(e.ratio.lo <= 1.0 && 1.0 <= e.ratio.hi);
        }
    }

    #[test]
    fn cantor_slopes_exact() {
        let c = cantor13();
        let m = LocalizedMeasure::new(&c, &"(1)".parse().unwrap(), 40).unwrap();
        let scales = geometric_scales(1.0 / 3.0, 12).unwrap();
        let d = local_dims(&m, Vector::x(0.0), &scales, depth(40)).unwrap();
        let want = 2f64.ln() / 3f64.ln();
        // B(0, 3^{-n}) touches the next cylinder only at a point of zero mass;
        // padding resolves it within one extra level.
        for e in &d.entries {
            let (lo, hi) = (e.slope.lo.unwrap(), e.slope.hi.unwrap());
            assert!(lo <= want + 1e-12 && want - 1e-12 <= hi, "{e:?}");
        }
        let s = d.summary.unwrap();
        assert_eq!(s.used, 6);
    }

    #[test]
    fn lebesgue_slopes() {
        // Oracle: μ(B(x, r)) = 2r, so the slope is 1 + ln 2 / ln r.
        let u = unit_interval();
        let m = LocalizedMeasure::new(&u, &"1221(21)".parse().unwrap(), 140).unwrap();
        let scales = geometric_scales(0.5, 120).unwrap();
        let d = local_dims(&m, Vector::x(0.0), &scales, |k, _| Resolution::depth(k as u32 + 16)).unwrap();
        for e in &d.entries[2..] {
            let want = 1.0 + 2f64.ln() / e.scale.ln();
            assert!((e.mid().unwrap() - want).abs() < 1e-6, "{e:?}");
        }
        assert!((d.entries[119].mid().unwrap() - 1.0).abs() < 0.01);
        // Oracle: μ(B(x, r)) = π r² for the square measure.
        let p = ProductMeasure::new(
            LocalizedMeasure::new(&u, &"1221(21)".parse().unwrap(), 80).unwrap(),
            LocalizedMeasure::new(&u, &"21(12)".parse().unwrap(), 80).unwrap(),
        )
        .unwrap();
        let scales = [0.5f64.powi(4), 0.5f64.powi(40)];
        let d = local_dims(&p, Vector::xy(0.0, 0.0), &scales, |_, r: f64| Resolution::depth((-r.log2()) as u32 + 12))
            .unwrap();
        for e in &d.entries {
            let want = 2.0 + core::f64::consts::PI.ln() / e.scale.ln();
            let (lo, hi) = (e.slope.lo.unwrap(), e.slope.hi.unwrap());
            assert!(lo <= want && want <= hi && hi - lo < 0.01, "{e:?}");
        }
        assert!((d.entries[1].mid().unwrap() - 2.0).abs() < 0.05);
    }

    #[test]
    fn conical_family_minimum() {
        let u = unit_interval();
        let m = LocalizedMeasure::new(&u, &"12(21)".parse().unwrap(), 50).unwrap();
        let o = Vector::x(0.0);
        let scales = geometric_scales(0.5, 8).unwrap();
        let fam = |r: f64| -> Result<Vec<ConeRegion>> {
            let mut v = Vec::new();
            for d in [Direction::axis(1, 0), Direction::axis(1, 0).flipped()] {
                v.push(ConeRegion::ball(o, r)?.with_exclude(HalfCone::new(o, d, 0.0)?)?);
            }
            Ok(v)
        };
        let c = conical_dims(&m, &scales, fam, depth(40)).unwrap();
        let l = local_dims(&m, o, &scales, depth(40)).unwrap();
        for (a, b) in c.entries.iter().zip(&l.entries).skip(2) {
            assert!(a.bound.upper <= b.bound.upper && a.bound.lower <= b.bound.lower);
            assert!((a.mid().unwrap() - b.mid().unwrap() + 2f64.ln() / a.scale.ln()).abs() < 1e-6, "{a:?} {b:?}");
        }
    }

    #[test]
    fn summary_flags() {
        let z = MeasureBound { lower: 0.0, upper: 0.1, ..MeasureBound::exact(0.0) };
        let e = [SlopeEntry::new(0.5, MeasureBound::exact(0.25)), SlopeEntry::new(0.25, z)];
        let d = DimEstimate::from_entries(e.to_vec());
        assert!(d.summary.is_none());
        assert!(geometric_scales(1.5, 3).is_err());
    }
}
