//! Certified enclosures of μ(region) for measures presented as refinable cells.

mod ifs;
mod localized;
mod product;
pub mod triadic;

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Result;
use crate::geometry::{ball_disposition, ConeRegion, Disposition};
use crate::math;
use crate::symbolic::PointEnclosure;

pub use ifs::{refine_to_scale, IfsCell, IfsMeasure, PathCell};
pub use localized::{LocalCell, LocalizedMeasure};
pub use product::{ProductCell, ProductMeasure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    SelfSimilar,
    Product,
    Grid,
}

/// A measure given by a root cell of mass 1 and a refinement rule.
///
/// Children of a cell must carry the parent's mass and lie inside its bound.
pub trait RefinableMeasure {
    type Cell: Clone;

    fn dim(&self) -> usize;
    fn backend(&self) -> Backend;
    fn root(&self) -> Self::Cell;
    fn bound(&self, cell: &Self::Cell) -> PointEnclosure;
    fn weight(&self, cell: &Self::Cell) -> f64;
    /// Appends the children of `cell` to `out`.
    fn refine(&self, cell: &Self::Cell, out: &mut Vec<Self::Cell>);

    /// Rejects regions the backend cannot interpret (for example, localized
    /// backends work in coordinates relative to their point).
    fn check_region(&self, _region: &ConeRegion) -> Result<()> {
        Ok(())
    }
}

/// Enclosure [lower, upper] of a measure value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureBound {
    pub lower: f64,
    pub upper: f64,
    /// Mass of cells left undecided at the depth cap.
    pub unresolved_mass: f64,
    pub unresolved_cells: u64,
    pub visited_cells: u64,
}

impl MeasureBound {
    pub fn exact(v: f64) -> Self {
        MeasureBound { lower: v, upper: v, unresolved_mass: 0.0, unresolved_cells: 0, visited_cells: 0 }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    /// Interval of log μ / log r for a scale r < 1; `None` entries mean unbounded.
    pub fn slope(&self, r: f64) -> SlopeBound {
        let lr = math::ln(r);
        let lo = if self.upper > 0.0 { Some(math::ln(self.upper.min(1.0)) / lr) } else { None };
        let hi = if self.lower > 0.0 { Some(math::ln(self.lower.min(1.0)) / lr) } else { None };
        SlopeBound { lo, hi }
    }
}

/// Interval of a log-ratio slope. `lo = None` means the measure is certified zero;
/// `hi = None` means the lower bound is zero, so the slope is unbounded above.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeBound {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

/// Interval μ(A)/μ(B) ∈ [lower(A)/upper(B), upper(A)/lower(B)].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioBound {
    pub lo: f64,
    pub hi: f64,
    /// Set when lower(B) = 0 so no finite upper value is certified.
    pub unbounded: bool,
    /// Set when upper(B) = 0: the denominator is certified empty.
    pub empty: bool,
}

impl RatioBound {
    pub fn new(num: &MeasureBound, den: &MeasureBound) -> Self {
        let empty = den.upper <= 0.0;
        let lo = if empty { 0.0 } else { num.lower / den.upper };
        let (hi, unbounded) = if den.lower > 0.0 { (num.upper / den.lower, false) } else { (f64::INFINITY, true) };
        RatioBound { lo, hi, unbounded, empty }
    }

    pub fn scaled(self, s: f64) -> Self {
        RatioBound { lo: self.lo * s, hi: self.hi * s, ..self }
    }
}

/// Options of the enclosure descent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resolution {
    /// Cells at this depth are not refined further.
    pub depth_cap: u32,
    /// Hard budget on visited cells; the remaining stack counts as unresolved.
    pub max_cells: u64,
}

impl Resolution {
    pub fn depth(depth_cap: u32) -> Self {
        Resolution { depth_cap, max_cells: u64::MAX }
    }
}

/// μ(region) enclosed by refinement capped at `depth_cap`.
pub fn measure_region<M: RefinableMeasure>(m: &M, region: &ConeRegion, depth_cap: u32) -> Result<MeasureBound> {
    measure_region_with(m, region, Resolution::depth(depth_cap))
}

pub fn measure_region_with<M: RefinableMeasure>(m: &M, region: &ConeRegion, res: Resolution) -> Result<MeasureBound> {
    m.check_region(region)?;
    let mut lower = 0.0;
    let mut unresolved = 0.0;
    let mut unresolved_cells = 0u64;
    let mut visited = 0u64;
    let mut seq = 0u64;
    // Heaviest cell first, ties in insertion order, so a cell budget is spent
    // where it narrows the bound most.
    let mut heap: BinaryHeap<Pending<M::Cell>> = BinaryHeap::new();
    let root = m.root();
    heap.push(Pending { weight: m.weight(&root), seq, depth: 0, cell: root });
    let mut kids = Vec::new();
    while let Some(Pending { weight: w, depth, cell, .. }) = heap.pop() {
        if w <= 0.0 {
            continue;
        }
        visited += 1;
        if visited > res.max_cells {
            unresolved += w;
            unresolved_cells += 1;
            for p in heap.drain() {
                if p.weight > 0.0 {
                    unresolved += p.weight;
                    unresolved_cells += 1;
                }
            }
            break;
        }
        let b = m.bound(&cell);
        match ball_disposition(&b.center, b.radius, region) {
            Disposition::Inside => lower += w,
            Disposition::Outside => {}
            Disposition::Unknown => {
                if depth >= res.depth_cap {
                    unresolved += w;
                    unresolved_cells += 1;
                } else {
                    kids.clear();
                    m.refine(&cell, &mut kids);
                    if kids.is_empty() {
                        unresolved += w;
                        unresolved_cells += 1;
                        continue;
                    }
                    for c in kids.drain(..) {
                        seq += 1;
                        heap.push(Pending { weight: m.weight(&c), seq, depth: depth + 1, cell: c });
                    }
                }
            }
        }
    }
    let upper = (lower + unresolved).min(1.0);
    Ok(MeasureBound {
        lower: lower.min(upper),
        upper,
        unresolved_mass: unresolved,
        unresolved_cells,
        visited_cells: visited,
    })
}

struct Pending<C> {
    weight: f64,
    seq: u64,
    depth: u32,
    cell: C,
}

impl<C> PartialEq for Pending<C> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl<C> Eq for Pending<C> {}

impl<C> PartialOrd for Pending<C> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<C> Ord for Pending<C> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.weight.total_cmp(&o.weight).then_with(|| o.seq.cmp(&self.seq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_rules() {
        let a = MeasureBound { lower: 0.1, upper: 0.2, ..MeasureBound::exact(0.0) };
        let b = MeasureBound { lower: 0.4, upper: 0.5, ..MeasureBound::exact(0.0) };
        let r = RatioBound::new(&a, &b);
        assert!((r.lo - 0.2).abs() < 1e-15 && (r.hi - 0.5).abs() < 1e-15 && !r.unbounded);
        let z = MeasureBound { lower: 0.0, upper: 0.5, ..MeasureBound::exact(0.0) };
        assert!(RatioBound::new(&a, &z).unbounded);
        assert!(RatioBound::new(&a, &MeasureBound::exact(0.0)).empty);
    }

    #[test]
    fn slopes() {
        let b = MeasureBound::exact(0.25);
        let s = b.slope(0.5);
        assert_eq!(s.lo, Some(2.0));
        assert_eq!(s.hi, Some(2.0));
        let z = MeasureBound { lower: 0.0, upper: 0.25, ..b };
        assert_eq!(z.slope(0.5).hi, None);
    }
}
