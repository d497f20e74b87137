use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symbolic::{Coding, PointEnclosure, SelfSimilarSystem, Similitude, SymbolWord};

use super::{Backend, RefinableMeasure};

/// The self-similar measure in absolute coordinates; cells are cylinders E_w.
#[derive(Clone, Debug)]
pub struct IfsMeasure<'a> {
    system: &'a SelfSimilarSystem,
    bound: PointEnclosure,
}

#[derive(Clone, Debug)]
pub struct IfsCell {
    pub map: Similitude,
    pub weight: f64,
}

impl<'a> IfsMeasure<'a> {
    pub fn new(system: &'a SelfSimilarSystem) -> Self {
        IfsMeasure { system, bound: system.attractor_bound() }
    }

    pub fn system(&self) -> &SelfSimilarSystem {
        self.system
    }

    /// The cell of a given cylinder.
    pub fn cell(&self, w: &SymbolWord) -> Result<IfsCell> {
        Ok(IfsCell { map: self.system.compose(w)?, weight: self.system.cylinder_weight(w)? })
    }
}

impl RefinableMeasure for IfsMeasure<'_> {
    type Cell = IfsCell;

    fn dim(&self) -> usize {
        self.system.dim()
    }

    fn backend(&self) -> Backend {
        Backend::SelfSimilar
    }

    fn root(&self) -> IfsCell {
        IfsCell { map: Similitude::identity(self.system.dim()), weight: 1.0 }
    }

    fn bound(&self, c: &IfsCell) -> PointEnclosure {
        PointEnclosure { center: c.map.apply(&self.bound.center), radius: c.map.ratio * self.bound.radius }
    }

    fn weight(&self, c: &IfsCell) -> f64 {
        c.weight
    }

    fn refine(&self, c: &IfsCell, out: &mut Vec<IfsCell>) {
        for (f, &p) in self.system.maps().iter().zip(self.system.weights()) {
            if p > 0.0 {
                out.push(IfsCell { map: c.map.compose(f), weight: c.weight * p });
            }
        }
    }
}

/// An ancestor cell E_{i|k} of a coded point.
#[derive(Clone, Debug, PartialEq)]
pub struct PathCell {
    pub word: SymbolWord,
    pub bound: PointEnclosure,
    pub weight: f64,
}

/// Deepest E_{i|k} whose enclosure radius is still ≥ r.
pub fn refine_to_scale(system: &SelfSimilarSystem, coding: &Coding, r: f64) -> Result<PathCell> {
    coding.validate(system.kappa())?;
    let b = system.attractor_bound();
    let mut ratio = 1.0;
    let mut k = 0usize;
    loop {
        let s = match coding.symbol(k) {
            Some(s) => s,
            None => {
                if ratio * system.max_ratio() * b.radius < r {
                    break;
                }
                return Err(Error::CodingTooShort { needed: k + 1, available: k });
            }
        };
        let next = ratio * system.map(s).ratio;
        if next * b.radius < r {
            break;
        }
        ratio = next;
        k += 1;
    }
    let word = coding.word(k)?;
    Ok(PathCell { bound: system.point_enclosure(&word, &b)?, weight: system.cylinder_weight(&word)?, word })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConeRegion, Vector};
    use crate::refinable::measure_region;
    use crate::symbolic::{cantor13, prop43, unit_interval};

    #[test]
    fn cantor_ball_examples() {
        let c = cantor13();
        let m = IfsMeasure::new(&c);
        let all = measure_region(&m, &ConeRegion::ball(Vector::x(0.0), 1.5).unwrap(), 1).unwrap();
        assert_eq!((all.lower, all.upper), (1.0, 1.0));
        // [2/3, 1] touches the sphere |y| = 1, which padding never certifies.
        let touching = measure_region(&m, &ConeRegion::ball(Vector::x(0.0), 1.0).unwrap(), 8).unwrap();
        assert_eq!(touching.upper, 1.0);
        assert_eq!(touching.lower, 1.0 - 0.5f64.powi(8));
        let gap = measure_region(&m, &ConeRegion::ball(Vector::x(0.5), 1.0 / 6.0 - 1e-9).unwrap(), 2).unwrap();
        assert_eq!((gap.lower, gap.upper), (0.0, 0.0));
        let closed_gap = measure_region(&m, &ConeRegion::ball(Vector::x(0.5), 1.0 / 6.0).unwrap(), 10).unwrap();
        assert_eq!((closed_gap.lower, closed_gap.upper), (0.0, 2.0 * 0.5f64.powi(10)));
        let left = measure_region(&m, &ConeRegion::ball(Vector::x(0.0), 1.0 / 3.0).unwrap(), 12).unwrap();
        assert!(left.contains(0.5) && left.width() <= 2f64.powi(-10));
    }

    #[test]
    fn lebesgue_interval() {
        let u = unit_interval();
        let m = IfsMeasure::new(&u);
        let b = measure_region(&m, &ConeRegion::ball(Vector::x(0.3), 0.1).unwrap(), 16).unwrap();
        assert!(b.contains(0.2) && b.width() < 1e-4);
    }

    #[test]
    fn refine_to_scale_examples() {
        let c = cantor13();
        let k = 6;
        let cell = refine_to_scale(&c, &"(1)".parse().unwrap(), 3f64.powi(-k) * 0.5).unwrap();
        assert_eq!(cell.weight, 0.5f64.powi(k));
        let root = refine_to_scale(&c, &"(1)".parse().unwrap(), 2.0).unwrap();
        assert!(root.word.is_empty());
        let p = prop43(0.28, 0.1).unwrap();
        let r = 0.99 * 0.28 * p.attractor_bound().radius;
        let cell = refine_to_scale(&p, &"3(1)".parse().unwrap(), r).unwrap();
        assert!((cell.weight - 0.05).abs() < 1e-15);
        assert!(refine_to_scale(&c, &"12".parse().unwrap(), 1e-9).is_err());
    }
}
