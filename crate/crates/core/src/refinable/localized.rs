use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geometry::{ConeRegion, Vector};
use crate::symbolic::{Coding, PointEnclosure, SelfSimilarSystem, Similitude, SymbolWord, Tail};

use super::{Backend, RefinableMeasure};

/// The self-similar measure seen from a coded point x = π(i).
///
/// Cell bounds are expressed relative to x (x sits at the origin), so regions
/// must be centered at the origin. Cylinders along the coding are tracked
/// through frames k = 0..=depth; off-path cells keep a short local map inside
/// their frame, which keeps roundoff proportional to the cell's own scale.
#[derive(Clone, Debug)]
pub struct LocalizedMeasure<'a> {
    system: &'a SelfSimilarSystem,
    bound: PointEnclosure,
    path: Vec<u8>,
    frames: Vec<Frame>,
    point: Vector,
}

#[derive(Clone, Debug)]
struct Frame {
    lin: Similitude,
    weight: f64,
    /// π(σ^k i) in the original coordinates.
    x: Vector,
}

#[derive(Clone, Debug)]
pub enum LocalCell {
    /// E_{i|k}.
    Path(u32),
    /// E_{i|k w} for a word w whose first symbol leaves the path; `g = f_w`.
    Off { k: u32, g: Similitude, weight: f64 },
}

impl<'a> LocalizedMeasure<'a> {
    /// Frames are built to `depth` symbols. A finite coding is read as prefix·1^∞.
    pub fn new(system: &'a SelfSimilarSystem, coding: &Coding, depth: usize) -> Result<Self> {
        coding.validate(system.kappa())?;
        let coding = match coding.tail {
            Tail::Periodic(_) => coding.clone(),
            Tail::Unresolved => Coding::periodic(coding.prefix.clone(), SymbolWord::repeat(1, 1))?,
        };
        let path: Vec<u8> = coding.word(depth)?.symbols().to_vec();
        let plen = coding.prefix.len();
        let x_last = if depth < plen {
            let rest = SymbolWord::from_symbols(coding.prefix.symbols()[depth..].to_vec());
            let c = Coding { prefix: rest, tail: coding.tail.clone() };
            system.point(&c)?
        } else {
            let per = match &coding.tail {
                Tail::Periodic(p) => p.symbols(),
                Tail::Unresolved => unreachable!(),
            };
            let off = (depth - plen) % per.len();
            let mut rot = per[off..].to_vec();
            rot.extend_from_slice(&per[..off]);
            system.compose(&SymbolWord::from_symbols(rot))?.fixed_point()
        };
        let mut xs = alloc::vec![x_last; depth + 1];
        for k in (0..depth).rev() {
            xs[k] = system.map(path[k]).apply(&xs[k + 1]);
        }
        let n = system.dim();
        let mut frames = Vec::with_capacity(depth + 1);
        let mut lin = Similitude::identity(n);
        let mut w = 1.0;
        for k in 0..=depth {
            frames.push(Frame { lin, weight: w, x: xs[k] });
            if k < depth {
                let f = system.map(path[k]);
                lin = Similitude {
                    ratio: lin.ratio * f.ratio,
                    rotation: lin.rotation.mul(&f.rotation),
                    translation: Vector::zeros(n),
                };
                w *= system.weight(path[k]);
            }
        }
        Ok(LocalizedMeasure { system, bound: system.attractor_bound(), path, frames, point: xs[0] })
    }

    /// x in absolute coordinates.
    pub fn point(&self) -> Vector {
        self.point
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    /// μ(E_{i|k}).
    pub fn path_weight(&self, k: usize) -> f64 {
        self.frames[k].weight
    }

    /// Radius of the enclosure of E_{i|k}.
    pub fn path_radius(&self, k: usize) -> f64 {
        self.frames[k].lin.ratio * self.bound.radius
    }

    pub fn system(&self) -> &SelfSimilarSystem {
        self.system
    }
}

impl RefinableMeasure for LocalizedMeasure<'_> {
    type Cell = LocalCell;

    fn dim(&self) -> usize {
        self.system.dim()
    }

    fn backend(&self) -> Backend {
        Backend::SelfSimilar
    }

    fn root(&self) -> LocalCell {
        LocalCell::Path(0)
    }

    fn bound(&self, c: &LocalCell) -> PointEnclosure {
        match c {
            LocalCell::Path(k) => {
                let f = &self.frames[*k as usize];
                PointEnclosure {
                    center: f.lin.apply_linear(&(self.bound.center - f.x)),
                    radius: f.lin.ratio * self.bound.radius,
                }
            }
            LocalCell::Off { k, g, .. } => {
                let f = &self.frames[*k as usize];
                PointEnclosure {
                    center: f.lin.apply_linear(&(g.apply(&self.bound.center) - f.x)),
                    radius: f.lin.ratio * g.ratio * self.bound.radius,
                }
            }
        }
    }

    fn weight(&self, c: &LocalCell) -> f64 {
        match c {
            LocalCell::Path(k) => self.frames[*k as usize].weight,
            LocalCell::Off { weight, .. } => *weight,
        }
    }

    fn refine(&self, c: &LocalCell, out: &mut Vec<LocalCell>) {
        let maps = self.system.maps();
        let ps = self.system.weights();
        match c {
            LocalCell::Path(k) => {
                let k = *k as usize;
                let w = self.frames[k].weight;
                for (a, (f, &p)) in maps.iter().zip(ps).enumerate() {
                    if p <= 0.0 {
                        continue;
                    }
                    if k < self.path.len() && self.path[k] as usize == a + 1 {
                        out.push(LocalCell::Path(k as u32 + 1));
                    } else {
                        out.push(LocalCell::Off { k: k as u32, g: *f, weight: w * p });
                    }
                }
            }
            LocalCell::Off { k, g, weight } => {
                for (f, &p) in maps.iter().zip(ps) {
                    if p > 0.0 {
                        out.push(LocalCell::Off { k: *k, g: g.compose(f), weight: weight * p });
                    }
                }
            }
        }
    }

    fn check_region(&self, region: &ConeRegion) -> Result<()> {
        region.center.check_dim(self.system.dim())?;
        if region.center.norm() != 0.0 {
            return Err(invalid("region", "localized measures need regions centered at the origin"));
        }
        Ok(())
    }
}
