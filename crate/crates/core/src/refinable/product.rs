use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geometry::{ConeRegion, Vector};
use crate::math;
use crate::symbolic::PointEnclosure;

use super::{Backend, RefinableMeasure};

/// μ_x × μ_y in the plane for two one-dimensional factors.
///
/// A cell is a rectangle (product of factor cells). Refinement splits the
/// factor with the longer side, or both when the sides are equal.
#[derive(Clone, Debug)]
pub struct ProductMeasure<A, B> {
    pub x: A,
    pub y: B,
}

#[derive(Clone, Debug)]
pub struct ProductCell<P, Q>(pub P, pub Q);

impl<A: RefinableMeasure, B: RefinableMeasure> ProductMeasure<A, B> {
    pub fn new(x: A, y: B) -> Result<Self> {
        if x.dim() != 1 || y.dim() != 1 {
            return Err(invalid("factors", "product measures need one-dimensional factors"));
        }
        Ok(ProductMeasure { x, y })
    }

    /// The half side lengths of the rectangle enclosing `c`.
    fn halves(&self, c: &ProductCell<A::Cell, B::Cell>) -> (PointEnclosure, PointEnclosure) {
        (self.x.bound(&c.0), self.y.bound(&c.1))
    }
}

impl<A: RefinableMeasure, B: RefinableMeasure> RefinableMeasure for ProductMeasure<A, B> {
    type Cell = ProductCell<A::Cell, B::Cell>;

    fn dim(&self) -> usize {
        2
    }

    fn backend(&self) -> Backend {
        Backend::Product
    }

    fn root(&self) -> Self::Cell {
        ProductCell(self.x.root(), self.y.root())
    }

    fn bound(&self, c: &Self::Cell) -> PointEnclosure {
        let (bx, by) = self.halves(c);
        PointEnclosure {
            center: Vector::xy(bx.center[0], by.center[0]),
            radius: math::sqrt(bx.radius * bx.radius + by.radius * by.radius),
        }
    }

    fn weight(&self, c: &Self::Cell) -> f64 {
        self.x.weight(&c.0) * self.y.weight(&c.1)
    }

    fn refine(&self, c: &Self::Cell, out: &mut Vec<Self::Cell>) {
        let (bx, by) = self.halves(c);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        if bx.radius >= by.radius {
            self.x.refine(&c.0, &mut xs);
        } else {
            xs.push(c.0.clone());
        }
        if by.radius >= bx.radius {
            self.y.refine(&c.1, &mut ys);
        } else {
            ys.push(c.1.clone());
        }
        for a in &xs {
            for b in &ys {
                out.push(ProductCell(a.clone(), b.clone()));
            }
        }
    }

    fn check_region(&self, region: &ConeRegion) -> Result<()> {
        region.center.check_dim(2)?;
        let cx = ConeRegion::ball(Vector::x(region.center[0]), 1.0)?;
        let cy = ConeRegion::ball(Vector::x(region.center[1]), 1.0)?;
        self.x.check_region(&cx)?;
        self.y.check_region(&cy)
    }
}
