use crate::error::{invalid, Result};
use crate::geometry::{Matrix, Vector};

/// f(x) = r·O·x + t with 0 < r ≤ 1 and O orthogonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similitude {
    pub ratio: f64,
    pub rotation: Matrix,
    pub translation: Vector,
}

impl Similitude {
    pub fn new(ratio: f64, rotation: Matrix, translation: Vector) -> Result<Self> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(invalid("ratio", "must lie in (0, 1]"));
        }
        translation.check_dim(rotation.dim())?;
        if !rotation.is_orthogonal(1e-10) {
            return Err(invalid("rotation", "must be orthogonal"));
        }
        Ok(Similitude { ratio, rotation, translation })
    }

    /// x ↦ r x + t.
    pub fn scaling(ratio: f64, translation: Vector) -> Result<Self> {
        Similitude::new(ratio, Matrix::identity(translation.dim()), translation)
    }

    pub fn identity(n: usize) -> Self {
        Similitude { ratio: 1.0, rotation: Matrix::identity(n), translation: Vector::zeros(n) }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    #[inline]
    pub fn apply(&self, x: &Vector) -> Vector {
        self.rotation.apply(x) * self.ratio + self.translation
    }

    /// The linear part r·O applied to a displacement.
    #[inline]
    pub fn apply_linear(&self, z: &Vector) -> Vector {
        self.rotation.apply(z) * self.ratio
    }

    /// self ∘ g.
    pub fn compose(&self, g: &Similitude) -> Similitude {
        Similitude {
            ratio: self.ratio * g.ratio,
            rotation: self.rotation.mul(&g.rotation),
            translation: self.apply(&g.translation),
        }
    }

    /// The unique fixed point (requires ratio < 1).
    pub fn fixed_point(&self) -> Vector {
        let n = self.dim();
        let a = Matrix::identity(n).sub(&self.rotation.scaled(self.ratio));
        a.solve(&self.translation).unwrap_or(self.translation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_fix() {
        let f1 = Similitude::scaling(1.0 / 3.0, Vector::x(0.0)).unwrap();
        let f2 = Similitude::scaling(1.0 / 3.0, Vector::x(2.0 / 3.0)).unwrap();
        let g = f1.compose(&f2);
        assert!((g.ratio - 1.0 / 9.0).abs() < 1e-16);
        assert!((g.translation[0] - 2.0 / 9.0).abs() < 1e-16);
        assert!((f2.fixed_point()[0] - 1.0).abs() < 1e-15);
        let r = Similitude::new(0.5, Matrix::rotation2(1.0), Vector::xy(1.0, 0.0)).unwrap();
        let p = r.fixed_point();
        assert!(r.apply(&p).dist(&p) < 1e-14);
        assert!(Similitude::scaling(1.5, Vector::x(0.0)).is_err());
    }
}
