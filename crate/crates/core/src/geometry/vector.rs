use core::fmt;
use core::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{invalid, Error, Result};
use crate::math;

/// Largest ambient dimension supported by the fixed-size storage.
pub const MAX_DIM: usize = 3;

/// A point or displacement in R^n for n ≤ 3.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    c: [f64; MAX_DIM],
    n: u8,
}

impl Vector {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let n = coords.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(invalid("coords", "entries must be finite"));
        }
        let mut c = [0.0; MAX_DIM];
        c[..n].copy_from_slice(coords);
        Ok(Vector { c, n: n as u8 })
    }

    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension out of range");
        Vector { c: [0.0; MAX_DIM], n: n as u8 }
    }

    pub fn x(a: f64) -> Self {
        Vector { c: [a, 0.0, 0.0], n: 1 }
    }

    pub fn xy(a: f64, b: f64) -> Self {
        Vector { c: [a, b, 0.0], n: 2 }
    }

    pub fn xyz(a: f64, b: f64, c: f64) -> Self {
        Vector { c: [a, b, c], n: 3 }
    }

    /// The i-th standard basis vector of R^n.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Vector::zeros(n);
        v.c[i] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.n as usize]
    }

    #[inline]
    pub fn dot(&self, o: &Vector) -> f64 {
        self.c[0] * o.c[0] + self.c[1] * o.c[1] + self.c[2] * o.c[2]
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm2())
    }

    pub fn dist(&self, o: &Vector) -> f64 {
        (*self - *o).norm()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: n, found: self.dim() })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    #[inline]
    fn add(self, o: Vector) -> Vector {
        debug_assert_eq!(self.n, o.n);
        Vector { c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]], n: self.n }
    }
}

impl Sub for Vector {
    type Output = Vector;
    #[inline]
    fn sub(self, o: Vector) -> Vector {
        debug_assert_eq!(self.n, o.n);
        Vector { c: [self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2]], n: self.n }
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    #[inline]
    fn mul(self, s: f64) -> Vector {
        Vector { c: [self.c[0] * s, self.c[1] * s, self.c[2] * s], n: self.n }
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self * -1.0
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// An n×n matrix, n ≤ 3, used for the linear parts of similitudes.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Matrix {
    m: [[f64; MAX_DIM]; MAX_DIM],
    n: u8,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension out of range");
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in m.iter_mut().enumerate().take(n) {
            row[i] = 1.0;
        }
        Matrix { m, n: n as u8 }
    }

    /// Row-major construction; `rows.len()` must be n² for n ≤ 3.
    pub fn from_rows(n: usize, rows: &[f64]) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: rows.len() });
        }
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = rows[i * n + j];
            }
        }
        Ok(Matrix { m, n: n as u8 })
    }

    /// Planar rotation by angle `t`.
    pub fn rotation2(t: f64) -> Self {
        let (s, c) = (math::sin(t), math::cos(t));
        Matrix::from_rows(2, &[c, -s, s, c]).unwrap()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    #[inline]
    pub fn apply(&self, v: &Vector) -> Vector {
        let mut c = [0.0; MAX_DIM];
        for (i, ci) in c.iter_mut().enumerate().take(self.n as usize) {
            *ci = self.m[i][0] * v.c[0] + self.m[i][1] * v.c[1] + self.m[i][2] * v.c[2];
        }
        Vector { c, n: self.n }
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let n = self.n as usize;
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = (0..n).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Matrix { m, n: self.n }
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..MAX_DIM {
            for j in 0..MAX_DIM {
                m[i][j] = self.m[j][i];
            }
        }
        Matrix { m, n: self.n }
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.dim())
    }

    /// True when `MᵀM` is within `tol` of the identity entrywise.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        let p = self.transpose().mul(self);
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| math::abs(p.m[i][j] - if i == j { 1.0 } else { 0.0 }) <= tol))
    }

    /// Solves `M x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &Vector) -> Option<Vector> {
        let n = self.dim();
        let mut a = self.m;
        let mut r = b.c;
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| math::abs(a[i][col]).total_cmp(&math::abs(a[j][col])))?;
            if a[piv][col] == 0.0 {
                return None;
            }
            a.swap(col, piv);
            r.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                r[row] -= f * r[col];
            }
        }
        let mut x = [0.0; MAX_DIM];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (r[i] - s) / a[i][i];
        }
        Some(Vector { c: x, n: self.n })
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        let mut m = self.m;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Matrix { m, n: self.n }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        let mut m = self.m;
        for i in 0..MAX_DIM {
            for j in 0..MAX_DIM {
                m[i][j] -= o.m[i][j];
            }
        }
        Matrix { m, n: self.n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions() {
        assert!(Vector::new(&[]).is_err());
        assert!(Vector::new(&[1.0; 4]).is_err());
        assert!(Vector::new(&[f64::NAN]).is_err());
    }

    #[test]
    fn solve_recovers_rhs() {
        let m = Matrix::from_rows(3, &[2.0, 1.0, 0.0, 0.0, 3.0, 1.0, 1.0, 0.0, 4.0]).unwrap();
        let x = Vector::xyz(1.0, -2.0, 0.5);
        let b = m.apply(&x);
        let y = m.solve(&b).unwrap();
        assert!(y.dist(&x) < 1e-14);
    }

    #[test]
    fn rotation_is_orthogonal() {
        assert!(Matrix::rotation2(0.7).is_orthogonal(1e-15));
        assert!(!Matrix::identity(2).scaled(0.5).is_orthogonal(1e-3));
    }
}
