use crate::error::{invalid, Error, Result};
use crate::math;

use super::vector::{Matrix, Vector, MAX_DIM};

/// Relative padding applied to every certified comparison.
pub const PAD: f64 = 1e-12;

const UNIT_TOL: f64 = 1e-12;

/// A unit vector θ ∈ S^{n-1}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    unit: Vector,
}

impl Direction {
    /// Accepts `v` only if its norm is within 1e-12 of 1.
    pub fn new(v: Vector) -> Result<Self> {
        if math::abs(v.norm() - 1.0) > UNIT_TOL {
            return Err(invalid("direction", "norm must be 1"));
        }
        Ok(Direction { unit: v })
    }

    pub fn normalize(v: Vector) -> Result<Self> {
        let r = v.norm();
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid("direction", "cannot normalize a zero vector"));
        }
        Ok(Direction { unit: v * (1.0 / r) })
    }

    pub fn axis(n: usize, i: usize) -> Self {
        Direction { unit: Vector::unit(n, i) }
    }

    /// Planar direction at angle `t` from e₁.
    pub fn angle(t: f64) -> Self {
        Direction { unit: Vector::xy(math::cos(t), math::sin(t)) }
    }

    #[inline]
    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn dim(&self) -> usize {
        self.unit.dim()
    }

    /// −θ.
    pub fn flipped(&self) -> Direction {
        Direction { unit: -self.unit }
    }

    pub fn rotated(&self, o: &Matrix) -> Direction {
        Direction { unit: o.apply(&self.unit) }
    }

    /// Angle between the two directions, in [0, π].
    pub fn angle_to(&self, o: &Direction) -> f64 {
        math::acos(self.unit.dot(&o.unit))
    }
}

/// A linear subspace V ∈ G(n, n−m) held by an orthonormal basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Subspace {
    basis: [Vector; MAX_DIM],
    k: u8,
    n: u8,
}

impl Subspace {
    /// Builds V from an orthonormal basis of n−m vectors (m ≥ 0, n−m ≥ 1).
    pub fn new(n: usize, basis: &[Vector]) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        if basis.is_empty() || basis.len() > n {
            return Err(invalid("basis", "need between 1 and n vectors"));
        }
        for b in basis {
            b.check_dim(n)?;
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if math::abs(a.dot(b) - want) > UNIT_TOL {
                    return Err(invalid("basis", "vectors must be orthonormal"));
                }
            }
        }
        let mut arr = [Vector::zeros(n); MAX_DIM];
        arr[..basis.len()].copy_from_slice(basis);
        Ok(Subspace { basis: arr, k: basis.len() as u8, n: n as u8 })
    }

    /// V = R^n (codimension 0).
    pub fn full(n: usize) -> Self {
        let b: [Vector; MAX_DIM] = core::array::from_fn(|i| if i < n { Vector::unit(n, i) } else { Vector::zeros(n) });
        Subspace { basis: b, k: n as u8, n: n as u8 }
    }

    /// The line spanned by `d`.
    pub fn line(d: &Direction) -> Self {
        let n = d.dim();
        let mut b = [Vector::zeros(n); MAX_DIM];
        b[0] = *d.unit();
        Subspace { basis: b, k: 1, n: n as u8 }
    }

    /// The hyperplane orthogonal to `normal` (n = 2 or 3).
    pub fn hyperplane(normal: &Direction) -> Result<Self> {
        let nv = *normal.unit();
        match nv.dim() {
            2 => Ok(Subspace::line(&Direction { unit: Vector::xy(-nv[1], nv[0]) })),
            3 => {
                // Pick the axis least aligned with the normal and orthogonalize.
                let i = (0..3).min_by(|&a, &b| math::abs(nv[a]).total_cmp(&math::abs(nv[b]))).unwrap();
                let e = Vector::unit(3, i);
                let u = Direction::normalize(e - nv * e.dot(&nv))?;
                let u = *u.unit();
                let w =
                    Vector::xyz(nv[1] * u[2] - nv[2] * u[1], nv[2] * u[0] - nv[0] * u[2], nv[0] * u[1] - nv[1] * u[0]);
                Subspace::new(3, &[u, w])
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n as usize
    }

    /// dim V = n − m.
    pub fn dim(&self) -> usize {
        self.k as usize
    }

    pub fn codim(&self) -> usize {
        (self.n - self.k) as usize
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis[..self.k as usize]
    }

    pub fn project(&self, z: &Vector) -> Vector {
        let mut p = Vector::zeros(self.ambient_dim());
        for b in self.basis() {
            p = p + *b * z.dot(b);
        }
        p
    }

    /// dist(z, V) = |z − proj_V z|.
    pub fn dist(&self, z: &Vector) -> f64 {
        if self.codim() == 0 {
            return 0.0;
        }
        (*z - self.project(z)).norm()
    }

    pub fn rotated(&self, o: &Matrix) -> Subspace {
        let mut b = self.basis;
        for v in b.iter_mut().take(self.k as usize) {
            *v = o.apply(v);
        }
        Subspace { basis: b, k: self.k, n: self.n }
    }

    /// Largest principal angle between two subspaces of equal dimension.
    pub fn principal_angle(&self, o: &Subspace) -> f64 {
        if self.codim() == 0 {
            return 0.0;
        }
        if self.dim() == 1 {
            return math::asin(o.dist(&self.basis[0]).min(1.0));
        }
        let n1 = normal3(self);
        let n2 = normal3(o);
        let c = math::abs(n1.dot(&n2));
        math::acos(c)
    }
}

fn normal3(s: &Subspace) -> Vector {
    let (a, b) = (s.basis[0], s.basis[1]);
    Vector::xyz(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
}

/// H(x, θ, α) = { y : (y−x)·θ > α|y−x| }.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfCone {
    pub vertex: Vector,
    pub direction: Direction,
    pub aperture: f64,
}

impl HalfCone {
    pub fn new(vertex: Vector, direction: Direction, aperture: f64) -> Result<Self> {
        vertex.check_dim(direction.dim())?;
        if !(0.0..=1.0).contains(&aperture) {
            return Err(invalid("aperture", "half-space cone needs 0 <= alpha <= 1"));
        }
        Ok(HalfCone { vertex, direction, aperture })
    }
}

/// X(x, V, α, β) = { y : dist(y−x, V) < α|y−x|^β }.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneCone {
    pub vertex: Vector,
    pub subspace: Subspace,
    pub aperture: f64,
    pub twist: f64,
}

impl PlaneCone {
    pub fn new(vertex: Vector, subspace: Subspace, aperture: f64, twist: f64) -> Result<Self> {
        vertex.check_dim(subspace.ambient_dim())?;
        if !(aperture > 0.0 && aperture <= 1.0) {
            return Err(invalid("aperture", "plane cone needs 0 < alpha <= 1"));
        }
        if !(twist >= 1.0) || !twist.is_finite() {
            return Err(invalid("twist", "beta must be >= 1"));
        }
        Ok(PlaneCone { vertex, subspace, aperture, twist })
    }
}

pub fn in_half_cone(y: &Vector, h: &HalfCone) -> Result<bool> {
    y.check_dim(h.vertex.dim())?;
    let z = *y - h.vertex;
    Ok(z.dot(h.direction.unit()) > h.aperture * z.norm())
}

pub fn in_plane_cone(y: &Vector, c: &PlaneCone) -> Result<bool> {
    y.check_dim(c.vertex.dim())?;
    let z = *y - c.vertex;
    let d = z.norm();
    if d == 0.0 {
        return Ok(false);
    }
    let rhs = if c.twist == 1.0 { c.aperture * d } else { c.aperture * math::powf(d, c.twist) };
    Ok(c.subspace.dist(&z) < rhs)
}

/// B(center, radius) ∩ include ∖ exclude, all cones sharing the ball center as vertex.
/// `radius` may be `f64::INFINITY` for a cone-only query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeRegion {
    pub center: Vector,
    pub radius: f64,
    pub include: Option<PlaneCone>,
    pub exclude: Option<HalfCone>,
}

impl ConeRegion {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("radius", "must be positive"));
        }
        Ok(ConeRegion { center, radius, include: None, exclude: None })
    }

    pub fn with_include(mut self, c: PlaneCone) -> Result<Self> {
        if c.vertex != self.center {
            return Err(invalid("include", "cone vertex must equal the ball center"));
        }
        self.include = Some(c);
        Ok(self)
    }

    pub fn with_exclude(mut self, h: HalfCone) -> Result<Self> {
        if h.vertex != self.center {
            return Err(invalid("exclude", "cone vertex must equal the ball center"));
        }
        self.exclude = Some(h);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Same region with every vertex moved to `c`.
    pub fn recentered(&self, c: Vector) -> Self {
        let mut r = *self;
        r.center = c;
        if let Some(p) = r.include.as_mut() {
            p.vertex = c;
        }
        if let Some(h) = r.exclude.as_mut() {
            h.vertex = c;
        }
        r
    }

    /// Exact pointwise membership; the ball is closed, both cones are strict.
    pub fn contains(&self, y: &Vector) -> bool {
        if y.dist(&self.center) > self.radius {
            return false;
        }
        if let Some(p) = &self.include {
            if !in_plane_cone(y, p).unwrap_or(false) {
                return false;
            }
        }
        if let Some(h) = &self.exclude {
            if in_half_cone(y, h).unwrap_or(true) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Disposition {
    Inside,
    Outside,
    Unknown,
}

/// Conservative position of the closed ball B(c, ρ) relative to `region`.
pub fn ball_disposition(c: &Vector, rho: f64, region: &ConeRegion) -> Disposition {
    let z = *c - region.center;
    let d = z.norm();
    let rho = rho * (1.0 + PAD);
    let pad = PAD * (d + rho + c.norm() + region.center.norm());
    let mut inside = true;

    if region.radius.is_finite() {
        let bpad = pad + PAD * region.radius;
        if d - rho - bpad > region.radius {
            return Disposition::Outside;
        }
        if d + rho + bpad > region.radius {
            inside = false;
        }
    }

    if let Some(p) = &region.include {
        let a = p.aperture;
        let far = if p.twist == 1.0 { d + rho + pad } else { math::powf(d + rho + pad, p.twist) };
        if p.subspace.codim() == 0 {
            if d - rho - pad <= 0.0 {
                inside = false;
            }
        } else {
            let dv = p.subspace.dist(&z);
            if dv - rho - pad >= a * far * (1.0 + PAD) {
                return Disposition::Outside;
            }
            let near = d - rho - pad;
            if near <= 0.0 {
                inside = false;
            } else {
                let near = if p.twist == 1.0 { near } else { math::powf(near, p.twist) };
                if dv + rho + pad >= a * near * (1.0 - PAD) {
                    inside = false;
                }
            }
        }
    }

    if let Some(h) = &region.exclude {
        let a = h.aperture;
        let t = z.dot(h.direction.unit());
        if t - rho - pad > a * (d + rho + pad) {
            return Disposition::Outside;
        }
        let near = (d - rho - pad).max(0.0);
        if t + rho + pad > a * near && t + rho + pad > 0.0 {
            inside = false;
        }
    }

    if inside {
        Disposition::Inside
    } else {
        Disposition::Unknown
    }
}
