use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::math;

use super::cone::{Direction, Subspace};
use super::vector::Vector;

/// A finite set of directions such that every unit vector lies within angle
/// `delta` of some element.
///
/// n = 2 uses `ceil(2π/δ)` equally spaced directions (covering radius δ/2).
/// n = 3 uses latitude rings with per-ring azimuthal counts.
pub fn direction_net(n: usize, delta: f64) -> Result<Vec<Direction>> {
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be positive"));
    }
    match n {
        1 => Ok(alloc::vec![Direction::axis(1, 0), Direction::normalize(Vector::x(-1.0))?]),
        2 => {
            let k = math::ceil(2.0 * PI / delta).max(1.0) as usize;
            Ok((0..k).map(|j| Direction::angle(2.0 * PI * j as f64 / k as f64)).collect())
        }
        3 => {
            let rings = math::ceil(PI / delta).max(1.0) as usize;
            let band = PI / rings as f64;
            let mut out = Vec::new();
            for i in 0..rings {
                let phi = (i as f64 + 0.5) * band;
                let lo = phi - 0.5 * band;
                let hi = phi + 0.5 * band;
                let smax = if lo <= PI / 2.0 && hi >= PI / 2.0 { 1.0 } else { math::sin(lo).max(math::sin(hi)) };
                let k = math::ceil(2.0 * PI * smax / delta).max(1.0) as usize;
                let (sp, cp) = (math::sin(phi), math::cos(phi));
                for j in 0..k {
                    let psi = 2.0 * PI * j as f64 / k as f64;
                    out.push(Direction::normalize(Vector::xyz(sp * math::cos(psi), sp * math::sin(psi), cp))?);
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// A finite subset of G(n, n−m) such that every subspace lies within principal
/// angle `delta` of some element.
pub fn subspace_net(n: usize, m: usize, delta: f64) -> Result<Vec<Subspace>> {
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be positive"));
    }
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if m >= n {
        return Err(invalid("m", "codimension must satisfy 0 <= m <= n-1"));
    }
    if m == 0 {
        return Ok(alloc::vec![Subspace::full(n)]);
    }
    match (n, m) {
        (2, 1) => {
            let k = math::ceil(PI / delta).max(1.0) as usize;
            Ok((0..k).map(|j| Subspace::line(&Direction::angle(PI * j as f64 / k as f64))).collect())
        }
        (3, 1) => direction_net(3, delta)?.iter().map(Subspace::hyperplane).collect(),
        (3, 2) => Ok(direction_net(3, delta)?.iter().map(Subspace::line).collect()),
        _ => Err(Error::UnsupportedDimension(n)),
    }
}
