use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::exact::{self, Rational};
use crate::geometry::{ConeRegion, Vector};
use crate::math;
use crate::refinable::{Backend, RefinableMeasure};
use crate::rng;
use crate::symbolic::PointEnclosure;

/// How a square's mass is passed to its n² subsquares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridOp {
    /// Equal mass μ(Q)/n² on every subsquare.
    Spread,
    /// Mass μ(Q)/n on each subsquare of the bottom row, zero elsewhere.
    BottomRow,
}

impl GridOp {
    pub fn tag(self) -> u8 {
        match self {
            GridOp::Spread => 1,
            GridOp::BottomRow => 2,
        }
    }
}

/// All charged squares of one level share side and mass.
#[derive(Clone, Debug, PartialEq)]
pub struct GridLevel {
    pub side: f64,
    pub mass: f64,
    pub ln_side: f64,
    pub ln_mass: f64,
    /// Operation producing the next level and its n; `None` on the last level.
    pub op: Option<(GridOp, u64)>,
    /// 1/side as an integer, when it fits the exact index plane.
    pub count: Option<u128>,
}

impl GridLevel {
    /// log μ(Q) / log |Q|.
    pub fn slope(&self) -> f64 {
        self.ln_mass / self.ln_side
    }
}

/// The two-operation measure on [0, 1)² for exponents 1 < s < t < 2.
///
/// Squares down to level `exact_level()` have integer corners on the grid
/// 1/count; the children of that level are located in floating point
/// relative to the squares and are not refined further.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure {
    s: f64,
    t: f64,
    levels: Vec<GridLevel>,
    lmax: usize,
    /// 2·count of level `lmax`.
    denom: i128,
    origin: (i128, i128),
    localized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridCell {
    Square {
        level: u8,
        ix: u128,
        iy: u128,
    },
    /// Children i0..i1 × j0..j1 of the square (level, ix, iy).
    Block {
        level: u8,
        ix: u128,
        iy: u128,
        i0: u64,
        i1: u64,
        j0: u64,
        j1: u64,
    },
}

/// A point at the center of a charged square of the deepest exact level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub ix: u128,
    pub iy: u128,
}

const INDEX_LIMIT: u32 = 120;

/// Integer e with |v − e| ≤ 1e-12 max(1, |v|), if any.
fn as_integer(v: f64) -> Option<i64> {
    let r = math::round(v);
    if math::abs(v - r) <= 1e-12 * math::abs(v).max(1.0) {
        Some(r as i64)
    } else {
        None
    }
}

fn rpow(q: &Rational, e: i64) -> Rational {
    let mut out = Rational::one();
    let base = if e >= 0 { q.clone() } else { q.recip() };
    for _ in 0..e.unsigned_abs() {
        out *= &base;
    }
    out
}

/// floor(x) + 1, treating x within 1e-9 relative of an integer as that integer.
fn next_count(ln_x: f64) -> f64 {
    let x = math::exp(ln_x);
    let r = math::round(x);
    let fl = if math::abs(x - r) <= 1e-9 * x { r } else { math::floor(x) };
    fl + 1.0
}

pub fn grid_measure(s: f64, t: f64) -> Result<GridMeasure> {
    if !(1.0 < s && s < t && t < 2.0) {
        return Err(invalid("s, t", "need 1 < s < t < 2"));
    }
    // The rule for n is an exact rational power when these exponents are integers.
    let e1 = (as_integer(-t / (2.0 - t)), as_integer(1.0 / (2.0 - t)));
    let e2 = (as_integer(s / (s - 1.0)), as_integer(-1.0 / (s - 1.0)));
    let mut levels = Vec::new();
    let mut side = Rational::one();
    let mut mass = Rational::one();
    let mut ln_side = 0.0;
    let mut ln_mass = 0.0;
    let mut count = BigInt::one();
    let limit = BigInt::one() << INDEX_LIMIT as usize;
    let mut exact = true;
    let mut k = 0usize;
    loop {
        let op = if k.is_multiple_of(2) { GridOp::Spread } else { GridOp::BottomRow };
        let exps = match op {
            GridOp::Spread => e1,
            GridOp::BottomRow => e2,
        };
        let n_big: BigInt = match exps {
            (Some(a), Some(b)) if exact => {
                let x = rpow(&side, a) * rpow(&mass, b);
                x.floor().to_integer() + BigInt::one()
            }
            _ => {
                let ln_x = match op {
                    GridOp::Spread => (-t * ln_side + ln_mass) / (2.0 - t),
                    GridOp::BottomRow => (s * ln_side - ln_mass) / (s - 1.0),
                };
                BigInt::from(next_count(ln_x).min(1.8e19) as u64)
            }
        };
        let cnt = if count < limit { count.to_u128() } else { None };
        let n = n_big.to_u64().filter(|_| cnt.is_some());
        levels.push(GridLevel {
            side: 1.0 / exact::to_f64(&Rational::from_integer(count.clone())),
            mass: exact::to_f64(&mass),
            ln_side,
            ln_mass,
            op: n.map(|n| (op, n)),
            count: cnt,
        });
        let Some(n) = n else { break };
        if n < 2 {
            return Err(invalid("s, t", "subdivision count fell below 2"));
        }
        let nf = n as f64;
        let nq = Rational::from_integer(BigInt::from(n));
        ln_side -= math::ln(nf);
        side /= &nq;
        count *= BigInt::from(n);
        match op {
            GridOp::Spread => {
                ln_mass -= 2.0 * math::ln(nf);
                mass /= &nq * &nq;
            }
            GridOp::BottomRow => {
                ln_mass -= math::ln(nf);
                mass /= &nq;
            }
        }
        if mass.denom().bits() > 4096 {
            exact = false;
        }
        k += 1;
    }
    if levels.len() < 2 {
        return Err(invalid("s, t", "grid too shallow"));
    }
    let lmax = levels.len() - 2;
    let denom = 2 * levels[lmax].count.unwrap() as i128;
    Ok(GridMeasure { s, t, levels, lmax, denom, origin: (0, 0), localized: false })
}

impl GridMeasure {
    pub fn params(&self) -> (f64, f64) {
        (self.s, self.t)
    }

    pub fn levels(&self) -> &[GridLevel] {
        &self.levels
    }

    /// Deepest level with integer square corners.
    pub fn exact_level(&self) -> usize {
        self.lmax
    }

    /// The predicted conical upper dimension s(t−1)/(s−1).
    pub fn predicted_conical_dim(&self) -> f64 {
        self.s * (self.t - 1.0) / (self.s - 1.0)
    }

    /// Samples a charged square of the deepest exact level by its mass.
    pub fn sample_point(&self, seed: u64) -> GridPoint {
        let mut r = rng::rng(seed);
        let (mut ix, mut iy) = (0u128, 0u128);
        for l in &self.levels[..self.lmax] {
            let (op, n) = l.op.unwrap();
            let i = r.gen_range(0..n);
            let j = match op {
                GridOp::Spread => r.gen_range(0..n),
                GridOp::BottomRow => 0,
            };
            ix = ix * n as u128 + i as u128;
            iy = iy * n as u128 + j as u128;
        }
        GridPoint { ix, iy }
    }

    pub fn point_coords(&self, p: &GridPoint) -> Vector {
        let d = self.denom as f64;
        Vector::xy((2 * p.ix + 1) as f64 / d, (2 * p.iy + 1) as f64 / d)
    }

    /// The same measure in coordinates centered at `p`.
    pub fn localized(&self, p: &GridPoint) -> GridMeasure {
        let mut m = self.clone();
        m.origin = ((2 * p.ix + 1) as i128, (2 * p.iy + 1) as i128);
        m.localized = true;
        m
    }

    /// (side, mass, slope) of the squares Q_1, Q_2, … containing any charged point.
    pub fn coded_square_slopes(&self) -> Vec<(f64, f64, f64)> {
        self.levels[1..].iter().map(|l| (math::exp(l.ln_side), math::exp(l.ln_mass), l.slope())).collect()
    }

    /// Offset of an exact grid coordinate (index at `level`) from the origin.
    fn exact_offset(&self, level: usize, idx: u128, origin: i128) -> f64 {
        let scale = self.denom / self.levels[level].count.unwrap() as i128;
        let v = idx as i128 * scale - origin;
        v as f64 / self.denom as f64
    }

    fn rect(&self, c: &GridCell) -> (f64, f64, f64, f64) {
        match *c {
            GridCell::Square { level, ix, iy } => {
                let l = level as usize;
                let side = self.levels[l].side;
                let x0 = self.exact_offset(l, ix, self.origin.0);
                let y0 = self.exact_offset(l, iy, self.origin.1);
                (x0, y0, side, side)
            }
            GridCell::Block { level, ix, iy, i0, i1, j0, j1 } => {
                let l = level as usize;
                let (_, n) = self.levels[l].op.unwrap();
                let cs = self.levels[l + 1].side;
                let (x0, y0) = if l < self.lmax {
                    let n = n as u128;
                    (
                        self.exact_offset(l + 1, ix * n + i0 as u128, self.origin.0),
                        self.exact_offset(l + 1, iy * n + j0 as u128, self.origin.1),
                    )
                } else {
                    (
                        self.exact_offset(l, ix, self.origin.0) + i0 as f64 * cs,
                        self.exact_offset(l, iy, self.origin.1) + j0 as f64 * cs,
                    )
                };
                (x0, y0, (i1 - i0) as f64 * cs, (j1 - j0) as f64 * cs)
            }
        }
    }

    fn push_block(&self, level: u8, ix: u128, iy: u128, i: (u64, u64), j: (u64, u64), out: &mut Vec<GridCell>) {
        let l = level as usize;
        if i.1 - i.0 == 1 && j.1 - j.0 == 1 && l < self.lmax {
            let n = self.levels[l].op.unwrap().1 as u128;
            out.push(GridCell::Square { level: level + 1, ix: ix * n + i.0 as u128, iy: iy * n + j.0 as u128 });
        } else {
            out.push(GridCell::Block { level, ix, iy, i0: i.0, i1: i.1, j0: j.0, j1: j.1 });
        }
    }

    fn split(&self, level: u8, ix: u128, iy: u128, i: (u64, u64), j: (u64, u64), out: &mut Vec<GridCell>) {
        if i.1 - i.0 >= j.1 - j.0 {
            let m = i.0 + (i.1 - i.0) / 2;
            self.push_block(level, ix, iy, (i.0, m), j, out);
            self.push_block(level, ix, iy, (m, i.1), j, out);
        } else {
            let m = j.0 + (j.1 - j.0) / 2;
            self.push_block(level, ix, iy, i, (j.0, m), out);
            self.push_block(level, ix, iy, i, (m, j.1), out);
        }
    }
}

impl RefinableMeasure for GridMeasure {
    type Cell = GridCell;

    fn dim(&self) -> usize {
        2
    }

    fn backend(&self) -> Backend {
        Backend::Grid
    }

    fn root(&self) -> GridCell {
        GridCell::Square { level: 0, ix: 0, iy: 0 }
    }

    fn bound(&self, c: &GridCell) -> PointEnclosure {
        let (x0, y0, w, h) = self.rect(c);
        PointEnclosure {
            center: Vector::xy(x0 + 0.5 * w, y0 + 0.5 * h),
            radius: 0.5 * math::sqrt(w * w + h * h) * (1.0 + 1e-15),
        }
    }

    fn weight(&self, c: &GridCell) -> f64 {
        match *c {
            GridCell::Square { level, .. } => self.levels[level as usize].mass,
            GridCell::Block { level, i0, i1, j0, j1, .. } => {
                let l = level as usize;
                let charged = match self.levels[l].op.unwrap().0 {
                    GridOp::Spread => (i1 - i0) as f64 * (j1 - j0) as f64,
                    GridOp::BottomRow if j0 == 0 => (i1 - i0) as f64,
                    GridOp::BottomRow => 0.0,
                };
                self.levels[l + 1].mass * charged
            }
        }
    }

    fn refine(&self, c: &GridCell, out: &mut Vec<GridCell>) {
        match *c {
            GridCell::Square { level, ix, iy } => {
                let Some((op, n)) = self.levels[level as usize].op else { return };
                let rows = match op {
                    GridOp::Spread => n,
                    GridOp::BottomRow => 1,
                };
                self.split(level, ix, iy, (0, n), (0, rows), out);
            }
            GridCell::Block { level, ix, iy, i0, i1, j0, j1 } => {
                if i1 - i0 == 1 && j1 - j0 == 1 {
                    return;
                }
                self.split(level, ix, iy, (i0, i1), (j0, j1), out);
            }
        }
    }

    fn check_region(&self, region: &ConeRegion) -> Result<()> {
        region.center.check_dim(2)?;
        if self.localized && region.center.norm() != 0.0 {
            return Err(invalid("region", "localized measures need regions centered at the origin"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Direction, PlaneCone, Subspace};
    use crate::refinable::{measure_region_with, Resolution};

    #[test]
    fn level_table() {
        let g = grid_measure(1.2, 1.5).unwrap();
        let ops: Vec<(u8, u64)> = g.levels().iter().filter_map(|l| l.op).map(|(o, n)| (o.tag(), n)).collect();
        assert_eq!(&ops[..5], &[(1, 2), (2, 17), (1, 9), (2, 6176), (1, 5833)]);
        assert_eq!(ops[5], (2, 1157448609239841));
        assert_eq!(g.exact_level(), 6);
        let l1 = &g.levels()[1];
        assert_eq!((l1.side, l1.mass), (0.5, 0.25));
        assert_eq!(g.levels()[2].mass, 1.0 / 68.0);
        assert!((g.predicted_conical_dim() - 3.0).abs() < 1e-12);
        let slopes: Vec<f64> = g.coded_square_slopes().iter().map(|v| v.2).collect();
        assert_eq!(slopes[0], 2.0);
        assert!((slopes[2] - 1.505).abs() < 1e-3 && (slopes[3] - 1.2).abs() < 1e-5 && (slopes[4] - 1.5).abs() < 1e-5);
        assert!(grid_measure(1.5, 1.2).is_err());
        for w in g.levels().windows(2) {
            if let (Some(a), Some(b)) = (w[0].count, w[1].count) {
                assert_eq!(b % a, 0);
            }
        }
    }

    #[test]
    fn mass_conservation() {
        let g = grid_measure(1.2, 1.5).unwrap();
        let mut stack = alloc::vec![g.root()];
        let mut kids = Vec::new();
        let mut seen = 0;
        while let Some(c) = stack.pop() {
            seen += 1;
            if seen > 3000 {
                break;
            }
            kids.clear();
            g.refine(&c, &mut kids);
            if kids.is_empty() {
                continue;
            }
            let sum: f64 = kids.iter().map(|k| g.weight(k)).sum();
            let w = g.weight(&c);
            assert!((sum - w).abs() <= 1e-12 * w, "{c:?}");
            let (x0, y0, w0, h0) = g.rect(&c);
            for k in &kids {
                let (x, y, w, h) = g.rect(k);
                let tol = 1e-12 * (w0 + h0) + 1e-15 * (x0.abs() + y0.abs());
                assert!(x >= x0 - tol && y >= y0 - tol && x + w <= x0 + w0 + tol && y + h <= y0 + h0 + tol);
                assert!(g.bound(k).radius <= g.bound(&c).radius);
            }
            stack.extend(kids.iter().filter(|k| g.weight(k) > 0.0).cloned());
        }
    }

    #[test]
    fn ball_masses() {
        let g = grid_measure(1.2, 1.5).unwrap();
        let all = measure_region_with(&g, &ConeRegion::ball(Vector::xy(0.5, 0.5), 1.0).unwrap(), Resolution::depth(2))
            .unwrap();
        assert_eq!((all.lower, all.upper), (1.0, 1.0));
        let p = g.sample_point(3);
        let loc = g.localized(&p);
        let o = Vector::xy(0.0, 0.0);
        let r = 1e-3;
        let res = Resolution { depth_cap: 400, max_cells: 200_000 };
        let b = measure_region_with(&loc, &ConeRegion::ball(o, r).unwrap(), res).unwrap();
        assert!(b.lower > 0.0 && b.upper >= b.lower);
        let cone = PlaneCone::new(o, Subspace::line(&Direction::axis(2, 1)), 0.3, 1.0).unwrap();
        let c = measure_region_with(&loc, &ConeRegion::ball(o, r).unwrap().with_include(cone).unwrap(), res).unwrap();
        assert!(c.upper <= b.upper && c.lower <= b.lower);
        assert!(loc.check_region(&ConeRegion::ball(Vector::xy(0.1, 0.0), 0.1).unwrap()).is_err());
    }
}
