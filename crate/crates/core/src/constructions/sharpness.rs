use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::dimension::Gauge;
use crate::error::{invalid, Result};
use crate::exact::{self, Rational};
use crate::math;
use crate::refinable::triadic::{cantor_measure, CantorWeights, TriadicInterval};

/// A construction interval I = [a, c] of level k and its removed right part I₊ = [b, c].
#[derive(Clone, Debug, PartialEq)]
pub struct RemovedPiece {
    pub interval: TriadicInterval,
    pub b: Rational,
    /// f(3^{-k}) μ(I).
    pub target: Rational,
    /// μ([b, c]) ≥ target.
    pub removed: Rational,
}

impl RemovedPiece {
    pub fn overshoot(&self) -> Rational {
        &self.removed - &self.target
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessLevel {
    pub k: u32,
    pub f: f64,
    pub pieces: Vec<RemovedPiece>,
    /// F_k as sorted disjoint closed intervals.
    pub f_set: Vec<TriadicInterval>,
    pub f_measure: Rational,
}

/// Nested sets F_N ⊇ F_{N+1} ⊇ … for the natural measure on the Cantor set.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessConstruction {
    pub gauge: Gauge,
    pub start: u32,
    pub depth_cap: u32,
    pub levels: Vec<SharpnessLevel>,
}

/// Largest b reachable by `depth_cap` triadic steps with μ([b, c]) ≥ target,
/// where [a, c] is a construction interval of level k.
fn descend(a: &Rational, k: u32, target: &Rational, depth_cap: u32) -> (Rational, Rational) {
    let mut left = a.clone();
    let mut len = Rational::new(BigInt::one(), exact::pow3(k));
    let mut mass = Rational::new(BigInt::one(), exact::pow2(k));
    let mut need = target.clone();
    let mut acc = Rational::zero();
    if need <= Rational::zero() {
        return (&left + &len, acc);
    }
    let two = exact::int(2);
    let three = exact::int(3);
    for _ in 0..depth_cap {
        if need == mass {
            return (left, acc + mass);
        }
        let half = &mass / &two;
        let third = &len / &three;
        if need <= half {
            left += &third * &two;
        } else {
            acc += &half;
            need -= &half;
        }
        len = third;
        mass = half;
    }
    (left, acc + mass)
}

fn intersect(a: &[TriadicInterval], b: &[TriadicInterval]) -> Vec<TriadicInterval> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = if a[i].left > b[j].left { &a[i].left } else { &b[j].left };
        let hi = if a[i].right < b[j].right { &a[i].right } else { &b[j].right };
        if lo < hi {
            out.push(TriadicInterval { left: lo.clone(), right: hi.clone() });
        }
        if a[i].right < b[j].right {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// The 2^k construction intervals of level k, left to right.
fn construction_intervals(k: u32) -> Vec<Rational> {
    let mut lefts = alloc::vec![Rational::zero()];
    for level in 0..k {
        let step = Rational::new(exact::pow2(1), exact::pow3(level + 1));
        let mut next = Vec::with_capacity(lefts.len() * 2);
        for a in &lefts {
            next.push(a.clone());
            next.push(a + &step);
        }
        lefts = next;
    }
    lefts
}

pub fn build_sharpness(f: &Gauge, start: u32, k_max: u32, depth_cap: u32) -> Result<SharpnessConstruction> {
    if k_max < start {
        return Err(invalid("k_max", "must be at least N"));
    }
    if k_max > 20 {
        return Err(invalid("k_max", "at most 20 levels are materialized"));
    }
    let w = CantorWeights::natural();
    let mut levels: Vec<SharpnessLevel> = Vec::new();
    let mut f_prev: Option<Vec<TriadicInterval>> = None;
    for k in start..=k_max {
        let fk = f.eval_ln(-(k as f64) * math::ln(3.0));
        if !(fk < 1.0) || !(fk >= 0.0) {
            return Err(invalid("gauge", alloc::format!("f(3^-{k}) = {fk} must lie in [0, 1)")));
        }
        let fr = Rational::from_float(fk).ok_or_else(|| invalid("gauge", "value not finite"))?;
        let len = Rational::new(BigInt::one(), exact::pow3(k));
        let target = &fr / Rational::from_integer(exact::pow2(k));
        let mut pieces = Vec::new();
        let mut kept = Vec::new();
        for a in construction_intervals(k) {
            let c = &a + &len;
            let (b, removed) = descend(&a, k, &target, depth_cap);
            if a < b {
                kept.push(TriadicInterval { left: a.clone(), right: b.clone() });
            }
            pieces.push(RemovedPiece {
                interval: TriadicInterval { left: a, right: c },
                b,
                target: target.clone(),
                removed,
            });
        }
        let f_set = match f_prev {
            None => kept,
            Some(prev) => intersect(&prev, &kept),
        };
        let f_measure = f_set.iter().fold(Rational::zero(), |s, i| s + cantor_measure(&w, &i.left, &i.right));
        f_prev = Some(f_set.clone());
        levels.push(SharpnessLevel { k, f: fk, pieces, f_set, f_measure });
    }
    Ok(SharpnessConstruction { gauge: f.clone(), start, depth_cap, levels })
}

/// Π_{k=1..n} (1 − ε 2^{-L} f(3^{-N-kL})).
pub fn sharpness_product_bound(f: &Gauge, start: u32, eps: f64, l: u32, n: u64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("eps", "must lie in (0, 1]"));
    }
    if l == 0 {
        return Err(invalid("L", "must be at least 1"));
    }
    let c = eps * math::powi(2.0, -(l as i32));
    let ln3 = math::ln(3.0);
    let mut prod = 1.0;
    for k in 1..=n {
        let e = start as f64 + (k as f64) * l as f64;
        prod *= 1.0 - c * f.eval_ln(-e * ln3);
    }
    Ok(prod)
}

impl SharpnessConstruction {
    pub fn product_bound(&self, eps: f64, l: u32, n: u64) -> Result<f64> {
        sharpness_product_bound(&self.gauge, self.start, eps, l, n)
    }
}
