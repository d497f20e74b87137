//! Exact arithmetic for Bernoulli measures on the middle-third Cantor set.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::{self, Rational};
use crate::symbolic::{Coding, SelfSimilarSystem, SymbolWord, Tail};

/// Bernoulli weights (p₁, p₂) of the maps x/3 and x/3 + 2/3.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorWeights {
    pub p1: Rational,
    pub p2: Rational,
}

impl CantorWeights {
    pub fn natural() -> Self {
        CantorWeights { p1: exact::frac(1, 2), p2: exact::frac(1, 2) }
    }

    pub fn new(p1: Rational) -> Result<Self> {
        if p1 < Rational::zero() || p1 > Rational::one() {
            return Err(invalid("p1", "must lie in [0, 1]"));
        }
        let p2 = Rational::one() - &p1;
        Ok(CantorWeights { p1, p2 })
    }

    /// Weights of a system that is exactly the middle-third Cantor IFS.
    pub fn of_system(s: &SelfSimilarSystem) -> Result<Self> {
        let ex = s.exact().ok_or_else(|| invalid("system", "needs exact rational data"))?;
        let third = exact::frac(1, 3);
        let ok = s.kappa() == 2
            && ex.ratios.iter().all(|r| *r == third)
            && ex.translations[0] == [Rational::zero()]
            && ex.translations[1] == [exact::frac(2, 3)];
        if !ok {
            return Err(invalid("system", "triadic arithmetic needs the middle-third Cantor maps"));
        }
        Ok(CantorWeights { p1: ex.weights[0].clone(), p2: ex.weights[1].clone() })
    }
}

/// F(x) = μ([0, x]) for any rational x, using the (eventually periodic)
/// base-3 expansion of x.
pub fn cantor_cdf(w: &CantorWeights, x: &Rational) -> Rational {
    if *x <= Rational::zero() {
        return Rational::zero();
    }
    if *x >= Rational::one() {
        return Rational::one();
    }
    let q = x.denom().clone();
    let mut a = x.numer().clone();
    let mut acc = Rational::zero();
    let mut wt = Rational::one();
    let mut seen: BTreeMap<BigInt, (Rational, Rational)> = BTreeMap::new();
    loop {
        if let Some((acc0, w0)) = seen.get(&a) {
            // F(x) = acc0 + w0 F(y) = acc + wt F(y).
            let denom = w0 - &wt;
            if denom.is_zero() {
                return acc;
            }
            let fy = (&acc - acc0) / denom;
            return acc0 + w0 * fy;
        }
        seen.insert(a.clone(), (acc.clone(), wt.clone()));
        let (d, next) = (&a * 3u32).div_rem(&q);
        match d.to_u8() {
            Some(0) => wt *= &w.p1,
            Some(1) => return acc + wt * &w.p1,
            _ => {
                acc += &wt * &w.p1;
                wt *= &w.p2;
            }
        }
        if next.is_zero() {
            return acc;
        }
        a = next;
    }
}

/// μ([a, b]) (zero when b < a).
pub fn cantor_measure(w: &CantorWeights, a: &Rational, b: &Rational) -> Rational {
    if b < a {
        return Rational::zero();
    }
    cantor_cdf(w, b) - cantor_cdf(w, a)
}

/// A closed interval whose endpoints have power-of-3 denominators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TriadicInterval {
    pub left: Rational,
    pub right: Rational,
}

impl TriadicInterval {
    pub fn new(left: Rational, right: Rational) -> Result<Self> {
        if !is_triadic(&left) || !is_triadic(&right) {
            return Err(invalid("endpoints", "denominators must be powers of 3"));
        }
        if left > right || left < Rational::zero() || right > Rational::one() {
            return Err(invalid("endpoints", "need 0 <= left <= right <= 1"));
        }
        Ok(TriadicInterval { left, right })
    }

    pub fn unit() -> Self {
        TriadicInterval { left: Rational::zero(), right: Rational::one() }
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn measure(&self, w: &CantorWeights) -> Rational {
        cantor_measure(w, &self.left, &self.right)
    }
}

pub fn is_triadic(q: &Rational) -> bool {
    let mut d: BigInt = q.denom().clone();
    let three = BigInt::from(3);
    while d.is_multiple_of(&three) {
        d /= &three;
    }
    d.is_one()
}

/// An exact closed interval of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RationalInterval {
    pub fn point(v: Rational) -> Self {
        RationalInterval { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.lo <= *v && *v <= self.hi
    }
}

/// f_w(y) for the middle-third maps.
pub fn apply_word(w: &SymbolWord, y: &Rational) -> Rational {
    let third = exact::frac(1, 3);
    let two_thirds = exact::frac(2, 3);
    let mut v = y.clone();
    for &s in w.symbols().iter().rev() {
        v = &v * &third;
        if s == 2 {
            v += &two_thirds;
        }
    }
    v
}

/// π(i) for a middle-third coding: exact for periodic tails, an enclosure
/// [f_w(0), f_w(1)] for a finite prefix w.
pub fn cantor_point(coding: &Coding) -> Result<RationalInterval> {
    coding.validate(2)?;
    match &coding.tail {
        Tail::Periodic(p) => {
            // Fixed point of f_p: y = f_p(0) + 3^{-|p|} y.
            let r = Rational::new(BigInt::one(), exact::pow3(p.len() as u32));
            let y = apply_word(p, &Rational::zero()) / (Rational::one() - r);
            Ok(RationalInterval::point(apply_word(&coding.prefix, &y)))
        }
        Tail::Unresolved => Ok(RationalInterval {
            lo: apply_word(&coding.prefix, &Rational::zero()),
            hi: apply_word(&coding.prefix, &Rational::one()),
        }),
    }
}

/// One- and two-sided masses at x = π(i) and scale h = 3^{-n}.
#[derive(Clone, Debug, PartialEq)]
pub struct OneSided {
    /// μ([x, x + h]).
    pub one_sided: RationalInterval,
    /// μ([x − h, x + h]).
    pub two_sided: RationalInterval,
}

/// Exact (periodic codings) or enclosed (finite prefixes of length ≥ n)
/// values of μ([x, x+3^{-n}]) and μ([x−3^{-n}, x+3^{-n}]).
pub fn cantor_one_sided(w: &CantorWeights, coding: &Coding, n: u32) -> Result<OneSided> {
    if let Some(len) = coding.known_len() {
        if len < n as usize {
            return Err(Error::CodingTooShort { needed: n as usize, available: len });
        }
    }
    let h = Rational::new(BigInt::one(), exact::pow3(n));
    let x = cantor_point(coding)?;
    let m = |a: &Rational, b: &Rational| cantor_measure(w, a, b);
    Ok(OneSided {
        one_sided: RationalInterval { lo: m(&x.hi, &(&x.lo + &h)), hi: m(&x.lo, &(&x.hi + &h)) },
        two_sided: RationalInterval { lo: m(&(&x.hi - &h), &(&x.lo + &h)), hi: m(&(&x.lo - &h), &(&x.hi + &h)) },
    })
}

/// Converts a rational in [0, 1] lying in the Cantor set to its coding: the
/// triadic expansion avoiding digit 1, with the periodic tail detected.
pub fn coding_of_point(x: &Rational) -> Result<Coding> {
    if *x < Rational::zero() || *x > Rational::one() {
        return Err(invalid("point", "must lie in [0, 1]"));
    }
    let three = exact::int(3);
    let mut y = x.clone();
    let mut digits: Vec<u8> = Vec::new();
    let mut seen: BTreeMap<Rational, usize> = BTreeMap::new();
    loop {
        if let Some(&start) = seen.get(&y) {
            let prefix = SymbolWord::from_symbols(digits[..start].to_vec());
            let period = SymbolWord::from_symbols(digits[start..].to_vec());
            return Coding::periodic(prefix, period);
        }
        seen.insert(y.clone(), digits.len());
        // y ∈ [0, 1/3] → symbol 1, y ∈ [2/3, 1] → symbol 2.
        let y3 = &y * &three;
        if y3 <= Rational::one() {
            digits.push(1);
            y = y3;
        } else if y3 >= exact::int(2) {
            digits.push(2);
            y = y3 - exact::int(2);
        } else {
            return Err(invalid("point", "not in the middle-third Cantor set"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;
    use alloc::string::ToString;

    #[test]
    fn cdf_values() {
        let w = CantorWeights::natural();
        assert_eq!(cantor_cdf(&w, &frac(1, 3)), frac(1, 2));
        assert_eq!(cantor_cdf(&w, &frac(1, 2)), frac(1, 2));
        assert_eq!(cantor_cdf(&w, &frac(2, 9)), frac(1, 4));
        assert_eq!(cantor_cdf(&w, &frac(1, 4)), frac(1, 3));
        assert_eq!(cantor_cdf(&w, &frac(3, 4)), frac(2, 3));
        let g = CantorWeights::new(frac(1, 5)).unwrap();
        assert_eq!(cantor_cdf(&g, &frac(1, 3)), frac(1, 5));
        assert_eq!(cantor_cdf(&g, &frac(8, 9)), frac(1, 5) + frac(4, 5) * frac(1, 5));
    }

    #[test]
    fn one_sided_examples() {
        let w = CantorWeights::natural();
        for n in [1u32, 5, 17] {
            let r = cantor_one_sided(&w, &"(1)".parse().unwrap(), n).unwrap();
            let v = Rational::new(BigInt::one(), exact::pow2(n));
            assert_eq!(r.one_sided, RationalInterval::point(v.clone()));
            assert_eq!(r.two_sided, RationalInterval::point(v));
        }
        let r = cantor_one_sided(&w, &"1(2)".parse().unwrap(), 1).unwrap();
        assert_eq!(r.one_sided, RationalInterval::point(Rational::zero()));
        assert_eq!(r.two_sided, RationalInterval::point(frac(1, 2)));
        assert!(cantor_one_sided(&w, &"12".parse().unwrap(), 3).is_err());
        let e = cantor_one_sided(&w, &"1211".parse().unwrap(), 2).unwrap();
        assert!(!e.one_sided.is_exact() && e.one_sided.lo <= e.one_sided.hi);
    }

    #[test]
    fn points_and_codings() {
        let c = coding_of_point(&frac(1, 4)).unwrap();
        assert_eq!(cantor_point(&c).unwrap(), RationalInterval::point(frac(1, 4)));
        assert_eq!(coding_of_point(&Rational::zero()).unwrap().to_string(), "(1)");
        assert_eq!(coding_of_point(&frac(1, 3)).unwrap().to_string(), "1(2)");
        assert!(coding_of_point(&frac(1, 2)).is_err());
        assert!(TriadicInterval::new(frac(1, 9), frac(2, 9)).is_ok());
        assert!(TriadicInterval::new(frac(1, 2), frac(2, 3)).is_err());
    }

    #[test]
    fn system_weights() {
        assert_eq!(CantorWeights::of_system(&crate::symbolic::cantor13()).unwrap(), CantorWeights::natural());
        assert!(CantorWeights::of_system(&crate::symbolic::unit_interval()).is_err());
    }
}
