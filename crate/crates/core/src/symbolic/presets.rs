use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::{self, Rational};

use super::system::{ExactData, SelfSimilarSystem};

fn build(
    name: &str,
    ratios: Vec<Rational>,
    translations: Vec<Vec<Rational>>,
    weights: Vec<Rational>,
) -> SelfSimilarSystem {
    SelfSimilarSystem::from_exact(name, ExactData { ratios, translations, weights }, true)
        .expect("preset data is valid")
}

/// Maps x/3 and x/3 + 2/3 with weights (1/2, 1/2).
pub fn cantor13() -> SelfSimilarSystem {
    let third = exact::frac(1, 3);
    build(
        "cantor13",
        alloc::vec![third.clone(), third],
        alloc::vec![alloc::vec![Rational::zero()], alloc::vec![exact::frac(2, 3)]],
        alloc::vec![exact::frac(1, 2), exact::frac(1, 2)],
    )
}

/// Maps x/2 and x/2 + 1/2 with weights (1/2, 1/2): Lebesgue measure on [0, 1].
pub fn unit_interval() -> SelfSimilarSystem {
    let half = exact::frac(1, 2);
    build(
        "unit-interval",
        alloc::vec![half.clone(), half.clone()],
        alloc::vec![alloc::vec![Rational::zero()], alloc::vec![half.clone()]],
        alloc::vec![half.clone(), half],
    )
}

/// Four planar maps x ↦ λx + a_i with weights ((1−p)/2, (1−p)/2, p/2, p/2).
pub fn prop43(lambda: f64, p: f64) -> Result<SelfSimilarSystem> {
    // Go through the shortest decimal form so 0.28 becomes 7/25.
    let l = exact::parse_rational(&alloc::format!("{lambda:?}")).map_err(|_| invalid("lambda", "must be finite"))?;
    let q = exact::parse_rational(&alloc::format!("{p:?}")).map_err(|_| invalid("p", "must be finite"))?;
    prop43_exact(&l, &q)
}

pub fn prop43_exact(lambda: &Rational, p: &Rational) -> Result<SelfSimilarSystem> {
    if !(*lambda > exact::frac(1, 4) && *lambda < exact::frac(1, 3)) {
        return Err(invalid("lambda", "requires 1/4 < lambda < 1/3"));
    }
    if !(*p > Rational::zero() && *p < exact::frac(1, 2)) {
        return Err(invalid("p", "requires 0 < p < 1/2"));
    }
    let one = Rational::one();
    let z = Rational::zero();
    let gap = &one - lambda;
    let mid = &gap / exact::int(2);
    let half = exact::frac(1, 2);
    let a = (&one - p) * &half;
    let b = p * &half;
    Ok(build(
        "prop43",
        alloc::vec![lambda.clone(); 4],
        alloc::vec![
            alloc::vec![z.clone(), z.clone()],
            alloc::vec![gap.clone(), z.clone()],
            alloc::vec![mid.clone(), z],
            alloc::vec![mid, gap],
        ],
        alloc::vec![a.clone(), a, b.clone(), b],
    ))
}

/// `cantor13`, `unit-interval`, or `prop43:λ,p` (also `prop43(λ,p)`).
pub fn preset(name: &str) -> Result<SelfSimilarSystem> {
    let name = name.trim();
    match name {
        "cantor13" => return Ok(cantor13()),
        "unit-interval" => return Ok(unit_interval()),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("prop43") {
        let args = rest
            .strip_prefix(':')
            .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| Error::Parse(alloc::format!("expected prop43:lambda,p, got `{name}`")))?;
        let v = exact::parse_rational_list(args)?;
        if v.len() != 2 {
            return Err(Error::Parse("prop43 takes two parameters".into()));
        }
        return prop43_exact(&v[0], &v[1]);
    }
    Err(Error::NotFound(alloc::format!("unknown preset `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vector;
    use num_traits::Signed;

    #[test]
    fn preset_shapes() {
        let c = preset("cantor13").unwrap();
        assert_eq!(c.kappa(), 2);
        assert_eq!(c.ratios(), [1.0 / 3.0, 1.0 / 3.0]);
        let p = preset("prop43:0.28,0.1").unwrap();
        assert_eq!(p.kappa(), 4);
        assert_eq!(p.maps()[1].translation, Vector::xy(0.72, 0.0));
        assert!((p.weights()[2] - 0.05).abs() < 1e-16);
        assert!(preset("prop43:0.5,0.1").is_err());
        assert!(preset("prop43(0.3,0.6)").is_err());
        assert!(preset("koch").is_err());
    }

    #[test]
    fn prop43_first_level_is_strongly_separated() {
        // Exact gap between the boxes [a_i, a_i + λ(1,1)] of the first level.
        let l = exact::frac(7, 25);
        let sys = prop43_exact(&l, &exact::frac(1, 10)).unwrap();
        let t = &sys.exact().unwrap().translations;
        for i in 0..4 {
            for j in i + 1..4 {
                let dx = (&t[i][0] - &t[j][0]).abs() - &l;
                let dy = (&t[i][1] - &t[j][1]).abs() - &l;
                let zero = Rational::zero();
                assert!(dx > zero || dy > zero, "maps {i} and {j} overlap");
            }
        }
    }

    #[test]
    fn rational_weights_sum_to_one_by_level() {
        let sys = prop43_exact(&exact::frac(7, 25), &exact::frac(1, 5)).unwrap();
        for k in 0..=5 {
            let s: Rational = crate::symbolic::SymbolWord::all_of_length(4, k)
                .map(|w| sys.cylinder_weight_exact(&w).unwrap().unwrap())
                .sum();
            assert!(s.is_one());
        }
    }
}
