use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::exact::{self, Rational};
use crate::geometry::Vector;
use crate::math;
use crate::rng;

use super::similitude::Similitude;
use super::word::{Coding, SymbolWord, Tail};

/// Ball B(center, radius); for a word w it encloses E_w.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointEnclosure {
    pub center: Vector,
    pub radius: f64,
}

/// Rational data for systems whose maps are x ↦ r x + t with rational r, t, p.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactData {
    pub ratios: Vec<Rational>,
    pub translations: Vec<Vec<Rational>>,
    pub weights: Vec<Rational>,
}

/// Contracting similitudes f_1 … f_κ with Bernoulli weights p_1 … p_κ.
#[derive(Clone, Debug)]
pub struct SelfSimilarSystem {
    name: String,
    maps: Vec<Similitude>,
    weights: Vec<f64>,
    exact: Option<ExactData>,
    osc_asserted: bool,
    bound: PointEnclosure,
}

const WEIGHT_TOL: f64 = 1e-12;

impl SelfSimilarSystem {
    pub fn new(name: impl Into<String>, maps: Vec<Similitude>, weights: Vec<f64>, osc_asserted: bool) -> Result<Self> {
        if maps.len() < 2 {
            return Err(invalid("maps", "need at least two maps"));
        }
        if maps.len() > u8::MAX as usize {
            return Err(invalid("maps", "at most 255 maps"));
        }
        if weights.len() != maps.len() {
            return Err(Error::DimensionMismatch { expected: maps.len(), found: weights.len() });
        }
        let n = maps[0].dim();
        for f in &maps {
            f.translation.check_dim(n)?;
            if !(f.ratio < 1.0) {
                return Err(invalid("ratio", "maps must be strict contractions"));
            }
        }
        if weights.iter().any(|&p| !(p >= 0.0) || p > 1.0) {
            return Err(invalid("weights", "must lie in [0, 1]"));
        }
        let total: f64 = weights.iter().sum();
        if math::abs(total - 1.0) > WEIGHT_TOL {
            return Err(invalid("weights", "must sum to 1"));
        }
        let bound = invariant_ball(&maps);
        Ok(SelfSimilarSystem { name: name.into(), maps, weights, exact: None, osc_asserted, bound })
    }

    /// Builds a system of maps x ↦ r_i x + t_i from rational data, keeping it for exact work.
    pub fn from_exact(name: impl Into<String>, data: ExactData, osc_asserted: bool) -> Result<Self> {
        let k = data.ratios.len();
        if data.translations.len() != k || data.weights.len() != k {
            return Err(invalid("maps", "ratio, translation and weight counts differ"));
        }
        let sum: Rational = data.weights.iter().cloned().sum();
        if !sum.is_one() {
            return Err(invalid("weights", "rational weights must sum to exactly 1"));
        }
        if data.weights.iter().any(|w| *w < Rational::zero()) {
            return Err(invalid("weights", "must be nonnegative"));
        }
        let mut maps = Vec::with_capacity(k);
        for i in 0..k {
            let t: Vec<f64> = data.translations[i].iter().map(exact::to_f64).collect();
            maps.push(Similitude::scaling(exact::to_f64(&data.ratios[i]), Vector::new(&t)?)?);
        }
        let weights = data.weights.iter().map(exact::to_f64).collect();
        let mut s = SelfSimilarSystem::new(name, maps, weights, osc_asserted)?;
        s.exact = Some(data);
        Ok(s)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kappa(&self) -> usize {
        self.maps.len()
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    pub fn map(&self, symbol: u8) -> &Similitude {
        &self.maps[symbol as usize - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, symbol: u8) -> f64 {
        self.weights[symbol as usize - 1]
    }

    pub fn exact(&self) -> Option<&ExactData> {
        self.exact.as_ref()
    }

    pub fn osc_asserted(&self) -> bool {
        self.osc_asserted
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(|f| f.ratio).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().map(|f| f.ratio).fold(0.0, f64::max)
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Replaces the weights by the natural ones, p_i = r_i^t.
    pub fn with_natural_weights(mut self) -> Result<Self> {
        let t = moran_exponent(&self.ratios())?;
        let mut w: Vec<f64> = self.maps.iter().map(|f| math::powf(f.ratio, t)).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|p| *p /= s);
        self.weights = w;
        if let Some(ex) = self.exact.as_mut() {
            if ex.ratios.iter().all(|r| *r == ex.ratios[0]) {
                let k = ex.ratios.len() as i64;
                ex.weights = alloc::vec![exact::frac(1, k); k as usize];
            } else {
                self.exact = None;
            }
        }
        Ok(self)
    }

    /// The ball B(c, R) with f_i(B) ⊂ B for every i.
    pub fn attractor_bound(&self) -> PointEnclosure {
        self.bound
    }

    /// f_w = f_{w_1} ∘ … ∘ f_{w_n}; the empty word gives the identity.
    pub fn compose(&self, w: &SymbolWord) -> Result<Similitude> {
        w.validate(self.kappa())?;
        let mut g = Similitude::identity(self.dim());
        for &s in w.symbols() {
            g = g.compose(self.map(s));
        }
        Ok(g)
    }

    /// p_w = p_{w_1} ⋯ p_{w_n}.
    pub fn cylinder_weight(&self, w: &SymbolWord) -> Result<f64> {
        w.validate(self.kappa())?;
        Ok(w.symbols().iter().map(|&s| self.weight(s)).product())
    }

    /// Exact p_w when rational weights are known.
    pub fn cylinder_weight_exact(&self, w: &SymbolWord) -> Result<Option<BigRational>> {
        w.validate(self.kappa())?;
        Ok(self.exact.as_ref().map(|ex| {
            let mut q = Rational::one();
            for &s in w.symbols() {
                q *= &ex.weights[s as usize - 1];
            }
            q
        }))
    }

    /// Enclosure of E_w derived from a container `bound` of E.
    pub fn point_enclosure(&self, w: &SymbolWord, bound: &PointEnclosure) -> Result<PointEnclosure> {
        for (i, f) in self.maps.iter().enumerate() {
            let c = f.apply(&bound.center);
            if c.dist(&bound.center) + f.ratio * bound.radius > bound.radius * (1.0 + 1e-12) {
                return Err(Error::BoundNotInvariant(i + 1));
            }
        }
        let g = self.compose(w)?;
        Ok(PointEnclosure { center: g.apply(&bound.center), radius: g.ratio * bound.radius })
    }

    /// A point of E_{prefix}: π(prefix·1^∞) for finite codings, π(i) exactly for periodic tails.
    pub fn point(&self, coding: &Coding) -> Result<Vector> {
        coding.validate(self.kappa())?;
        let base = match &coding.tail {
            Tail::Periodic(p) => self.compose(p)?.fixed_point(),
            Tail::Unresolved => self.maps[0].fixed_point(),
        };
        Ok(self.compose(&coding.prefix)?.apply(&base))
    }

    /// Draws `len` i.i.d. symbols with probabilities p_i.
    pub fn sample_word(&self, len: usize, seed: u64) -> SymbolWord {
        let mut r = rng::rng(seed);
        self.sample_word_with(len, &mut r)
    }

    pub fn sample_word_with(&self, len: usize, r: &mut rng::Rng) -> SymbolWord {
        let cum: Vec<f64> = self
            .weights
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let last_pos = self.weights.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let u: f64 = r.gen();
            let i = cum.iter().position(|&c| u < c).unwrap_or(last_pos);
            let i = if self.weights[i] > 0.0 { i } else { last_pos };
            out.push(i as u8 + 1);
        }
        SymbolWord::from_symbols(out)
    }
}

/// Unique t ≥ 0 with Σ r_i^t = 1, by bisection to 1e-12.
pub fn moran_exponent(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(invalid("ratios", "need at least one ratio"));
    }
    if ratios.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(invalid("ratios", "each ratio must lie in (0, 1)"));
    }
    let g = |t: f64| ratios.iter().map(|&r| math::powf(r, t)).sum::<f64>() - 1.0;
    if g(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest radius of a ball about `c` mapped into itself by every f_i.
fn radius_about(maps: &[Similitude], c: &Vector) -> f64 {
    maps.iter().map(|f| f.apply(c).dist(c) / (1.0 - f.ratio)).fold(0.0, f64::max)
}

fn invariant_ball(maps: &[Similitude]) -> PointEnclosure {
    let n = maps[0].dim();
    let fixed: Vec<Vector> = maps.iter().map(|f| f.fixed_point()).collect();
    let mut pts = fixed.clone();
    for _ in 0..3 {
        if pts.len() * maps.len() > 4096 {
            break;
        }
        pts = pts.iter().flat_map(|p| maps.iter().map(move |f| f.apply(p))).collect();
    }
    let mut candidates = Vec::new();
    let mean = fixed.iter().fold(Vector::zeros(n), |a, b| a + *b) * (1.0 / fixed.len() as f64);
    candidates.push(mean);
    candidates.push(bbox_center(&fixed));
    candidates.push(bbox_center(&pts));
    // A few Badoiu–Clarkson steps toward the minimal enclosing ball of the sample.
    let mut c = bbox_center(&pts);
    for k in 1..=200 {
        let far = pts.iter().max_by(|a, b| a.dist(&c).total_cmp(&b.dist(&c))).copied().unwrap();
        c = c + (far - c) * (1.0 / (k as f64 + 1.0));
    }
    candidates.push(c);
    let (center, r) =
        candidates.iter().map(|c| (*c, radius_about(maps, c))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    PointEnclosure { center, radius: r * (1.0 + 1e-12) }
}

fn bbox_center(pts: &[Vector]) -> Vector {
    let n = pts[0].dim();
    let mut c = [0.0; 3];
    for (i, ci) in c.iter_mut().enumerate().take(n) {
        let lo = pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
        *ci = 0.5 * (lo + hi);
    }
    Vector::new(&c[..n]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::super::presets;
    use super::*;

    #[test]
    fn moran_examples() {
        assert!((moran_exponent(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
        let t = moran_exponent(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((t - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        let t = moran_exponent(&[0.28; 4]).unwrap();
        assert!((t - 4f64.ln() / (1.0 / 0.28f64).ln()).abs() < 1e-12);
        assert!(moran_exponent(&[0.5, 1.0]).is_err());
    }

    #[test]
    fn compose_examples() {
        let c = presets::cantor13();
        let id = c.compose(&SymbolWord::empty()).unwrap();
        assert_eq!(id.ratio, 1.0);
        let f1 = c.compose(&"1".parse().unwrap()).unwrap();
        assert!((f1.apply(&Vector::x(1.0))[0] - 1.0 / 3.0).abs() < 1e-16);
        let f12 = c.compose(&"12".parse().unwrap()).unwrap();
        assert!((f12.ratio - 1.0 / 9.0).abs() < 1e-16);
        assert!((f12.apply(&Vector::x(0.0))[0] - 2.0 / 9.0).abs() < 1e-16);
        assert!(c.compose(&"13".parse().unwrap()).is_err());
    }

    #[test]
    fn weights() {
        let u = presets::unit_interval();
        assert_eq!(u.cylinder_weight(&"121".parse().unwrap()).unwrap(), 0.125);
        let p = presets::prop43(0.28, 0.2).unwrap();
        assert!((p.cylinder_weight(&"13".parse().unwrap()).unwrap() - 0.04).abs() < 1e-15);
        assert_eq!(p.cylinder_weight(&SymbolWord::empty()).unwrap(), 1.0);
    }

    #[test]
    fn enclosures() {
        let c = presets::cantor13();
        let b = c.attractor_bound();
        assert!((b.center[0] - 0.5).abs() < 1e-12 && (b.radius - 0.5).abs() < 1e-11);
        let e = c.point_enclosure(&"2".parse().unwrap(), &b).unwrap();
        assert!((e.center[0] - 5.0 / 6.0).abs() < 1e-12 && (e.radius - 1.0 / 6.0).abs() < 1e-12);
        let k = 7;
        let e = c.point_enclosure(&SymbolWord::repeat(1, k), &b).unwrap();
        let s = 3f64.powi(-(k as i32)) / 2.0;
        assert!((e.center[0] - s).abs() < 1e-15 && (e.radius - s).abs() < 1e-15);
        let tiny = PointEnclosure { center: Vector::x(0.5), radius: 0.1 };
        assert_eq!(c.point_enclosure(&SymbolWord::empty(), &tiny), Err(Error::BoundNotInvariant(1)));
    }

    #[test]
    fn sampling() {
        let u = presets::unit_interval();
        assert!(u.sample_word(0, 1).is_empty());
        let w = u.sample_word(100_000, 5);
        let ones = w.symbols().iter().filter(|&&s| s == 1).count() as f64 / 1e5;
        assert!((ones - 0.5).abs() < 0.01);
        assert_eq!(w, u.sample_word(100_000, 5));
        let deg = SelfSimilarSystem::new("d", u.maps().to_vec(), alloc::vec![1.0, 0.0], true).unwrap();
        assert!(deg.sample_word(1000, 3).symbols().iter().all(|&s| s == 1));
    }

    #[test]
    fn points_of_codings() {
        let c = presets::cantor13();
        let x = c.point(&"1222(2)".parse().unwrap()).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15);
        let x = c.point(&"(1)".parse().unwrap()).unwrap();
        assert_eq!(x[0], 0.0);
    }
}
