use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math;

/// An increasing positive function f on (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub enum Gauge {
    /// f(t) = |ln t|^{-s}.
    LogPow(f64),
    /// f(t) = c.
    Constant(f64),
    /// Right-continuous step function through `(t_i, f_i)`, t ascending.
    /// Below the first breakpoint the first value applies.
    Table(Vec<(f64, f64)>),
}

impl Gauge {
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("table", "needs at least one point"));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) || w[0].1 > w[1].1 {
                return Err(invalid("table", "breakpoints must increase and values must not decrease"));
            }
        }
        if points.iter().any(|p| !(p.1 >= 0.0)) {
            return Err(invalid("table", "values must be nonnegative"));
        }
        Ok(Gauge::Table(points))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Gauge::LogPow(s) => math::powf(math::abs(math::ln(t)), -s),
            Gauge::Constant(c) => *c,
            Gauge::Table(p) => match p.iter().rposition(|q| q.0 <= t) {
                Some(i) => p[i].1,
                None => p[0].1,
            },
        }
    }

    /// f(t) given ln t, which stays accurate where t underflows.
    pub fn eval_ln(&self, ln_t: f64) -> f64 {
        match self {
            Gauge::LogPow(s) => math::powf(math::abs(ln_t), -s),
            _ => self.eval(math::exp(ln_t)),
        }
    }

    /// `logpow:s`, `const:c` or `inverse-log` (= `logpow:1`).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Parse(alloc::format!("bad gauge `{s}`")));
        if s == "inverse-log" {
            return Ok(Gauge::LogPow(1.0));
        }
        if let Some(v) = s.strip_prefix("logpow:") {
            return Ok(Gauge::LogPow(num(v)?));
        }
        if let Some(v) = s.strip_prefix("const:").or_else(|| s.strip_prefix("constant:")) {
            return Ok(Gauge::Constant(num(v)?));
        }
        Err(Error::Parse(alloc::format!("unknown gauge `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    Convergent,
    Divergent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integrability {
    pub partial_sum: f64,
    /// Analytic verdict where one is known.
    pub classification: Option<Convergence>,
}

/// Σ_{i ≤ i_max} f(2^{-i}) with the analytic classification of ∫₀¹ f(t)/t dt < ∞.
pub fn gauge_integrability(g: &Gauge, i_max: u64) -> Integrability {
    let ln2 = core::f64::consts::LN_2;
    let partial_sum = (1..=i_max).map(|i| g.eval_ln(-(i as f64) * ln2)).sum();
    let classification = match g {
        Gauge::LogPow(s) => Some(if *s > 1.0 { Convergence::Convergent } else { Convergence::Divergent }),
        Gauge::Constant(c) => Some(if *c == 0.0 { Convergence::Convergent } else { Convergence::Divergent }),
        Gauge::Table(p) => Some(if p[0].1 == 0.0 { Convergence::Convergent } else { Convergence::Divergent }),
    };
    Integrability { partial_sum, classification }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logpow_two_converges() {
        let g = Gauge::LogPow(2.0);
        let a = gauge_integrability(&g, 1000);
        let b = gauge_integrability(&g, 10_000);
        assert_eq!(b.classification, Some(Convergence::Convergent));
        // Oracle: Σ_{i=1001}^{10^4} (i ln 2)^{-2} ≈ 1.8722e-3.
        let tail = b.partial_sum - a.partial_sum;
        assert!((tail - 1.8722e-3).abs() < 1e-7, "{tail}");
        let c = gauge_integrability(&g, 100_000);
        assert!(c.partial_sum - b.partial_sum < 1e-3);
    }

    #[test]
    fn logpow_one_diverges() {
        let r = gauge_integrability(&Gauge::LogPow(1.0), 100_000);
        assert_eq!(r.classification, Some(Convergence::Divergent));
        assert!(r.partial_sum > 5.0);
    }

    #[test]
    fn zero_constant() {
        let r = gauge_integrability(&Gauge::Constant(0.0), 50);
        assert_eq!((r.partial_sum, r.classification), (0.0, Some(Convergence::Convergent)));
    }

    #[test]
    fn parse_and_eval() {
        assert_eq!(Gauge::parse("logpow:2").unwrap(), Gauge::LogPow(2.0));
        assert_eq!(Gauge::parse("inverse-log").unwrap(), Gauge::LogPow(1.0));
        assert!(Gauge::parse("sqrt").is_err());
        let g = Gauge::LogPow(2.0);
        let r = 3f64.powi(-5);
        assert!((1.0 / g.eval(r) - (5.0 * 3f64.ln()).powi(2)).abs() < 1e-9);
        let t = Gauge::table(alloc::vec![(0.1, 0.2), (0.5, 0.4)]).unwrap();
        assert_eq!((t.eval(0.01), t.eval(0.2), t.eval(0.9)), (0.2, 0.2, 0.4));
        assert!(Gauge::table(alloc::vec![(0.5, 0.4), (0.1, 0.2)]).is_err());
    }
}
