use crate::error::{invalid, Error, Result};
use crate::math;
use crate::rng;
use crate::symbolic::{Coding, SymbolWord};

use super::gauge::{Convergence, Gauge};
use rand::Rng as _;

/// Run-length statistics of a coding at position n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunStats {
    /// Number of consecutive 2s right after position n.
    pub gamma: usize,
    /// Longest block of symbols in {1, 2} inside the first n symbols.
    pub z: usize,
}

/// Γ_n and Z_n of a finite word; the run of 2s stops at the end of the word.
pub fn run_stats(word: &SymbolWord, n: usize) -> Result<RunStats> {
    let s = word.symbols();
    if n > s.len() {
        return Err(Error::CodingTooShort { needed: n, available: s.len() });
    }
    let gamma = s[n..].iter().take_while(|&&c| c == 2).count();
    Ok(RunStats { gamma, z: longest_12_block(&s[..n]) })
}

fn longest_12_block(s: &[u8]) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &c in s {
        if c == 1 || c == 2 {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// Γ_n for an infinite coding; `None` when the run of 2s never ends.
pub fn gamma_of_coding(c: &Coding, n: usize) -> Result<Option<usize>> {
    let mut k = n;
    let limit = match c.known_len() {
        Some(len) => len,
        None => n + c.prefix.len() + period_len(c) + 1,
    };
    loop {
        match c.symbol(k) {
            Some(2) => {
                k += 1;
                if c.known_len().is_none() && k > limit {
                    return Ok(None);
                }
            }
            Some(_) => return Ok(Some(k - n)),
            None => return Err(Error::CodingTooShort { needed: k + 1, available: k }),
        }
    }
}

fn period_len(c: &Coding) -> usize {
    match &c.tail {
        crate::symbolic::Tail::Periodic(p) => p.len(),
        crate::symbolic::Tail::Unresolved => 0,
    }
}

/// Streamed Z_n against the almost-sure limit 1/|ln(1−p)|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErdosRevesz {
    pub z_n: usize,
    pub empirical: f64,
    pub theoretical: f64,
    /// p = 0: every symbol is in {1, 2}, so Z_n = n.
    pub degenerate: bool,
}

/// Simulates n symbols, each in {1, 2} with probability 1 − p.
pub fn erdos_revesz_check(p: f64, n: u64, seed: u64) -> Result<ErdosRevesz> {
    if !(0.0..1.0).contains(&p) {
        return Err(invalid("p", "must lie in [0, 1)"));
    }
    if n < 2 {
        return Err(invalid("n", "need n >= 2"));
    }
    let ln_n = math::ln(n as f64);
    let theoretical = if p == 0.0 { f64::INFINITY } else { 1.0 / math::abs(math::ln(1.0 - p)) };
    if p == 0.0 {
        return Ok(ErdosRevesz { z_n: n as usize, empirical: n as f64 / ln_n, theoretical, degenerate: true });
    }
    let mut r = rng::rng(seed);
    let mut best = 0usize;
    let mut cur = 0usize;
    for _ in 0..n {
        if r.gen::<f64>() < 1.0 - p {
            cur += 1;
            if cur > best {
                best = cur;
            }
        } else {
            cur = 0;
        }
    }
    Ok(ErdosRevesz { z_n: best, empirical: best as f64 / ln_n, theoretical, degenerate: false })
}

/// Integer sequence a_n for the "Γ_n > a_n infinitely often" criterion.
#[derive(Clone, Debug, PartialEq)]
pub enum RunThreshold {
    /// a_n = n.
    Linear,
    /// a_n = ⌈log₂ n⌉.
    CeilLog2,
    /// a_n = ⌈−log₂ f(3^{-n})⌉, clamped at 0.
    FromGauge(Gauge),
    /// Explicit values a_1, a_2, …; the last value repeats.
    Table(alloc::vec::Vec<u32>),
}

impl RunThreshold {
    pub fn a(&self, n: u64) -> u32 {
        match self {
            RunThreshold::Linear => n.min(u32::MAX as u64) as u32,
            RunThreshold::CeilLog2 => {
                if n <= 1 {
                    0
                } else {
                    64 - (n - 1).leading_zeros()
                }
            }
            RunThreshold::FromGauge(g) => {
                let f = g.eval_ln(-(n as f64) * math::ln(3.0));
                if !(f > 0.0) {
                    return u32::MAX;
                }
                math::ceil(-math::log2(f)).max(0.0) as u32
            }
            RunThreshold::Table(v) => {
                if v.is_empty() {
                    0
                } else {
                    v[((n - 1) as usize).min(v.len() - 1)]
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IoCriterion {
    pub partial_sum: f64,
    /// Divergent means Γ_n > a_n infinitely often almost surely.
    pub classification: Option<Convergence>,
}

/// Σ_{n ≤ n_max} 2^{-a_n} with the analytic classification where known.
pub fn io_criterion(a: &RunThreshold, n_max: u64) -> IoCriterion {
    let partial_sum = (1..=n_max).map(|n| math::powf(2.0, -(a.a(n) as f64))).sum();
    let classification = match a {
        RunThreshold::Linear => Some(Convergence::Convergent),
        RunThreshold::CeilLog2 => Some(Convergence::Divergent),
        // 2^{-a_n} is within a factor 2 of f(3^{-n}) = (n ln 3)^{-s}.
        RunThreshold::FromGauge(Gauge::LogPow(s)) => {
            Some(if *s > 1.0 { Convergence::Convergent } else { Convergence::Divergent })
        }
        RunThreshold::FromGauge(Gauge::Constant(c)) => {
            Some(if *c > 0.0 { Convergence::Divergent } else { Convergence::Convergent })
        }
        _ => None,
    };
    IoCriterion { partial_sum, classification }
}
