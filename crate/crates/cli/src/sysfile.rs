//! Plain-text description of a self-similar system.
//!
//! ```text
//! # comments start with '#'
//! name four-maps
//! osc true
//! map 0.28 0 0 weight 0.45
//! map 0.28 0.72 0 weight 0.45
//! map 1/4 0.36 0 rotate 1.5707963267948966 weight 0.1
//! ```
//!
//! Each `map` line is `ratio t_1 .. t_n`, optionally followed by `rotate <radians>`
//! (planar only) and `weight <p>`. Without any weights the natural weights r_i^s are
//! used. Rational entries such as `1/3` are kept exactly when no map rotates.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use conical_core::exact::{self, Rational};
use conical_core::geometry::{Matrix, Vector};
use conical_core::symbolic::{preset, ExactData, SelfSimilarSystem, Similitude};

struct MapLine {
    ratio: Rational,
    translation: Vec<Rational>,
    rotate: Option<f64>,
    weight: Option<Rational>,
}

pub fn parse_system(text: &str) -> Result<SelfSimilarSystem> {
    let mut name = String::from("custom");
    let mut osc = false;
    let mut maps = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ctx = || format!("line {}: `{}`", no + 1, raw.trim());
        let mut it = line.split_whitespace();
        match it.next() {
            Some("name") => name = it.collect::<Vec<_>>().join(" "),
            Some("osc") => {
                osc = match it.next() {
                    Some("true") | Some("yes") | Some("1") => true,
                    Some("false") | Some("no") | Some("0") => false,
                    _ => bail!("{}: osc expects true or false", ctx()),
                }
            }
            Some("map") => {
                let toks: Vec<&str> = it.collect();
                let mut nums = Vec::new();
                let mut rotate = None;
                let mut weight = None;
                let mut i = 0;
                while i < toks.len() {
                    match toks[i] {
                        "rotate" | "weight" => {
                            let v =
                                toks.get(i + 1).ok_or_else(|| anyhow!("{}: missing value after {}", ctx(), toks[i]))?;
                            if toks[i] == "rotate" {
                                rotate = Some(v.parse::<f64>().with_context(ctx)?);
                            } else {
                                weight = Some(exact::parse_rational(v).with_context(ctx)?);
                            }
                            i += 2;
                        }
                        t => {
                            nums.push(exact::parse_rational(t).with_context(ctx)?);
                            i += 1;
                        }
                    }
                }
                if nums.len() < 2 {
                    bail!("{}: map needs a ratio and a translation", ctx());
                }
                let ratio = nums.remove(0);
                maps.push(MapLine { ratio, translation: nums, rotate, weight });
            }
            Some(other) => bail!("{}: unknown keyword `{other}`", ctx()),
            None => {}
        }
    }
    build(name, osc, maps)
}

fn build(name: String, osc: bool, maps: Vec<MapLine>) -> Result<SelfSimilarSystem> {
    if maps.is_empty() {
        bail!("system file defines no maps");
    }
    let n = maps[0].translation.len();
    if maps.iter().any(|m| m.translation.len() != n) {
        bail!("all translations must have the same dimension");
    }
    let given = maps.iter().filter(|m| m.weight.is_some()).count();
    if given != 0 && given != maps.len() {
        bail!("give a weight for every map or for none");
    }
    let rotates = maps.iter().any(|m| m.rotate.is_some());
    if rotates && n != 2 {
        bail!("rotate is only supported for planar maps");
    }
    if !rotates {
        let uniform = alloc_weights(maps.len());
        let data = ExactData {
            ratios: maps.iter().map(|m| m.ratio.clone()).collect(),
            translations: maps.iter().map(|m| m.translation.clone()).collect(),
            weights: if given == 0 { uniform } else { maps.iter().map(|m| m.weight.clone().unwrap()).collect() },
        };
        let s = SelfSimilarSystem::from_exact(name, data, osc)?;
        return Ok(if given == 0 { s.with_natural_weights()? } else { s });
    }
    let mut sims = Vec::with_capacity(maps.len());
    for m in &maps {
        let t: Vec<f64> = m.translation.iter().map(exact::to_f64).collect();
        let o = Matrix::rotation2(m.rotate.unwrap_or(0.0));
        sims.push(Similitude::new(exact::to_f64(&m.ratio), o, Vector::new(&t)?)?);
    }
    let weights = if given == 0 {
        vec![1.0 / maps.len() as f64; maps.len()]
    } else {
        maps.iter().map(|m| exact::to_f64(m.weight.as_ref().unwrap())).collect()
    };
    let s = SelfSimilarSystem::new(name, sims, weights, osc)?;
    Ok(if given == 0 { s.with_natural_weights()? } else { s })
}

fn alloc_weights(k: usize) -> Vec<Rational> {
    vec![exact::frac(1, k as i64); k]
}

/// A preset name (`cantor13`, `unit-interval`, `prop43:λ,p`) or a path to a system file.
pub fn load_system(spec: &str) -> Result<SelfSimilarSystem> {
    match preset(spec) {
        Ok(s) => Ok(s),
        Err(e) => {
            let p = Path::new(spec);
            if p.is_file() {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                parse_system(&text).with_context(|| format!("in {}", p.display()))
            } else {
                Err(anyhow!("`{spec}` is neither a preset nor a readable file ({e})"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_file_is_exact() {
        let s = parse_system("name c\nosc true\nmap 1/3 0\nmap 1/3 2/3 # right\n").unwrap();
        assert_eq!(s.kappa(), 2);
        assert!(s.exact().is_some());
        assert!(s.osc_asserted());
        assert!((s.weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rotation_and_weights() {
        let s = parse_system("map 0.5 0 0 rotate 1.0 weight 0.25\nmap 0.5 0.5 0 weight 3/4\n").unwrap();
        assert!(s.exact().is_none());
        assert_eq!(s.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_system("map 0.5 0\nfoo 1\n").unwrap_err();
        assert!(format!("{e:#}").contains("line 2"));
        assert!(parse_system("map 0.5 0 weight 0.5\nmap 0.5 1\n").is_err());
        assert!(load_system("no-such-system").is_err());
    }
}
