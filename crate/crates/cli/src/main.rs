use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use conical_core::constructions::{audit_cone_search, build_sharpness, cone_inclusion_search, grid_measure, ConeNets};
use conical_core::dimension::{conical_dims, erdos_revesz_check, local_dims, ratio_profile, Gauge};
use conical_core::geometry::{subspace_net, ConeRegion, Direction, HalfCone, PlaneCone, Vector};
use conical_core::packing::{cone_packing, halfspace_packing, WeightedPoints};
use conical_core::refinable::{LocalizedMeasure, Resolution};
use conical_core::symbolic::{Coding, SelfSimilarSystem};
use conical_core::Error as CoreError;

use conical_cli::config::{parse_config, parse_ids};
use conical_cli::experiments::{self, Outcome, Params, DEFAULT_SEED};
use conical_cli::sysfile::load_system;
use conical_cli::table::{append_index, num, opt, Table};

/// Certified ball and cone measures of self-similar and constructed measures.
#[derive(Parser)]
#[command(name = "conical", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionKind {
    Ball,
    Left,
    Right,
}

#[derive(clap::Args)]
struct PointArgs {
    /// Preset (cantor13, unit-interval, prop43:l,p) or system file.
    #[arg(long)]
    system: String,
    /// File of codings, one per line; random codings are sampled otherwise.
    #[arg(long)]
    codings: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Length of sampled codings and of the localization path.
    #[arg(long, default_value_t = 60)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// `b^-i..b^-j`, `rho:k` (rho^1..rho^k) or a comma list.
    #[arg(long, default_value = "3^-1..3^-20")]
    scales: String,
    /// Extra refinement levels below each scale.
    #[arg(long, default_value_t = 14)]
    extra_depth: u32,
    #[arg(long, default_value_t = 200_000)]
    max_cells: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample codings and points of a system.
    GenSamples {
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 40)]
        len: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ratio of a one-sided or full ball to the ball, divided by a gauge.
    Ratios {
        #[command(flatten)]
        p: PointArgs,
        #[arg(long, value_enum, default_value = "right")]
        region: RegionKind,
        /// `const:c`, `logpow:s` or `inverse-log`.
        #[arg(long, default_value = "const:1")]
        gauge: String,
    },
    /// Local dimension slopes log mu(B(x,r)) / log r.
    Dims {
        #[command(flatten)]
        p: PointArgs,
    },
    /// Conical slopes, maximized over a net of subspaces of codimension m.
    ConicalDims {
        #[command(flatten)]
        p: PointArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Longest {1,2}-run of a random coding against 1/|log(1-p)|.
    Runlength {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Half-space or cone packing of a weighted point file (`x[,y[,z]],weight`).
    PackingDemo {
        #[arg(long)]
        points: PathBuf,
        /// Comma-separated direction.
        #[arg(long)]
        theta: String,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        /// Cone packing with this aperture and theta at every point.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Levels of the removed-interval construction for a gauge.
    Sharpness {
        #[arg(long, default_value = "inverse-log")]
        gauge: String,
        #[arg(long, default_value_t = 2)]
        start: u32,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
        #[arg(long, default_value_t = 40)]
        depth_cap: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level table of the two-operation grid measure.
    GridMeasure {
        #[arg(long, default_value_t = 1.2)]
        s: f64,
        #[arg(long, default_value_t = 1.5)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a word whose cylinder sees every net cone.
    ConeSearch {
        #[arg(long)]
        system: String,
        /// A number or `auto` (largest ratio lambda gives (1-3 lambda)/10).
        #[arg(long, default_value = "auto")]
        alpha: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        lmax: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run experiments (E1..E11, comma list or all) and report pass/fail.
    Verify {
        ids: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        cohort: Option<usize>,
        #[arg(long)]
        max_cells: Option<u64>,
        /// Directory for per-experiment CSV files and index.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiments named in a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Input that cannot be interpreted; exits with status 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| Usage(e).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let bad_input = e.downcast_ref::<Usage>().is_some()
                || matches!(
                    e.downcast_ref::<CoreError>(),
                    Some(
                        CoreError::InvalidParameter { .. } | CoreError::Parse(_) | CoreError::DimensionMismatch { .. }
                    )
                );
            ExitCode::from(if bad_input { 2 } else { 1 })
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::GenSamples { system, count, len, seed, out } => {
            let s = usage(load_system(&system))?;
            let mut t = Table::new(&["point_id", "coding", "x", "y", "z"]);
            for i in 0..count {
                let w = s.sample_word(len, conical_core::rng::derive_seed(seed, i as u64));
                let c = Coding::finite(w);
                let x = s.point(&c)?;
                let mut row = vec![i.to_string(), c.to_string()];
                row.extend((0..3).map(|k| if k < x.dim() { num(x[k]) } else { String::new() }));
                t.push(row);
            }
            t.emit(out.as_deref())?;
            Ok(true)
        }
        Cmd::Ratios { p, region, gauge } => {
            let g = usage(Gauge::parse(&gauge).map_err(Into::into))?;
            let s = usage(load_system(&p.system))?;
            let scales = usage(parse_scales(&p.scales))?;
            let mut t = Table::new(&[
                "point_id", "scale", "lower", "upper", "ratio_lo", "ratio_hi", "slope_lo", "slope_hi", "flags",
            ]);
            for (i, c) in codings(&s, &p)?.iter().enumerate() {
                let m = LocalizedMeasure::new(&s, c, p.depth)?;
                let o = Vector::zeros(s.dim());
                let e1 = Direction::axis(s.dim(), 0);
                let reg = |r: f64| -> conical_core::Result<ConeRegion> {
                    let b = ConeRegion::ball(o, r)?;
                    match region {
                        RegionKind::Ball => Ok(b),
                        RegionKind::Right => b.with_exclude(HalfCone::new(o, e1.flipped(), 0.0)?),
                        RegionKind::Left => b.with_exclude(HalfCone::new(o, e1, 0.0)?),
                    }
                };
                let prof = ratio_profile(&m, o, &scales, reg, &g, resolution(&p))?;
                for e in &prof.entries {
                    let sl = e.region.slope(e.scale);
                    let mut flags = Vec::new();
                    if e.ratio.unbounded {
                        flags.push("unbounded");
                    }
                    if e.ratio.empty {
                        flags.push("empty");
                    }
                    if e.region.unresolved_mass > 0.0 || e.ball.unresolved_mass > 0.0 {
                        flags.push("unresolved");
                    }
                    t.push(vec![
                        i.to_string(),
                        num(e.scale),
                        num(e.region.lower),
                        num(e.region.upper),
                        num(e.ratio.lo),
                        num(e.ratio.hi),
                        opt(sl.lo),
                        opt(sl.hi),
                        flags.join("|"),
                    ]);
                }
            }
            t.emit(p.out.as_deref())?;
            Ok(true)
        }
        Cmd::Dims { p } => {
            let s = usage(load_system(&p.system))?;
            let scales = usage(parse_scales(&p.scales))?;
            let mut t = Table::new(&["point_id", "scale", "lower", "upper", "slope_lo", "slope_hi"]);
            for (i, c) in codings(&s, &p)?.iter().enumerate() {
                let m = LocalizedMeasure::new(&s, c, p.depth)?;
                let d = local_dims(&m, Vector::zeros(s.dim()), &scales, resolution(&p))?;
                slope_rows(&mut t, i, &d.entries);
            }
            t.emit(p.out.as_deref())?;
            Ok(true)
        }
        Cmd::ConicalDims { p, alpha, m, beta } => {
            let s = usage(load_system(&p.system))?;
            let scales = usage(parse_scales(&p.scales))?;
            let n = s.dim();
            let o = Vector::zeros(n);
            let net = if m == 0 { vec![conical_core::geometry::Subspace::full(n)] } else { subspace_net(n, m, alpha)? };
            let cones =
                net.into_iter().map(|v| PlaneCone::new(o, v, alpha, beta)).collect::<conical_core::Result<Vec<_>>>()?;
            let mut t = Table::new(&["point_id", "scale", "lower", "upper", "slope_lo", "slope_hi"]);
            for (i, c) in codings(&s, &p)?.iter().enumerate() {
                let lm = LocalizedMeasure::new(&s, c, p.depth)?;
                let family = |r: f64| cones.iter().map(|k| ConeRegion::ball(o, r)?.with_include(*k)).collect();
                let d = conical_dims(&lm, &scales, family, resolution(&p))?;
                slope_rows(&mut t, i, &d.entries);
            }
            t.emit(p.out.as_deref())?;
            Ok(true)
        }
        Cmd::Runlength { p, n, seed } => {
            let r = erdos_revesz_check(p, n, seed)?;
            println!("p = {p}, n = {n}, Z_n = {}", r.z_n);
            println!("Z_n / log n = {:.6}, 1/|log(1-p)| = {:.6}", r.empirical, r.theoretical);
            Ok(true)
        }
        Cmd::PackingDemo { points, theta, radius, alpha } => {
            let pts = usage(read_points(&points))?;
            let th = usage(parse_direction(&theta, pts.dim()))?;
            let radii = vec![radius; pts.len()];
            let res = match alpha {
                None => halfspace_packing(&pts, &radii, radius, &th)?,
                Some(a) => cone_packing(&pts, &radii, radius, &vec![th; pts.len()], a)?,
            };
            let mut t = Table::new(&["index", "x", "r", "captured", "class", "bin"]);
            for s in &res.selected {
                let x: Vec<String> = s.center.coords().iter().map(|c| num(*c)).collect();
                t.push(vec![
                    s.index.to_string(),
                    x.join(" "),
                    num(s.radius),
                    num(s.captured),
                    res.class.to_string(),
                    res.bin.map(|b| b.to_string()).unwrap_or_default(),
                ]);
            }
            t.emit(None)?;
            println!(
                "# total {} ratio {} constant {} classes {} max degree {} disjoint {}",
                num(res.total),
                opt(res.ratio),
                num(res.constant),
                res.classes,
                res.max_degree,
                res.is_disjoint()
            );
            Ok(res.is_disjoint() && res.ratio.is_none_or(|r| r >= res.constant))
        }
        Cmd::Sharpness { gauge, start, k_max, depth_cap, out } => {
            let g = usage(Gauge::parse(&gauge).map_err(Into::into))?;
            let c = build_sharpness(&g, start, k_max, depth_cap)?;
            let mut t = Table::new(&["k", "f", "pieces", "f_measure"]);
            for l in &c.levels {
                t.push(vec![
                    l.k.to_string(),
                    num(l.f),
                    l.pieces.len().to_string(),
                    num(conical_core::exact::to_f64(&l.f_measure)),
                ]);
            }
            t.emit(out.as_deref())?;
            Ok(true)
        }
        Cmd::GridMeasure { s, t, out } => {
            let g = grid_measure(s, t)?;
            let mut tab = Table::new(&["level", "side", "mass", "slope"]);
            for (i, (side, mass, slope)) in g.coded_square_slopes().into_iter().enumerate() {
                tab.push(vec![(i + 1).to_string(), num(side), num(mass), num(slope)]);
            }
            tab.emit(out.as_deref())?;
            eprintln!("predicted conical dimension {:.6}", g.predicted_conical_dim());
            Ok(true)
        }
        Cmd::ConeSearch { system, alpha, m, lmax, seed } => {
            let s = usage(load_system(&system))?;
            let a = if alpha == "auto" {
                (1.0 - 3.0 * s.max_ratio()) / 10.0
            } else {
                usage(alpha.parse::<f64>().map_err(|e| anyhow!("bad alpha `{alpha}`: {e}")))?
            };
            let nets = ConeNets::for_aperture(s.dim(), m, a)?;
            eprintln!("alpha {a:.6}: {} subspaces x {} directions", nets.subspaces.len(), nets.directions.len());
            match cone_inclusion_search(&s, m, a, lmax, &nets) {
                Ok(r) => {
                    let audit = audit_cone_search(&s, &r, &nets, 1000, seed)?;
                    println!("found h = {} at level {} (margin {})", r.h, r.level, num(r.margin));
                    println!("audit: {} violations in {} samples", audit.violations, audit.checked);
                    Ok(audit.violations == 0)
                }
                Err(CoreError::NotFound(msg)) => {
                    println!("{msg}");
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Verify { ids, seed, cohort, max_cells, out } => {
            let ids = usage(parse_ids(&ids))?;
            run_experiments(&ids, &Params { seed, cohort, max_cells }, out.as_deref())
        }
        Cmd::Run { config } => {
            let text = usage(fs::read_to_string(&config).with_context(|| format!("reading {}", config.display())))?;
            let c = usage(parse_config(&text))?;
            run_experiments(&c.experiments, &c.params, c.output.as_deref())
        }
    }
}

fn run_experiments(ids: &[&str], p: &Params, out: Option<&Path>) -> Result<bool> {
    if let Some(d) = out {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let mut all = true;
    for id in ids {
        let o: Outcome = experiments::run(id, p)?;
        println!("{}", o.line());
        if let Some(d) = out {
            o.table.emit(Some(&d.join(format!("{}.csv", o.id))))?;
            append_index(d, o.id, o.passed, &o.summary)?;
        }
        all &= o.passed;
    }
    Ok(all)
}

fn resolution(p: &PointArgs) -> impl FnMut(usize, f64) -> Resolution {
    let (extra, cells) = (p.extra_depth, p.max_cells);
    move |_, r| Resolution { depth_cap: (-r.log2()).max(0.0).ceil() as u32 + extra, max_cells: cells }
}

fn slope_rows(t: &mut Table, i: usize, entries: &[conical_core::dimension::SlopeEntry]) {
    for e in entries {
        t.push(vec![
            i.to_string(),
            num(e.scale),
            num(e.bound.lower),
            num(e.bound.upper),
            opt(e.slope.lo),
            opt(e.slope.hi),
        ]);
    }
}

fn codings(s: &SelfSimilarSystem, p: &PointArgs) -> Result<Vec<Coding>> {
    match &p.codings {
        Some(f) => {
            let text = usage(fs::read_to_string(f).with_context(|| format!("reading {}", f.display())))?;
            let mut v = Vec::new();
            for (no, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let c: Coding = usage(line.parse().map_err(|e| anyhow!("line {}: {e}", no + 1)))?;
                usage(c.validate(s.kappa()).map_err(|e| anyhow!("line {}: {e}", no + 1)))?;
                v.push(c);
            }
            Ok(v)
        }
        None => Ok((0..p.count)
            .map(|i| Coding::finite(s.sample_word(p.depth, conical_core::rng::derive_seed(p.seed, i as u64))))
            .collect()),
    }
}

/// `3^-1..3^-40`, `0.28:40` (0.28^1..0.28^40) or `0.5,0.25,0.1`.
fn parse_scales(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let pow = |t: &str| -> Result<(f64, i32)> {
            let (base, e) = t.trim().split_once('^').ok_or_else(|| anyhow!("expected b^-k in `{t}`"))?;
            Ok((base.trim().parse()?, e.trim().parse()?))
        };
        let ((b1, e1), (b2, e2)) = (pow(a)?, pow(b)?);
        if b1 != b2 || b1 <= 1.0 {
            bail!("scale range needs one base > 1, got `{s}`");
        }
        let (lo, hi) = (e1.max(e2), e1.min(e2));
        if lo >= 0 {
            bail!("scale exponents must be negative in `{s}`");
        }
        return Ok((hi..=lo).rev().map(|k| b1.powi(k)).collect());
    }
    if let Some((rho, k)) = s.split_once(':') {
        let rho: f64 = rho.trim().parse()?;
        let k: u32 = k.trim().parse()?;
        return Ok(conical_core::dimension::geometric_scales(rho, k)?);
    }
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow!("bad scale `{t}`: {e}")))
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() || v.iter().any(|r| r.is_nan() || *r <= 0.0) {
        bail!("scales must be positive");
    }
    Ok(v)
}

fn parse_direction(s: &str, n: usize) -> Result<Direction> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow!("bad coordinate `{t}`: {e}")))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        bail!("direction has {} coordinates, points have {n}", v.len());
    }
    Ok(Direction::normalize(Vector::new(&v)?)?)
}

fn read_points(path: &Path) -> Result<WeightedPoints> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_path(path)?;
    let (mut pts, mut ws, mut n) = (Vec::new(), Vec::new(), None);
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("row {}", i + 1))?;
        if vals.len() < 2 {
            bail!("row {}: need coordinates and a weight", i + 1);
        }
        let d = vals.len() - 1;
        if *n.get_or_insert(d) != d {
            bail!("row {}: expected {} coordinates", i + 1, n.unwrap());
        }
        pts.push(Vector::new(&vals[..d])?);
        ws.push(vals[d]);
    }
    let Some(n) = n else { bail!("no points in {}", path.display()) };
    Ok(WeightedPoints::new(n, pts, ws)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_forms() {
        let v = parse_scales("3^-1..3^-4").unwrap();
        assert_eq!(v.len(), 4);
        assert!((v[3] - 1.0 / 81.0).abs() < 1e-15);
        assert_eq!(parse_scales("0.5,0.25").unwrap(), vec![0.5, 0.25]);
        assert_eq!(parse_scales("0.5:3").unwrap().len(), 3);
        assert!(parse_scales("3^1..3^4").is_err());
        assert!(parse_scales("0,-1").is_err());
    }
}
