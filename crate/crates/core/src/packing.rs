//! Disjoint ball selections capturing a fixed share of a finite weighted set.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{direction_net, Direction, Vector};
use crate::math;

/// A finite measure Σ w_i δ_{x_i}.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoints {
    n: usize,
    points: Vec<Vector>,
    weights: Vec<f64>,
}

impl WeightedPoints {
    pub fn new(n: usize, points: Vec<Vector>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(invalid("weights", "one weight per point"));
        }
        for p in &points {
            p.check_dim(n)?;
            if !p.is_finite() {
                return Err(invalid("points", "coordinates must be finite"));
            }
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(invalid("weights", "must be positive and finite"));
        }
        Ok(WeightedPoints { n, points, weights })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Indices of a greedy maximal packing by closed balls B(x, ρ), in input order.
///
/// Selected centers are pairwise more than 2ρ apart and every point lies within 2ρ
/// of some selected center.
pub fn maximal_packing(pts: &WeightedPoints, rho: f64) -> Result<Vec<usize>> {
    if !(rho > 0.0) {
        return Err(invalid("rho", "must be positive"));
    }
    let mut out: Vec<usize> = Vec::new();
    for (i, p) in pts.points.iter().enumerate() {
        if out.iter().all(|&j| p.dist(&pts.points[j]) > 2.0 * rho) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Greedy coloring of the conflict graph on `centers` (edges at distance ≤ separation).
///
/// Points inside one class are pairwise strictly farther apart than `separation`.
/// Returns the classes (lists of indices into `centers`) and the maximum degree.
pub fn color_decompose(centers: &[Vector], separation: f64) -> Result<(Vec<Vec<usize>>, usize)> {
    if !(separation > 0.0) {
        return Err(invalid("separation", "must be positive"));
    }
    let k = centers.len();
    let mut color = alloc::vec![usize::MAX; k];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut max_deg = 0;
    for i in 0..k {
        let mut used = Vec::new();
        let mut deg = 0;
        for j in 0..k {
            if j != i && centers[i].dist(&centers[j]) <= separation {
                deg += 1;
                if color[j] != usize::MAX {
                    used.push(color[j]);
                }
            }
        }
        max_deg = max_deg.max(deg);
        let c = (0..).find(|c| !used.contains(c)).unwrap_or(0);
        color[i] = c;
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(i);
    }
    Ok((classes, max_deg))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selected {
    /// Index of the center y_x in the input.
    pub index: usize,
    pub center: Vector,
    pub radius: f64,
    pub captured: f64,
    /// Direction used for the capture test.
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackingResult {
    pub selected: Vec<Selected>,
    pub total: f64,
    /// Σ captured / total; `None` on empty input.
    pub ratio: Option<f64>,
    /// The certified lower bound on `ratio`.
    pub constant: f64,
    pub classes: usize,
    /// Index of the color class the selection came from.
    pub class: usize,
    pub max_degree: usize,
    /// Index of the chosen net direction (cone packing only).
    pub bin: Option<usize>,
}

impl PackingResult {
    /// |y − y'| > r + r' for every selected pair.
    pub fn is_disjoint(&self) -> bool {
        let s = &self.selected;
        (0..s.len()).all(|i| (i + 1..s.len()).all(|j| s[i].center.dist(&s[j].center) > s[i].radius + s[j].radius))
    }
}

/// C(n) = 41ⁿ bounds the number of conflicting packing centers.
pub fn overlap_constant(n: usize) -> f64 {
    math::powi(41.0, n as i32)
}

/// c(n) = 1/(2·41ⁿ).
pub fn halfspace_constant(n: usize) -> f64 {
    1.0 / (2.0 * overlap_constant(n))
}

/// c(n, α) = c(n)/M with M the size of the direction net at resolution 2α.
pub fn cone_constant(n: usize, alpha: f64) -> Result<f64> {
    Ok(halfspace_constant(n) / cone_net(n, alpha)?.len() as f64)
}

/// Directions ζ_j such that every θ lies within angle α of one of them.
pub fn cone_net(n: usize, alpha: f64) -> Result<Vec<Direction>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", "need 0 < alpha <= 1"));
    }
    direction_net(n, 2.0 * alpha)
}

/// Weight of the points z with |z − y| ≤ r and (z − y)·θ ≤ α|z − y|.
pub fn captured_weight(pts: &WeightedPoints, y: &Vector, r: f64, theta: &Direction, alpha: f64) -> f64 {
    pts.points
        .iter()
        .zip(&pts.weights)
        .filter(|(z, _)| {
            let d = **z - *y;
            let n = d.norm();
            n <= r && d.dot(theta.unit()) <= alpha * n
        })
        .map(|(_, w)| *w)
        .sum()
}

fn check_radii(pts: &WeightedPoints, radii: &[f64], big_r: f64) -> Result<()> {
    if !(big_r > 0.0) || !big_r.is_finite() {
        return Err(invalid("R", "must be positive"));
    }
    if radii.len() != pts.len() {
        return Err(invalid("radii", "one radius per point"));
    }
    if radii.iter().any(|r| !(*r >= big_r && *r <= 2.0 * big_r)) {
        return Err(invalid("radii", "each r_x must lie in [R, 2R]"));
    }
    Ok(())
}

// Runs the selection on the subset `idx` while measuring captures on all of `pts`.
fn select(
    pts: &WeightedPoints,
    idx: &[usize],
    radii: &[f64],
    big_r: f64,
    theta: &Direction,
    capture: impl Fn(usize, &Vector, f64) -> f64,
) -> Result<(Vec<Selected>, usize, usize, usize)> {
    let sub = WeightedPoints {
        n: pts.n,
        points: idx.iter().map(|&i| pts.points[i]).collect(),
        weights: idx.iter().map(|&i| pts.weights[i]).collect(),
    };
    if sub.is_empty() {
        return Ok((Vec::new(), 0, 0, 0));
    }
    let f0 = maximal_packing(&sub, big_r / 4.0)?;
    let centers: Vec<Vector> = f0.iter().map(|&i| sub.points[i]).collect();
    let (classes, max_deg) = color_decompose(&centers, 5.0 * big_r)?;

    // Points of A within R/2 of each packing center; covering weight per class.
    let near =
        |c: &Vector| -> Vec<usize> { (0..sub.len()).filter(|&j| sub.points[j].dist(c) <= big_r / 2.0).collect() };
    let mut best = (f64::NEG_INFINITY, 0);
    for (ci, class) in classes.iter().enumerate() {
        let mut seen = alloc::vec![false; sub.len()];
        let mut w = 0.0;
        for &k in class {
            for j in near(&centers[k]) {
                if !seen[j] {
                    seen[j] = true;
                    w += sub.weights[j];
                }
            }
        }
        if w > best.0 {
            best = (w, ci);
        }
    }

    let mut selected = Vec::new();
    for &k in &classes[best.1] {
        let mut pick: Option<usize> = None;
        for j in near(&centers[k]) {
            let better = match pick {
                None => true,
                Some(p) => sub.points[j].dot(theta.unit()) > sub.points[p].dot(theta.unit()),
            };
            if better {
                pick = Some(j);
            }
        }
        let j = pick.ok_or_else(|| Error::NotFound("packing center lost".into()))?;
        let i = idx[j];
        let y = pts.points[i];
        selected.push(Selected {
            index: i,
            center: y,
            radius: radii[i],
            captured: capture(i, &y, radii[i]),
            direction: *theta,
        });
    }
    Ok((selected, classes.len(), best.1, max_deg))
}

fn finish(
    selected: Vec<Selected>,
    total: f64,
    constant: f64,
    (classes, class, max_degree): (usize, usize, usize),
    bin: Option<usize>,
) -> PackingResult {
    let ratio = if selected.is_empty() && total == 0.0 {
        None
    } else {
        Some(selected.iter().map(|s| s.captured).sum::<f64>() / total)
    };
    PackingResult { selected, total, ratio, constant, classes, class, max_degree, bin }
}

/// Disjoint balls B(y, r_y) with Σ μ(B(y, r_y) ∖ H(y, θ)) ≥ c(n) μ(A).
pub fn halfspace_packing(pts: &WeightedPoints, radii: &[f64], big_r: f64, theta: &Direction) -> Result<PackingResult> {
    check_radii(pts, radii, big_r)?;
    theta.unit().check_dim(pts.n)?;
    let idx: Vec<usize> = (0..pts.len()).collect();
    let (sel, classes, class, deg) =
        select(pts, &idx, radii, big_r, theta, |_, y, r| captured_weight(pts, y, r, theta, 0.0))?;
    Ok(finish(sel, pts.total(), halfspace_constant(pts.n), (classes, class, deg), None))
}

/// Disjoint balls B(y, r_y) with Σ μ(B(y, r_y) ∖ H(y, θ_y, α)) ≥ c(n, α) μ(A).
///
/// Points are binned by the nearest net direction; the heaviest bin goes through
/// the half-space selection with its net direction.
pub fn cone_packing(
    pts: &WeightedPoints,
    radii: &[f64],
    big_r: f64,
    thetas: &[Direction],
    alpha: f64,
) -> Result<PackingResult> {
    check_radii(pts, radii, big_r)?;
    if thetas.len() != pts.len() {
        return Err(invalid("thetas", "one direction per point"));
    }
    let net = cone_net(pts.n, alpha)?;
    let constant = halfspace_constant(pts.n) / net.len() as f64;
    let mut bins: Vec<Vec<usize>> = alloc::vec![Vec::new(); net.len()];
    for (i, t) in thetas.iter().enumerate() {
        t.unit().check_dim(pts.n)?;
        let mut b = 0;
        for (j, z) in net.iter().enumerate() {
            if t.unit().dot(z.unit()) > t.unit().dot(net[b].unit()) {
                b = j;
            }
        }
        bins[b].push(i);
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (j, bin) in bins.iter().enumerate() {
        let w: f64 = bin.iter().map(|&i| pts.weights[i]).sum();
        if w > best.0 {
            best = (w, j);
        }
    }
    let zeta = net[best.1];
    let (mut sel, classes, class, deg) =
        select(pts, &bins[best.1], radii, big_r, &zeta, |i, y, r| captured_weight(pts, y, r, &thetas[i], alpha))?;
    for s in &mut sel {
        s.direction = thetas[s.index];
    }
    Ok(finish(sel, pts.total(), constant, (classes, class, deg), Some(best.1)))
}
