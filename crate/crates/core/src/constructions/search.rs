use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    ball_disposition, direction_net, in_half_cone, in_plane_cone, subspace_net, ConeRegion, Direction, Disposition,
    HalfCone, PlaneCone, Subspace, Vector, PAD,
};
use crate::math;
use crate::rng;
use crate::symbolic::{Coding, SelfSimilarSystem, Similitude, SymbolWord};

/// Extra slack added to the strict exponent bounds.
pub const EXPONENT_SLACK: f64 = 1e-6;

/// The finite families V_1..V_M1 and θ_1..θ_M2 for a given aperture α.
///
/// Every V lies within asin α − asin(α/2) of some V_i, so X(0,V_i,α/2) ⊂ X(0,V,α);
/// every θ lies within acos(α/2) − acos α of some θ_k, so H(0,θ,α) ⊂ H(0,θ_k,α/2).
/// For α ≥ 1 the half-space cone is empty and no directions are needed.
#[derive(Clone, Debug)]
pub struct ConeNets {
    pub alpha: f64,
    pub m: usize,
    pub subspaces: Vec<Subspace>,
    pub directions: Vec<Direction>,
}

impl ConeNets {
    pub fn for_aperture(n: usize, m: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid("alpha", "need 0 < alpha <= 1"));
        }
        let subspaces = if m == 0 {
            alloc::vec![Subspace::full(n)]
        } else {
            let dv = math::asin(alpha) - math::asin(alpha / 2.0);
            subspace_net(n, m, 2.0 * dv * (1.0 - 1e-9))?
        };
        let directions = if alpha >= 1.0 {
            Vec::new()
        } else {
            let dt = math::acos(alpha / 2.0) - math::acos(alpha);
            direction_net(n, 2.0 * dt * (1.0 - 1e-9))?
        };
        Ok(ConeNets { alpha, m, subspaces, directions })
    }

    /// Number of (V, θ) pairs the search has to cover.
    pub fn pairs(&self) -> usize {
        self.subspaces.len() * self.directions.len().max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeWitness {
    pub subspace: usize,
    pub direction: Option<usize>,
    pub word: SymbolWord,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeSearchResult {
    pub alpha: f64,
    pub m: usize,
    pub level: usize,
    pub h: SymbolWord,
    pub witnesses: Vec<ConeWitness>,
    pub margin: f64,
}

/// Witness cells are searched down to this depth; deeper witnesses are not reported.
pub const WITNESS_DEPTH: usize = 10;

/// Enclosures of all cylinders up to a fixed level; level k is stored in lex order,
/// so the children of index i at level k are κi..κi+κ at level k+1.
struct Tree {
    kappa: usize,
    centers: Vec<Vec<Vector>>,
    radii: Vec<Vec<f64>>,
}

impl Tree {
    fn new(system: &SelfSimilarSystem, l: usize) -> Self {
        let b = system.attractor_bound();
        let mut maps = alloc::vec![Similitude::identity(system.dim())];
        let mut centers = Vec::with_capacity(l + 1);
        let mut radii = Vec::with_capacity(l + 1);
        for k in 0..=l {
            centers.push(maps.iter().map(|f| f.apply(&b.center)).collect());
            radii.push(maps.iter().map(|f| f.ratio * b.radius).collect());
            if k < l {
                maps = maps.iter().flat_map(|f| system.maps().iter().map(move |g| f.compose(g))).collect();
            }
        }
        Tree { kappa: system.kappa(), centers, radii }
    }

    fn word(&self, mut idx: usize, k: usize) -> SymbolWord {
        let mut s = alloc::vec![0u8; k];
        for i in (0..k).rev() {
            s[i] = (idx % self.kappa) as u8 + 1;
            idx /= self.kappa;
        }
        SymbolWord::from_symbols(s)
    }

    /// Lex-first node (level, index) whose ball, offset by the cell (ch, rh), is Inside `reg`.
    fn first_inside(
        &self,
        ch: &Vector,
        rh: f64,
        reg: &ConeRegion,
        stack: &mut Vec<(usize, usize)>,
    ) -> Option<(usize, usize)> {
        let l = self.centers.len() - 1;
        stack.clear();
        stack.push((0, 0));
        while let Some((k, i)) = stack.pop() {
            let d = self.centers[k][i] - *ch;
            match ball_disposition(&d, self.radii[k][i] + rh, reg) {
                Disposition::Outside => {}
                Disposition::Inside => return Some((k, i)),
                Disposition::Unknown => {
                    if k < l {
                        for a in (0..self.kappa).rev() {
                            stack.push((k + 1, i * self.kappa + a));
                        }
                    }
                }
            }
        }
        None
    }
}

/// Level-l cylinders in lex order with their enclosing balls.
struct Cells<'a> {
    system: &'a SelfSimilarSystem,
    maps: Vec<Similitude>,
    digits: Vec<u8>,
    started: bool,
}

impl<'a> Cells<'a> {
    fn new(system: &'a SelfSimilarSystem, l: usize) -> Self {
        let mut maps = alloc::vec![Similitude::identity(system.dim())];
        for k in 0..l {
            let f = maps[k].compose(&system.maps()[0]);
            maps.push(f);
        }
        Cells { system, maps, digits: alloc::vec![0; l], started: false }
    }

    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        let kappa = self.system.kappa() as u8;
        let l = self.digits.len();
        let mut k = l;
        while k > 0 && self.digits[k - 1] + 1 == kappa {
            k -= 1;
        }
        if k == 0 {
            return false;
        }
        self.digits[k - 1] += 1;
        for d in &mut self.digits[k..] {
            *d = 0;
        }
        for i in k - 1..l {
            self.maps[i + 1] = self.maps[i].compose(&self.system.maps()[self.digits[i] as usize]);
        }
        true
    }

    fn word(&self) -> SymbolWord {
        SymbolWord::from_symbols(self.digits.iter().map(|d| d + 1).collect())
    }

    fn ball(&self) -> (Vector, f64) {
        let b = self.system.attractor_bound();
        let f = &self.maps[self.digits.len()];
        (f.apply(&b.center), f.ratio * b.radius)
    }
}

fn region(v: &Subspace, theta: Option<&Direction>, a: f64) -> Result<ConeRegion> {
    let o = Vector::zeros(v.ambient_dim());
    let mut r = ConeRegion { center: o, radius: f64::INFINITY, include: None, exclude: None }
        .with_include(PlaneCone::new(o, *v, a, 1.0)?)?;
    if let Some(t) = theta {
        r = r.with_exclude(HalfCone::new(o, *t, a)?)?;
    }
    Ok(r)
}

fn slack(d: &Vector, rho: f64, v: &Subspace, theta: Option<&Direction>, a: f64) -> f64 {
    let near = d.norm() - rho;
    let mut s = if v.codim() == 0 { near } else { a * near - v.dist(d) - rho };
    if let Some(t) = theta {
        s = s.min(a * near - d.dot(t.unit()) - rho);
    }
    s
}

/// Searches levels 1..=l_max for a word h such that for every net pair (V_i, θ_k)
/// some j of the same level satisfies E_j ⊂ X(y,V_i,α/2) ∖ H(y,θ_k,α/2) for all
/// y ∈ E_h, certified on the enclosing balls of E_h and E_j.
///
/// Words h and witnesses j are both the lexicographically first ones.
pub fn cone_inclusion_search(
    system: &SelfSimilarSystem,
    m: usize,
    alpha: f64,
    l_max: usize,
    nets: &ConeNets,
) -> Result<ConeSearchResult> {
    let n = system.dim();
    if m >= n {
        return Err(invalid("m", "need 0 <= m < n"));
    }
    if nets.m != m || nets.alpha != alpha {
        return Err(invalid("nets", "built for a different (m, alpha)"));
    }
    if l_max == 0 {
        return Err(invalid("l_max", "must be at least 1"));
    }
    let a = alpha / 2.0;
    let nd = nets.directions.len().max(1);
    let mut regions = Vec::with_capacity(nets.pairs());
    for v in &nets.subspaces {
        if nets.directions.is_empty() {
            regions.push(region(v, None, a)?);
        }
        for t in &nets.directions {
            regions.push(region(v, Some(t), a)?);
        }
    }
    let total = regions.len();
    // Pairs that failed recently are tried first.
    let mut order: Vec<usize> = (0..total).collect();
    let mut found = alloc::vec![(0usize, 0usize); total];
    let mut stack = Vec::new();
    let mut best: (usize, usize, SymbolWord) = (0, 0, SymbolWord::empty());
    let mut tree = Tree::new(system, 0);

    for l in 1..=l_max {
        if l <= WITNESS_DEPTH {
            tree = Tree::new(system, l);
        }
        let mut cells = Cells::new(system, l);
        'h: while cells.advance() {
            let (ch, rh) = cells.ball();
            for (done, pos) in (0..total).enumerate() {
                let p = order[pos];
                match tree.first_inside(&ch, rh, &regions[p], &mut stack) {
                    Some(node) => found[p] = node,
                    None => {
                        if done > best.0 {
                            best = (done, l, cells.word());
                        }
                        order[..=pos].rotate_right(1);
                        continue 'h;
                    }
                }
            }
            let witnesses: Vec<ConeWitness> = (0..total)
                .map(|p| {
                    let (i, k) = (p / nd, p % nd);
                    let (depth, j) = found[p];
                    let t = nets.directions.get(k);
                    let d = tree.centers[depth][j] - ch;
                    let mut word = tree.word(j, depth);
                    for _ in depth..l {
                        word.push(1);
                    }
                    ConeWitness {
                        subspace: i,
                        direction: t.map(|_| k),
                        word,
                        margin: slack(&d, tree.radii[depth][j] + rh, &nets.subspaces[i], t, a),
                    }
                })
                .collect();
            let margin = witnesses.iter().map(|w| w.margin).fold(f64::INFINITY, f64::min);
            return Ok(ConeSearchResult { alpha, m, level: l, h: cells.word(), witnesses, margin });
        }
    }
    let covered = if best.1 == 0 {
        0
    } else {
        let b = system.attractor_bound();
        let f = system.compose(&best.2)?;
        let (ch, rh) = (f.apply(&b.center), f.ratio * b.radius);
        regions.iter().filter(|r| tree.first_inside(&ch, rh, r, &mut stack).is_some()).count()
    };
    Err(Error::NotFound(format!(
        "no cone-inclusion word up to level {l_max}; best word {} at level {} covers {covered}/{total} net pairs",
        best.2, best.1
    )))
}

/// Outcome of the pointwise random audit of a search result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeAudit {
    pub checked: usize,
    pub violations: usize,
}

fn random_point(system: &SelfSimilarSystem, prefix: &SymbolWord, r: &mut rng::Rng) -> Result<Vector> {
    let tail = system.sample_word_with(40, r);
    system.point(&Coding::finite(prefix.concat(&tail)))
}

/// Draws `samples` points y ∈ E_h and, per witness, `samples` points z ∈ E_j and checks
/// z ∈ X(y,V_i,α/2) ∖ H(y,θ_k,α/2) with the exact pointwise predicates.
pub fn audit_cone_search(
    system: &SelfSimilarSystem,
    result: &ConeSearchResult,
    nets: &ConeNets,
    samples: usize,
    seed: u64,
) -> Result<ConeAudit> {
    let a = result.alpha / 2.0;
    let mut r = rng::rng(seed);
    let ys = (0..samples).map(|_| random_point(system, &result.h, &mut r)).collect::<Result<Vec<_>>>()?;
    let mut pools: BTreeMap<SymbolWord, Vec<Vector>> = BTreeMap::new();
    let mut out = ConeAudit { checked: 0, violations: 0 };
    for w in &result.witnesses {
        if !pools.contains_key(&w.word) {
            let zs = (0..samples).map(|_| random_point(system, &w.word, &mut r)).collect::<Result<Vec<_>>>()?;
            pools.insert(w.word.clone(), zs);
        }
        let zs = &pools[&w.word];
        let v = nets.subspaces.get(w.subspace).ok_or_else(|| invalid("witness", "subspace index out of range"))?;
        let t = match w.direction {
            Some(k) => Some(*nets.directions.get(k).ok_or_else(|| invalid("witness", "direction index out of range"))?),
            None => None,
        };
        for (y, z) in ys.iter().zip(zs) {
            let inc = in_plane_cone(z, &PlaneCone::new(*y, *v, a, 1.0)?)?;
            let exc = match &t {
                Some(t) => in_half_cone(z, &HalfCone::new(*y, *t, a)?)?,
                None => false,
            };
            out.checked += 1;
            if !inc || exc {
                out.violations += 1;
            }
        }
    }
    Ok(out)
}

/// A word k and δ > 0 with dist(E_{ik}, E ∖ E_i) > δ diam(E_i).
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationResult {
    pub k: SymbolWord,
    pub delta: f64,
    pub audit_checked: usize,
    pub audit_failed: usize,
}

#[derive(Clone)]
struct Ball {
    map: Similitude,
}

#[derive(Clone)]
struct DistCtx<'a> {
    system: &'a SelfSimilarSystem,
    center: Vector,
    radius: f64,
    tol: f64,
}

impl DistCtx<'_> {
    fn ball(&self, b: &Ball) -> (Vector, f64) {
        (b.map.apply(&self.center), b.map.ratio * self.radius)
    }

    // Lowers `best` to a certified lower bound of dist(A, B) when that is smaller.
    fn lower(&self, a: &Ball, b: &Ball, best: &mut f64) {
        let (ca, ra) = self.ball(a);
        let (cb, rb) = self.ball(b);
        let l = ca.dist(&cb) * (1.0 - PAD) - (ra + rb) * (1.0 + PAD);
        if l >= *best {
            return;
        }
        if ra + rb <= self.tol {
            *best = l.max(0.0);
            return;
        }
        let (big, small, swap) = if ra >= rb { (a, b, false) } else { (b, a, true) };
        for g in self.system.maps() {
            let c = Ball { map: big.map.compose(g) };
            if swap {
                self.lower(small, &c, best);
            } else {
                self.lower(&c, small, best);
            }
            if *best <= 0.0 {
                return;
            }
        }
    }

    // Lower bound of dist(E_{ik}, E ∖ E_i) over the other cylinders of length |i|.
    fn separation(&self, i: &SymbolWord, k: &SymbolWord) -> Result<f64> {
        let inner = Ball { map: self.system.compose(&i.concat(k))? };
        let mut best = f64::INFINITY;
        for o in SymbolWord::all_of_length(self.system.kappa(), i.len()) {
            if &o == i {
                continue;
            }
            let other = Ball { map: self.system.compose(&o)? };
            self.lower(&inner, &other, &mut best);
            if best <= 0.0 {
                return Ok(0.0);
            }
        }
        Ok(best)
    }
}

/// Searches k by length then lexicographically up to `k_max` symbols.
///
/// δ is certified at the first level: for every symbol a,
/// dist(E_{ak}, E ∖ E_a) > δ · diam(E_a), with diam(E_a) bounded by 2 r_a R.
/// The condition is then re-checked for every i of length ≤ 3.
pub fn separation_word_search(system: &SelfSimilarSystem, k_max: usize) -> Result<SeparationResult> {
    if !system.osc_asserted() {
        return Err(invalid("system", "separation search needs the open set condition"));
    }
    let b = system.attractor_bound();
    let diam = 2.0 * b.radius;
    let ctx = DistCtx { system, center: b.center, radius: b.radius, tol: 0.0 };
    let kappa = system.kappa();
    for len in 0..=k_max {
        for k in SymbolWord::all_of_length(kappa, len) {
            let mut delta = f64::INFINITY;
            for a in 1..=kappa as u8 {
                let i = SymbolWord::from_symbols(alloc::vec![a]);
                let r = system.map(a).ratio;
                let c = DistCtx { tol: 1e-4 * r * b.radius, ..ctx.clone() };
                let d = c.separation(&i, &k)?;
                delta = delta.min(d / (r * diam));
                if !(delta > 0.0) {
                    break;
                }
            }
            if delta > 0.0 && delta.is_finite() {
                let delta = delta * (1.0 - 1e-9);
                let (mut checked, mut failed) = (0, 0);
                for il in 1..=3 {
                    for i in SymbolWord::all_of_length(kappa, il) {
                        let r = system.compose(&i)?.ratio;
                        let c = DistCtx { tol: 1e-4 * r * b.radius, ..ctx.clone() };
                        let d = c.separation(&i, &k)?;
                        checked += 1;
                        if !(d > delta * r * diam) {
                            failed += 1;
                        }
                    }
                }
                return Ok(SeparationResult { k, delta, audit_checked: checked, audit_failed: failed });
            }
        }
    }
    Err(Error::NotFound(format!("no separation word of length <= {k_max}")))
}

/// Exponent bounds from a cone-inclusion word and a separation word.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem41Exponents {
    /// 2 log γ / log(1 − μ(E_h)) with γ = p_min^l.
    pub s1_bound: f64,
    /// |k| log p_min / log(1 − μ(E_k)); zero for the empty word.
    pub s2_bound: f64,
    pub s1: f64,
    pub s2: f64,
    pub s: f64,
}

pub fn theorem41_exponents(
    system: &SelfSimilarSystem,
    search: &ConeSearchResult,
    sep: &SeparationResult,
) -> Result<Theorem41Exponents> {
    let p = system.min_weight();
    let gamma_ln = search.level as f64 * math::ln(p);
    let mh = system.cylinder_weight(&search.h)?;
    if !(mh > 0.0 && mh < 1.0) {
        return Err(invalid("search", "mu(E_h) must lie in (0, 1)"));
    }
    let s1_bound = 2.0 * gamma_ln / math::ln(1.0 - mh);
    let s2_bound = if sep.k.is_empty() {
        0.0
    } else {
        let mk = system.cylinder_weight(&sep.k)?;
        sep.k.len() as f64 * math::ln(p) / math::ln(1.0 - mk)
    };
    let s1 = s1_bound + EXPONENT_SLACK;
    let s2 = s2_bound + EXPONENT_SLACK;
    Ok(Theorem41Exponents { s1_bound, s2_bound, s1, s2, s: s1 + s2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{cantor13, prop43, unit_interval};
    use alloc::string::ToString;

    #[test]
    fn nets_cover_the_reduction() {
        let nets = ConeNets::for_aperture(2, 1, 0.016).unwrap();
        assert!(nets.subspaces.len() >= 190 && nets.subspaces.len() <= 200);
        assert!(nets.directions.len() >= 380 && nets.directions.len() <= 400);
        assert!(ConeNets::for_aperture(1, 0, 1.0).unwrap().directions.is_empty());
    }

    #[test]
    fn cantor_full_cone_first_level() {
        let s = cantor13();
        let nets = ConeNets::for_aperture(1, 0, 1.0).unwrap();
        let r = cone_inclusion_search(&s, 0, 1.0, 3, &nets).unwrap();
        assert_eq!(r.level, 1);
        assert_eq!(r.h.to_string(), "1");
        assert_eq!(r.witnesses[0].word.to_string(), "2");
        let audit = audit_cone_search(&s, &r, &nets, 1000, 1).unwrap();
        assert_eq!(audit.violations, 0);
    }

    #[test]
    fn cantor_half_space_needs_two_levels() {
        let s = cantor13();
        let nets = ConeNets::for_aperture(1, 0, 0.5).unwrap();
        let r = cone_inclusion_search(&s, 0, 0.5, 3, &nets).unwrap();
        assert_eq!(r.level, 2);
        assert_eq!(r.witnesses.len(), 2);
        assert!(r.margin > 0.0);
        assert_eq!(audit_cone_search(&s, &r, &nets, 1000, 2).unwrap().violations, 0);
    }

    #[test]
    fn line_support_fails() {
        // prop43 collapsed onto the x-axis is impossible; use a planar copy of cantor13.
        let maps = cantor13()
            .maps()
            .iter()
            .map(|f| Similitude::scaling(f.ratio, Vector::xy(f.translation[0], 0.0)).unwrap())
            .collect();
        let s = SelfSimilarSystem::new("flat", maps, alloc::vec![0.5, 0.5], true).unwrap();
        let nets = ConeNets::for_aperture(2, 1, 0.2).unwrap();
        let e = cone_inclusion_search(&s, 1, 0.2, 4, &nets).unwrap_err();
        assert!(matches!(e, Error::NotFound(_)));
    }

    #[test]
    fn separation_examples() {
        let c = separation_word_search(&cantor13(), 3).unwrap();
        assert!(c.k.is_empty());
        assert!(c.delta >= 0.9 && c.delta < 1.0, "{}", c.delta);
        assert_eq!(c.audit_failed, 0);

        let u = separation_word_search(&unit_interval(), 3).unwrap();
        assert_eq!(u.k.to_string(), "12");
        assert!(u.delta > 0.2499 && u.delta <= 0.25, "{}", u.delta);

        let p = separation_word_search(&prop43(0.28, 0.1).unwrap(), 2).unwrap();
        assert!(p.k.is_empty());
        assert!(p.delta > 0.0);
    }

    #[test]
    fn exponent_examples() {
        let s = cantor13();
        let search = ConeSearchResult {
            alpha: 1.0,
            m: 0,
            level: 1,
            h: SymbolWord::from_symbols(alloc::vec![1]),
            witnesses: Vec::new(),
            margin: 0.0,
        };
        let sep = SeparationResult { k: SymbolWord::empty(), delta: 0.9, audit_checked: 0, audit_failed: 0 };
        let e = theorem41_exponents(&s, &search, &sep).unwrap();
        assert!(math::abs(e.s1_bound - 2.0) < 1e-12);
        assert_eq!(e.s2_bound, 0.0);
        assert!(e.s1 > e.s1_bound && e.s2 > 0.0);

        let sep = SeparationResult { k: SymbolWord::from_symbols(alloc::vec![1, 2]), ..sep };
        let e = theorem41_exponents(&s, &search, &sep).unwrap();
        assert!(e.s1_bound > 0.0 && e.s2_bound > 0.0 && e.s.is_finite());
    }
}
