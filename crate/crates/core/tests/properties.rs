use conical_core::constructions::{build_sharpness, grid_measure, GridCell};
use conical_core::dimension::{gamma_of_coding, run_stats, Gauge};
use conical_core::exact::{self, Rational};
use conical_core::geometry::{
    ball_disposition, in_half_cone, in_plane_cone, ConeRegion, Direction, Disposition, HalfCone, Matrix, PlaneCone,
    Subspace, Vector,
};
use conical_core::packing::{cone_packing, halfspace_packing, WeightedPoints};
use conical_core::refinable::triadic::{cantor_measure, CantorWeights};
use conical_core::refinable::{measure_region, IfsMeasure, LocalizedMeasure, RefinableMeasure};
use conical_core::symbolic::{cantor13, prop43, Coding, SymbolWord};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn vec2() -> impl Strategy<Value = Vector> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Vector::xy(a, b))
}

fn word(kappa: u8, max_len: usize) -> impl Strategy<Value = SymbolWord> {
    prop::collection::vec(1..=kappa, 0..max_len).prop_map(SymbolWord::from_symbols)
}

fn point_in_ball(c: &Vector, rho: f64, u: f64, t: f64) -> Vector {
    let s = rho * u.sqrt();
    *c + Vector::xy(s * t.cos(), s * t.sin())
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn aperture_monotonicity(y in vec2(), t in 0.0..TAU, a1 in 0.01..1.0f64, a2 in 0.01..1.0f64) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let o = Vector::xy(0.0, 0.0);
        let d = Direction::angle(t);
        if in_half_cone(&y, &HalfCone::new(o, d, hi).unwrap()).unwrap() {
            prop_assert!(in_half_cone(&y, &HalfCone::new(o, d, lo).unwrap()).unwrap());
        }
        let v = Subspace::line(&d);
        if in_plane_cone(&y, &PlaneCone::new(o, v, lo, 1.0).unwrap()).unwrap() {
            prop_assert!(in_plane_cone(&y, &PlaneCone::new(o, v, hi, 1.0).unwrap()).unwrap());
        }
    }

    #[test]
    fn plane_cone_central_symmetry(x in vec2(), y in vec2(), t in 0.0..TAU, a in 0.05..1.0f64, beta in 1.0..2.0f64) {
        let c = PlaneCone::new(x, Subspace::line(&Direction::angle(t)), a, beta).unwrap();
        let mirror = x * 2.0 - y;
        let (p, q) = (in_plane_cone(&y, &c).unwrap(), in_plane_cone(&mirror, &c).unwrap());
        // Skip points whose defining inequality is within roundoff of equality.
        let z = y - x;
        let gap = (c.subspace.dist(&z) - a * z.norm().powf(beta)).abs();
        prop_assume!(gap > 1e-12);
        prop_assert_eq!(p, q);
    }

    #[test]
    fn disposition_is_sound(
        c in vec2(),
        rho in 0.001..1.0f64,
        r in 0.1..2.0f64,
        t in 0.0..TAU,
        a in 0.05..1.0f64,
        s in 0.0..TAU,
        b in 0.0..1.0f64,
        samples in prop::collection::vec((0.0..1.0f64, 0.0..TAU), 200),
    ) {
        let o = Vector::xy(0.1, -0.2);
        let region = ConeRegion::ball(o, r).unwrap()
            .with_include(PlaneCone::new(o, Subspace::line(&Direction::angle(t)), a, 1.0).unwrap()).unwrap()
            .with_exclude(HalfCone::new(o, Direction::angle(s), b).unwrap()).unwrap();
        let d = ball_disposition(&c, rho, &region);
        if d != Disposition::Unknown {
            for (u, th) in samples {
                let y = point_in_ball(&c, rho, u, th);
                prop_assert_eq!(region.contains(&y), d == Disposition::Inside);
            }
        }
    }

    #[test]
    fn cones_are_similarity_invariant(x in vec2(), y in vec2(), t in 0.0..TAU, rot in 0.0..TAU, lam in 0.1..10.0f64, a in 0.05..1.0f64) {
        let o = Matrix::rotation2(rot);
        let map = |p: &Vector| o.apply(&(*p - x)) * lam + x;
        let d = Direction::angle(t);
        let h = HalfCone::new(x, d, a).unwrap();
        let h2 = HalfCone::new(x, d.rotated(&o), a).unwrap();
        let c = PlaneCone::new(x, Subspace::line(&d), a, 1.0).unwrap();
        let c2 = PlaneCone::new(x, Subspace::line(&d).rotated(&o), a, 1.0).unwrap();
        let z = y - x;
        let margin = |v: f64| v.abs() > 1e-9 * z.norm().max(1e-300);
        if margin(z.dot(d.unit()) - a * z.norm()) {
            prop_assert_eq!(in_half_cone(&y, &h).unwrap(), in_half_cone(&map(&y), &h2).unwrap());
        }
        if margin(c.subspace.dist(&z) - a * z.norm()) {
            prop_assert_eq!(in_plane_cone(&y, &c).unwrap(), in_plane_cone(&map(&y), &c2).unwrap());
        }
    }

    #[test]
    fn net_inclusion(t in 0.0..TAU, a in 0.05..1.0f64, off in -1.0..1.0f64, y in vec2()) {
        let zeta = Direction::angle(t);
        let theta = Direction::angle(t + off * a);
        let o = Vector::xy(0.0, 0.0);
        if in_half_cone(&y, &HalfCone::new(o, theta, a).unwrap()).unwrap() {
            prop_assert!(in_half_cone(&y, &HalfCone::new(o, zeta, 0.0).unwrap()).unwrap());
        }
    }

    #[test]
    fn cylinder_weight_multiplies(w1 in word(3, 8), w2 in word(3, 8)) {
        let s = prop43(0.28, 0.1).unwrap();
        let a = s.cylinder_weight(&w1).unwrap() * s.cylinder_weight(&w2).unwrap();
        let b = s.cylinder_weight(&w1.concat(&w2)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn run_stats_match_brute_force(w in word(3, 60), n in 0usize..60) {
        prop_assume!(n <= w.len());
        let s = run_stats(&w, n).unwrap();
        let sym = w.symbols();
        let mut z = 0;
        for i in 0..n {
            for j in i..n {
                if sym[i..=j].iter().all(|&c| c == 1 || c == 2) {
                    z = z.max(j - i + 1);
                }
            }
        }
        prop_assert_eq!(s.z, z);
        let mut g = 0;
        while n + g < sym.len() && sym[n + g] == 2 {
            g += 1;
        }
        prop_assert_eq!(s.gamma, g);
        prop_assert!(s.z <= n);
        if n > 0 {
            prop_assert!(run_stats(&w, n - 1).unwrap().z <= s.z);
        }
    }

    #[test]
    fn gamma_of_periodic_coding(prefix in word(2, 20), period in word(2, 4), n in 0usize..30) {
        prop_assume!(!period.is_empty() && period.symbols().contains(&1));
        let c = Coding::periodic(prefix, period).unwrap();
        let long = c.word(n + 200).unwrap();
        let brute = long.symbols()[n..].iter().take_while(|&&s| s == 2).count();
        prop_assert_eq!(gamma_of_coding(&c, n).unwrap(), Some(brute));
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn cantor_enclosures_sandwich_and_shrink(k in 0i64..=243, j in 1i64..=3, jr in 1u32..=6, one_sided in any::<bool>()) {
        let w = CantorWeights::natural();
        let c = cantor13();
        let m = IfsMeasure::new(&c);
        let center = exact::to_f64(&exact::triadic(k, 5));
        let radius = exact::to_f64(&exact::triadic(j, jr));
        let q = |v: f64| Rational::from_float(v).unwrap();
        let left = if one_sided { q(center) } else { q(center) - q(radius) };
        let oracle = cantor_measure(&w, &left, &(q(center) + q(radius)));
        let cx = Vector::x(center);
        let mut region = ConeRegion::ball(cx, radius).unwrap();
        if one_sided {
            region = region.with_exclude(HalfCone::new(cx, Direction::axis(1, 0).flipped(), 0.0).unwrap()).unwrap();
        }
        let mut prev: Option<(f64, f64)> = None;
        for depth in [1, 3, 6, 10, 15] {
            let b = measure_region(&m, &region, depth).unwrap();
            prop_assert!(q(b.lower) <= oracle && oracle <= q(b.upper), "depth {depth}: {b:?}");
            if let Some((lo, hi)) = prev {
                prop_assert!(b.lower >= lo && b.upper <= hi);
            }
            prev = Some((b.lower, b.upper));
        }
        let all = measure_region(&m, &ConeRegion::ball(Vector::x(0.5), f64::INFINITY).unwrap(), 4).unwrap();
        prop_assert_eq!((all.lower, all.upper), (1.0, 1.0));
    }

    #[test]
    fn split_ball_brackets_whole(c in 0.0..1.0f64, r in 0.01..0.6f64, depth in 1u32..14) {
        let sys = cantor13();
        let m = IfsMeasure::new(&sys);
        let x = Vector::x(c);
        let e1 = Direction::axis(1, 0);
        let ball = ConeRegion::ball(x, r).unwrap();
        let whole = measure_region(&m, &ball, depth).unwrap();
        let left = measure_region(&m, &ball.with_exclude(HalfCone::new(x, e1, 0.0).unwrap()).unwrap(), depth).unwrap();
        let right = measure_region(&m, &ball.with_exclude(HalfCone::new(x, e1.flipped(), 0.0).unwrap()).unwrap(), depth).unwrap();
        prop_assert!(left.lower + right.lower <= whole.upper + 1e-15);
        prop_assert!(whole.lower <= left.upper + right.upper + 1e-15);
    }

    #[test]
    fn region_inclusion_is_monotone(seed in any::<u64>(), n in 2i32..12, t in 0.0..TAU, a1 in 0.05..1.0f64, a2 in 0.05..1.0f64) {
        let s = prop43(0.28, 0.1).unwrap();
        let coding = Coding::finite(s.sample_word(40, seed));
        let m = LocalizedMeasure::new(&s, &coding, 40).unwrap();
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let o = Vector::xy(0.0, 0.0);
        let r = 0.28f64.powi(n);
        let v = Subspace::line(&Direction::angle(t));
        let depth = n as u32 + 10;
        let small = measure_region(&m, &ConeRegion::ball(o, r).unwrap().with_include(PlaneCone::new(o, v, lo, 1.0).unwrap()).unwrap(), depth).unwrap();
        let large = measure_region(&m, &ConeRegion::ball(o, r).unwrap().with_include(PlaneCone::new(o, v, hi, 1.0).unwrap()).unwrap(), depth).unwrap();
        let ball = measure_region(&m, &ConeRegion::ball(o, r).unwrap(), depth).unwrap();
        prop_assert!(small.lower <= large.lower && small.upper <= large.upper);
        prop_assert!(large.lower <= ball.lower && large.upper <= ball.upper);
    }

    #[test]
    fn packings_are_disjoint_and_capture_exactly(
        raw in prop::collection::vec(((-3.0..3.0f64, -3.0..3.0f64), 0.05..1.0f64, 1.0..=2.0f64, 0.0..TAU), 1..30),
        big_r in 0.2..1.0f64,
        t in 0.0..TAU,
        alpha in 0.05..1.0f64,
    ) {
        let pts: Vec<Vector> = raw.iter().map(|((x, y), ..)| Vector::xy(*x, *y)).collect();
        let a = WeightedPoints::new(2, pts.clone(), raw.iter().map(|r| r.1).collect()).unwrap();
        let radii: Vec<f64> = raw.iter().map(|r| r.2 * big_r).collect();
        let thetas: Vec<Direction> = raw.iter().map(|r| Direction::angle(r.3)).collect();
        let theta = Direction::angle(t);
        let brute = |y: &Vector, r: f64, d: &Direction, al: f64| -> f64 {
            pts.iter().zip(a.weights()).filter(|(z, _)| {
                let v = **z - *y;
                v.norm() <= r && v.dot(d.unit()) <= al * v.norm()
            }).map(|(_, w)| *w).sum()
        };
        let h = halfspace_packing(&a, &radii, big_r, &theta).unwrap();
        prop_assert!(h.is_disjoint());
        prop_assert!(h.ratio.unwrap() >= h.constant);
        for s in &h.selected {
            prop_assert_eq!(s.captured, brute(&s.center, s.radius, &theta, 0.0));
        }
        let c = cone_packing(&a, &radii, big_r, &thetas, alpha).unwrap();
        prop_assert!(c.is_disjoint());
        prop_assert!(c.ratio.unwrap() >= c.constant);
        for s in &c.selected {
            prop_assert_eq!(s.captured, brute(&s.center, s.radius, &thetas[s.index], alpha));
        }
    }

    #[test]
    fn grid_refinement_conserves_mass(path in prop::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let g = grid_measure(1.2, 1.5).unwrap();
        let mut cell: GridCell = g.root();
        for ix in path {
            let mut kids = Vec::new();
            g.refine(&cell, &mut kids);
            if kids.is_empty() {
                break;
            }
            let sum: f64 = kids.iter().map(|k| g.weight(k)).sum();
            let w = g.weight(&cell);
            prop_assert!((sum - w).abs() <= 1e-12 * w, "{sum} vs {w}");
            cell = kids[ix.index(kids.len())].clone();
        }
    }
}

#[test]
fn sharpness_sets_are_nested() {
    for g in [Gauge::LogPow(1.0), Gauge::LogPow(2.0)] {
        let c = build_sharpness(&g, 2, 5, 30).unwrap();
        for pair in c.levels.windows(2) {
            assert!(pair[1].f_measure <= pair[0].f_measure);
            for i in &pair[1].f_set {
                assert!(pair[0].f_set.iter().any(|o| o.left <= i.left && i.right <= o.right), "{i:?} not nested");
            }
        }
        for l in &c.levels {
            for p in &l.pieces {
                assert!(p.interval.left <= p.b && p.b <= p.interval.right);
                assert!(p.removed >= p.target);
                assert_eq!(cantor_measure(&CantorWeights::natural(), &p.b, &p.interval.right), p.removed);
            }
        }
    }
}
