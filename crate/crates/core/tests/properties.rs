mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semdeadline::allocator::{
    allocate_benchmark1, allocate_benchmark2, allocate_proposed, allocate_with_curve,
    evaluate_allocation, solve_p2, P2Outcome,
};
use semdeadline::channel::{required_bandwidth, transmission_time, LinkPair, LinkSpec};
use semdeadline::deadline::deadline_curve;
use semdeadline::sim::{run_sweep, summarize, SimConfig};
use semdeadline::surface::{parametric_quality, ParametricParams, QualitySurface};
use semdeadline::toy_diffusion::{generate_grid, run, ConditioningSet, ToyDiffusionConfig};
use semdeadline::Policy;

use common::closed_form_latent;

fn toy(seed: u64) -> QualitySurface {
    QualitySurface::from_toy(&ToyDiffusionConfig {
        seed,
        ..Default::default()
    })
    .unwrap()
}

fn links(g_s: f64, g_l: f64) -> LinkPair {
    LinkPair::new(
        LinkSpec::new(32768, g_s).unwrap(),
        LinkSpec::new(8192, g_l).unwrap(),
    )
}

proptest! {
    #[test]
    fn delay_round_trip(d in 1u64..10_000_000, log_g in -3.0f64..3.0, log_t in -4.0f64..2.0) {
        let link = LinkSpec::new(d, 10f64.powf(log_g)).unwrap();
        let t = 10f64.powf(log_t);
        let b = required_bandwidth(&link, t).unwrap();
        let back = transmission_time(&link, b).unwrap();
        prop_assert!((back - t).abs() / t < 1e-12);
    }

    #[test]
    fn delay_monotone(d in 1u64..1_000_000, g in 0.01f64..100.0, b in 1.0f64..1e7, f in 1.001f64..10.0) {
        let link = LinkSpec::new(d, g).unwrap();
        prop_assert!(transmission_time(&link, b * f).unwrap() < transmission_time(&link, b).unwrap());
        let bigger = LinkSpec::new(d + 1, g).unwrap();
        prop_assert!(transmission_time(&bigger, b).unwrap() > transmission_time(&link, b).unwrap());
    }

    #[test]
    fn run_matches_closed_form(seed in any::<u64>(), ks in 0usize..=20, kl in 0usize..=20) {
        let cfg = ToyDiffusionConfig { seed, ..Default::default() };
        let cond = ConditioningSet::for_config(&cfg).unwrap();
        let z = run(ks, kl, &cfg, &cond).unwrap();
        for (a, b) in z.iter().zip(closed_form_latent(ks, kl, &cfg, &cond)) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn budgets_are_spent_exactly(log_g_s in -1.5f64..1.5, log_g_l in -1.5f64..1.5, log_b in 4.0f64..7.0) {
        let surface = toy(0);
        let l = links(10f64.powf(log_g_s), 10f64.powf(log_g_l));
        let b = 10f64.powf(log_b);
        for a in [
            allocate_benchmark1(&l, b).unwrap(),
            allocate_benchmark2(&l, b).unwrap(),
            allocate_proposed(&surface, &l, b, 20, 0.5).unwrap(),
        ] {
            prop_assert!((a.total_bandwidth() - b).abs() <= 1e-9 * b, "{a:?}");
            prop_assert!(a.bandwidth_s >= 0.0 && a.bandwidth_l >= 0.0);
        }
    }

    #[test]
    fn evaluation_composes(bs in 0.0f64..1e6, bl in 0.0f64..1e6, g_s in 0.05f64..20.0, g_l in 0.05f64..20.0) {
        let surface = toy(3);
        let l = links(g_s, g_l);
        let mut alloc = allocate_benchmark1(&l, 1.0).unwrap();
        alloc.bandwidth_s = bs;
        alloc.bandwidth_l = bl;
        let e = evaluate_allocation(&alloc, &l, &surface).unwrap();
        let t = |link: &LinkSpec, b: f64| if b > 0.0 { transmission_time(link, b).unwrap() } else { f64::INFINITY };
        let (psnr, q) = surface.evaluate(t(&l.mask, bs), t(&l.text, bl)).unwrap();
        prop_assert_eq!(e.psnr(), psnr);
        prop_assert_eq!(e.q(), q);
    }

    #[test]
    fn evaluate_is_step_constant(k in 0usize..20, frac in 1e-6f64..1.0) {
        let s = toy(1);
        let omega = s.omega();
        let inside = (k as f64 + frac) * omega;
        let edge = (k + 1) as f64 * omega;
        prop_assert_eq!(s.evaluate(inside, 0.3).unwrap(), s.evaluate(edge, 0.3).unwrap());
        prop_assert_eq!(s.evaluate(0.3, inside).unwrap(), s.evaluate(0.3, edge).unwrap());
    }
}

#[test]
fn weight_swap_transposes_grid() {
    let cfg = ToyDiffusionConfig {
        weight_mask: 0.7,
        weight_text: 1.3,
        seed: 17,
        ..Default::default()
    };
    let cond = ConditioningSet::for_config(&cfg).unwrap();
    let half = cfg.latent_dim / 2;
    // move each modality's vectors onto the other half of the coordinates
    let rotate = |v: &Vec<f64>| -> Vec<f64> {
        let mut r = v[half..].to_vec();
        r.extend_from_slice(&v[..half]);
        r
    };
    let swapped_cond = ConditioningSet {
        mask_true: rotate(&cond.text_true),
        mask_placeholder: rotate(&cond.text_placeholder),
        text_true: rotate(&cond.mask_true),
        text_placeholder: rotate(&cond.mask_placeholder),
    };
    swapped_cond.validate().unwrap();
    let swapped_cfg = ToyDiffusionConfig {
        weight_mask: cfg.weight_text,
        weight_text: cfg.weight_mask,
        ..cfg.clone()
    };
    let grid = generate_grid(&cfg, &cond).unwrap();
    let swapped = generate_grid(&swapped_cfg, &swapped_cond).unwrap();
    for a in 0..=cfg.steps {
        for b in 0..=cfg.steps {
            assert!((grid[a][b] - swapped[b][a]).abs() < 1e-9, "({a}, {b})");
        }
    }
}

#[test]
fn quality_stays_in_unit_interval() {
    let surfaces = [
        toy(0),
        toy(8),
        QualitySurface::from_parametric(&ParametricParams::default()).unwrap(),
    ];
    for s in &surfaces {
        let n = s.steps() + 1;
        assert_eq!(s.quality_at(0, 0), 1.0);
        for a in 0..n {
            for b in 0..n {
                assert!((0.0..=1.0).contains(&s.quality_at(a, b)));
            }
        }
    }
}

#[test]
fn parametric_superlevel_sets_are_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let q = |u: (f64, f64)| parametric_quality(0.6, 0.5, p, u.0, u.1);
        let mut tested = 0;
        while tested < 500 {
            let eps: f64 = rng.gen_range(0.0..1.0);
            let x = (rng.gen::<f64>(), rng.gen::<f64>());
            let y = (rng.gen::<f64>(), rng.gen::<f64>());
            if q(x) < eps || q(y) < eps {
                continue;
            }
            let mid = ((x.0 + y.0) / 2.0, (x.1 + y.1) / 2.0);
            assert!(q(mid) >= eps - 1e-12, "p={p} eps={eps} {x:?} {y:?}");
            tested += 1;
        }
    }
}

#[test]
fn file_surfaces_nest() {
    let json = toy(4).to_document().to_json().unwrap();
    let s = QualitySurface::from_json(&json).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let (hi, lo) = (a.max(b), a.min(b));
        let strict = s.superlevel_set(hi).unwrap();
        let loose = s.superlevel_set(lo).unwrap();
        assert!(strict.iter().all(|c| loose.contains(c)));
    }
}

#[test]
fn curve_norms_shrink_with_threshold() {
    for seed in 0..10 {
        let s = toy(seed);
        let curve = deadline_curve(&s, 0.3, 20).unwrap();
        let norms: Vec<f64> = curve
            .thresholds
            .iter()
            .filter_map(|t| t.point)
            .map(|p| p.t_s.hypot(p.t_l))
            .collect();
        assert!(
            norms.windows(2).all(|w| w[0] >= w[1]),
            "seed {seed}: {norms:?}"
        );
        for th in &curve.thresholds {
            let p = th.point.unwrap();
            assert!(s.quality_at(p.mask_step, p.text_step) >= th.epsilon);
        }
        assert_eq!(curve, deadline_curve(&s, 0.3, 20).unwrap());
    }
}

#[test]
fn benchmark2_beats_random_splits() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let l = links(1.7, 0.4);
    let b = 250_000.0;
    let best = allocate_benchmark2(&l, b).unwrap();
    let best_sum = best.t_s + best.t_l;
    for _ in 0..10_000 {
        let bs = rng.gen_range(1e-6..1.0) * b;
        if bs >= b {
            continue;
        }
        let sum =
            transmission_time(&l.mask, bs).unwrap() + transmission_time(&l.text, b - bs).unwrap();
        assert!(sum >= best_sum * (1.0 - 1e-12));
    }
}

#[test]
fn threshold_never_drops_with_budget() {
    let surface = toy(0);
    let curve = deadline_curve(&surface, 0.5, 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let l = links(
            10f64.powf(rng.gen_range(-1.0..1.0)),
            10f64.powf(rng.gen_range(-1.0..1.0)),
        );
        let mut prev = f64::NEG_INFINITY;
        for i in 0..80 {
            let b = 1e4 * 10f64.powf(i as f64 / 20.0);
            let eps = match solve_p2(&curve, &l, b) {
                P2Outcome::Feasible { eps_star, .. } => eps_star,
                P2Outcome::Fallback => f64::NEG_INFINITY,
            };
            assert!(eps >= prev);
            prev = eps;
        }
    }
}

#[test]
fn paper_snr_example_beats_benchmarks() {
    let surface = toy(0);
    let l = links(10f64.powf(0.23), 10f64.powf(0.35));
    let b = 3e5;
    let proposed = allocate_proposed(&surface, &l, b, 20, 0.65).unwrap();
    assert!((proposed.total_bandwidth() - b).abs() <= 1e-9 * b);
    for base in [
        allocate_benchmark1(&l, b).unwrap(),
        allocate_benchmark2(&l, b).unwrap(),
    ] {
        let q = evaluate_allocation(&base, &l, &surface).unwrap().q();
        assert!(proposed.q() >= q, "{} < {q}", proposed.q());
    }
}

#[test]
fn huge_budget_reaches_best_positive_delay_cell() {
    let surface = toy(2);
    let l = links(1.0, 2.0);
    let a = allocate_proposed(&surface, &l, 1e12, 20, 0.5).unwrap();
    let n = surface.steps() + 1;
    let best = (1..n)
        .flat_map(|x| (1..n).map(move |y| (x, y)))
        .map(|(x, y)| surface.quality_at(x, y))
        .fold(0.0, f64::max);
    assert_eq!(a.q(), best);
}

#[test]
fn tiny_budget_falls_back_to_benchmark2() {
    let surface = toy(0);
    let l = links(0.5, 0.5);
    let curve = deadline_curve(&surface, 0.65, 20).unwrap();
    let b = 10.0;
    assert_eq!(solve_p2(&curve, &l, b), P2Outcome::Fallback);
    let a = allocate_with_curve(&surface, &curve, &l, b).unwrap();
    let b2 = allocate_benchmark2(&l, b).unwrap();
    assert_eq!(a.eps_star, None);
    assert_eq!(a.policy, Policy::Proposed { k: 20 });
    assert_eq!(
        (a.bandwidth_s, a.bandwidth_l),
        (b2.bandwidth_s, b2.bandwidth_l)
    );
}

#[test]
fn finer_thresholds_do_not_hurt_on_average() {
    let cfg = SimConfig {
        trials: 100,
        ..Default::default()
    };
    let rows = summarize(&run_sweep(&cfg).unwrap()).unwrap();
    let mean = |p: Policy| {
        let qs: Vec<f64> = rows
            .iter()
            .filter(|r| r.policy == p)
            .map(|r| r.mean_q)
            .collect();
        qs.iter().sum::<f64>() / qs.len() as f64
    };
    assert!(mean(Policy::Proposed { k: 20 }) >= mean(Policy::Proposed { k: 4 }));
}
