//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them). Criteria cover
//! the exact algebraic identities, the statistical laws of the sampled
//! ensembles, solver success rates against ground truth, and the geometry
//! of the segment reparametrization.

mod common;

use polyhom::algebra::{kernel_system, multinomial, HomogeneousPoly, PolySystem, ProjPoint};
use polyhom::conditioning::{condition_estimate, mu};
use polyhom::experiments::{
    exp_bp_pair_law, exp_matrix_moment, exp_polar_moment, exp_randomized_steps, exp_sphere_lemma,
    exp_sphere_muf, exp_tangent_average, ground_truth_config, tolerances, Verdict,
};
use polyhom::geometry::{great_circle, projective_distance, segment_to_arc, spherical_distance};
use polyhom::homotopy::{step_count_bound, StepStrategy, TrackStatus, TrackerConfig};
use polyhom::newton::is_approximate_zero;
use polyhom::sampling::gaussian_system;
use polyhom::solvers::{all_zeros, gbar, solve_deterministic, solve_randomized, ubar, ubar_zeros};
use polyhom::{C64, CounterRng, DegreeProfile, SeedSpec};
use rayon::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Profiles with n in 1..=3 and degrees drawn from {2, 3}.
fn small_profiles() -> Vec<DegreeProfile> {
    let degree_lists: [&[u32]; 9] = [
        &[2],
        &[3],
        &[2, 2],
        &[2, 3],
        &[3, 3],
        &[2, 2, 2],
        &[2, 2, 3],
        &[2, 3, 3],
        &[3, 3, 3],
    ];
    degree_lists
        .iter()
        .map(|d| DegreeProfile::new(d.to_vec()).unwrap())
        .collect()
}

#[test]
fn a1_exact_identity_suite() {
    let mut rng = CounterRng::from_parts(0xA1, 0);

    // Monomial Weyl norms: |z^alpha|^2 = 1 / multinomial(d, alpha).
    for (n, d) in [(1usize, 2u32), (2, 3), (3, 2)] {
        let basis = polyhom::algebra::monomial_basis(n, d);
        for alpha in basis.exponents() {
            let p = HomogeneousPoly::monomial(n, d, alpha.exponents(), c(1.0, 0.0)).unwrap();
            let want = 1.0 / multinomial(alpha.exponents());
            assert!(
                (p.weyl_norm_sq() - want).abs() <= 1e-14 * want,
                "monomial {:?}",
                alpha
            );
        }
    }

    // Reproducing identity: <g, kernel(zeta, e_i)> = g_i(zeta).
    for _ in 0..20 {
        let profile = DegreeProfile::new(vec![2, 3]).unwrap();
        let g = common::random_system(profile.degrees(), &mut rng);
        let zeta = ProjPoint::new(common::random_point(3, &mut rng)).unwrap();
        let values = g.eval(zeta.rep());
        for i in 0..2 {
            let mut a = vec![c(0.0, 0.0); 2];
            a[i] = c(1.0, 0.0);
            let k = kernel_system(&zeta, &profile, &a);
            let inner = g.weyl_inner(&k).unwrap();
            assert!((inner - values[i]).norm() <= 1e-10 * values[i].norm().max(1.0));
        }
    }

    // Euler identity: Df(x) x = diag(d_i) f(x).
    for _ in 0..20 {
        let f = common::random_system(&[2, 3, 2], &mut rng);
        let x = common::random_point(4, &mut rng);
        let jac = f.jacobian(&x);
        let values = f.eval(&x);
        for (i, &d) in f.profile().degrees().iter().enumerate() {
            let lhs: C64 = (0..4).map(|k| jac[(i, k)] * x[k]).sum();
            let rhs = values[i] * f64::from(d);
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
        }
    }

    // Start systems: unit norms for every small profile.
    for profile in small_profiles() {
        let (g, _) = gbar(&profile);
        assert!((g.weyl_norm() - 1.0).abs() < 1e-14, "gbar norm, {:?}", profile.degrees());
        let u = ubar(&profile);
        assert!((u.weyl_norm() - 1.0).abs() < 1e-14, "ubar norm, {:?}", profile.degrees());
    }

    // Condition number of the gbar pair: exactly 1 in the single-equation
    // profiles, and equal to the closed form sqrt(D sum_i 1/d_i) in general
    // (which exceeds 1 as soon as n >= 2); never below 1.
    for d in [2u32, 3] {
        let profile = DegreeProfile::new(vec![d]).unwrap();
        let (g, zero) = gbar(&profile);
        let value = mu(&g, &zero);
        assert!((value - 1.0).abs() <= 1e-12, "d={d}: mu(gbar) = {value}");
    }
    for profile in small_profiles() {
        let (g, zero) = gbar(&profile);
        let value = mu(&g, &zero);
        let inv_sum: f64 = profile.degrees().iter().map(|&d| 1.0 / f64::from(d)).sum();
        let closed_form = (f64::from(profile.max_degree()) * inv_sum).sqrt();
        assert!(
            (value - closed_form).abs() <= 1e-12 * closed_form,
            "{:?}: mu(gbar) = {value}, closed form {closed_form}",
            profile.degrees()
        );
        assert!(value >= 1.0 - 1e-12);
    }

    // Roots-of-unity start system: mu^2 at the all-ones zero obeys
    // mu^2 <= 2 (n+1)^D, and the symmetry makes mu equal at every zero.
    for profile in small_profiles() {
        let u = ubar(&profile);
        let zeros = ubar_zeros(&profile);
        let mus: Vec<f64> = zeros.iter().map(|z| mu(&u, z)).collect();
        let first = mus[0];
        for &m in &mus {
            assert!(
                (m - first).abs() <= 1e-10 * first,
                "{:?}: unequal mu across zeros",
                profile.degrees()
            );
        }
        let bound = 2.0 * (profile.n() as f64 + 1.0).powi(profile.max_degree() as i32);
        assert!(
            first * first <= bound,
            "{:?}: mu^2 = {} > {bound}",
            profile.degrees(),
            first * first
        );
    }

    println!("A1 exact identities: PASS (monomial norms, reproducing kernel, Euler, start systems over 9 profiles)");
}

#[test]
fn a2_start_pair_law() {
    for degrees in [vec![3], vec![2, 2]] {
        let profile = DegreeProfile::new(degrees).unwrap();
        let run = exp_bp_pair_law(&profile, 100_000, 0xA2);
        assert_eq!(
            run.report.verdict,
            Verdict::Pass,
            "{:?}: estimate {} vs {}",
            profile.degrees(),
            run.report.estimate,
            run.report.target
        );
        println!(
            "A2 start-pair law [n={} d={:?}]: PASS (estimate {:.4}, target {}, +-{}%)",
            profile.n(),
            profile.degrees(),
            run.report.estimate,
            run.report.target,
            tolerances::BP_PAIR_LAW * 100.0
        );
    }
}

#[test]
fn a3_sphere_condition_identity() {
    for (degrees, want_target) in [(vec![2], 2.0), (vec![3], 3.0), (vec![2, 2], 22.0)] {
        let profile = DegreeProfile::new(degrees).unwrap();
        let run = exp_sphere_muf(&profile, 20_000, 0xA3);
        assert!((run.report.target - want_target).abs() < 1e-12);
        assert_eq!(
            run.report.verdict,
            Verdict::Pass,
            "{:?}: estimate {} vs {} (discarded {})",
            profile.degrees(),
            run.report.estimate,
            run.report.target,
            run.report.discarded
        );
        println!(
            "A3 sphere identity [n={} d={:?}]: PASS (estimate {:.3}, target {}, +-{}%, discarded {})",
            profile.n(),
            profile.degrees(),
            run.report.estimate,
            run.report.target,
            tolerances::SPHERE_MUF * 100.0,
            run.report.discarded
        );
    }
}

#[test]
fn a4_matrix_moment_identity() {
    for dim in [1usize, 2, 3] {
        let run = exp_matrix_moment(dim, None, 1.0, 1_000_000, 0xA4);
        assert_eq!(
            run.report.verdict,
            Verdict::Pass,
            "dim {dim}: estimate {} vs {}",
            run.report.estimate,
            run.report.target
        );
        println!(
            "A4 matrix moment [dim={dim} centered]: PASS (ratio {:.4}, target {}, +-2%)",
            run.report.estimate, run.report.target
        );
    }
    let center = nalgebra::DMatrix::<C64>::identity(2, 2);
    let run = exp_matrix_moment(2, Some(&center), 0.5, 1_000_000, 0xA4 + 1);
    assert_eq!(run.report.verdict, Verdict::Pass, "noncentered: {:?}", run.report.estimate);
    assert!(run.report.estimate <= 8.0 * 1.02);
    println!(
        "A4 matrix moment [dim=2 center=Id sigma=0.5]: PASS (ratio {:.4} <= {:.2})",
        run.report.estimate,
        8.0 * 1.02
    );
}

#[test]
fn a5_randomized_solver_success() {
    let profile = DegreeProfile::new(vec![2, 2]).unwrap();
    let trials: u64 = 500;
    let cfg = TrackerConfig::with_strategy(StepStrategy::ConditionLength);
    let truth_cfg = ground_truth_config();

    struct Outcome {
        success: bool,
        certified: bool,
        matched: bool,
        steps: u64,
    }

    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::from_parts(0xA5, i);
            let f = gaussian_system(&profile, None, 1.0, &mut rng);
            let report = match solve_randomized(&f, &cfg, SeedSpec::new(0xA5_0, i)) {
                Ok(r) => r,
                Err(_) => {
                    return Outcome {
                        success: false,
                        certified: false,
                        matched: false,
                        steps: 0,
                    }
                }
            };
            if report.result.status != TrackStatus::Success {
                return Outcome {
                    success: false,
                    certified: false,
                    matched: false,
                    steps: report.result.steps,
                };
            }
            let target = f.normalized().unwrap();
            let (ok, _) = is_approximate_zero(&target, &report.result.final_point);
            let matched = all_zeros(&f, &truth_cfg)
                .ok()
                .filter(|set| set.complete)
                .map(|set| {
                    set.zeros
                        .iter()
                        .map(|z| projective_distance(z, &report.result.final_point))
                        .fold(f64::INFINITY, f64::min)
                        <= 1e-8
                })
                .unwrap_or(false);
            Outcome {
                success: true,
                certified: report.result.certified && ok,
                matched,
                steps: report.result.steps,
            }
        })
        .collect();

    let successes = outcomes.iter().filter(|o| o.success).count();
    let all_certified = outcomes.iter().filter(|o| o.success).all(|o| o.certified);
    let all_matched = outcomes.iter().filter(|o| o.success).all(|o| o.matched);
    let mean_steps = outcomes
        .iter()
        .filter(|o| o.success)
        .map(|o| o.steps as f64)
        .sum::<f64>()
        / successes.max(1) as f64;
    let bound = step_count_bound(&profile);

    assert!(
        successes as f64 >= 0.99 * trials as f64,
        "success rate {successes}/{trials}"
    );
    assert!(all_certified, "a success lacked the endpoint certificate");
    assert!(all_matched, "a success missed every ground-truth zero by more than 1e-8");
    assert!(mean_steps <= bound, "mean K = {mean_steps} exceeds bound {bound}");
    println!(
        "A5 randomized solver: PASS ({successes}/{trials} success, all certified+matched, mean K {mean_steps:.1} <= {bound:.1})"
    );
}

#[test]
fn a6_strategy_dominance() {
    let profile = DegreeProfile::new(vec![2, 2]).unwrap();
    let run = exp_randomized_steps(&profile, 200, &TrackerConfig::default(), 0xA6);
    assert_eq!(run.report.verdict, Verdict::Pass, "{:?}", run.report.estimate);
    let mean_cl = run.report.extra["mean_steps_condition_length"];
    let mean_mu2 = run.report.extra["mean_steps_mu_squared"];
    assert!(
        mean_cl <= mean_mu2,
        "condition-length mean {mean_cl} not below mu^2 mean {mean_mu2}"
    );
    println!(
        "A6 strategy dominance: PASS (mean K {mean_cl:.1} condition-length vs {mean_mu2:.1} mu^2 on 200 paired seeds)"
    );
}

#[test]
fn a7_deterministic_solver_both_branches() {
    for (degrees, branch) in [(vec![3], "gbar"), (vec![2, 2, 2], "roots-of-unity")] {
        let profile = DegreeProfile::new(degrees).unwrap();
        let trials: u64 = 100;
        let successes: usize = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = CounterRng::from_parts(0xA7, i);
                let f = gaussian_system(&profile, None, 1.0, &mut rng);
                match solve_deterministic(&f, &TrackerConfig::default()) {
                    Ok(report) if report.succeeded() && report.result.certified => 1usize,
                    _ => 0,
                }
            })
            .sum();
        assert!(
            successes as f64 >= 0.99 * trials as f64,
            "{branch} branch: {successes}/{trials}"
        );
        println!(
            "A7 deterministic solver [{branch} branch, n={} d={:?}]: PASS ({successes}/{trials} success, certified)",
            profile.n(),
            profile.degrees()
        );
    }
}

#[test]
fn a8_all_roots_against_companion_oracle() {
    let cfg = ground_truth_config();
    for d in [2u32, 3, 4, 6] {
        let worst: f64 = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = CounterRng::from_parts(0xA8 + u64::from(d), i);
                let f = common::random_system(&[d], &mut rng);
                let set = all_zeros(&f, &cfg).expect("nonzero system");
                assert!(set.complete, "d={d}, trial {i}: all-roots incomplete");
                let oracle = common::univariate_roots(&f);
                assert_eq!(oracle.len(), set.zeros.len());
                let mut worst = 0.0f64;
                for root in &oracle {
                    let nearest = set
                        .zeros
                        .iter()
                        .map(|z| projective_distance(z, root))
                        .fold(f64::INFINITY, f64::min);
                    worst = worst.max(nearest);
                }
                worst
            })
            .reduce(|| 0.0, f64::max);
        assert!(worst <= 1e-8, "d={d}: worst root mismatch {worst}");
        println!("A8 oracle agreement [d={d}]: PASS (worst mismatch {worst:.2e} over 100 systems)");
    }
}

#[test]
fn a9_lemma_suite() {
    // Tangent-direction second moment at two pairs.
    let profile = DegreeProfile::new(vec![2]).unwrap();
    let u = ubar(&profile);
    let z1 = ubar_zeros(&profile).into_iter().next().unwrap();
    let run = exp_tangent_average(&u, &z1, 100_000, 0xA9).unwrap();
    assert_eq!(run.report.verdict, Verdict::Pass, "estimate {}", run.report.estimate);
    println!(
        "A9 tangent average [roots-of-unity pair, n=1 d=2]: PASS (estimate {:.5}, target {:.5}, +-2%)",
        run.report.estimate, run.report.target
    );

    let profile2 = DegreeProfile::new(vec![2, 2]).unwrap();
    let mut rng = CounterRng::from_parts(0xA9 + 1, 0);
    let zeta = ProjPoint::new(common::random_point(3, &mut rng)).unwrap();
    let f = polyhom::algebra::project_fiber(&common::random_system(&[2, 2], &mut rng), &zeta)
        .normalized()
        .unwrap();
    let run = exp_tangent_average(&f, &zeta, 100_000, 0xA9 + 2).unwrap();
    assert_eq!(run.report.verdict, Verdict::Pass, "estimate {}", run.report.estimate);
    println!(
        "A9 tangent average [random pair, n=2 d=(2,2)]: PASS (estimate {:.5}, target {:.5}, +-2%)",
        run.report.estimate, run.report.target
    );
    let _ = profile2;

    // Polar-coordinate Gaussian moments.
    for (m, p, want) in [(2u32, 2i32, 1.0), (4, 2, 2.0), (6, -2, 0.5)] {
        let run = exp_polar_moment(m, p, 1_000_000, 0xA9 + 3);
        assert!((run.report.target - want).abs() < 1e-14);
        assert_eq!(
            run.report.verdict,
            Verdict::Pass,
            "(m,p)=({m},{p}): estimate {}",
            run.report.estimate
        );
        println!(
            "A9 polar moment [(m,p)=({m},{p})]: PASS (estimate {:.5}, target {}, +-1%)",
            run.report.estimate, run.report.target
        );
    }

    // Path-integral to bundle-average ratio.
    let run = exp_sphere_lemma(&profile, 4000, 0xA9 + 4);
    assert_eq!(
        run.report.verdict,
        Verdict::Pass,
        "ratio {} vs pi/2 (discarded {})",
        run.report.estimate,
        run.report.discarded
    );
    println!(
        "A9 sphere lemma [n=1 d=2]: PASS (ratio {:.4}, target {:.4}, +-5%, discarded {})",
        run.report.estimate, run.report.target, run.report.discarded
    );
}

#[test]
fn a10_geometry_checks() {
    let mut rng = CounterRng::from_parts(0xA10, 0);
    let profile = DegreeProfile::new(vec![2, 2]).unwrap();

    // Segment-to-arc residual on 1e3 random (g, f, s) triples.
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 1000 {
        let g = gaussian_system(&profile, None, 1.0, &mut rng).normalized().unwrap();
        let f = gaussian_system(&profile, None, 1.0, &mut rng).scale_re(0.2 + 2.0 * rng.uniform());
        let f_unit = f.normalized().unwrap();
        let path = match great_circle(&g, &f_unit) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let s = path.angle() * rng.uniform();
        let t = segment_to_arc(&g, &f, s).unwrap();
        let chord = g.scale_re(1.0 - t).axpy(c(t, 0.0), &f);
        let residual = (&chord.normalized().unwrap() - &path.point_at(s)).weyl_norm();
        worst = worst.max(residual);
        checked += 1;
    }
    assert!(worst <= 1e-10, "worst reparametrization residual {worst}");

    // Tilt bound on a grid of chords between unit systems.
    let h = 1e-6;
    for _ in 0..20 {
        let g = gaussian_system(&profile, None, 1.0, &mut rng).normalized().unwrap();
        let f = gaussian_system(&profile, None, 1.0, &mut rng).normalized().unwrap();
        for k in 1..16 {
            let t = k as f64 / 16.0;
            let chord = |t: f64| {
                PolySystem::linear_combination(1.0 - t, &g, t, &f)
                    .normalized()
                    .unwrap()
            };
            let deriv = (&chord(t + h) - &chord(t - h)).scale_re(1.0 / (2.0 * h));
            let f_t = PolySystem::linear_combination(1.0 - t, &g, t, &f);
            let bound = 1.0 / f_t.weyl_norm_sq();
            assert!(
                deriv.weyl_norm() <= bound + 1e-4,
                "tilt bound violated at t={t}: {} > {bound}",
                deriv.weyl_norm()
            );
        }
    }

    // Sanity anchor for the distances used above.
    let g = gaussian_system(&profile, None, 1.0, &mut rng).normalized().unwrap();
    assert!(spherical_distance(&g, &g) < 1e-6);

    println!("A10 geometry checks: PASS (worst segment residual {worst:.2e} over 1000 triples; tilt bound on 20 chords)");
}

#[test]
fn start_pair_condition_sanity() {
    // Supplementary: mu(gbar pair) never reported below 1 and the condition
    // estimate agrees between the two norms on the gbar pair.
    for profile in small_profiles() {
        let (g, zero) = gbar(&profile);
        let est = condition_estimate(&g, &zero);
        assert!(!est.singular);
        assert!(est.mu <= est.mu_frobenius + 1e-12);
        assert!(est.mu_frobenius <= (profile.n() as f64).sqrt() * est.mu + 1e-9);
    }
}
