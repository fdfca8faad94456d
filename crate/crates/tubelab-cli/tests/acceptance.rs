//! Acceptance suite: one test per release criterion, library and binary
//! together. Each test line doubles as the pass/fail record for its
//! criterion; stated runtime budgets are asserted inside the tests.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use common::{audit_fixture, run, two_point_fixture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use tubelab::concentration::{
    equator_complement_measure, scan_concentration, ConcentrationFamily, EpsSchedule, Verdict,
};
use tubelab::mmdist::{
    box_bound_via_tube, box_exact, projection_transport_cost, projection_transport_cost_cloud,
    w1_exact, CostOrder, FiniteMMSpace,
};
use tubelab::nalgebra::{DMatrix, DVector, SymmetricEigen};
use tubelab::quad::integrate;
use tubelab::specfun::{disc_volume, gauss_2f1};
use tubelab::sphere_lab::{empirical_complement, sample_sphere};
use tubelab::tube::{
    gaussian_bound, jacobi_series_eval, totally_geodesic_density, weyl_flat_volume,
    weyl_sphere_volume, Ambient, JacobiSeriesState, SpectralData, TubeSpec,
};

/// Runs the body and asserts it fits the stated wall-clock budget.
fn within_budget(limit_secs: f64, body: impl FnOnce()) {
    let start = Instant::now();
    body();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < limit_secs, "runtime {elapsed:.2}s exceeds the {limit_secs}s budget");
}

/// Surface volume of the unit n-sphere.
fn unit_sphere_volume(n: u32) -> f64 {
    (n + 1) as f64 * disc_volume(n + 1, 1.0).unwrap()
}

fn equator_spec(ambient_dim: u32, eps: f64) -> TubeSpec {
    let m = ambient_dim - 1;
    TubeSpec::new(
        Ambient::Sphere { radius: 1.0 },
        m,
        1,
        eps,
        unit_sphere_volume(m),
        vec![0.0; (m / 2) as usize],
    )
    .unwrap()
}

#[test]
fn acceptance_01_hypergeometric_series_collapses_to_the_binomial() {
    within_budget(1.0, || {
        let a_grid: [f64; 5] = [-4.75, -2.5, 0.25, 2.75, 4.75];
        let b_grid: [f64; 5] = [-5.0, -2.25, 0.5, 2.25, 5.0];
        let z_grid: [f64; 4] = [0.0, 0.3, 0.6, 0.9];
        let mut checked = 0;
        for &a in &a_grid {
            for &b in &b_grid {
                for &z in &z_grid {
                    let want = (1.0 - z).powf(-b);
                    // The series cannot certify a 1e-13 absolute error on
                    // values near 1e5 in f64, so the request scales with the
                    // magnitude; the assertion below stays at 1e-11.
                    let tol = 1e-11 * want.abs().max(1.0);
                    let got = gauss_2f1(a, b, a, z, tol).unwrap().value;
                    assert!(
                        (got - want).abs() <= 1e-11 * want.abs().max(1.0),
                        "a={a} b={b} z={z}: {got} vs {want}"
                    );
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 100);
    });
}

#[test]
fn acceptance_02_plane_circle_tube_has_no_curvature_correction() {
    // Radii chosen so every product is a power-of-two scaling of pi and the
    // equality is exact in floating point.
    for (r, eps) in [(1.0, 0.25), (2.0, 0.125), (0.5, 0.0625)] {
        let spec = TubeSpec::new(Ambient::Flat, 1, 1, eps, 2.0 * PI * r, vec![]).unwrap();
        assert_eq!(weyl_flat_volume(&spec).unwrap(), 4.0 * PI * r * eps);
    }
    let spec = TubeSpec::new(Ambient::Flat, 1, 1, 0.2, 2.0 * PI * 1.3, vec![]).unwrap();
    let got = weyl_flat_volume(&spec).unwrap();
    let want = 4.0 * PI * 1.3 * 0.2;
    assert!((got - want).abs() <= 1e-15 * want);
}

#[test]
fn acceptance_03_unit_sphere_tube_matches_the_shell_volume() {
    for eps in [0.01, 0.1, 0.3] {
        let spec = TubeSpec::new(Ambient::Flat, 2, 1, eps, 4.0 * PI, vec![1.0]).unwrap();
        let got = weyl_flat_volume(&spec).unwrap();
        let want = 8.0 * PI * eps * (1.0 + eps * eps / 3.0);
        assert!((got - want).abs() <= 1e-12 * want, "eps={eps}: {got} vs {want}");
    }
}

#[test]
fn acceptance_04_equator_tube_volumes_match_quadrature() {
    within_budget(5.0, || {
        for ambient_dim in 2..=20u32 {
            let m = ambient_dim - 1;
            let vol = unit_sphere_volume(m);
            for eps in [0.05, 0.2, 0.5] {
                let got = weyl_sphere_volume(&equator_spec(ambient_dim, eps)).unwrap();
                let band = integrate(|t| t.cos().powi(m as i32), 0.0, eps, 1e-13).unwrap().value;
                let want = 2.0 * vol * band;
                assert!(
                    (got / want - 1.0).abs() <= 1e-10,
                    "ambient {ambient_dim}, eps {eps}: {got} vs {want}"
                );
            }
        }
    });
}

#[test]
fn acceptance_05_flat_approximation_improves_as_the_tube_shrinks() {
    let mut previous = f64::INFINITY;
    for eps in [0.4, 0.2, 0.1, 0.05] {
        let spec = equator_spec(5, eps);
        let sphere_volume = weyl_sphere_volume(&spec).unwrap();
        let flat_volume = weyl_flat_volume(&spec.flattened()).unwrap();
        let gap = (sphere_volume / flat_volume - 1.0).abs();
        assert!(gap < previous, "eps={eps}: gap {gap} did not shrink from {previous}");
        previous = gap;
    }
}

#[test]
fn acceptance_06_jacobi_series_matches_the_matrix_closed_form() {
    within_budget(2.0, || {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        for trial in 0..50 {
            let dim = rng.gen_range(1..=6);
            let gauss = DMatrix::from_fn(dim, dim, |_, _| rng.gen::<f64>() - 0.5);
            let q = gauss.qr().q();
            let eigenvalues: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.05..=1.0)).collect();
            let a = &q * DMatrix::from_diagonal(&DVector::from_vec(eigenvalues)) * q.transpose();
            let a = (&a + a.transpose()) * 0.5;
            let k_raw = DMatrix::from_fn(dim, dim, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let k = (&k_raw + k_raw.transpose()) * 0.5;
            let t = rng.gen_range(0.1..=1.0);

            let state = JacobiSeriesState::new(a.clone(), 12).unwrap();
            let got = jacobi_series_eval(&state, &k, t).unwrap();

            let eigen = SymmetricEigen::new(a);
            let cos_part = &eigen.eigenvectors
                * DMatrix::from_diagonal(&eigen.eigenvalues.map(|l| (l.sqrt() * t).cos()))
                * eigen.eigenvectors.transpose();
            let sin_part = &eigen.eigenvectors
                * DMatrix::from_diagonal(
                    &eigen.eigenvalues.map(|l| (l.sqrt() * t).sin() / l.sqrt()),
                )
                * eigen.eigenvectors.transpose();
            let want = cos_part + sin_part * &k;
            let worst = (&got - &want).abs().max();
            assert!(worst <= 1e-9, "trial {trial}: entrywise error {worst}");
        }
    });
}

#[test]
fn acceptance_07_cosine_products_never_exceed_the_gaussian_majorant() {
    let mut rng = ChaCha12Rng::seed_from_u64(31);
    for _ in 0..10_000 {
        let len = rng.gen_range(1..=12);
        let d: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..3.0)).collect();
        let d_max = d.iter().cloned().fold(0.0, f64::max);
        let t = rng.gen_range(0.0..FRAC_PI_2 / d_max.max(1e-9));
        let spectrum = SpectralData::new(d).unwrap();
        let product = totally_geodesic_density(&spectrum, t);
        let majorant = gaussian_bound(&spectrum, t).unwrap();
        assert!(product >= 0.0, "product {product} negative at t={t}");
        // Slack of a few hundred ulps for the rounded cosine product; a real
        // crossing would show up at the 1e-4 scale or larger.
        assert!(
            product <= majorant * (1.0 + 1e-13),
            "product {product} above majorant {majorant} at t={t}"
        );
    }
}

#[test]
fn acceptance_08_equator_scans_separate_the_two_schedules() {
    within_budget(10.0, || {
        let family = ConcentrationFamily::equators();

        let quarter = EpsSchedule::power(1.0, 0.25).unwrap();
        let range: Vec<u32> = (10..=400).step_by(10).collect();
        let result = scan_concentration(&family, &quarter, &range, 1e-3).unwrap();
        assert_eq!(result.verdict, Verdict::Locus);
        let tail = &result.rows[result.rows.len() / 2..];
        for pair in tail.windows(2) {
            assert!(
                pair[1].complement <= pair[0].complement * (1.0 + 1e-12),
                "tail complement rose at n={}",
                pair[1].n
            );
        }
        let rate = result.rate.expect("multi-row scan carries a rate estimate");
        assert!((rate.k - 0.25).abs() <= 0.01, "fitted rate {}", rate.k);

        let half = EpsSchedule::power(1.0, 0.5).unwrap();
        let coarse = [625, 1250, 2500, 5000, 10_000];
        let result = scan_concentration(&family, &half, &coarse, 1e-3).unwrap();
        assert_eq!(result.verdict, Verdict::NotLocus);
        let last = result.rows.last().unwrap();
        assert_eq!(last.n, 10_000);
        // Two-sided gaussian tail mass beyond one standard deviation.
        let limit = 0.3173105078629141;
        assert!(
            (last.complement - limit).abs() <= 0.005,
            "complement {} at n=10^4",
            last.complement
        );
    });
}

#[test]
fn acceptance_09_monte_carlo_complement_matches_the_analytic_measure() {
    within_budget(5.0, || {
        let cloud = sample_sphere(50, 100_000, 0).unwrap();
        let (p_hat, _) = empirical_complement(&cloud, 0.2).unwrap();
        let p = equator_complement_measure(50, 0.2).unwrap();
        let sigma = (p * (1.0 - p) / 100_000.0).sqrt();
        assert!(
            (p_hat - p).abs() <= 3.0 * sigma,
            "empirical {p_hat} vs analytic {p} (3 sigma = {})",
            3.0 * sigma
        );
    });
}

#[test]
fn acceptance_10_transport_costs_obey_both_inequalities() {
    let cloud = sample_sphere(6, 20_000, 13).unwrap();
    let order2 = projection_transport_cost_cloud(&cloud, CostOrder::Two).unwrap();
    assert_eq!(order2.excluded_mass, 0.0);
    for i in 1..=20 {
        let eps = FRAC_PI_2 * i as f64 / 21.0;
        let (complement, _) = empirical_complement(&cloud, eps).unwrap();
        assert!(
            order2.cost >= eps * eps * complement - 1e-12,
            "order-2 cost {} below {} at eps={eps}",
            order2.cost,
            eps * eps * complement
        );
    }

    // Ten-point discretized meridian measure versus its projection onto the
    // two middle points.
    let positions: Vec<f64> = (0..10).map(|i| -0.45 + 0.1 * i as f64).collect();
    let m = positions.len();
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            d[i * m + j] = (positions[i] - positions[j]).abs();
        }
    }
    let space = FiniteMMSpace::new(d, vec![0.1; m]).unwrap();
    let locus = [4usize, 5];
    let projection: Vec<usize> = (0..m)
        .map(|i| {
            locus
                .iter()
                .copied()
                .min_by(|&a, &b| space.dist(i, a).partial_cmp(&space.dist(i, b)).unwrap())
                .unwrap()
        })
        .collect();
    let mut pushforward = vec![0.0; m];
    for (i, &target) in projection.iter().enumerate() {
        pushforward[target] += space.weights()[i];
    }
    let plan = w1_exact(&space, &pushforward).unwrap();
    let order1 = projection_transport_cost(&space, &projection, CostOrder::One).unwrap();
    assert!(
        plan.cost() <= order1 + 1e-9,
        "w1 {} exceeds projection cost {order1}",
        plan.cost()
    );
    assert!(plan.duality_gap() <= 1e-7, "duality gap {}", plan.duality_gap());
}

#[test]
fn acceptance_11_box_distance_identities_and_tube_bound() {
    let mut rng = ChaCha12Rng::seed_from_u64(37);
    for trial in 0..20 {
        let m = rng.gen_range(1..=6);
        let points: Vec<(f64, f64)> =
            (0..m).map(|_| (rng.gen::<f64>() * 3.0, rng.gen::<f64>() * 3.0)).collect();
        let mut d = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                d[i * m + j] = (dx * dx + dy * dy).sqrt();
            }
        }
        let space = FiniteMMSpace::new(d, vec![1.0 / m as f64; m]).unwrap();
        assert_eq!(box_exact(&space, &space).unwrap(), 0.0, "trial {trial}");
    }

    let point = FiniteMMSpace::new(vec![0.0], vec![1.0]).unwrap();
    for dist in [0.1, 0.4, 0.9] {
        let pair = FiniteMMSpace::new(vec![0.0, dist, dist, 0.0], vec![0.5, 0.5]).unwrap();
        let got = box_exact(&point, &pair).unwrap();
        assert!((got - dist.min(0.5)).abs() <= 1e-15, "D={dist}: {got}");
    }

    let mut checked = 0;
    for count in [4usize, 6, 8] {
        for scale in [0.2, 0.5] {
            for eps in [0.5 * scale, 1.5 * scale] {
                if checked == 10 {
                    break;
                }
                let colatitudes: Vec<f64> = (0..count)
                    .map(|i| scale * (2.0 * i as f64 / (count - 1) as f64 - 1.0))
                    .collect();
                let mut d = vec![0.0; count * count];
                for i in 0..count {
                    for j in 0..count {
                        d[i * count + j] = (colatitudes[i] - colatitudes[j]).abs();
                    }
                }
                let space =
                    FiniteMMSpace::new(d, vec![1.0 / count as f64; count]).unwrap();
                let complement: f64 = colatitudes
                    .iter()
                    .zip(space.weights())
                    .filter(|(c, _)| c.abs() > eps)
                    .map(|(_, w)| w)
                    .sum();
                let bound = box_bound_via_tube(complement, eps).unwrap();
                let exact = box_exact(&space, &point).unwrap();
                assert!(
                    exact <= bound + 1e-12,
                    "count={count} scale={scale} eps={eps}: {exact} > {bound}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 10);
}

#[test]
fn acceptance_12_cli_runs_are_byte_identical_under_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (space_a, space_b) = two_point_fixture(dir.path());
    let instances = audit_fixture(dir.path());
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "tube", "--ambient", "sphere", "--R", "1", "--n", "4", "--q", "1", "--eps", "0.1",
            "--vol-m", "26.318945069571622",
        ],
        vec!["scan", "--family", "equator", "--schedule", "n^-0.25", "--n", "10:400:10"],
        vec!["scan", "--family", "equator", "--schedule", "n^-0.5", "--n", "2000:10000:2000"],
        vec![
            "sample", "--n", "50", "--count", "100000", "--eps", "0.2", "--seed", "0",
        ],
        vec!["mmdist", "--kind", "w1", "--space", &space_a, "--nu", "0.5,0.5"],
        vec!["mmdist", "--kind", "box", "--space", &space_a, "--other", &space_b],
        vec!["mmdist", "--kind", "bound", "--mass", "0.02", "--eps", "0.1"],
        vec!["audit", "--instances", &instances],
    ];
    for (i, args) in invocations.iter().enumerate() {
        let first = dir.path().join(format!("first_{i}"));
        let second = dir.path().join(format!("second_{i}"));
        for path in [&first, &second] {
            let mut with_out = args.clone();
            with_out.extend(["--out", path.to_str().unwrap()]);
            let out = run(&with_out);
            assert!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "invocation {i} was not reproducible"
        );
    }
}
