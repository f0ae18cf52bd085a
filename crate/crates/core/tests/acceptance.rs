//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! show up in the test log.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use collapse_spectra::coeffs::{
    coefficient_matrices, lambda0, lambda1_general, lambda1_radial_reduced, mu_eigenvalues, CoeffOptions,
    FlatteningProfile, RadialProfile,
};
use collapse_spectra::ellipse::verify_expansion;
use collapse_spectra::harness::{
    convergence_study, validate_eigenvalue, LimitSelector, Thresholds, DEFAULT_EPS_SCHEDULE, DEFAULT_VALIDATION_GRID,
};
use collapse_spectra::limit_spectrum::{
    eigenpair, group_degenerate, limit_eigenvalues, AngularPart, BoundaryCondition, EigenGroup, DEFAULT_GROUP_TOL,
};
use collapse_spectra::meridian::{spectrum, GridRule};
use collapse_spectra::numerics::{
    integrate_adaptive, symmetric_eigen_dense, tridiag_eigen_smallest, Matrix, TridiagonalSystem,
};
use collapse_spectra::specfun::{bessel_zero, elliptic_e, ZeroKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(cond: bool, what: String, failures: &mut Vec<String>) {
    if !cond {
        failures.push(what);
    }
}

fn finish(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: summary }
    } else {
        Outcome {
            pass: false,
            detail: format!("{summary}; failed: {}", failures.join("; ")),
        }
    }
}

fn group(bc: BoundaryCondition, nu: u32) -> EigenGroup {
    let p = eigenpair(bc, nu, 1, AngularPart::Cos).unwrap();
    group_degenerate(p.lambda, DEFAULT_GROUP_TOL).unwrap()
}

fn limit_values() -> Outcome {
    let mut f = Vec::new();
    let list = limit_eigenvalues(10).unwrap();
    let find = |bc, nu| list.iter().find(|e| e.bc == bc && e.nu == nu && e.k == 1).unwrap().lambda;
    let d = find(BoundaryCondition::Dirichlet, 0);
    let n = find(BoundaryCondition::Neumann, 1);
    check((d - 5.7831).abs() <= 5e-5, format!("j01^2 = {d}"), &mut f);
    check((n - 3.3900).abs() <= 5e-5, format!("j'11^2 = {n}"), &mut f);
    finish(f, format!("j01^2 = {d:.6} (|diff| {:.1e}), j'11^2 = {n:.6} (|diff| {:.1e})", (d - 5.7831).abs(), (n - 3.39).abs()))
}

fn lambda0_values() -> Outcome {
    let mut f = Vec::new();
    let profile = FlatteningProfile::ellipsoid();
    let d = lambda0(&group(BoundaryCondition::Dirichlet, 0), &profile);
    let n = lambda0(&group(BoundaryCondition::Neumann, 1), &profile);
    check((d[(0, 0)] - 11.5664).abs() <= 1e-3, format!("Dirichlet {}", d[(0, 0)]), &mut f);
    for i in 0..2 {
        check((n[(i, i)] - 6.7799).abs() <= 1e-3, format!("Neumann ({i},{i}) {}", n[(i, i)]), &mut f);
    }
    check(n.max_abs_off_diagonal() <= 1e-8, format!("off-diagonal {}", n.max_abs_off_diagonal()), &mut f);
    finish(
        f,
        format!(
            "Dirichlet {:.6}, Neumann diag({:.6}, {:.6}), off {:.1e}",
            d[(0, 0)],
            n[(0, 0)],
            n[(1, 1)],
            n.max_abs_off_diagonal()
        ),
    )
}

fn reduced_values() -> Outcome {
    let mut f = Vec::new();
    let profile = FlatteningProfile::ellipsoid();
    let d = eigenpair(BoundaryCondition::Dirichlet, 0, 1, AngularPart::Cos).unwrap();
    let n = eigenpair(BoundaryCondition::Neumann, 1, 1, AngularPart::Cos).unwrap();
    let vd = lambda1_radial_reduced(&d, &profile).unwrap();
    let vn = lambda1_radial_reduced(&n, &profile).unwrap();
    check((vd + 6.0871).abs() <= 2e-3, format!("Dirichlet {vd}"), &mut f);
    check((vn + 1.8555).abs() <= 2e-3, format!("Neumann {vn}"), &mut f);
    finish(f, format!("Dirichlet {vd:.6}, Neumann {vn:.6}"))
}

fn general_vs_reduced() -> Outcome {
    let mut f = Vec::new();
    let profile = FlatteningProfile::ellipsoid();
    let opts = CoeffOptions::default();
    let mut parts = Vec::new();
    for (bc, nu) in [(BoundaryCondition::Dirichlet, 0), (BoundaryCondition::Neumann, 1)] {
        let g = group(bc, nu);
        let reduced = lambda1_radial_reduced(&g.pairs[0], &profile).unwrap();
        let general = lambda1_general(&g, &profile, &opts).unwrap();
        let worst = (0..g.multiplicity())
            .map(|i| (general[(i, i)] - reduced).abs())
            .fold(0.0, f64::max);
        check(worst <= 1e-3, format!("{bc} differs by {worst:.2e}"), &mut f);
        parts.push(format!("{bc} general {:.6} vs reduced {reduced:.6} (diff {worst:.1e})", general[(0, 0)]));
    }
    finish(f, parts.join(", "))
}

fn ellipse_decay() -> Outcome {
    let mut f = Vec::new();
    let rows = verify_expansion(1, &[0.1, 0.05, 0.025]).unwrap();
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled_residual).collect();
    for w in scaled.windows(2) {
        check(w[1] < w[0], format!("not decreasing: {w:?}"), &mut f);
        check(w[1] <= 0.5 * w[0], format!("ratio {:.3} above 0.5", w[1] / w[0]), &mut f);
    }
    finish(
        f,
        format!(
            "residual/eps^2 = [{}]",
            scaled.iter().map(|s| format!("{s:.4e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn sphere_sanity() -> Outcome {
    let mut f = Vec::new();
    let s = spectrum(1.0, 2, 3, GridRule::Fixed(4000)).unwrap();
    let values = s.expanded();
    let expected = [0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0];
    let worst = values.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(worst <= 1e-3, format!("sphere spectrum off by {worst:.2e}"), &mut f);
    let study = convergence_study(1.0, 0, 1, &[500, 1000, 2000, 4000]).unwrap();
    let order = study.order.unwrap_or(f64::NAN);
    check((1.8..=2.2).contains(&order), format!("order {order}"), &mut f);
    finish(f, format!("max deviation {worst:.2e} at N = 4000, observed order {order:.3}"))
}

fn end_to_end() -> Outcome {
    let mut f = Vec::new();
    let t = Thresholds::default();
    let mut parts = Vec::new();
    for sel in ["dirichlet:0:1", "neumann:1:1"] {
        let sel: LimitSelector = sel.parse().unwrap();
        let fit = match validate_eigenvalue(
            sel,
            &DEFAULT_EPS_SCHEDULE,
            DEFAULT_VALIDATION_GRID,
            &CoeffOptions::default(),
            &t,
        ) {
            Ok(fit) => fit,
            Err(e) => {
                f.push(format!("{sel}: {e}"));
                continue;
            }
        };
        check(
            fit.c1_pass,
            format!(
                "{sel} c1 {:.4} vs {:.4} ({:.1}% off, c1/lambda = {:.3})",
                fit.c1_fit,
                fit.c1_predicted,
                100.0 * fit.c1_relative_error,
                fit.c1_over_lambda
            ),
            &mut f,
        );
        check(
            fit.c2_pass || fit.remainder_pass,
            format!(
                "{sel} c2 {:.4} vs {:.4} ({:.1}% off) and remainder decay {:?} below {}",
                fit.c2_fit,
                fit.c2_predicted,
                100.0 * fit.c2_relative_error,
                fit.remainder_decay.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>(),
                t.remainder_decay
            ),
            &mut f,
        );
        // Diagnostic only: remainder decay with half the predicted ε² ln ε
        // coefficient.
        let halved: Vec<f64> = fit
            .eps_schedule
            .iter()
            .zip(&fit.direct)
            .map(|(&e, &d)| {
                let p = fit.lambda_limit + 0.5 * fit.c1_predicted * e * e * e.ln() + fit.c2_predicted * e * e;
                (d - p).abs() / (e * e)
            })
            .collect();
        let halved_decay: Vec<f64> = halved.windows(2).map(|w| (w[0] / w[1] * 100.0).round() / 100.0).collect();
        parts.push(format!(
            "{sel} c1 = {:.4}, c2 = {:.4} (remainder decay with half the eps^2 ln eps coefficient: {halved_decay:?})",
            fit.c1_fit, fit.c2_fit
        ));
    }
    finish(f, parts.join(", "))
}

fn property_suites() -> Outcome {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // Interlacing j_{ν,k} < j_{ν+1,k} < j_{ν,k+1}; zeros of J'_ν alternate
    // with those of J_ν (for ν = 0 the zero at the origin is not counted).
    let j = |n, k| bessel_zero(n, k, ZeroKind::J).unwrap().location;
    let jp = |n, k| bessel_zero(n, k, ZeroKind::JPrime).unwrap().location;
    for nu in 0..=5 {
        for k in 1..=10 {
            let (a, b, c) = (j(nu, k), j(nu + 1, k), j(nu, k + 1));
            check(a < b && b < c, format!("interlacing nu={nu} k={k}"), &mut f);
            let ok = if nu == 0 {
                a < jp(0, k) && jp(0, k) < c
            } else {
                jp(nu, k) < a && a < jp(nu, k + 1)
            };
            check(ok, format!("J/J' alternation nu={nu} k={k}"), &mut f);
        }
    }

    // AGM against quadrature.
    for _ in 0..100 {
        let m: f64 = rng.gen_range(0.0..1.0);
        let q = integrate_adaptive(|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14).unwrap();
        let e = elliptic_e(m).unwrap();
        check((e - q.value).abs() <= 1e-11, format!("E({m}) {e} vs {}", q.value), &mut f);
    }

    // Symmetry of the coefficient matrices, including a non-ellipsoid
    // profile.
    let opts = CoeffOptions::default();
    let bent = FlatteningProfile::symmetric(RadialProfile::from_q_coeffs(vec![2.0, -3.0, 1.0]).unwrap());
    for profile in [FlatteningProfile::ellipsoid(), bent] {
        for g in [group(BoundaryCondition::Neumann, 1), group(BoundaryCondition::Neumann, 2)] {
            let m = coefficient_matrices(&g, &profile, &opts).unwrap();
            let scale = m.lambda1.max_abs().max(1.0);
            check(m.lambda0.asymmetry() <= 1e-10 * scale, "Λ0 asymmetric".into(), &mut f);
            check(m.lambda1.asymmetry() <= 1e-10 * scale, "Λ1 asymmetric".into(), &mut f);
        }
    }

    // Sturm counts bracket every computed eigenvalue; dense oracle agrees.
    for trial in 0..50 {
        let n = rng.gen_range(1..=50);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let e: Vec<f64> = (1..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mass: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let sys = TridiagonalSystem::with_mass(d.clone(), e.clone(), mass.clone()).unwrap();
        let vals: Vec<f64> = tridiag_eigen_smallest(&sys, n, false).unwrap().iter().map(|p| p.value).collect();
        let dense = Matrix::from_fn(n, |i, j| {
            let a = if i == j {
                d[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            };
            a / (mass[i] * mass[j]).sqrt()
        });
        let oracle = symmetric_eigen_dense(&dense).unwrap().values;
        for (i, (v, o)) in vals.iter().zip(&oracle).enumerate() {
            let tol = 1e-9 * (1.0 + o.abs());
            check((v - o).abs() <= tol, format!("trial {trial}: eigenvalue {i} {v} vs {o}"), &mut f);
            check(sys.sturm_count(v - tol) <= i, format!("trial {trial}: count below {i}"), &mut f);
            check(sys.sturm_count(v + tol) >= i + 1, format!("trial {trial}: count above {i}"), &mut f);
        }
    }

    // Weyl bound for μ_k(ε).
    let profile = FlatteningProfile::ellipsoid();
    for (bc, nu) in [(BoundaryCondition::Dirichlet, 0), (BoundaryCondition::Neumann, 1)] {
        let m = coefficient_matrices(&group(bc, nu), &profile, &opts).unwrap();
        let base = symmetric_eigen_dense(&m.lambda0).unwrap().values;
        let norm = m.lambda1.spectral_norm_symmetric().unwrap();
        for eps in [0.1_f64, 0.01] {
            let mu = mu_eigenvalues(&m.lambda0, &m.lambda1, eps).unwrap();
            for (a, b) in mu.iter().zip(&base) {
                check((a - b).abs() <= norm / eps.ln().abs() + 1e-12, format!("Weyl {bc} eps={eps}"), &mut f);
            }
        }
    }
    finish(f, "interlacing, AGM, symmetry, Sturm and Weyl checks".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("limit eigenvalues", limit_values, Duration::from_secs(1)),
        ("Lambda0 matrices", lambda0_values, Duration::from_secs(1)),
        ("Lambda1 reduced formulas", reduced_values, Duration::from_secs(5)),
        ("Lambda1 general vs reduced", general_vs_reduced, Duration::from_secs(30)),
        ("ellipse closed form", ellipse_decay, Duration::from_millis(100)),
        ("direct solver sanity", sphere_sanity, Duration::from_secs(10)),
        ("end-to-end asymptotics", end_to_end, Duration::from_secs(600)),
        ("property suites", property_suites, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > *budget {
            outcome.pass = false;
            outcome.detail = format!("{}; runtime {elapsed:.2?} over budget {budget:?}", outcome.detail);
        }
        println!(
            "criterion {}: {} {name}: {} [{elapsed:.2?}]",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
