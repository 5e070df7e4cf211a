//! Acceptance suite: one line per criterion, nonzero exit on any unexpected
//! failure. Run with `cargo test --test acceptance`.

use nalgebra::SymmetricEigen;
use pq_elliptic::extreme::{
    exponent_at_phase, oscillation_witnesses, phase_for_exponent, phase_of_t,
};
use pq_elliptic::hessian::{
    ellipticity_bounds, hess_matrix, hess_quadratic_form, hess_spectrum, split_baseline_spectrum,
};
use pq_elliptic::integrand::g_eval;
use pq_elliptic::variational::{
    build_problem, energy_and_gradient, minimize, refinement_study, BoundaryData, Initialization,
    Integrand, SolveOptions,
};
use pq_elliptic::verifier::oracle::random_point;
use pq_elliptic::verifier::{
    check_lemmas, check_subquadratic, check_theorem_g, check_uniform_ellipticity, fd_crosscheck,
    sample_grid, split_contrast, split_ratio_closed_form, subquadratic_constant, ReportSection,
    SampleGridSpec,
};
use pq_elliptic::PQParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    /// Fails as literally stated, for arithmetic reasons given in the detail.
    Unattainable,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn from_checks(checks: Vec<(&str, bool)>) -> Self {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
        if failed.is_empty() {
            Outcome {
                status: Status::Pass,
                detail: format!("{} checks", checks.len()),
            }
        } else {
            Outcome {
                status: Status::Fail,
                detail: format!("failed: {}", failed.join(", ")),
            }
        }
    }
}

fn param_sets() -> Vec<PQParams> {
    vec![
        PQParams::new(2.0, 6.0, Some(0.002), false).unwrap(),
        PQParams::new(1.5, 3.0, Some(0.001), false).unwrap(),
        PQParams::new(1.2, 1.6, Some(0.004), true).unwrap(),
    ]
}

fn pq26() -> PQParams {
    param_sets().remove(0)
}

fn default_grid() -> Vec<f64> {
    sample_grid(&SampleGridSpec::default()).unwrap()
}

fn label(pq: &PQParams) -> String {
    format!("({},{},{})", pq.p, pq.q, pq.epsilon)
}

fn section_failures(s: &ReportSection) -> String {
    s.failures()
        .take(3)
        .map(|r| format!(" {}@{}", r.check_id, r.location))
        .collect()
}

fn lemma_suite() -> Outcome {
    let grid = default_grid();
    let mut checks = Vec::new();
    let mut names = Vec::new();
    for pq in param_sets() {
        let s = check_lemmas(&pq, &grid);
        let ids: std::collections::BTreeSet<&str> =
            s.records.iter().map(|r| r.check_id.as_str()).collect();
        names.push(format!("{} {}", label(&pq), ids.len()) + &section_failures(&s));
        checks.push((
            if s.all_passed {
                "all lemmas"
            } else {
                "lemma margin"
            },
            s.all_passed,
        ));
        checks.push(("seven inequalities", ids.len() == 7));
    }
    let mut out = Outcome::from_checks(checks);
    out.detail = format!("{}; inequalities per set: {}", out.detail, names.join(", "));
    out
}

fn theorem_suite() -> Outcome {
    let grid = default_grid();
    let mut adapted = Vec::new();
    let mut literal_failures = Vec::new();
    for pq in param_sets() {
        let s = check_theorem_g(&pq, &grid);
        adapted.push((label(&pq), s.all_passed, section_failures(&s)));
        let g0 = g_eval(&pq, 1e-8).unwrap();
        let g1 = g_eval(&pq, 1e12).unwrap();
        let small = (g0.ln_g - 1e-8f64.ln()).exp();
        let large = (g1.ln_g - 1e12f64.ln()).exp();
        if !(small < 1e-6 && large > 1e6) {
            literal_failures.push(format!(
                "{}: g/t(1e-8)={small:.3e}, g/t(1e12)={large:.3e}",
                label(&pq)
            ));
        }
    }
    if let Some((name, _, why)) = adapted.iter().find(|a| !a.1) {
        return Outcome {
            status: Status::Fail,
            detail: format!("{name}: {why}"),
        };
    }
    if literal_failures.is_empty() {
        return Outcome {
            status: Status::Pass,
            detail: "all statements and limit probes".into(),
        };
    }
    Outcome {
        status: Status::Unattainable,
        detail: format!(
            "statements, envelope, constant and convexity pass for all sets, and the limits pass at probes moved \
             to where t^(p-1) reaches the thresholds; the fixed probes cannot pass because g = t^p on [0,1] and \
             g/t >= t^(p-1) beyond 1 with p-1 < 1 [{}]",
            literal_failures.join("; ")
        ),
    }
}

fn uniform_ellipticity() -> Outcome {
    let pq = pq26();
    let bounds = ellipticity_bounds(&pq);
    let radii: Vec<f64> = (0..400)
        .map(|k| 10f64.powf(-6.0 + 18.0 * k as f64 / 399.0))
        .collect();
    let mut checks = vec![
        ("cap 9.6154", (bounds.ratio_cap - 9.6154).abs() < 1e-4),
        ("m 0.104", (bounds.m - 0.104).abs() < 1e-12),
    ];
    let section = check_uniform_ellipticity(&pq, &radii, 2, 0);
    checks.push(("ratio and form at 400 radii", section.all_passed));
    let ratio_ok = radii
        .iter()
        .all(|&t| hess_spectrum(&pq, t).unwrap().ratio <= bounds.ratio_cap);
    checks.push(("spectrum ratio", ratio_ok));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut form_ok = true;
    let mut eig_ok = true;
    for k in 0..100 {
        let (rows, cols) = if k % 2 == 0 { (2, 2) } else { (3, 1) };
        let r = 10f64.powf(rng.gen_range(-3.0..6.0));
        let z = random_point(&mut rng, rows, cols, r);
        let lam = random_point(&mut rng, rows, cols, 1.0);
        let spec = hess_spectrum(&pq, r).unwrap();
        let form = hess_quadratic_form(&pq, &z, &lam).unwrap();
        let band = 1e-10 * spec.max_eigenvalue();
        form_ok &= form >= spec.min_eigenvalue() - band && form <= spec.max_eigenvalue() + band;
        let mut eig: Vec<f64> = SymmetricEigen::new(hess_matrix(&pq, &z).unwrap())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(|a, b| {
            (a - spec.lambda_tangent)
                .abs()
                .total_cmp(&(b - spec.lambda_tangent).abs())
        });
        let (radial, tangent) = eig.split_last().unwrap();
        eig_ok &= ((radial - spec.lambda_radial) / spec.lambda_radial).abs() <= 1e-8;
        eig_ok &= tangent
            .iter()
            .all(|e| ((e - spec.lambda_tangent) / spec.lambda_tangent).abs() <= 1e-8);
    }
    checks.push(("quadratic form in spectrum", form_ok));
    checks.push(("dense eigensolver", eig_ok));
    Outcome::from_checks(checks)
}

fn derivative_oracles() -> Outcome {
    let grid = default_grid();
    let mut checks = Vec::new();
    for pq in param_sets() {
        let s = fd_crosscheck(&pq, &grid, 0);
        let hessian_points = s
            .records
            .iter()
            .filter(|r| r.check_id == "fd_hessian")
            .count();
        checks.push(("fd section", s.all_passed));
        checks.push(("20 hessian points", hessian_points == 20));
    }
    Outcome::from_checks(checks)
}

fn subquadratic() -> Outcome {
    let pq = param_sets().remove(2);
    let s = check_subquadratic(&pq, &default_grid()).unwrap();
    let c = subquadratic_constant(&pq);
    let mut out = Outcome::from_checks(vec![
        ("sampled checks", s.all_passed),
        ("constant -0.2208", (c + 0.2208).abs() <= 1e-15),
    ]);
    out.detail = format!("{}; constant = {c}", out.detail);
    out
}

fn oscillation() -> Outcome {
    let pq = pq26();
    let witnesses = oscillation_witnesses(&pq, 1).unwrap();
    let expected = [pq.a - pq.b, pq.a + pq.b, pq.a - pq.b];
    let witness_ok = witnesses.len() == 3
        && witnesses
            .iter()
            .zip(expected)
            .all(|(w, e)| (exponent_at_phase(&pq, w.phase).unwrap() - e).abs() <= 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let round_trip = (0..100).all(|_| {
        let target = rng.gen_range(pq.a - pq.b..=pq.a + pq.b);
        let back = exponent_at_phase(&pq, phase_for_exponent(&pq, target).unwrap()).unwrap();
        (back - target).abs() <= 1e-12
    });
    let consistent = (0..=3000).all(|k| {
        let t = 1.0 + 10f64.powf(-12.0 + 312.0 * k as f64 / 3000.0);
        if t == 1.0 || !t.is_finite() {
            return true;
        }
        let direct = g_eval(&pq, t).unwrap().alpha;
        (direct - exponent_at_phase(&pq, phase_of_t(t).unwrap()).unwrap()).abs() <= 1e-12
    });
    Outcome::from_checks(vec![
        ("witnesses", witness_ok),
        ("round trip", round_trip),
        ("alpha consistency", consistent),
    ])
}

fn variational_lab() -> Outcome {
    let radial = Integrand::radial(pq26());
    let tight = |init| SolveOptions {
        tol: Some(1e-8),
        init,
        ..SolveOptions::default()
    };
    let max_diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let mut checks = Vec::new();

    let affine = build_problem(33, BoundaryData::Affine(1.0, 0.0), radial).unwrap();
    let exact = affine.boundary_extension().unwrap();
    let res = minimize(&affine, &tight(Initialization::Random(1))).unwrap();
    checks.push(("affine converged", res.converged));
    checks.push(("affine max-norm", max_diff(&res.u, &exact) <= 1e-6));
    checks.push((
        "affine gradient 1",
        (res.max_cell_gradient - 1.0).abs() <= 1e-6,
    ));
    checks.push(("affine energy 1", (res.energy - 1.0).abs() <= 1e-6));

    let saddle = build_problem(33, BoundaryData::Saddle, radial).unwrap();
    let base = minimize(&saddle, &tight(Initialization::ZeroFill)).unwrap();
    let spread = [1, 2, 3]
        .iter()
        .map(|&s| {
            max_diff(
                &base.u,
                &minimize(&saddle, &tight(Initialization::Random(s)))
                    .unwrap()
                    .u,
            )
        })
        .fold(0.0, f64::max);
    checks.push(("multi-start", spread <= 1e-6));

    let rows = refinement_study(
        &BoundaryData::Saddle,
        radial,
        &[9, 17, 33, 65],
        &SolveOptions::default(),
    );
    let factors: Vec<f64> = rows
        .as_ref()
        .map(|r| r.iter().filter_map(|row| row.growth_factor).collect())
        .unwrap_or_default();
    checks.push((
        "refinement",
        factors.len() == 3 && factors.iter().all(|f| *f <= 1.1),
    ));

    let probe = build_problem(17, BoundaryData::Saddle, radial).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = probe.with_interior(|_| rng.gen_range(-1.0..1.0));
    let (_, grad) = energy_and_gradient(&probe, &u).unwrap();
    let interior: Vec<usize> = (0..probe.node_count())
        .filter(|&k| !probe.is_boundary(k))
        .collect();
    let fd_ok = (0..20).all(|_| {
        let k = interior[rng.gen_range(0..interior.len())];
        let (mut up, mut down) = (u.clone(), u.clone());
        up[k] += 1e-6;
        down[k] -= 1e-6;
        let fd = (energy_and_gradient(&probe, &up).unwrap().0
            - energy_and_gradient(&probe, &down).unwrap().0)
            / 2e-6;
        (fd - grad[k]).abs() <= 1e-5 * grad[k].abs().max(1.0)
    });
    checks.push(("energy gradient fd", fd_ok));

    let mut out = Outcome::from_checks(checks);
    let factors: Vec<String> = factors.iter().map(|f| format!("{f:.4}")).collect();
    out.detail = format!(
        "{}; growth factors [{}], start spread {spread:.1e}",
        out.detail,
        factors.join(", ")
    );
    out
}

fn contrast() -> Outcome {
    let pq = pq26();
    let cap = ellipticity_bounds(&pq).ratio_cap;
    let section = split_contrast(&pq, &[0, 1, 2, 3]);
    let mut values = Vec::new();
    let mut formula_ok = true;
    for k in 0..4 {
        let s = 10f64.powi(k);
        let r = split_baseline_spectrum(2.0, 6.0, [1.0, s]).unwrap().ratio;
        let expected = 6.0 * 5.0 * 10f64.powi(4 * k) / 2.0;
        formula_ok &= ((r - expected) / expected).abs() <= 1e-12;
        formula_ok &= (split_ratio_closed_form(2.0, 6.0, s) - expected).abs() <= 1e-12 * expected;
        values.push(format!("{r:.6e}"));
    }
    let grid = default_grid();
    let radial_ok = param_sets().iter().all(|pq| {
        let cap = ellipticity_bounds(pq).ratio_cap;
        grid.iter()
            .all(|&t| hess_spectrum(pq, t).unwrap().ratio <= cap)
    });
    let lab = build_problem(17, BoundaryData::Saddle, Integrand::radial(pq)).unwrap();
    let lab_ratio = minimize(&lab, &SolveOptions::default())
        .unwrap()
        .max_cell_ratio;
    let mut out = Outcome::from_checks(vec![
        ("split closed form", section.all_passed && formula_ok),
        (
            "split exceeds cap",
            values.len() == 4 && split_ratio_closed_form(2.0, 6.0, 1e3) > cap,
        ),
        ("radial within cap", radial_ok && lab_ratio <= cap),
    ]);
    out.detail = format!(
        "{}; split ratios k=0..3 [{}], radial cap {cap:.4}",
        out.detail,
        values.join(", ")
    );
    out
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 8] = [
        ("lemma suite", lemma_suite, Duration::from_secs(5)),
        ("theorem suite", theorem_suite, Duration::from_secs(5)),
        (
            "uniform ellipticity",
            uniform_ellipticity,
            Duration::from_secs(5),
        ),
        (
            "derivative oracles",
            derivative_oracles,
            Duration::from_secs(5),
        ),
        ("subquadratic", subquadratic, Duration::from_secs(2)),
        ("oscillation", oscillation, Duration::from_secs(1)),
        ("variational lab", variational_lab, Duration::from_secs(60)),
        ("contrast", contrast, Duration::from_secs(2)),
    ];
    let mut unexpected = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > *budget && outcome.status == Status::Pass {
            outcome.status = Status::Fail;
            outcome.detail = format!("over budget; {}", outcome.detail);
        }
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                unexpected += 1;
                "FAIL"
            }
            Status::Unattainable => "FAIL (unattainable as stated)",
        };
        println!(
            "criterion {}: {tag} {name} [{:.3}s / {}s] {}",
            k + 1,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            outcome.detail
        );
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
