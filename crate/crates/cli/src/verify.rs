//! The `verify-all` suite: every check of the library in one deterministic
//! report.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use dkp_sphere::radial::{
    ode_residual, operator_convergence, quantize, quantize_exact, standard_lattice, verify_eigenrelation,
    RadialGrid,
};
use dkp_sphere::report::CheckRow;
use dkp_sphere::zsystem::{
    amplitude_ratios, decoupled_spectrum, endpoint_residual, indicial_cubic, inequality_check,
    refinement_ratios, solve_z_spectrum, CubicBranch, Endpoint, ZEigenSolution, ZSolveConfig,
};

use crate::commands::{algebra_rows, check_report, geometry_rows, seed_or_default, VerifyArgs};
use crate::config::Tolerances;
use crate::{NonConvergence, Report, RunConfig};

/// Lattice points (m, B) for the discretized-operator oracle, n = 0.
pub const OPERATOR_POINTS: [(i64, f64); 6] = [(1, 1.0), (-1, 0.5), (2, 0.0), (0, 1.0), (3, -1.0), (-2, 2.0)];
pub const OPERATOR_CELLS: [usize; 3] = [100, 200, 400];

/// Radial states (m, B, n) whose (λ, B) feed the coupled z-problem.
pub const Z_STATES: [(i64, f64, i64); 4] = [(1, 1.0, 0), (0, 0.0, 1), (1, 0.0, 1), (0, -0.5, 1)];
pub const Z_GRID: usize = 800;
pub const Z_DECOUPLED_GRIDS: [usize; 2] = [400, 800];
pub const Z_NEV: usize = 5;
pub const Z_COUPLED_NEV: usize = 3;

/// Eigenvalues closer than this (relative) count as degenerate for the
/// parity check.
pub const DEGENERATE_GAP: f64 = 1e-6;

pub fn radial_rows(tol: &Tolerances, cfg: &RunConfig) -> anyhow::Result<Vec<CheckRow>> {
    let lattice = standard_lattice();
    let grid = RadialGrid::open_interval(2000);
    let per_point: Vec<anyhow::Result<(bool, bool, f64)>> = cfg.pool()?.install(|| {
        lattice
            .par_iter()
            .map(|(m, b, n)| {
                let lvl = quantize_exact(*m, b, *n);
                let sol = quantize(*m, dkp_sphere::radial::rational_to_f64(b), i64::from(*n))?;
                Ok((
                    lvl.spectrum_residual().is_zero(),
                    lvl.check_hypergeometric(),
                    ode_residual(&sol, &grid)?,
                ))
            })
            .collect()
    });
    let per_point = per_point.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    let spectrum_failures = per_point.iter().filter(|p| !p.0).count();
    let series_failures = per_point.iter().filter(|p| !p.1).count();
    let ode = per_point.iter().map(|p| p.2).fold(0.0, f64::max);

    let sol = quantize(1, 1.0, 0)?;
    let rep = verify_eigenrelation(&sol, &RadialGrid::with_step(1e-3))?;

    let ratios: Vec<f64> = cfg.pool()?.install(|| {
        OPERATOR_POINTS
            .par_iter()
            .map(|&(m, b)| operator_convergence(m, b, 0, &OPERATOR_CELLS).map(|c| c.ratios))
            .collect::<Result<Vec<_>, _>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);

    Ok(vec![
        CheckRow::new("radial/spectrum_identity_exact_failures", spectrum_failures as f64, 0.0),
        CheckRow::new("radial/hypergeometric_series_exact_failures", series_failures as f64, 0.0),
        CheckRow::new("radial/ode_residual_2000", ode, tol.ode_residual),
        CheckRow::new(
            "radial/eigenrelation_m1_b1",
            rep.lower_residual.max(rep.upper_residual),
            tol.eigenrelation,
        ),
        CheckRow::new("radial/composition_shift_m1_b1", (rep.measured_shift - 1.0).abs(), tol.eigenrelation),
        CheckRow::with_outcome(
            "radial/operator_oracle_min_ratio",
            min_ratio,
            tol.operator_ratio,
            min_ratio >= tol.operator_ratio,
        ),
    ])
}

/// Seeded (Λ, B) samples on [0, 20] × [−3, 3].
pub fn indicial_samples(samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| (rng.gen_range(0.0..20.0), rng.gen_range(-3.0..3.0)))
        .collect()
}

pub fn indicial_rows(tol: &Tolerances, samples: usize, seed: u64) -> anyhow::Result<Vec<CheckRow>> {
    let unit = indicial_cubic(1.0, 0.0)?;
    let unit_err = unit
        .roots
        .iter()
        .zip([0.0, 1.0, 3.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut residual: f64 = 0.0;
    let mut vieta: f64 = 0.0;
    let mut triple: f64 = 0.0;
    let mut ratio_res: f64 = 0.0;
    let mut counterexamples = 0usize;
    for (l, b) in indicial_samples(samples, seed) {
        let s = indicial_cubic(l, b)?;
        for k in 0..3 {
            residual = residual.max(s.scaled_residual(k));
        }
        if s.branch == CubicBranch::Trigonometric {
            let [y1, y2, y3] = s.depressed;
            let ymax = y1.abs().max(y2.abs()).max(y3.abs()).max(1.0);
            vieta = vieta
                .max((y1 + y2 + y3).abs() / ymax)
                .max((y1 * y2 + y1 * y3 + y2 * y3 - s.p).abs() / ymax.powi(2))
                .max((y1 * y2 * y3 + s.q).abs() / ymax.powi(3));
            let phi = s.phi.unwrap_or(0.0);
            let c = (phi / 3.0).cos();
            triple = triple.max(((4.0 * c * c - 3.0) * c - phi.cos()).abs());
            for k in 0..3 {
                let r = amplitude_ratios(&s, k)?;
                if r.degenerate {
                    continue;
                }
                let right = [r.a1_over_a2, 1.0, r.a3_over_a2];
                let left = [r.b1_over_b2, 1.0, r.b3_over_b2];
                ratio_res = ratio_res
                    .max(endpoint_residual(s.lambda, s.lambda_prime, r.root, Endpoint::Right, right))
                    .max(endpoint_residual(s.lambda, s.lambda_prime, r.root, Endpoint::Left, left));
            }
        }
        let ineq = inequality_check(l, b);
        if !(ineq.p_negative && ineq.q_negative && ineq.p_dominates) {
            counterexamples += 1;
        }
    }

    let mut zero_field: f64 = 0.0;
    for (l, _) in indicial_samples(samples, seed.wrapping_add(1)) {
        let s = indicial_cubic(l, 0.0)?;
        let d = s.roots.iter().map(|a| (a - l).abs()).fold(f64::INFINITY, f64::min);
        zero_field = zero_field.max(d / (1.0 + l));
    }

    Ok(vec![
        CheckRow::new("indicial/roots_Lambda1_B0", unit_err, tol.cubic_residual),
        CheckRow::new("indicial/polynomial_residual_scaled", residual, tol.cubic_residual),
        CheckRow::new("indicial/vieta_depressed", vieta, tol.vieta),
        CheckRow::new("indicial/triple_angle", triple, tol.triple_angle),
        CheckRow::new("indicial/zero_field_root_Lambda", zero_field, tol.cubic_residual),
        CheckRow::new("indicial/amplitude_ratio_residual", ratio_res, tol.ratio_residual),
        // informational: where p < 0, q < 0, |p| > |q| fails
        CheckRow::new("indicial/pq_inequality_counterexamples", counterexamples as f64, f64::INFINITY),
    ])
}

fn z_config(tol: &Tolerances, grid: usize, nev: usize, refinements: usize, seed: u64) -> ZSolveConfig {
    ZSolveConfig {
        grid,
        nev,
        refinements,
        imag_tol: tol.z_imag,
        seed,
        ..ZSolveConfig::default()
    }
}

fn nondegenerate(sols: &[ZEigenSolution], k: usize) -> bool {
    let e = sols[k].eps2m;
    let gap = |j: usize| (sols[j].eps2m - e).abs() > DEGENERATE_GAP * (1.0 + e.abs());
    (k == 0 || gap(k - 1)) && (k + 1 >= sols.len() || gap(k + 1))
}

pub fn zsystem_rows(tol: &Tolerances, seed: u64, cfg: &RunConfig) -> anyhow::Result<Vec<CheckRow>> {
    let oracle = decoupled_spectrum(Z_NEV);
    let decoupled = cfg.pool()?.install(|| {
        Z_DECOUPLED_GRIDS
            .par_iter()
            .map(|&g| solve_z_spectrum(0.0, 0.0, &z_config(tol, g, Z_NEV, 1, seed)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let errors: Vec<Vec<f64>> = decoupled
        .iter()
        .map(|sols| sols.iter().zip(&oracle).map(|(s, o)| (s.eps2m - o).abs() / o).collect())
        .collect();
    let coarse_err = errors[0].iter().copied().fold(0.0, f64::max);
    let improvement = errors[0]
        .iter()
        .zip(&errors[1])
        .map(|(a, b)| a / b)
        .fold(f64::INFINITY, f64::min);

    let states = Z_STATES
        .iter()
        .map(|&(m, b, n)| quantize(m, b, n).map(|s| (s.lambda, s.b)))
        .collect::<Result<Vec<_>, _>>()?;
    let coupled = cfg.pool()?.install(|| {
        states
            .par_iter()
            .map(|&(l, b)| solve_z_spectrum(l, b, &z_config(tol, Z_GRID, Z_COUPLED_NEV, 3, seed)))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut min_ratio = f64::INFINITY;
    let mut exponent: f64 = 0.0;
    let mut parity: f64 = 0.0;
    let mut unconverged = Vec::new();
    for sols in &coupled {
        for (k, s) in sols.iter().enumerate() {
            if !s.converged {
                unconverged.push(format!("lambda={} B={} index={} history={:?}", s.lambda, s.b, k, s.refinement_history));
            }
            for r in refinement_ratios(&s.refinement_history) {
                min_ratio = min_ratio.min(r);
            }
            exponent = exponent.max(s.exponent_mismatch().unwrap_or(f64::INFINITY));
            if s.b == 0.0 && nondegenerate(sols, k) {
                parity = parity.max(s.parity_residual());
            }
        }
    }
    if !unconverged.is_empty() {
        return Err(NonConvergence(format!("z-refinement did not converge: {}", unconverged.join("; "))).into());
    }
    Ok(vec![
        CheckRow::new("zsolve/decoupled_rel_error_grid400", coarse_err, tol.z_oracle),
        CheckRow::with_outcome(
            "zsolve/decoupled_improvement_grid800",
            improvement,
            tol.z_refinement_ratio,
            improvement >= tol.z_refinement_ratio,
        ),
        CheckRow::with_outcome(
            "zsolve/coupled_refinement_min_ratio",
            min_ratio,
            tol.z_refinement_ratio,
            min_ratio >= tol.z_refinement_ratio,
        ),
        CheckRow::new("zsolve/exponent_fit_rel_error", exponent, tol.exponent_fit),
        CheckRow::new("zsolve/parity_B0", parity, tol.parity),
    ])
}

pub fn verify_all(args: &VerifyArgs, cfg: &RunConfig) -> anyhow::Result<Report> {
    let seed = seed_or_default(args.seed, cfg);
    let tol = &cfg.tolerances;
    let mut rows: Vec<CheckRow> = algebra_rows()
        .into_iter()
        .map(|mut r| {
            r.check_name = format!("algebra/{}", r.check_name);
            r
        })
        .collect();
    rows.extend(geometry_rows(args.samples, seed, 1e-4, cfg)?.into_iter().map(|mut r| {
        r.check_name = format!("geometry/{}", r.check_name);
        r
    }));
    rows.extend(radial_rows(tol, cfg)?);
    rows.extend(indicial_rows(tol, 200.max(args.samples), seed)?);
    rows.extend(zsystem_rows(tol, seed, cfg)?);
    Ok(check_report(&rows))
}
