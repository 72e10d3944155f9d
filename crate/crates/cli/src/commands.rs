use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use dkp_sphere::algebra::{algebra_checks, build_dkp_set};
use dkp_sphere::geometry::{geometry_checks, GeometryCheckConfig, GeometryTolerances};
use dkp_sphere::radial::{quantize, quantize_exact, radial_wavefunction, rational_to_f64, RadialGrid};
use dkp_sphere::report::{all_pass, CheckRow};
use dkp_sphere::zsystem::{amplitude_ratios, frobenius_exponents, indicial_cubic, solve_z_spectrum, ZSolveConfig};

use crate::table::{Cell, Table};
use crate::{Report, RunConfig, UsageError, EXIT_FAIL, EXIT_NONCONVERGED, EXIT_PASS};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Args, Serialize)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Sampling seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub m_max: u32,
    /// Comma-separated field values; decimals and fractions such as -1/2
    /// are read as exact rationals.
    #[arg(long = "b", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub b: Vec<String>,
    #[arg(long)]
    pub n_max: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct RadialEvalArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub n: i64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct IndicialArgs {
    #[arg(long = "Lambda", allow_negative_numbers = true)]
    pub big_lambda: f64,
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ZsolveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: f64,
    /// Base grid size; refinements double it.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    #[arg(long, default_value_t = 5)]
    pub nev: usize,
    /// Number of grids in the refinement sequence.
    #[arg(long, default_value_t = 3)]
    pub refinements: usize,
    /// Cap on subspace iterations per grid.
    #[arg(long, default_value_t = 5000)]
    pub max_iterations: usize,
    /// Seed of the starting block (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write x, Z1, Z2bar, Z3 per eigenstate (finest grid) as CSV.
    #[arg(long)]
    pub channels: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Seed for all sampled checks (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

pub fn seed_or_default(flag: Option<u64>, cfg: &RunConfig) -> u64 {
    flag.or(cfg.seed).unwrap_or(DEFAULT_SEED)
}

/// Report for a list of checks: exit 1 if any failed.
pub fn check_report(rows: &[CheckRow]) -> Report {
    let passed = rows.iter().filter(|r| r.pass).count();
    Report {
        table: Table::from_checks(rows),
        checks_passed: passed,
        checks_total: rows.len(),
        exit: if all_pass(rows) { EXIT_PASS } else { EXIT_FAIL },
    }
}

pub fn algebra_rows() -> Vec<CheckRow> {
    let set = build_dkp_set();
    algebra_checks(&set)
        .into_iter()
        .map(|c| CheckRow::with_outcome(c.name, c.residual, 0.0, c.passed))
        .collect()
}

pub fn algebra_check() -> anyhow::Result<Report> {
    Ok(check_report(&algebra_rows()))
}

pub fn geometry_tolerances(cfg: &RunConfig) -> GeometryTolerances {
    let t = &cfg.tolerances;
    GeometryTolerances {
        christoffel_fd: t.christoffel_fd,
        christoffel_symmetry: 0.0,
        metric_compatibility: t.metric_compatibility,
        tetrad_orthonormality: t.tetrad_orthonormality,
        ricci_rotation: t.ricci_rotation,
        field_strength: t.field_strength,
    }
}

pub fn geometry_rows(samples: usize, seed: u64, step: f64, cfg: &RunConfig) -> anyhow::Result<Vec<CheckRow>> {
    if samples == 0 {
        return Err(UsageError("--samples must be positive".into()).into());
    }
    if !(step > 0.0 && step < 0.1) {
        return Err(UsageError(format!("--step must lie in (0, 0.1), got {step}")).into());
    }
    Ok(geometry_checks(&GeometryCheckConfig {
        samples,
        seed,
        step,
        tolerances: geometry_tolerances(cfg),
    })?)
}

pub fn geometry_check(args: &GeometryArgs, cfg: &RunConfig) -> anyhow::Result<Report> {
    let seed = seed_or_default(args.seed, cfg);
    Ok(check_report(&geometry_rows(args.samples, seed, args.step, cfg)?))
}

/// Reads a field value as an exact rational: integers, fractions `p/q`,
/// and decimals with an optional exponent. Anything else that parses as a
/// float is converted exactly from its binary value.
pub fn parse_rational(s: &str) -> Result<BigRational, UsageError> {
    use num_rational::BigRational as Q;
    let t = s.trim();
    let bad = || UsageError(format!("cannot read '{s}' as a number"));
    if let Some((p, q)) = t.split_once('/') {
        let p: num_bigint::BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == num_bigint::BigInt::from(0) {
            return Err(UsageError(format!("zero denominator in '{s}'")));
        }
        return Ok(Q::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let decimal = !digits.is_empty()
        && digits.trim_start_matches(['-', '+']).chars().all(|c| c.is_ascii_digit())
        && !digits.trim_start_matches(['-', '+']).is_empty()
        && !frac_part.starts_with(['-', '+']);
    if decimal && exponent.unsigned_abs() <= 400 {
        let n: num_bigint::BigInt = digits.parse().map_err(|_| bad())?;
        let scale = exponent - frac_part.len() as i32;
        let ten = num_bigint::BigInt::from(10);
        let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
        return Ok(if scale >= 0 {
            Q::from_integer(n * pow)
        } else {
            Q::new(n, pow)
        });
    }
    let f: f64 = t.parse().map_err(|_| bad())?;
    Q::from_float(f).ok_or_else(bad)
}

pub fn spectrum(args: &SpectrumArgs, cfg: &RunConfig) -> anyhow::Result<Report> {
    let fields = args
        .b
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>, _>>()?;
    let m_max = i64::from(args.m_max);
    let jobs: Vec<(BigRational, i64, u32)> = fields
        .iter()
        .flat_map(|b| (-m_max..=m_max).flat_map(move |m| (0..=args.n_max).map(move |n| (b.clone(), m, n))))
        .collect();
    let rows: Vec<(Vec<Cell>, bool)> = cfg.pool()?.install(|| {
        jobs.par_iter()
            .map(|(b, m, n)| {
                let lvl = quantize_exact(*m, b, *n);
                let residual = lvl.spectrum_residual();
                let ok = num_traits::Zero::is_zero(&residual);
                let row = vec![
                    Cell::Int(*m),
                    rational_to_f64(b).into(),
                    Cell::Int(i64::from(*n)),
                    rational_to_f64(&lvl.a_r).into(),
                    rational_to_f64(&lvl.b_r).into(),
                    rational_to_f64(&lvl.lambda).into(),
                    rational_to_f64(&lvl.lambda_prime).into(),
                    rational_to_f64(&lvl.big_lambda).into(),
                    rational_to_f64(&lvl.big_n).into(),
                    rational_to_f64(&residual).into(),
                    rational_to_f64(&lvl.n_times_n_plus_one()).into(),
                ];
                (row, ok)
            })
            .collect()
    });
    let mut table = Table::new(vec![
        "m",
        "B",
        "n",
        "a_r",
        "b_r",
        "lambda",
        "lambda_prime",
        "Lambda",
        "N",
        "check_2Lambda_plus_B2",
        "N_times_Nplus1",
    ]);
    let total = rows.len();
    let passed = rows.iter().filter(|r| r.1).count();
    for (row, _) in rows {
        table.push(row);
    }
    Ok(Report {
        table,
        checks_passed: passed,
        checks_total: total,
        exit: if passed == total { EXIT_PASS } else { EXIT_FAIL },
    })
}

pub fn radial_eval(args: &RadialEvalArgs) -> anyhow::Result<Report> {
    if args.points < 1 {
        return Err(UsageError("--points must be positive".into()).into());
    }
    let sol = quantize(args.m, args.b, args.n)?;
    let grid = RadialGrid::open_interval(args.points);
    let values = radial_wavefunction(&sol, &grid.points)?;
    let mut table = Table::new(vec!["r", "R"]);
    for (r, v) in grid.points.iter().zip(values) {
        table.push(vec![(*r).into(), v.into()]);
    }
    Ok(Report::data(table))
}

pub fn indicial(args: &IndicialArgs) -> anyhow::Result<Report> {
    let spec = indicial_cubic(args.big_lambda, args.b)?;
    let exps = frobenius_exponents(&spec);
    let mut table = Table::new(vec![
        "Lambda",
        "B",
        "lambda",
        "lambda_prime",
        "a_c",
        "b_c",
        "c_c",
        "p",
        "q",
        "phi",
        "branch",
        "root_index",
        "Y",
        "A",
        "A_im",
        "exp_regular",
        "exp_singular",
        "a1_over_a2",
        "a3_over_a2",
        "b1_over_b2",
        "b3_over_b2",
        "degenerate",
    ]);
    for k in 0..3 {
        let (reg, sing) = match &exps[k] {
            Ok(e) => (Some(e.regular), Some(e.singular)),
            Err(_) => (None, None),
        };
        let ratios = amplitude_ratios(&spec, k).ok();
        let finite = |v: f64| Some(v).filter(|x| x.is_finite());
        table.push(vec![
            spec.big_lambda.into(),
            spec.b.into(),
            spec.lambda.into(),
            spec.lambda_prime.into(),
            spec.cubic_coeffs[0].into(),
            spec.cubic_coeffs[1].into(),
            spec.cubic_coeffs[2].into(),
            spec.p.into(),
            spec.q.into(),
            spec.phi.into(),
            format!("{:?}", spec.branch).to_lowercase().into(),
            k.into(),
            spec.depressed[k].into(),
            spec.roots[k].into(),
            spec.roots_im[k].into(),
            reg.into(),
            sing.into(),
            ratios.and_then(|r| finite(r.a1_over_a2)).into(),
            ratios.and_then(|r| finite(r.a3_over_a2)).into(),
            ratios.and_then(|r| finite(r.b1_over_b2)).into(),
            ratios.and_then(|r| finite(r.b3_over_b2)).into(),
            ratios.map_or(Cell::Empty, |r| r.degenerate.into()),
        ]);
    }
    Ok(Report::data(table))
}

pub fn zsolve_config(args: &ZsolveArgs, cfg: &RunConfig) -> anyhow::Result<ZSolveConfig> {
    if args.nev == 0 {
        return Err(UsageError("--nev must be positive".into()).into());
    }
    if args.refinements < 2 {
        return Err(UsageError("--refinements must be at least 2 to judge convergence".into()).into());
    }
    Ok(ZSolveConfig {
        grid: args.grid,
        nev: args.nev,
        refinements: args.refinements,
        imag_tol: cfg.tolerances.z_imag,
        max_iterations: args.max_iterations,
        seed: seed_or_default(args.seed, cfg),
        ..ZSolveConfig::default()
    })
}

pub fn zsolve(args: &ZsolveArgs, cfg: &RunConfig) -> anyhow::Result<Report> {
    let zcfg = zsolve_config(args, cfg)?;
    let sols = solve_z_spectrum(args.lambda, args.b, &zcfg)?;
    let mut table = Table::new(vec!["index", "eps2M", "left_exp_fit", "right_exp_fit", "grid", "converged"]);
    for s in &sols {
        table.push(vec![
            s.index.into(),
            s.eps2m.into(),
            s.left_exponent.into(),
            s.right_exponent.into(),
            s.finest_grid().into(),
            s.converged.into(),
        ]);
    }
    if let Some(path) = &args.channels {
        let mut ch = Table::new(vec!["index", "x", "Z1", "Z2bar", "Z3"]);
        for s in &sols {
            for j in 0..s.grid.len() {
                ch.push(vec![
                    s.index.into(),
                    s.grid[j].into(),
                    s.z1[j].into(),
                    s.z2bar[j].into(),
                    s.z3[j].into(),
                ]);
            }
        }
        std::fs::write(path, ch.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
    }
    let converged = sols.iter().filter(|s| s.converged).count();
    Ok(Report {
        table,
        checks_passed: converged,
        checks_total: sols.len(),
        exit: if converged == sols.len() { EXIT_PASS } else { EXIT_NONCONVERGED },
    })
}
