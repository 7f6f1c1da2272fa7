//! The verification suite behind `decohere verify`.
//!
//! Every check is evaluated for each valid `(family, d, k)` with `d <= max_d` over a
//! fixed noise grid and reported as the worst residual across that grid.

use std::fmt::Write;

use decohere::capacity::{
    closed_form_capacity, fejer_eigenvalues, maximize_diagonal_with, OptimizerOptions,
};
use decohere::channels::{
    apply, channel_distance, choi, complementary, compose, pinch_matrix, symmetries, ChannelSpec,
    Family, KrausChannel, Partition,
};
use decohere::matrix::{
    hermitian_eigenvalues, majorization_deficit, ComplexMatrix, DensityMatrix, Spectrum,
};
use decohere::random::random_density_matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const NOISE_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

pub const TOL_COMPLETENESS: f64 = 1e-12;
pub const TOL_CHOI_PSD: f64 = 1e-10;
pub const TOL_IDENTITY: f64 = 1e-12;
pub const TOL_DEGRADABILITY: f64 = 1e-10;
pub const TOL_FEJER: f64 = 1e-9;
pub const TOL_OPTIMIZER_GAP: f64 = 1e-6;
pub const TOL_MAJORIZATION: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub max_d: usize,
    /// Objective tolerance handed to the optimizer.
    pub tol: f64,
    pub seed: u64,
    /// Random states per parameter point for the state-wise identities.
    pub states: usize,
    /// Schur-Horn samples per dimension.
    pub majorization_samples: usize,
    /// Test hook: perturbs the identity Kraus operator so the suite must fail.
    pub corrupt: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_d: 6,
            tol: 1e-9,
            seed: 0,
            states: 20,
            majorization_samples: 500,
            corrupt: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub check: &'static str,
    pub params: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerifyRow {
    fn new(check: &'static str, params: String, residual: f64, tolerance: f64) -> Self {
        Self {
            check,
            params,
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
    pub passed: bool,
}

impl VerifyReport {
    fn from_rows(rows: Vec<VerifyRow>) -> Self {
        let passed = rows.iter().all(|r| r.passed);
        Self { rows, passed }
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<22} {:<22} {:>12} {:>10}  result",
            "check", "params", "residual", "tol"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<22} {:<22} {:>12.3e} {:>10.0e}  {}",
                r.check,
                r.params,
                r.residual,
                r.tolerance,
                if r.passed { "PASS" } else { "FAIL" }
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(
            s,
            "{} checks, {} failed: overall {}",
            self.rows.len(),
            failed,
            if self.passed { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// Valid `(family, d, k)` triples with `2 <= d <= max_d`, in a fixed order.
pub fn family_grid(max_d: usize) -> Vec<(Family, usize, usize)> {
    let mut out = Vec::new();
    for d in 2..=max_d {
        for family in Family::ALL {
            for k in family.valid_ks(d) {
                out.push((family, d, k));
            }
        }
    }
    out
}

fn build(spec: &ChannelSpec, corrupt: bool) -> decohere::Result<KrausChannel> {
    let ch = spec.build()?;
    if !corrupt {
        return Ok(ch);
    }
    let mut kraus = ch.kraus().to_vec();
    let bump = ComplexMatrix::unit(spec.d, spec.d, 0, spec.d - 1).scale_real(0.05);
    kraus[0] = &kraus[0].scale_real(1.01) + &bump;
    KrausChannel::from_kraus_unchecked(kraus)
}

/// Worst residuals for one `(family, d, k)` over the noise grid.
fn check_family_point(
    family: Family,
    d: usize,
    k: usize,
    cfg: &VerifyConfig,
    seed: u64,
) -> decohere::Result<Vec<VerifyRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = format!("{family} d={d} k={k}");
    let full = Partition::singletons(d)?;
    let opts = OptimizerOptions {
        tol: cfg.tol,
        ..OptimizerOptions::default()
    };

    let mut completeness = 0.0_f64;
    let mut choi_psd = 0.0_f64;
    let mut dephasing = 0.0_f64;
    let mut env_dephasing = 0.0_f64;
    let mut unitality = 0.0_f64;
    let mut covariance = 0.0_f64;
    let mut degradability = 0.0_f64;
    let mut optimizer_gap = 0.0_f64;

    for &x in &NOISE_GRID {
        let spec = ChannelSpec::new(family, d, k, x)?;
        let ch = build(&spec, cfg.corrupt)?;
        let comp = complementary(&ch);
        let dk = spec.dephasing_partition();

        completeness = completeness.max(ch.completeness_residual());
        choi_psd = choi_psd.max(-choi(&ch).min_eigenvalue()?);

        let mixed = DensityMatrix::maximally_mixed(d);
        unitality = unitality.max(apply(&ch, &mixed)?.matrix().max_abs_diff(mixed.matrix())?);

        let syms = symmetries(&spec);
        for _ in 0..cfg.states {
            let rho = random_density_matrix(&mut rng, d);
            let out = ch.apply_matrix(rho.matrix())?;
            let lhs = pinch_matrix(&out, &dk)?;
            let rhs = pinch_matrix(rho.matrix(), &dk)?;
            dephasing = dephasing.max(lhs.max_abs_diff(&rhs)?);

            let env = comp.apply_matrix(rho.matrix())?;
            let env_d = comp.apply_matrix(&pinch_matrix(rho.matrix(), &full)?)?;
            env_dephasing = env_dephasing.max(env.max_abs_diff(&env_d)?);

            for sym in &syms {
                let moved = sym.input.conjugate(rho.matrix())?;
                let a = ch.apply_matrix(&moved)?;
                let b = sym.input.conjugate(&out)?;
                covariance = covariance.max(a.max_abs_diff(&b)?);
                let a = comp.apply_matrix(&moved)?;
                let b = sym.environment.conjugate(&env)?;
                covariance = covariance.max(a.max_abs_diff(&b)?);
            }
        }

        degradability = degradability.max(channel_distance(&compose(&comp, &ch)?, &comp)?);

        let q_numeric = match maximize_diagonal_with(&ch, &opts) {
            Ok(o) => o.value,
            Err(decohere::Error::NotConverged { best_value, .. }) => best_value,
            Err(e) => return Err(e),
        };
        optimizer_gap = optimizer_gap.max((q_numeric - closed_form_capacity(&spec)).abs());
    }

    let mut rows = vec![
        VerifyRow::new("cptp_completeness", params.clone(), completeness, TOL_COMPLETENESS),
        VerifyRow::new("choi_psd", params.clone(), choi_psd.max(0.0), TOL_CHOI_PSD),
        VerifyRow::new("dephasing_absorbs", params.clone(), dephasing, TOL_IDENTITY),
        VerifyRow::new("env_ignores_coherence", params.clone(), env_dephasing, TOL_IDENTITY),
        VerifyRow::new("unitality", params.clone(), unitality, TOL_IDENTITY),
        VerifyRow::new("covariance", params.clone(), covariance, TOL_IDENTITY),
        VerifyRow::new("degradability", params.clone(), degradability, TOL_DEGRADABILITY),
        VerifyRow::new("formula_vs_optimizer", params.clone(), optimizer_gap, TOL_OPTIMIZER_GAP),
    ];

    if family == Family::Weak {
        rows.push(VerifyRow::new(
            "fejer_spectrum",
            params,
            fejer_residual(d, k, cfg.corrupt)?,
            TOL_FEJER,
        ));
    }
    Ok(rows)
}

/// Fejér eigenvalues against the circulant block of `Φ_k^c(I/d)` at `x = 1`.
fn fejer_residual(d: usize, k: usize, corrupt: bool) -> decohere::Result<f64> {
    let spec = ChannelSpec::weak(d, k, 1.0)?;
    let comp = complementary(&build(&spec, corrupt)?);
    let env = comp.apply_matrix(DensityMatrix::maximally_mixed(d).matrix())?;
    let block = ComplexMatrix::from_fn(d, d, |r, c| env[(r + 1, c + 1)]);
    let direct = hermitian_eigenvalues(&block)?;
    let fejer = fejer_eigenvalues(d, k)?;
    let sum_err = (fejer.sum() - 1.0).abs();
    Ok(direct
        .max_abs_diff(&Spectrum::new(fejer.lambdas))?
        .max(sum_err))
}

fn schur_horn_row(d: usize, samples: usize, seed: u64) -> decohere::Result<VerifyRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let rho = random_density_matrix(&mut rng, d);
        let eigs = rho.spectrum()?;
        let diag = Spectrum::new(rho.matrix().diagonal_real());
        worst = worst.max(majorization_deficit(&eigs, &diag)?);
    }
    Ok(VerifyRow::new(
        "schur_horn",
        format!("d={d} n={samples}"),
        worst.max(0.0),
        TOL_MAJORIZATION,
    ))
}

/// Runs the whole suite. Deterministic in `cfg.seed`: every parameter point gets its
/// own seed derived from its position, so thread scheduling does not matter.
pub fn run_verify(cfg: &VerifyConfig) -> decohere::Result<VerifyReport> {
    if cfg.max_d < 2 {
        return Err(decohere::Error::BadParameter(format!(
            "--max-d must be at least 2, got {}",
            cfg.max_d
        )));
    }
    let grid = family_grid(cfg.max_d);
    let per_point: decohere::Result<Vec<Vec<VerifyRow>>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(family, d, k))| {
            check_family_point(family, d, k, cfg, cfg.seed.wrapping_add(1 + i as u64))
        })
        .collect();
    let mut rows: Vec<VerifyRow> = per_point?.into_iter().flatten().collect();

    let majorization: decohere::Result<Vec<VerifyRow>> = (2..=cfg.max_d)
        .into_par_iter()
        .map(|d| {
            schur_horn_row(
                d,
                cfg.majorization_samples,
                cfg.seed.wrapping_mul(31).wrapping_add(10_000 + d as u64),
            )
        })
        .collect();
    rows.extend(majorization?);
    Ok(VerifyReport::from_rows(rows))
}
