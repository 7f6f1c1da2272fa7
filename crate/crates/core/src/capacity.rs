//! Quantum capacities of the decohering families.
//!
//! All three families are degradable, so the capacity equals the one-shot coherent
//! information, which is concave and maximized on the diagonal simplex at `I/d`.
//! Closed forms are provided alongside an independent numerical maximization over
//! diagonal inputs and a brute-force search over full density matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::{
    apply, channel_distance, complementary, compose, ChannelSpec, Family, KrausChannel,
};
use crate::matrix::{
    hermitian_eigs, matrix_entropy_bits, xlog2x, ComplexMatrix, DensityMatrix, Spectrum,
    EIGEN_FLOOR,
};
use crate::random::{random_density_matrix, random_density_with_spectrum, random_simplex_point};
use crate::{Error, Result};

/// `I_c(ch, rho) = S(ch(rho)) - S(ch^c(rho))` in bits.
pub fn coherent_information(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    coherent_information_with(ch, &complementary(ch), rho)
}

/// Same as [`coherent_information`] with a precomputed complementary channel.
pub fn coherent_information_with(
    ch: &KrausChannel,
    comp: &KrausChannel,
    rho: &DensityMatrix,
) -> Result<f64> {
    let out = apply(ch, rho)?;
    let env = apply(comp, rho)?;
    Ok(matrix_entropy_bits(out.matrix())? - matrix_entropy_bits(env.matrix())?)
}

/// `log n + (n-1)/n x log(x/n) + (1 - x + x/n) log(1 - x + x/n)` for `n >= 1`.
fn dephasing_formula(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    nf.log2() + (nf - 1.0) * xlog2x(x / nf) + xlog2x(1.0 - x + x / nf)
}

/// Capacity of the fully decohering channel in bits.
pub fn closed_form_capacity_fully(d: usize, x: f64) -> Result<f64> {
    ChannelSpec::fully(d, x)?;
    Ok(dephasing_formula(d, x))
}

/// Capacity of the block decohering channel with `d / k` blocks, in bits.
pub fn closed_form_capacity_block(d: usize, k: usize, x: f64) -> Result<f64> {
    ChannelSpec::block(d, k, x)?;
    Ok((k as f64).log2() + dephasing_formula(d / k, x))
}

/// Capacity of the weakly decohering channel in bits:
/// `log d + sum_{m>=1} x l_m log(x l_m) + c log c` with `c = kx/d + 1 - x`.
pub fn closed_form_capacity_weak(d: usize, k: usize, x: f64) -> Result<f64> {
    ChannelSpec::weak(d, k, x)?;
    let fejer = fejer_eigenvalues(d, k)?;
    let head = k as f64 * x / d as f64 + 1.0 - x;
    let tail: f64 = fejer.lambdas[1..].iter().map(|l| xlog2x(x * l)).sum();
    Ok((d as f64).log2() + tail + xlog2x(head))
}

pub fn closed_form_capacity(spec: &ChannelSpec) -> f64 {
    match spec.family {
        Family::Fully => dephasing_formula(spec.d, spec.x),
        Family::Block => (spec.k as f64).log2() + dephasing_formula(spec.d / spec.k, spec.x),
        Family::Weak => closed_form_capacity_weak(spec.d, spec.k, spec.x).expect("validated spec"),
    }
}

/// The environment state `Λ^c(I/d)` of the fully decohering channel written out directly:
/// corner `1 - x`, border `sqrt(x(1-x))/d`, and `x/d` on the remaining diagonal.
pub fn comp_mixed_matrix_fully(d: usize, x: f64) -> Result<ComplexMatrix> {
    ChannelSpec::fully(d, x)?;
    let border = (x * (1.0 - x)).sqrt() / d as f64;
    Ok(ComplexMatrix::from_fn(d + 1, d + 1, |r, c| {
        let v = match (r, c) {
            (0, 0) => 1.0 - x,
            (0, _) | (_, 0) => border,
            (r, c) if r == c => x / d as f64,
            _ => 0.0,
        };
        Complex64::new(v, 0.0)
    }))
}

/// Spectrum of `Λ^c(I/d)`: `{0, 1 - x + x/d}` from the span of `|0>` and the uniform
/// superposition, and `x/d` on its `d - 1` dimensional complement. `d + 1` values in total.
pub fn spectrum_comp_mixed_fully(d: usize, x: f64) -> Result<Spectrum> {
    ChannelSpec::fully(d, x)?;
    let mut values = vec![0.0, 1.0 - x + x / d as f64];
    values.extend(std::iter::repeat_n(x / d as f64, d - 1));
    Ok(Spectrum::new(values))
}

/// Spectrum of `Φ_k^c(I/d)`: `{x l_1, ..., x l_{d-1}} ∪ {0, kx/d + 1 - x}`.
pub fn spectrum_comp_mixed_weak(d: usize, k: usize, x: f64) -> Result<Spectrum> {
    ChannelSpec::weak(d, k, x)?;
    let fejer = fejer_eigenvalues(d, k)?;
    let mut values: Vec<f64> = fejer.lambdas[1..].iter().map(|l| x * l).collect();
    values.push(0.0);
    values.push(k as f64 * x / d as f64 + 1.0 - x);
    Ok(Spectrum::new(values))
}

/// Eigenvalues `l_m` of the normalized circulant overlap matrix, indexed by Fourier mode `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerSpectrum {
    pub d: usize,
    pub k: usize,
    pub lambdas: Vec<f64>,
}

impl FejerSpectrum {
    pub fn sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// Normalized overlap sequence `b_s = |W_i ∩ W_{i+s}| / (d k)` of cyclic windows of width `k`.
///
/// For `2k <= d` the overlap is `k - s` for `s < k`, `s + k - d` for `s > d - k` and zero
/// in between; for wider windows both wrap-around contributions add up.
pub fn overlap_sequence(d: usize, k: usize) -> Vec<f64> {
    let mut counts = vec![0usize; d];
    for l in 0..k {
        for l2 in 0..k {
            counts[(l2 + d - l) % d] += 1;
        }
    }
    let norm = (d * k) as f64;
    counts.into_iter().map(|c| c as f64 / norm).collect()
}

/// Circulant matrix with first row `seq`: entry `(i, j)` is `seq[(j - i) mod n]`.
pub fn circulant_matrix(seq: &[f64]) -> ComplexMatrix {
    let n = seq.len();
    ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(seq[(j + n - i) % n], 0.0))
}

/// Eigenvalues `sum_s b_s ω^{ms}` of a circulant matrix with a symmetric (`b_s = b_{-s}`)
/// generating sequence, by direct DFT. Real parts only.
pub fn circulant_dft_eigenvalues(seq: &[f64]) -> Vec<f64> {
    let n = seq.len();
    (0..n)
        .map(|m| {
            seq.iter()
                .enumerate()
                .map(|(s, b)| b * (2.0 * PI * ((m * s) % n) as f64 / n as f64).cos())
                .sum()
        })
        .collect()
}

/// `l_0 = k/d`, `l_m = [sin(k π m / d) / sin(π m / d)]^2 / (d k)` for `m >= 1`.
pub fn fejer_eigenvalues(d: usize, k: usize) -> Result<FejerSpectrum> {
    if d == 0 || k == 0 || k > d {
        return Err(Error::BadParameter(format!(
            "window size {k} outside 1..={d}"
        )));
    }
    let (df, kf) = (d as f64, k as f64);
    let mut lambdas = Vec::with_capacity(d);
    lambdas.push(kf / df);
    for m in 1..d {
        let mf = m as f64;
        let ratio = (kf * PI * mf / df).sin() / (PI * mf / df).sin();
        lambdas.push(ratio * ratio / (df * kf));
    }
    debug_assert!(circulant_dft_eigenvalues(&overlap_sequence(d, k))
        .iter()
        .zip(&lambdas)
        .all(|(a, b)| (a - b).abs() < 1e-12));
    Ok(FejerSpectrum { d, k, lambdas })
}

/// How [`maximize_diagonal_with`] obtains the gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMethod {
    /// Central differences along `e_i - p` with the given step.
    FiniteDifference { step: f64 },
    /// `-tr(O_i log σ) + tr(E_i log τ)` from the eigendecompositions of the two outputs.
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    /// Stop once an accepted step improves the objective by less than this
    /// and the Frank-Wolfe gap is below `gap_tol`.
    pub tol: f64,
    /// Certificate threshold: the objective is within `fw_gap` of the optimum.
    pub gap_tol: f64,
    pub max_iters: usize,
    pub gradient: GradientMethod,
    /// Starting point; defaults to `p_i ∝ i + 1` so the uniform optimum is not assumed.
    pub initial: Option<Vec<f64>>,
    pub initial_step: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            gap_tol: 1e-7,
            max_iters: 100_000,
            gradient: GradientMethod::FiniteDifference { step: 1e-6 },
            initial: None,
            initial_step: 1.0,
        }
    }
}

/// Result of a diagonal maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOptimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Frank-Wolfe gap `max_i g_i - <g, p>` at the returned point; bounds the
    /// distance to the optimum for a concave objective.
    pub fw_gap: f64,
}

/// Coherent information restricted to diagonal inputs, using linearity:
/// `ch(diag p) = sum_a p_a ch(|a><a|)`.
struct DiagonalObjective {
    outputs: Vec<ComplexMatrix>,
    environments: Vec<ComplexMatrix>,
}

impl DiagonalObjective {
    fn new(ch: &KrausChannel) -> Result<Self> {
        let comp = complementary(ch);
        let d = ch.d_in();
        let mut outputs = Vec::with_capacity(d);
        let mut environments = Vec::with_capacity(d);
        for a in 0..d {
            let e = ComplexMatrix::unit(d, d, a, a);
            outputs.push(ch.apply_matrix(&e)?);
            environments.push(comp.apply_matrix(&e)?);
        }
        Ok(Self {
            outputs,
            environments,
        })
    }

    fn dim(&self) -> usize {
        self.outputs.len()
    }

    fn mix(parts: &[ComplexMatrix], p: &[f64]) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(parts[0].rows(), parts[0].cols());
        for (m, &w) in parts.iter().zip(p) {
            if w != 0.0 {
                acc = &acc + &m.scale_real(w);
            }
        }
        acc
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        let out = Self::mix(&self.outputs, p);
        let env = Self::mix(&self.environments, p);
        Ok(matrix_entropy_bits(&out)? - matrix_entropy_bits(&env)?)
    }

    /// Gradient up to an additive constant, centred so that `<g, p> = 0`.
    fn gradient(&self, p: &[f64], method: GradientMethod) -> Result<Vec<f64>> {
        let mut g = match method {
            GradientMethod::FiniteDifference { step } => self.fd_gradient(p, step)?,
            GradientMethod::Analytic => self.analytic_gradient(p)?,
        };
        let mean: f64 = g.iter().zip(p).map(|(a, b)| a * b).sum();
        g.iter_mut().for_each(|v| *v -= mean);
        Ok(g)
    }

    fn fd_gradient(&self, p: &[f64], h: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let f0 = self.value(p)?;
        let mut g = vec![0.0; n];
        for (i, gi) in g.iter_mut().enumerate() {
            // moving along e_i - p stays on the simplex
            let shifted = |t: f64| -> Vec<f64> {
                p.iter()
                    .enumerate()
                    .map(|(j, &pj)| pj + t * (if i == j { 1.0 } else { 0.0 } - pj))
                    .collect()
            };
            *gi = if p[i] - h * (1.0 - p[i]) >= 0.0 {
                (self.value(&shifted(h))? - self.value(&shifted(-h))?) / (2.0 * h)
            } else {
                (self.value(&shifted(h))? - f0) / h
            };
        }
        Ok(g)
    }

    fn analytic_gradient(&self, p: &[f64]) -> Result<Vec<f64>> {
        let out_log = log2_weights(&Self::mix(&self.outputs, p))?;
        let env_log = log2_weights(&Self::mix(&self.environments, p))?;
        Ok((0..self.dim())
            .map(|a| -out_log(&self.outputs[a]) + env_log(&self.environments[a]))
            .collect())
    }
}

/// Returns `M -> tr(M log2 σ)` with the logarithm taken on the support of `σ`.
fn log2_weights(sigma: &ComplexMatrix) -> Result<impl Fn(&ComplexMatrix) -> f64> {
    let eig = hermitian_eigs(sigma)?;
    let n = sigma.rows();
    let logs: Vec<Option<f64>> = eig
        .spectrum
        .values()
        .iter()
        .map(|&l| (l > EIGEN_FLOOR).then(|| l.log2()))
        .collect();
    let vectors = eig.vectors;
    Ok(move |m: &ComplexMatrix| {
        let mut acc = 0.0;
        for (j, lg) in logs.iter().enumerate() {
            let Some(lg) = lg else { continue };
            // <v_j| M |v_j>
            let mut quad = Complex64::new(0.0, 0.0);
            for r in 0..n {
                let vr = vectors[(r, j)].conj();
                for c in 0..n {
                    quad += vr * m[(r, c)] * vectors[(c, j)];
                }
            }
            acc += lg * quad.re;
        }
        acc
    })
}

fn default_start(d: usize) -> Vec<f64> {
    let total = (d * (d + 1) / 2) as f64;
    (1..=d).map(|i| i as f64 / total).collect()
}

/// Maximizes `I_c(ch, diag p)` over the probability simplex with default options.
pub fn maximize_diagonal(ch: &KrausChannel, tol: f64, max_iters: usize) -> Result<DiagonalOptimum> {
    maximize_diagonal_with(
        ch,
        &OptimizerOptions {
            tol,
            max_iters,
            ..OptimizerOptions::default()
        },
    )
}

fn centered(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let v: Vec<f64> = values.collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.into_iter().map(|a| a - mean).collect()
}

/// Consecutive sub-`tol` gains after which the gradient is considered noise-dominated.
const STALL_STEPS: usize = 25;

/// Exponentiated-gradient ascent on the simplex with backtracking.
///
/// Each iteration multiplies `p_i` by `exp(η g_i)` and renormalizes. A candidate is
/// accepted only if it does not decrease the objective; otherwise `η` is halved.
/// Terminates when an accepted step gains less than `tol` and either the Frank-Wolfe
/// gap is below `gap_tol` or the gains have stayed below `tol` for several consecutive
/// steps. Also stops when no step size improves the objective.
pub fn maximize_diagonal_with(
    ch: &KrausChannel,
    opts: &OptimizerOptions,
) -> Result<DiagonalOptimum> {
    if ch.d_in() != ch.d_out() {
        return Err(Error::dims(ch.d_in(), ch.d_out()));
    }
    let objective = DiagonalObjective::new(ch)?;
    let d = objective.dim();
    let mut p = match &opts.initial {
        Some(init) => {
            if init.len() != d {
                return Err(Error::LengthMismatch(init.len(), d));
            }
            if init.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
                return Err(Error::BadParameter(
                    "initial point must be strictly positive".into(),
                ));
            }
            let s: f64 = init.iter().sum();
            init.iter().map(|v| v / s).collect()
        }
        None => default_start(d),
    };
    let mut value = objective.value(&p)?;
    let mut eta = opts.initial_step;
    let mut small_gains = 0;

    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;

    for iter in 1..=opts.max_iters {
        let g = objective.gradient(&p, opts.gradient)?;
        let g_max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let fw_gap = g_max;

        // Barzilai-Borwein step in log coordinates, where the update is plain ascent.
        if let Some((prev_p, prev_g)) = &previous {
            let s = centered(p.iter().zip(prev_p).map(|(a, b)| a.ln() - b.ln()));
            let y = centered(g.iter().zip(prev_g).map(|(a, b)| a - b));
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|a| a * a).sum();
            if sy < 0.0 && ss > 0.0 {
                eta = (ss / -sy).clamp(1e-8, 1e6);
            }
        }

        let mut accepted = None;
        for _ in 0..60 {
            let mut cand: Vec<f64> = p
                .iter()
                .zip(&g)
                .map(|(pi, gi)| (pi * (eta * (gi - g_max)).exp()).max(1e-300))
                .collect();
            let s: f64 = cand.iter().sum();
            cand.iter_mut().for_each(|v| *v /= s);
            let v = objective.value(&cand)?;
            if v >= value {
                accepted = Some((cand, v));
                break;
            }
            eta *= 0.5;
        }
        let Some((cand, v)) = accepted else {
            // no step size improves: stationary to working precision
            return Ok(DiagonalOptimum {
                point: p,
                value,
                iterations: iter,
                converged: fw_gap <= opts.gap_tol,
                fw_gap,
            });
        };
        let gain = v - value;
        previous = Some((std::mem::replace(&mut p, cand), g));
        value = v;
        eta = (eta * 2.0).min(1e6);
        small_gains = if gain < opts.tol { small_gains + 1 } else { 0 };
        if small_gains > 0 && (fw_gap <= opts.gap_tol || small_gains >= STALL_STEPS) {
            return Ok(DiagonalOptimum {
                point: p,
                value,
                iterations: iter,
                converged: true,
                fw_gap,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iters,
        best_value: value,
        best_point: p,
    })
}

/// Largest input dimension accepted by [`brute_force_capacity_oracle`].
pub const ORACLE_MAX_DIM: usize = 4;

/// Random search for `max I_c(ch, rho)` over full density matrices.
///
/// Draws `samples` states `U diag(p) U^dagger` (Haar `U`, flat-Dirichlet `p`), then runs
/// `refine_steps` hill-climbing moves `rho -> (1 - ε) rho + ε σ` from the incumbent with
/// Hilbert-Schmidt random `σ`. A proposal replaces the incumbent only if strictly better.
/// `ε` halves after 25 consecutive rejections. Deterministic given `seed`.
pub fn brute_force_capacity_oracle(
    ch: &KrausChannel,
    samples: usize,
    refine_steps: usize,
    seed: u64,
) -> Result<f64> {
    let d = ch.d_in();
    if d > ORACLE_MAX_DIM {
        return Err(Error::BadParameter(format!(
            "oracle limited to d <= {ORACLE_MAX_DIM}, got {d}"
        )));
    }
    let comp = complementary(ch);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best_rho = DensityMatrix::maximally_mixed(d);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples.max(1) {
        let p = random_simplex_point(&mut rng, d);
        let rho = random_density_with_spectrum(&mut rng, &p);
        let v = coherent_information_with(ch, &comp, &rho)?;
        if v > best {
            best = v;
            best_rho = rho;
        }
    }

    let mut eps = 0.5;
    let mut failures = 0;
    for _ in 0..refine_steps {
        let sigma = random_density_matrix(&mut rng, d);
        let mixed = &best_rho.matrix().scale_real(1.0 - eps) + &sigma.matrix().scale_real(eps);
        let rho = DensityMatrix::new_unchecked(mixed);
        let v = coherent_information_with(ch, &comp, &rho)?;
        if v > best {
            best = v;
            best_rho = rho;
            failures = 0;
        } else {
            failures += 1;
            if failures >= 25 {
                eps = (eps * 0.5).max(1e-8);
                failures = 0;
            }
        }
    }
    Ok(best)
}

/// Residual of the degradability identity `ch^c ∘ ch = ch^c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradabilityReport {
    pub spec: ChannelSpec,
    /// Choi max-norm distance between `ch^c ∘ ch` and `ch^c`.
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn degradability_report(spec: &ChannelSpec, tol: f64) -> Result<DegradabilityReport> {
    let ch = spec.build()?;
    let comp = complementary(&ch);
    let degraded = compose(&comp, &ch)?;
    let residual = channel_distance(&degraded, &comp)?;
    Ok(DegradabilityReport {
        spec: *spec,
        residual,
        tol,
        passed: residual <= tol,
    })
}

/// Closed-form and numerically maximized capacity for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub spec: ChannelSpec,
    pub q_closed: f64,
    pub q_numeric: f64,
    pub optimizer_state: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub fw_gap: f64,
}

/// Runs both routes. A non-converged optimizer still yields a result, flagged `converged = false`.
pub fn evaluate_capacity(spec: &ChannelSpec, opts: &OptimizerOptions) -> Result<CapacityResult> {
    let ch = spec.build()?;
    let q_closed = closed_form_capacity(spec);
    let (point, value, iterations, converged, fw_gap) = match maximize_diagonal_with(&ch, opts) {
        Ok(o) => (o.point, o.value, o.iterations, o.converged, o.fw_gap),
        Err(Error::NotConverged {
            iterations,
            best_value,
            best_point,
        }) => (best_point, best_value, iterations, false, f64::NAN),
        Err(e) => return Err(e),
    };
    Ok(CapacityResult {
        spec: *spec,
        q_closed,
        q_numeric: value,
        optimizer_state: point,
        gap: (q_closed - value).abs(),
        iterations,
        converged,
        fw_gap,
    })
}
