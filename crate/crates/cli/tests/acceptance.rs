//! Acceptance suite. Runs every criterion at its stated tolerance, prints one line per
//! criterion and exits non-zero if any fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use decohere::capacity::{
    brute_force_capacity_oracle, closed_form_capacity, closed_form_capacity_fully,
    coherent_information_with, comp_mixed_matrix_fully, fejer_eigenvalues, maximize_diagonal,
    spectrum_comp_mixed_fully,
};
use decohere::channels::{
    apply, channel_distance, complementary, compose, pinch_matrix, symmetries, ChannelSpec,
    Family, Partition,
};
use decohere::matrix::{hermitian_eigenvalues, majorizes, ComplexMatrix, DensityMatrix, Spectrum};
use decohere::random::{random_density_matrix, random_simplex_point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    id: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn tenth_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn triples(d_range: std::ops::RangeInclusive<usize>) -> Vec<(Family, usize, usize)> {
    let mut out = Vec::new();
    for d in d_range {
        for family in Family::ALL {
            for k in family.valid_ks(d) {
                out.push((family, d, k));
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut all_converged = true;
    for d in 2..=8 {
        for x in tenth_grid() {
            let ch = ChannelSpec::fully(d, x).unwrap().build().unwrap();
            let opt = maximize_diagonal(&ch, 1e-9, 100_000).unwrap();
            all_converged &= opt.converged;
            worst = worst.max((opt.value - closed_form_capacity_fully(d, x).unwrap()).abs());
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        id: 1,
        name: "fully decohering closed form vs optimizer",
        passed: worst <= 1e-6 && all_converged && elapsed < Duration::from_secs(60),
        detail: format!("max gap {worst:.2e} (tol 1e-6), {:.2} s (limit 60 s)", elapsed.as_secs_f64()),
    }
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0_f64;
    for d in 2..=12 {
        let log_d = (d as f64).log2();
        let spec0 = ChannelSpec::fully(d, 0.0).unwrap();
        let spec1 = ChannelSpec::fully(d, 1.0).unwrap();
        worst = worst.max((closed_form_capacity(&spec0) - log_d).abs());
        worst = worst.max(closed_form_capacity(&spec1).abs());
        for x in tenth_grid() {
            let spec = ChannelSpec::weak(d, d, x).unwrap();
            worst = worst.max((closed_form_capacity(&spec) - log_d).abs());
        }
    }
    for k in [1, 2, 3, 4, 6, 12] {
        let spec = ChannelSpec::block(12, k, 1.0).unwrap();
        worst = worst.max((closed_form_capacity(&spec) - (k as f64).log2()).abs());
    }
    Outcome {
        id: 2,
        name: "capacity endpoints",
        passed: worst <= 1e-12,
        detail: format!("max deviation {worst:.2e} (tol 1e-12)"),
    }
}

fn criterion_3() -> Outcome {
    let specs: Vec<ChannelSpec> = triples(2..=8)
        .into_iter()
        .flat_map(|(f, d, k)| {
            [0.0, 0.25, 0.5, 0.75, 1.0].map(|x| ChannelSpec::new(f, d, k, x).unwrap())
        })
        .collect();
    let worst = specs
        .par_iter()
        .map(|spec| {
            let ch = spec.build().unwrap();
            let comp = complementary(&ch);
            channel_distance(&compose(&comp, &ch).unwrap(), &comp).unwrap()
        })
        .reduce(|| 0.0, f64::max);
    Outcome {
        id: 3,
        name: "degradability residuals",
        passed: worst <= 1e-10,
        detail: format!("{} channels, max residual {worst:.2e} (tol 1e-10)", specs.len()),
    }
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0_f64;
    let mut dims_ok = true;
    for d in 2..=8 {
        for x in [0.1, 0.5, 0.9] {
            let expected = spectrum_comp_mixed_fully(d, x).unwrap();
            let explicit = hermitian_eigenvalues(&comp_mixed_matrix_fully(d, x).unwrap()).unwrap();
            let comp = complementary(&ChannelSpec::fully(d, x).unwrap().build().unwrap());
            let constructed = apply(&comp, &DensityMatrix::maximally_mixed(d))
                .unwrap()
                .spectrum()
                .unwrap();
            dims_ok &= explicit.dim() == d + 1 && constructed.dim() == d + 1;
            worst = worst.max(explicit.max_abs_diff(&expected).unwrap());
            worst = worst.max(constructed.max_abs_diff(&expected).unwrap());
        }
    }
    Outcome {
        id: 4,
        name: "environment spectrum of the fully decohering channel",
        passed: dims_ok && worst <= 1e-10,
        detail: format!(
            "{{0, (d+x-dx)/d, x/d x (d-1)}}, d+1 values; max deviation {worst:.2e} (tol 1e-10)"
        ),
    }
}

fn criterion_5() -> Outcome {
    let d = 12;
    let mut worst = 0.0_f64;
    let mut lambda0_exact = true;
    let mut worst_sum = 0.0_f64;
    for k in 1..=d {
        let fejer = fejer_eigenvalues(d, k).unwrap();
        lambda0_exact &= fejer.lambdas[0] == k as f64 / d as f64;
        worst_sum = worst_sum.max((fejer.sum() - 1.0).abs());

        let comp = complementary(&ChannelSpec::weak(d, k, 1.0).unwrap().build().unwrap());
        let env = apply(&comp, &DensityMatrix::maximally_mixed(d)).unwrap();
        let block = ComplexMatrix::from_fn(d, d, |r, c| env.matrix()[(r + 1, c + 1)]);
        let direct = hermitian_eigenvalues(&block).unwrap();
        worst = worst.max(direct.max_abs_diff(&Spectrum::new(fejer.lambdas)).unwrap());
    }
    Outcome {
        id: 5,
        name: "Fejer spectrum of the weak environment block",
        passed: worst <= 1e-9 && lambda0_exact && worst_sum <= 1e-12,
        detail: format!(
            "max eig deviation {worst:.2e} (tol 1e-9), lambda_0 = k/d exact: {lambda0_exact}, \
             max |sum - 1| {worst_sum:.2e} (tol 1e-12)"
        ),
    }
}

type Csv = Vec<(usize, f64, f64, Option<f64>)>;

fn read_rows(path: &std::path::Path) -> Csv {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let gap = (!f[6].is_empty()).then(|| f[6].parse().unwrap());
            (f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap(), gap)
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let fail = |detail: String| Outcome {
        id: 6,
        name: "figure reproduction",
        passed: false,
        detail,
    };
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return fail(format!("no temp dir: {e}")),
    };
    let status = Command::new(env!("CARGO_BIN_EXE_decohere"))
        .args(["figures", "--out-dir"])
        .arg(dir.path())
        .output()
        .expect("binary runs");
    if !status.status.success() {
        return fail(format!("figures exited with {:?}", status.status.code()));
    }
    let fig1 = read_rows(&dir.path().join("fig1.csv"));
    let fig2 = read_rows(&dir.path().join("fig2.csv"));
    let svgs = ["fig1.svg", "fig2.svg"].iter().all(|n| dir.path().join(n).is_file());

    let log12 = 12f64.log2();
    let k12 = fig1
        .iter()
        .filter(|r| r.0 == 12)
        .map(|r| (r.2 - log12).abs())
        .fold(0.0, f64::max);
    let k1_end = fig1.iter().find(|r| r.0 == 1 && r.1 == 1.0).map(|r| r.2.abs());
    let k1_a: Vec<f64> = fig1.iter().filter(|r| r.0 == 1).map(|r| r.2).collect();
    let k1_b: Vec<f64> = fig2.iter().filter(|r| r.0 == 1).map(|r| r.2).collect();
    let k1_match = k1_a.len() == 101
        && k1_a.len() == k1_b.len()
        && k1_a.iter().zip(&k1_b).all(|(a, b)| (a - b).abs() <= 1e-12);
    let weak_positive = [2, 3, 4, 6]
        .iter()
        .all(|&k| fig2.iter().any(|r| r.0 == k && r.1 == 1.0 && r.2 > 0.0));

    let mut gaps_ok = true;
    let mut worst_gap = 0.0_f64;
    for (rows, ks) in [(&fig1, &[1, 2, 3, 4, 6, 12][..]), (&fig2, &[1, 2, 3, 4, 6][..])] {
        for &k in ks {
            let gaps: Vec<f64> = rows.iter().filter(|r| r.0 == k).filter_map(|r| r.3).collect();
            gaps_ok &= gaps.len() >= 11;
            worst_gap = gaps.iter().copied().fold(worst_gap, f64::max);
        }
    }

    let passed = svgs
        && k12 <= 5e-8
        && k1_end.is_some_and(|v| v <= 1e-12)
        && k1_match
        && weak_positive
        && gaps_ok
        && worst_gap <= 1e-6;
    Outcome {
        id: 6,
        name: "figure reproduction",
        passed,
        detail: format!(
            "fig1 k=12 dev {k12:.1e}, fig1 k=1 x=1 {:?}, k=1 curves match: {k1_match}, \
             weak x=1 positive: {weak_positive}, max optimizer gap {worst_gap:.2e} over >=11 points per curve: {gaps_ok}",
            k1_end.unwrap_or(f64::NAN)
        ),
    }
}

fn criterion_7() -> Outcome {
    const SAMPLES: usize = 10_000;
    let cases: Vec<(usize, ChannelSpec)> = triples(2..=3)
        .into_iter()
        .flat_map(|(f, d, k)| {
            [0.0, 0.25, 0.5, 0.75, 1.0].map(|x| ChannelSpec::new(f, d, k, x).unwrap())
        })
        .enumerate()
        .collect();
    let results: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|(i, spec)| {
            let ch = spec.build().unwrap();
            let diag = maximize_diagonal(&ch, 1e-12, 100_000).unwrap().value;
            let oracle = brute_force_capacity_oracle(&ch, SAMPLES, 5_000, 1000 + *i as u64).unwrap();
            (oracle - diag, diag - oracle)
        })
        .collect();
    let max_excess = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let max_shortfall = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Outcome {
        id: 7,
        name: "brute-force oracle soundness",
        passed: max_excess <= 1e-4 && max_shortfall <= 1e-3,
        detail: format!(
            "{} channels, {SAMPLES} samples each; max excess {max_excess:.2e} (tol 1e-4), \
             max shortfall {max_shortfall:.2e} (tol 1e-3)",
            cases.len()
        ),
    }
}

fn criterion_8() -> Outcome {
    let specs: Vec<(usize, ChannelSpec)> = triples(2..=8)
        .into_iter()
        .flat_map(|(f, d, k)| [0.0, 0.3, 0.7, 1.0].map(|x| ChannelSpec::new(f, d, k, x).unwrap()))
        .enumerate()
        .collect();
    let per_spec: Vec<[f64; 4]> = specs
        .par_iter()
        .map(|(i, spec)| {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + *i as u64);
            let ch = spec.build().unwrap();
            let comp = complementary(&ch);
            let dk = spec.dephasing_partition();
            let full = Partition::singletons(spec.d).unwrap();
            let syms = symmetries(spec);
            let mut r = [ch.completeness_residual(), 0.0, 0.0, 0.0];
            for _ in 0..200 {
                let rho = random_density_matrix(&mut rng, spec.d);
                let out = ch.apply_matrix(rho.matrix()).unwrap();
                let env = comp.apply_matrix(rho.matrix()).unwrap();
                let lhs = pinch_matrix(&out, &dk).unwrap();
                let rhs = pinch_matrix(rho.matrix(), &dk).unwrap();
                r[1] = r[1].max(lhs.max_abs_diff(&rhs).unwrap());
                let env_d = comp
                    .apply_matrix(&pinch_matrix(rho.matrix(), &full).unwrap())
                    .unwrap();
                r[2] = r[2].max(env.max_abs_diff(&env_d).unwrap());
                for sym in &syms {
                    let moved = sym.input.conjugate(rho.matrix()).unwrap();
                    let a = ch.apply_matrix(&moved).unwrap();
                    r[3] = r[3].max(a.max_abs_diff(&sym.input.conjugate(&out).unwrap()).unwrap());
                    let a = comp.apply_matrix(&moved).unwrap();
                    let b = sym.environment.conjugate(&env).unwrap();
                    r[3] = r[3].max(a.max_abs_diff(&b).unwrap());
                }
            }
            r
        })
        .collect();
    let worst = per_spec.iter().fold([0.0_f64; 4], |acc, r| {
        [acc[0].max(r[0]), acc[1].max(r[1]), acc[2].max(r[2]), acc[3].max(r[3])]
    });

    let mut rng = ChaCha8Rng::seed_from_u64(800);
    let mut majorization_failures = 0;
    for d in 2..=8 {
        for _ in 0..500 {
            let rho = random_density_matrix(&mut rng, d);
            let diag = Spectrum::new(rho.matrix().diagonal_real());
            if !majorizes(&rho.spectrum().unwrap(), &diag).unwrap() {
                majorization_failures += 1;
            }
        }
    }

    Outcome {
        id: 8,
        name: "structural suite",
        passed: worst.iter().all(|&v| v <= 1e-12) && majorization_failures == 0,
        detail: format!(
            "{} channels x 200 states; completeness {:.1e}, D.ch=D {:.1e}, ch^c.D=ch^c {:.1e}, \
             covariance {:.1e} (tol 1e-12); Schur-Horn failures {majorization_failures}/3500",
            specs.len(),
            worst[0],
            worst[1],
            worst[2],
            worst[3]
        ),
    }
}

fn criterion_9() -> Outcome {
    let d = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for family in Family::ALL {
        let ks = family.valid_ks(d);
        for i in 0..1000 {
            let x: f64 = rng.random();
            let spec = ChannelSpec::new(family, d, ks[i % ks.len()], x).unwrap();
            let ch = spec.build().unwrap();
            let comp = complementary(&ch);
            let p = random_simplex_point(&mut rng, d);
            let q = random_simplex_point(&mut rng, d);
            let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
            let ic = |v: &[f64]| {
                coherent_information_with(&ch, &comp, &DensityMatrix::diagonal(v).unwrap()).unwrap()
            };
            let violation = 0.5 * (ic(&p) + ic(&q)) - ic(&mid);
            worst = worst.max(violation);
            count += 1;
        }
    }
    Outcome {
        id: 9,
        name: "coherent information concavity probe",
        passed: worst <= 1e-9,
        detail: format!("{count} midpoint pairs at d=6; max violation {worst:.2e} (slack 1e-9)"),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let mut failed = 0;
    for run in criteria {
        let o = run();
        println!(
            "[{}] criterion {}: {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
