//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each and exits non-zero if any failed.

mod common;

use std::time::{Duration, Instant};

use common::*;
use fourier_inpaint::am::phase_update;
use fourier_inpaint::cr::bcd_solve_traced;
use fourier_inpaint::harness::synth::ar2_signal;
use fourier_inpaint::harness::*;
use fourier_inpaint::metrics::PERFECT_SER_DB;
use fourier_inpaint::uniqueness::*;
use fourier_inpaint::*;
use num_complex::Complex64;
use rand::Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> String {
    format!("{}/tests/fixtures/wav", env!("CARGO_MANIFEST_DIR"))
}

// 1. Difference of squared magnitudes equals the bilinear form; the
//    change of variables is invertible.
fn lemma_identity() -> Check {
    let mut rng = rng(1001);
    let mut worst = 0.0f64;
    for &len in &[6usize, 8, 16, 32] {
        for case in 0..1000 {
            let d = rng.random_range(1..len);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| -> Vec<f64> {
                (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
            };
            let t = CounterTriple {
                u: draw(&mut rng, d),
                v: draw(&mut rng, d),
                y: draw(&mut rng, len - d),
            };
            let lhs = magnitude_gap_residual(&t).map_err(|e| e.to_string())?;
            let rhs = bilinear_residual(&to_bilinear(&t).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let energy: f64 = t.u.iter().chain(&t.v).chain(&t.y).map(|x| x * x).sum();
            for (a, b) in lhs.iter().zip(&rhs) {
                let rel = (a - b).abs() / energy;
                worst = worst.max(rel);
                ensure(rel <= 1e-10, || format!("L={len} case {case}: {a} vs {b}"))?;
            }

            // Dyadic samples keep every sum and halving exact.
            let dyadic = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| -> Vec<f64> {
                (0..n)
                    .map(|_| {
                        rng.random_range(-(1i64 << 20)..(1i64 << 20)) as f64 / (1u64 << 20) as f64
                    })
                    .collect()
            };
            let exact = CounterTriple {
                u: dyadic(&mut rng, d),
                v: dyadic(&mut rng, d),
                y: dyadic(&mut rng, len - d),
            };
            let pair = to_bilinear(&exact).map_err(|e| e.to_string())?;
            let back = from_bilinear(&pair, d).map_err(|e| e.to_string())?;
            ensure(back == exact, || {
                format!("L={len} case {case}: round trip differs")
            })?;
            ensure(
                to_bilinear(&back).map_err(|e| e.to_string())? == pair,
                || format!("L={len} case {case}: inverse round trip differs"),
            )?;
        }
    }
    Ok(format!(
        "4000 triples, worst relative deviation {worst:.1e}"
    ))
}

/// Coefficients of `prod (1 - 2 cos(theta) z + z^2)`, times `(z - r)` when
/// `linear` is given, lowest degree first.
fn polynomial_with_roots(thetas: &[f64], linear: Option<f64>) -> Vec<f64> {
    let mut p = vec![1.0];
    let mut mul = |f: &[f64]| {
        let mut out = vec![0.0; p.len() + f.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        p = out;
    };
    for &t in thetas {
        mul(&[1.0, -2.0 * t.cos(), 1.0]);
    }
    if let Some(r) = linear {
        mul(&[-r, 1.0]);
    }
    p
}

// 2. Spectral zero count never exceeds floor((d - 1) / 2); the bound is tight.
fn root_bound() -> Check {
    let mut rng = rng(1002);
    for d in 1..=10 {
        for &len in &[12usize, 32, 64] {
            for _ in 0..1000 {
                let a: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let count = count_spectral_zeros(&a, len).map_err(|e| e.to_string())?;
                ensure(count <= spectral_zero_bound(d), || {
                    format!("d={d} L={len}: {count} zeros for {a:?}")
                })?;
            }
        }
    }
    let mut tight = 0;
    for case in 0..50 {
        let len = [12usize, 32, 64][case % 3];
        let d = rng.random_range(3..=10);
        let k = spectral_zero_bound(d);
        let mut freqs: Vec<usize> = rand::seq::index::sample(&mut rng, len / 2 - 1, k)
            .into_iter()
            .map(|f| f + 1)
            .collect();
        freqs.sort_unstable();
        let thetas: Vec<f64> = freqs
            .iter()
            .map(|&f| 2.0 * std::f64::consts::PI * f as f64 / len as f64)
            .collect();
        let linear = (2 * k + 1 < d).then(|| rng.random_range(1.5..3.0));
        let a = polynomial_with_roots(&thetas, linear);
        debug_assert_eq!(a.len(), d);
        let count = count_spectral_zeros(&a, len).map_err(|e| e.to_string())?;
        ensure(count <= k, || {
            format!("constructed case {case}: {count} > {k}")
        })?;
        if count == k {
            tight += 1;
        }
    }
    ensure(tight > 0, || {
        "bound never attained by constructed cases".into()
    })?;
    Ok(format!(
        "30000 random vectors within bound, {tight}/50 constructed cases tight"
    ))
}

// 3. Ground truth is a fixed point; descent from zero.
fn am_fixed_point() -> Check {
    let mut rng = rng(1003);
    let (len, d) = (64, 8);
    let mut worst_loss = 0.0f64;
    let mut max_iters = 0;
    for case in 0..100 {
        let x = random_signal(&mut rng, len);
        let mask = random_contiguous(&mut rng, len, d);
        let b = dft(&x).magnitudes();
        let observed = mask.restrict_observed(x.samples());
        let truth = mask.restrict_missing(x.samples());
        let opts = AmOptions::default();

        let res =
            am_inpaint(&b, &observed, &mask, Some(&truth), &opts).map_err(|e| e.to_string())?;
        worst_loss = worst_loss.max(res.final_loss());
        max_iters = max_iters.max(res.iterations);
        ensure(res.converged && res.iterations <= 5, || {
            format!("case {case}: {} iterations from truth", res.iterations)
        })?;
        ensure(res.final_loss() < 1e-18, || {
            format!("case {case}: final loss {:e}", res.final_loss())
        })?;

        let zero = am_inpaint(&b, &observed, &mask, None, &opts).map_err(|e| e.to_string())?;
        for (i, w) in zero.loss_trace.windows(2).enumerate() {
            ensure(w[1] <= w[0] + 1e-10, || {
                format!("case {case}: loss rises at step {i}: {} -> {}", w[0], w[1])
            })?;
        }
    }
    Ok(format!(
        "100 instances, <= {max_iters} iterations from truth, worst loss {worst_loss:.1e}"
    ))
}

// 4. BCD objective descent, Hermitian unit-diagonal iterates, PSD output.
fn bcd_invariants() -> Check {
    let mut rng = rng(1004);
    let mut min_eig = f64::INFINITY;
    for case in 0..50 {
        let len = rng.random_range(8..=32);
        let d = rng.random_range(1..=len / 2);
        let x = random_signal(&mut rng, len);
        let mask = if case % 2 == 0 {
            random_contiguous(&mut rng, len, d)
        } else {
            random_mask(&mut rng, len, d)
        };
        let b = dft(&x).magnitudes();
        let m = build_Mtilde(
            &build_mtilde(&b, &mask.restrict_observed(x.samples()), &mask)
                .map_err(|e| e.to_string())?,
        );
        let out = bcd_solve_traced(&m, &CrOptions::default()).map_err(|e| e.to_string())?;
        for (s, w) in out.objective_trace.windows(2).enumerate() {
            ensure(w[1] <= w[0] + 1e-9, || {
                format!(
                    "case {case}: objective rises at sweep {s}: {} -> {}",
                    w[0], w[1]
                )
            })?;
        }
        let u = out.lifted.matrix();
        for i in 0..u.rows() {
            ensure(u[(i, i)] == Complex64::new(1.0, 0.0), || {
                format!("case {case}: diag {i}")
            })?;
            for j in 0..i {
                ensure(u[(i, j)] == u[(j, i)].conj(), || {
                    format!("case {case}: ({i},{j})")
                })?;
            }
        }
        let e = min_eigenvalue(u);
        min_eig = min_eig.min(e);
        ensure(e >= -1e-8, || {
            format!("case {case} (L={len}, d={d}): min eigenvalue {e:e}")
        })?;
    }
    Ok(format!("50 instances, smallest eigenvalue {min_eig:.2e}"))
}

fn rate(
    cells: &[CellSummary],
    method: Method,
    d: usize,
    snr: f64,
) -> std::result::Result<&CellSummary, String> {
    cells
        .iter()
        .find(|c| c.method == method && c.d == d && c.snr_db == snr)
        .ok_or_else(|| format!("missing cell {method} d={d}"))
}

// 5. Recovery rate versus missing fraction at L = 256.
fn fraction_curve() -> Check {
    let fractions = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30];
    let cfg = ExperimentConfig::parse(&format!(
        r#"
lengths = [256]
fractions = {fractions:?}
methods = ["am", "cr", "cr+am"]
n_trials = 50
source = ["synthetic", "wav:{}"]
seed = 2024
"#,
        fixtures()
    ))
    .map_err(|e| e.to_string())?;
    let report =
        run_grid_to(&cfg, &SolverOptions::default(), Vec::new()).map_err(|e| e.to_string())?;
    ensure(report.failed_jobs == 0, || {
        format!("{} failed jobs", report.failed_jobs)
    })?;
    let margin = 2.0 / 50.0 + 1e-12;
    let mut line = Vec::new();
    for &f in &fractions {
        let d = ExperimentConfig::gap_len(256, f);
        let am = rate(&report.cells, Method::Am, d, f64::INFINITY)?.rate();
        let cr = rate(&report.cells, Method::Cr, d, f64::INFINITY)?.rate();
        let both = rate(&report.cells, Method::CrAm, d, f64::INFINITY)?.rate();
        line.push(format!("{f:.2}: {both:.2}/{am:.2}/{cr:.2}"));
        ensure(both >= 0.8, || format!("fraction {f}: CR+AM rate {both}"))?;
        ensure(both + margin >= am && am + margin >= cr, || {
            format!("fraction {f}: ordering violated, CR+AM {both}, AM {am}, CR {cr}")
        })?;
    }
    Ok(format!("rates CR+AM/AM/CR {}", line.join(", ")))
}

// 6. No alternates well below the threshold; alternates far above it.
fn uniqueness_probe() -> Check {
    let len = 16;
    let (t1, t2) = uniqueness_thresholds(len);
    let mut found = Vec::new();
    for d in (2..=5).chain(10..=12) {
        let mut signals_with_alternates = 0;
        for trial in 0..50u64 {
            let seed = derive(d as u64, trial);
            let x = gaussian_signal(len, seed).map_err(|e| e.to_string())?;
            let start = (seed % len as u64) as usize;
            let mask =
                GapMask::new(len, (0..d).map(|i| (start + i) % len)).map_err(|e| e.to_string())?;
            let search = search_counterexample(&x, &mask, 200, seed).map_err(|e| e.to_string())?;
            let mut verified = 0;
            for alt in &search.alternates {
                let residual = verify_alternate(&search, alt).map_err(|e| e.to_string())?;
                let distance = alt
                    .iter()
                    .zip(search.true_gap())
                    .map(|(a, t)| (a - t).abs())
                    .fold(0.0, f64::max);
                if residual < 1e-7 && distance > 1e-6 {
                    verified += 1;
                }
            }
            if verified > 0 {
                signals_with_alternates += 1;
            }
        }
        if d <= 5 {
            ensure(signals_with_alternates == 0, || {
                format!("d={d}: {signals_with_alternates} signals with counter-examples")
            })?;
        } else {
            ensure(signals_with_alternates > 0, || {
                format!("d={d}: no counter-example found")
            })?;
        }
        found.push(format!("d={d}:{signals_with_alternates}"));
    }
    Ok(format!(
        "thresholds {t1:.2}/{t2:.2}; signals with alternates {}",
        found.join(" ")
    ))
}

fn derive(a: u64, b: u64) -> u64 {
    fourier_inpaint::seed::derive_seed(0xacce97, &[a, b])
}

/// Non-decreasing up to a single inversion of at most `slack`.
fn nearly_monotone(values: &[f64], slack: f64) -> bool {
    let drops: Vec<f64> = values
        .windows(2)
        .filter(|w| w[1] < w[0])
        .map(|w| w[0] - w[1])
        .collect();
    drops.is_empty() || (drops.len() == 1 && drops[0] <= slack)
}

// 7. Median SER against magnitude SNR at fraction 0.25.
fn noise_trend() -> Check {
    let snrs = [0.0, 4.0, 8.0, 12.0, 20.0, 40.0];
    let cfg = ExperimentConfig::parse(&format!(
        r#"
lengths = [256]
fractions = [0.25]
methods = ["am", "cr", "cr+am"]
n_trials = 30
snr_db = {snrs:?}
source = ["synthetic", "wav:{}"]
seed = 4040
"#,
        fixtures()
    ))
    .map_err(|e| e.to_string())?;
    let report =
        run_grid_to(&cfg, &SolverOptions::default(), Vec::new()).map_err(|e| e.to_string())?;
    ensure(report.failed_jobs == 0, || {
        format!("{} failed jobs", report.failed_jobs)
    })?;
    let d = ExperimentConfig::gap_len(256, 0.25);
    let mut summary = Vec::new();
    for method in Method::ALL {
        let medians = snrs
            .iter()
            .map(|&s| rate(&report.cells, method, d, s).map(|c| c.median_ser_db))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ensure(nearly_monotone(&medians, 1.0), || {
            format!("{method}: medians {medians:?}")
        })?;
        summary.push(format!(
            "{method} [{}]",
            medians
                .iter()
                .map(|m| format!("{m:.1}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let top = rate(&report.cells, Method::CrAm, d, 40.0)?.median_ser_db;
    ensure(top > PERFECT_SER_DB, || {
        format!("CR+AM median at 40 dB is {top:.2}")
    })?;
    Ok(format!("median SER {}", summary.join("; ")))
}

// 8. Metric definitions.
fn ser_units() -> Check {
    let mut rng = rng(1008);
    let truth: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
    let zeros = ser(&[0.0; 16], &truth).map_err(|e| e.to_string())?;
    ensure(zeros == Ser::Db(0.0), || {
        format!("zero fill gives {zeros:?}")
    })?;
    let exact = ser(&truth, &truth).map_err(|e| e.to_string())?;
    ensure(exact == Ser::Exact && exact.to_string() == "inf", || {
        format!("exact gives {exact:?}")
    })?;
    let scaled: Vec<f64> = truth.iter().map(|v| v * 1.1).collect();
    let s = ser(&scaled, &truth).map_err(|e| e.to_string())?.db();
    ensure((s - 20.0).abs() < 1e-9, || format!("10% scale gives {s}"))?;
    ensure(!is_perfect(20.0) && !is_perfect(19.9), || {
        "threshold not strict".into()
    })?;
    ensure(is_perfect(20.0 + 1e-9) && is_perfect(f64::INFINITY), || {
        "threshold too high".into()
    })?;
    ensure(exact.is_perfect() && !Ser::Db(20.0).is_perfect(), || {
        "Ser::is_perfect".into()
    })?;
    ensure(
        ser(&[1.0], &[0.0]) == Err(InpaintError::UndefinedReference),
        || "zero reference accepted".into(),
    )?;
    Ok("0 dB zero fill, inf sentinel, strict 20 dB threshold".into())
}

// 9. FFT operators against dense matrices.
fn oracle_equivalence() -> Check {
    let mut rng = rng(1009);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let len = rng.random_range(1..=16);
        let d = rng.random_range(0..=len);
        let mask = if case % 2 == 0 {
            random_mask(&mut rng, len, d)
        } else {
            random_contiguous(&mut rng, len, d)
        };
        let x = random_signal(&mut rng, len);
        let gap_vals: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = random_complex(&mut rng, len);
        let b = random_magnitudes(&mut rng, len);
        let observed = mask.restrict_observed(x.samples());

        let e1 = max_diff(dft(&x).bins(), &dense_dft(x.samples()));
        let e2 = max_diff(
            apply_phi_sub(&gap_vals, &mask)
                .map_err(|e| e.to_string())?
                .bins(),
            &dense_phi_sub(&gap_vals, &mask),
        );
        let e3 = max_diff(
            &apply_phi_sub_adjoint(&ComplexSpectrum::new(spec.clone()), &mask)
                .map_err(|e| e.to_string())?,
            &dense_phi_sub_adjoint(&spec, &mask),
        );
        let fast = build_mtilde(&b, &observed, &mask).map_err(|e| e.to_string())?;
        let e4 = max_diff_dense(
            &to_dense(&fast),
            &dense_mtilde(b.values(), &observed, &mask),
        );
        let e = e1.max(e2).max(e3).max(e4);
        worst = worst.max(e);
        ensure(e <= 1e-12, || {
            format!("case {case} (L={len}, d={d}): dft {e1:e}, phi {e2:e}, adjoint {e3:e}, mtilde {e4:e}")
        })?;
    }
    // The truth is annihilated by the lifted operator as well.
    let x = ar2_signal(16, 9).map_err(|e| e.to_string())?;
    let mask = GapMask::contiguous(16, 3, 4).map_err(|e| e.to_string())?;
    let mt = build_mtilde(
        &dft(&x).magnitudes(),
        &mask.restrict_observed(x.samples()),
        &mask,
    )
    .map_err(|e| e.to_string())?;
    let mut ut = phase_update(&x).phases().to_vec();
    ut.push(Complex64::new(1.0, 0.0));
    let r = mt.mul_vec(&ut).iter().map(|c| c.norm()).fold(0.0, f64::max);
    ensure(r < 1e-12, || format!("lifted residual at truth {r:e}"))?;
    Ok(format!("200 cases, worst deviation {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "1 identity and bijection",
            lemma_identity,
            Duration::from_secs(10),
        ),
        ("2 spectral zero bound", root_bound, Duration::from_secs(10)),
        (
            "3 AM fixed point and descent",
            am_fixed_point,
            Duration::from_secs(5),
        ),
        (
            "4 BCD monotonicity and invariants",
            bcd_invariants,
            Duration::from_secs(30),
        ),
        (
            "5 recovery rate vs missing fraction",
            fraction_curve,
            Duration::from_secs(600),
        ),
        (
            "6 uniqueness threshold probe",
            uniqueness_probe,
            Duration::from_secs(300),
        ),
        ("7 noise trend", noise_trend, Duration::from_secs(600)),
        ("8 SER units", ser_units, Duration::from_secs(1)),
        (
            "9 oracle equivalence",
            oracle_equivalence,
            Duration::from_secs(5),
        ),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, check, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!(
                "{detail}; took {:.1}s, budget {}s",
                elapsed.as_secs_f64(),
                budget.as_secs()
            )),
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {name} ({:.2}s): {detail}",
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL criterion {name} ({:.2}s): {why}",
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
