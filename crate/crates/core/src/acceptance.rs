//! The acceptance suite, shared by `locinfo selftest` and the `acceptance`
//! integration test. Each criterion returns a report instead of panicking so
//! the command-line tool can print all of them.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::bounds::{
    chi_l, distillation_bound, hashing_compatibility_check, holevo_chi, jrw_lambda, lambda_l, lambda_l_product_average,
    BoundReport, Evaluation, ProductAverageForm, FLAG_SEPARABLE_ONLY,
};
use crate::ensembles::{
    bell3_ensemble, bell4_ensemble, e1_ensemble, product8_ensemble, random_density_matrix, random_ensemble,
    resolve_builtin_decomposition, Ensemble,
};
use crate::entropy::{subentropy, von_neumann_entropy, Spectrum};
use crate::error::{Error, Result};
use crate::haar::RngSeed;
use crate::oracle::{average_product_basis_mi, optimize_two_step_locc, OptimizerBudget};
use crate::pipeline::{sweep_csv, sweep_e1};
use crate::scrooge::{constancy_check, sample_scrooge, BasisMode};

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {}: {} ({:.2} s) {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed_secs,
            self.detail
        )
    }
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "bell-state lower bound",
        2 => "oracle vs formula",
        3 => "two-step achievability",
        4 => "subentropy values",
        5 => "sandwich invariants",
        6 => "scrooge saturation",
        7 => "distillation bound",
        8 => "e1 sweep",
        9 => "cross-method consistency",
        _ => "unknown",
    }
}

/// Runs one criterion. Errors raised by the library count as failures.
pub fn run(id: u8) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => bell_lower_bound(),
        2 => oracle_agreement(),
        3 => achievability(),
        4 => subentropy_values(),
        5 => sandwich(),
        6 => scrooge_saturation(),
        7 => distillation(),
        8 => e1_sweep(),
        9 => cross_method(),
        _ => Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = runtime_limit(id) {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!(
                "; runtime {:.1} s over the {} s limit",
                elapsed.as_secs_f64(),
                limit.as_secs()
            ));
        }
    }
    CriterionReport {
        id,
        name: name(id),
        passed,
        detail,
        elapsed_secs: elapsed.as_secs_f64(),
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&id| run(id)).collect()
}

fn runtime_limit(id: u8) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(5)),
        2 => Some(Duration::from_secs(120)),
        6 => Some(Duration::from_secs(300)),
        _ => None,
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

/// Collects named checks; the first few failures end up in the detail line.
#[derive(Default)]
struct Checks {
    total: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> Result<Outcome> {
        let mut detail = format!("{}/{} checks", self.total - self.failures.len(), self.total);
        for n in &self.notes {
            detail.push_str("; ");
            detail.push_str(n);
        }
        for f in self.failures.iter().take(5) {
            detail.push_str("; failed: ");
            detail.push_str(f);
        }
        if self.failures.len() > 5 {
            detail.push_str(&format!("; {} more failures", self.failures.len() - 5));
        }
        Ok(Outcome {
            passed: self.failures.is_empty(),
            detail,
        })
    }
}

const FULL_GRID: Evaluation = Evaluation::Quadrature { n_theta: 64, n_phi: 64 };
const ORACLE_BASES: usize = 10_000;
const RANDOM_PER_DIM: u64 = 10;

/// bell3, product8, two E₁ members and ten random 2⊗2 and 2⊗3 ensembles each.
fn test_ensembles() -> Result<Vec<Ensemble>> {
    let mut out = vec![
        bell3_ensemble(),
        product8_ensemble(),
        e1_ensemble(0.0, PI / 4.0)?.with_label("e1(0,pi/4)"),
        e1_ensemble(PI / 2.0, PI / 4.0)?.with_label("e1(pi/2,pi/4)"),
    ];
    for db in [2, 3] {
        for s in 0..RANDOM_PER_DIM {
            let members = 2 + (s as usize % 3);
            out.push(random_ensemble(&[2, db], members, RngSeed(1000 * db as u64 + s))?);
        }
    }
    Ok(out)
}

fn bell_lower_bound() -> Result<Outcome> {
    let e = bell3_ensemble();
    let mut c = Checks::default();
    let l = lambda_l(&e, &FULL_GRID)?;
    let u = chi_l(&e, 0.0)?;
    c.note(format!("lambda_l = {:.6}, chi_l = {:.12}", l.value, u.value));
    c.check((l.value - 0.2516).abs() <= 1e-3, || {
        format!("lambda_l {} not within 1e-3 of 0.2516", l.value)
    });
    c.check((u.value - 1.0).abs() <= 1e-9, || {
        format!("chi_l {} not within 1e-9 of 1", u.value)
    });
    c.finish()
}

fn oracle_agreement() -> Result<Outcome> {
    let mut c = Checks::default();
    let mut worst: f64 = 0.0;
    for (i, e) in test_ensembles()?.iter().enumerate() {
        let q = lambda_l(e, &FULL_GRID)?;
        let o = average_product_basis_mi(e, ORACLE_BASES, RngSeed(2000 + i as u64))?;
        let sigma = (o.std_error.powi(2) + q.std_error.powi(2)).sqrt();
        let diff = (o.mean - q.value).abs();
        if sigma > 0.0 {
            worst = worst.max(diff / sigma);
        }
        c.check(diff <= 3.0 * sigma, || {
            format!(
                "{}: oracle {} vs quadrature {} (sigma {:.2e})",
                e.label(),
                o.mean,
                q.value,
                sigma
            )
        });
    }
    c.note(format!("largest deviation {worst:.2} sigma"));
    c.finish()
}

fn achievability() -> Result<Outcome> {
    let budget = OptimizerBudget::default();
    let mut c = Checks::default();
    let mut min_margin = f64::INFINITY;
    for (i, e) in test_ensembles()?.iter().enumerate() {
        let q = lambda_l(e, &FULL_GRID)?;
        let r = optimize_two_step_locc(e, &budget, RngSeed(3000 + i as u64))?;
        min_margin = min_margin.min(r.value - q.value);
        c.check(r.value >= q.value - 3.0 * q.std_error, || {
            format!("{}: two-step {} below lambda_l {}", e.label(), r.value, q.value)
        });
    }
    c.note(format!("smallest margin over lambda_l {min_margin:.4}"));
    c.finish()
}

/// `Q(λ) = -Σ_i λ_i^d / Π_{j≠i} (λ_i - λ_j) · log2 λ_i` for distinct `λ`.
fn subentropy_direct(lam: &[f64]) -> f64 {
    let d = lam.len() as i32;
    -lam.iter()
        .enumerate()
        .map(|(i, &li)| {
            let denom: f64 = lam
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &lj)| li - lj)
                .product();
            li.powi(d) / denom * li.log2()
        })
        .sum::<f64>()
}

fn well_separated_spectrum<R: Rng>(rng: &mut R) -> Vec<f64> {
    const MIN_GAP: f64 = 0.1;
    loop {
        let d = rng.random_range(2..=4);
        let raw: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = raw.iter().sum();
        let mut lam: Vec<f64> = raw.iter().map(|x| x / total).collect();
        lam.sort_by(f64::total_cmp);
        if lam.windows(2).all(|w| w[1] - w[0] >= MIN_GAP) {
            return lam;
        }
    }
}

fn subentropy_values() -> Result<Outcome> {
    let q = |v: Vec<f64>| Spectrum::new(v).map(|s| subentropy(&s));
    let mut c = Checks::default();
    let q10 = q(vec![1.0, 0.0])?;
    c.check(q10 == 0.0, || format!("Q(1,0) = {q10:e}"));

    let half = q(vec![0.5, 0.5])?;
    let half_exact = 1.0 - 0.5 / LN_2;
    c.check((half - half_exact).abs() <= 1e-9, || {
        format!("Q(1/2,1/2) = {half} vs {half_exact}")
    });
    c.check((half - 0.27865).abs() <= 5e-6, || {
        format!("Q(1/2,1/2) = {half} does not round to 0.27865")
    });

    let third = q(vec![2.0 / 3.0, 1.0 / 3.0])?;
    let third_exact = 3f64.log2() - 4.0 / 3.0;
    c.check((third - third_exact).abs() <= 1e-9, || {
        format!("Q(2/3,1/3) = {third} vs {third_exact}")
    });
    c.check((third - 0.25163).abs() <= 5e-6, || {
        format!("Q(2/3,1/3) = {third} does not round to 0.25163")
    });

    let mut rng = RngSeed(4).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let lam = well_separated_spectrum(&mut rng);
        let direct = subentropy_direct(&lam);
        let got = q(lam.clone())?;
        worst = worst.max((got - direct).abs());
        c.check((got - direct).abs() <= 1e-10, || format!("{lam:?}: {got} vs {direct}"));
    }
    c.note(format!(
        "Q(1/2,1/2) = {half:.10}, Q(2/3,1/3) = {third:.10}, worst random error {worst:.1e}"
    ));
    c.finish()
}

fn sandwich() -> Result<Outcome> {
    let dims: [&[usize]; 3] = [&[2, 2], &[2, 3], &[3, 3]];
    let mut c = Checks::default();
    let mut flagged = 0;
    for s in 0..50u64 {
        let d = dims[s as usize % 3];
        let e = random_ensemble(d, 2 + (s as usize % 4), RngSeed(5000 + s))?;
        let eval = Evaluation::monte_carlo(5100 + s);
        let l = lambda_l(&e, &eval)?;
        let chi = holevo_chi(&e)?;
        let jrw = jrw_lambda(&e)?;
        let slack = 3.0 * l.std_error;
        c.check(l.value >= -slack, || {
            format!("{}: lambda_l {} below 0", e.label(), l.value)
        });
        c.check(l.value <= chi.value + slack, || {
            format!("{}: lambda_l {} above chi {}", e.label(), l.value, chi.value)
        });
        c.check(jrw.value <= chi.value + 1e-9, || {
            format!("{}: lambda {} above chi {}", e.label(), jrw.value, chi.value)
        });
        let separable = d == [3, 3];
        if separable {
            flagged += 1;
        }
        c.check(l.has_flag(FLAG_SEPARABLE_ONLY) == separable, || {
            format!(
                "{}: separable-only flag is {}",
                e.label(),
                l.has_flag(FLAG_SEPARABLE_ONLY)
            )
        });
    }
    c.note(format!("{flagged} 3x3 ensembles flagged separable-only"));
    c.finish()
}

const SCROOGE_SAMPLES: [usize; 3] = [1_000, 10_000, 100_000];
const SCROOGE_BASES: usize = 50;
const SLOPE_RANGE: (f64, f64) = (-0.8, -0.25);

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn scrooge_saturation() -> Result<Outcome> {
    let mut c = Checks::default();
    for s in 0..3u64 {
        let mut rng = RngSeed(6000 + s).rng();
        let rho = random_density_matrix(&[2, 2], 4, &mut rng)?;
        let mut spreads = Vec::new();
        for (k, &n) in SCROOGE_SAMPLES.iter().enumerate() {
            let sample = sample_scrooge(&rho, n, RngSeed(6100 + 10 * s + k as u64))?;
            let product = constancy_check(&sample, SCROOGE_BASES, RngSeed(6200 + s), BasisMode::Product)?;
            spreads.push(product.spread);
            if n != *SCROOGE_SAMPLES.last().unwrap() {
                continue;
            }
            let rec = sample.recovery();
            c.check(rec.max_error <= 5.0 * rec.mc_scale, || {
                format!(
                    "state {s}: recovery error {:.2e} over 5 x {:.2e}",
                    rec.max_error, rec.mc_scale
                )
            });
            let global = constancy_check(&sample, SCROOGE_BASES, RngSeed(6300 + s), BasisMode::Global)?;
            let sigma = (product.std_error.powi(2) + global.std_error.powi(2)).sqrt();
            let diff = (product.mean - global.mean).abs();
            c.check(diff <= 3.0 * sigma, || {
                format!(
                    "state {s}: product {} vs global {} (sigma {:.2e})",
                    product.mean, global.mean, sigma
                )
            });
            c.note(format!(
                "state {s}: mean {:.5} vs Q {:.5}, recovery {:.1e}/{:.1e}",
                product.mean, product.reference_subentropy, rec.max_error, rec.mc_scale
            ));
        }
        let n: Vec<f64> = SCROOGE_SAMPLES.iter().map(|&n| n as f64).collect();
        let slope = log_log_slope(&n, &spreads);
        c.note(format!("state {s}: spread slope {slope:.3}"));
        c.check(slope >= SLOPE_RANGE.0 && slope <= SLOPE_RANGE.1, || {
            format!("state {s}: spread slope {slope:.3} outside {SLOPE_RANGE:?} (spreads {spreads:?})")
        });
    }
    c.finish()
}

const BELL_MIXTURES: [&str; 5] = [
    "bell-diagonal:0.7:0.1:0.1:0.1",
    "bell-diagonal:0.5:0.5:0:0",
    "bell-diagonal:0.25:0.25:0.25:0.25",
    "bell-diagonal:0.9:0.05:0.03:0.02",
    "bell-diagonal:0.6:0.3:0.1:0",
];

fn distillation() -> Result<Outcome> {
    let mut c = Checks::default();
    for name in BELL_MIXTURES {
        let d = resolve_builtin_decomposition(name).expect("built-in name")?;
        let h = hashing_compatibility_check(&d, 1, &FULL_GRID)?;
        let s = von_neumann_entropy(&d.average_state()?)?;
        c.check(h.bound + 3.0 * h.bound_std_error >= 1.0 - s, || {
            format!("{name}: bound {} below hashing yield {}", h.bound, 1.0 - s)
        });
        c.check(h.compatible, || format!("{name}: reported incompatible"));
    }
    let product = resolve_builtin_decomposition("product").expect("built-in name")?;
    let r = distillation_bound(&product, 1, None, &FULL_GRID)?;
    c.check(r.bound.value <= 0.0, || format!("pure product bound {}", r.bound.value));
    c.finish()
}

fn e1_sweep() -> Result<Outcome> {
    const STEPS: usize = 100;
    let mut c = Checks::default();
    let rows = sweep_e1(PI / 4.0, 0.0, PI, STEPS, &FULL_GRID)?;
    c.check(rows.len() == STEPS, || format!("{} rows", rows.len()));
    let mut prev: Option<f64> = None;
    let mut max_delta: f64 = 0.0;
    for r in &rows {
        let (Some(l), Some(se), Some(chi)) = (r.lambda_l, r.std_error, r.chi) else {
            c.check(false, || format!("theta {}: flagged {}", r.theta, r.flag));
            prev = None;
            continue;
        };
        c.check(l >= -3.0 * se && l <= chi + 3.0 * se, || {
            format!("theta {}: lambda_l {l} outside [0, {chi}]", r.theta)
        });
        if let Some(p) = prev {
            max_delta = max_delta.max((l - p).abs());
            c.check((l - p).abs() < 0.05, || format!("theta {}: jump {}", r.theta, l - p));
        }
        prev = Some(l);
    }
    let a = sweep_csv(&rows)?;
    let b = sweep_csv(&sweep_e1(PI / 4.0, 0.0, PI, STEPS, &FULL_GRID)?)?;
    c.check(a == b, || "quadrature CSV differs between runs".into());
    let mc = Evaluation::MonteCarlo { samples: 4096, seed: 8 };
    let a = sweep_csv(&sweep_e1(PI / 4.0, 0.0, PI, STEPS, &mc)?)?;
    let b = sweep_csv(&sweep_e1(PI / 4.0, 0.0, PI, STEPS, &mc)?)?;
    c.check(a == b, || "seeded Monte Carlo CSV differs between runs".into());
    c.note(format!("largest adjacent delta {max_delta:.4}"));
    c.finish()
}

fn cross_method() -> Result<Outcome> {
    let mut c = Checks::default();
    let mut worst: f64 = 0.0;
    for (i, e) in test_ensembles()?.iter().enumerate() {
        let q = lambda_l(e, &FULL_GRID)?;
        let m = lambda_l(e, &Evaluation::monte_carlo(9000 + i as u64))?;
        let sigma = (q.std_error.powi(2) + m.std_error.powi(2)).sqrt();
        let diff = (q.value - m.value).abs();
        worst = worst.max(diff / sigma);
        c.check(diff <= 3.0 * sigma, || {
            format!(
                "{}: quadrature {} vs mc {} (sigma {:.2e})",
                e.label(),
                q.value,
                m.value,
                sigma
            )
        });
    }
    c.note(format!("largest quadrature/mc deviation {worst:.2} sigma"));

    // Ensembles with a product average state, where the product-average path applies.
    let product_avg = [
        product8_ensemble(),
        bell4_ensemble(),
        e1_ensemble(0.0, PI / 4.0)?,
        e1_ensemble(PI / 2.0, PI / 4.0)?,
        e1_ensemble(1.0, 2.0)?,
    ];
    let (mut matched, mut refused) = (0, 0);
    for e in &product_avg {
        let direct = lambda_l(e, &FULL_GRID)?;
        for form in [ProductAverageForm::Derived, ProductAverageForm::AsPrinted] {
            match lambda_l_product_average(e, &FULL_GRID, form) {
                Ok(r) => {
                    matched += 1;
                    c.check(agrees(&r, &direct), || {
                        format!(
                            "{} ({}): {} vs direct {}",
                            e.label(),
                            form.name(),
                            r.value,
                            direct.value
                        )
                    });
                }
                Err(err) if err.exit_code() == 3 => refused += 1,
                Err(err) => c.check(false, || format!("{} ({}): unexpected {err}", e.label(), form.name())),
            }
        }
    }
    // Without a product average state the path must refuse rather than answer.
    let bell3 = bell3_ensemble();
    let refusal = lambda_l_product_average(&bell3, &FULL_GRID, ProductAverageForm::Derived);
    c.check(matches!(refusal, Err(Error::AverageNotProduct { .. })), || {
        format!("bell3 product-average path returned {refusal:?}")
    });
    c.note(format!(
        "product-average path: {matched} matched, {refused} exited with code 3"
    ));
    c.finish()
}

/// Independent of the tolerance used inside the product-average path.
fn agrees(r: &BoundReport, direct: &BoundReport) -> bool {
    let sigma = (r.std_error.powi(2) + direct.std_error.powi(2)).sqrt();
    (r.value - direct.value).abs() <= 3.0 * sigma + 1e-6
}
