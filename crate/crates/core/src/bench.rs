//! Seeded instance generation and the ratio / graph-size experiments.

use std::io::Write;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dtw::{approx_dtw, approx_dtw_hamming, approx_dtw_poly, exact_dtw_dp, DtwResult, Mode};
use crate::error::{Error, Result};
use crate::metric::DistanceFn;
use crate::ratio;
use crate::rle::{Letter, RleString, Run};

/// Largest alphabet the generator will produce; letter `c` is the character
/// `'a' + c`, which stays clear of the surrogate range.
pub const MAX_ALPHABET: u32 = 50_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunLengthDist {
    /// Uniform on `lo..=hi`.
    Uniform { lo: u64, hi: u64 },
    /// Number of trials up to and including the first success.
    Geometric { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceFamily {
    Hamming,
    AbsDiff,
}

impl DistanceFamily {
    pub fn distance(self) -> DistanceFn {
        match self {
            DistanceFamily::Hamming => DistanceFn::Hamming,
            DistanceFamily::AbsDiff => DistanceFn::AbsDiff,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub k: usize,
    pub l: usize,
    pub run_length: RunLengthDist,
    pub alphabet_size: u32,
    pub family: DistanceFamily,
    pub seed: u64,
}

pub fn gen_letter(c: u32) -> Letter {
    Letter('a' as u32 + c)
}

fn validate(spec: &GenSpec) -> Result<()> {
    let bad = |s: String| Err(Error::InvalidGenSpec(s));
    if spec.k == 0 || spec.l == 0 {
        return bad("run counts must be positive".into());
    }
    if spec.alphabet_size == 0 || spec.alphabet_size > MAX_ALPHABET {
        return bad(format!("alphabet size must be in [1, {MAX_ALPHABET}]"));
    }
    if spec.alphabet_size == 1 && spec.k.max(spec.l) >= 2 {
        return bad("two or more runs need at least two letters".into());
    }
    match spec.run_length {
        RunLengthDist::Uniform { lo, hi } if lo == 0 || lo > hi => {
            bad(format!("uniform run lengths need 1 <= lo <= hi, got {lo}..={hi}"))
        }
        RunLengthDist::Geometric { p } if !(p > 0.0 && p <= 1.0) => {
            bad(format!("geometric parameter must be in (0, 1], got {p}"))
        }
        _ => Ok(()),
    }
}

fn sample_runs(rng: &mut ChaCha8Rng, runs: usize, spec: &GenSpec) -> Result<RleString> {
    let mut out = Vec::with_capacity(runs);
    let mut prev: Option<u32> = None;
    for _ in 0..runs {
        let c = match prev {
            None => rng.random_range(0..spec.alphabet_size),
            Some(p) => {
                // uniform over the alphabet minus the previous letter
                let c = rng.random_range(0..spec.alphabet_size - 1);
                if c >= p {
                    c + 1
                } else {
                    c
                }
            }
        };
        prev = Some(c);
        let count = match spec.run_length {
            RunLengthDist::Uniform { lo, hi } => rng.random_range(lo..=hi),
            RunLengthDist::Geometric { p } => {
                if p >= 1.0 {
                    1
                } else {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    1 + (u.ln() / (1.0 - p).ln()).floor() as u64
                }
            }
        };
        out.push(Run::new(gen_letter(c), count));
    }
    RleString::from_runs(out)
}

/// Deterministic pair with exactly `k` and `l` maximal runs.
pub fn generate_instance(spec: &GenSpec) -> Result<(RleString, RleString)> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x = sample_runs(&mut rng, spec.k, spec)?;
    let y = sample_runs(&mut rng, spec.l, spec)?;
    Ok((x, y))
}

/// `count` specs with run counts drawn uniformly from `1..=k_max` and
/// `1..=l_max`; spec `t` gets seed `seed + t`.
pub fn random_specs(
    count: usize,
    k_max: usize,
    l_max: usize,
    run_length: RunLengthDist,
    alphabet_size: u32,
    family: DistanceFamily,
    seed: u64,
) -> Vec<GenSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|t| GenSpec {
            k: rng.random_range(1..=k_max.max(1)),
            l: rng.random_range(1..=l_max.max(1)),
            run_length,
            alphabet_size,
            family,
            seed: seed.wrapping_add(t as u64),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub seed: u64,
    pub k: usize,
    pub l: usize,
    pub m: u64,
    pub n: u64,
    pub mode: &'static str,
    pub eps: String,
    pub exact: String,
    pub approx: String,
    pub ratio: f64,
    pub vertices: usize,
    pub edges: usize,
    pub beta_star: usize,
    pub t_exact_ms: f64,
    pub t_approx_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<RatioRow>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Dispatches to the engine behind `mode`.
pub fn run_mode(mode: Mode, x: &RleString, y: &RleString, d: &DistanceFn, eps: &BigRational) -> Result<DtwResult> {
    match mode {
        Mode::ApproxDirect => approx_dtw(x, y, d, eps),
        Mode::ApproxPoly => approx_dtw_poly(x, y, d, eps),
        Mode::ApproxHamming => approx_dtw_hamming(x, y, d, eps),
        Mode::ExactDp => exact_dtw_dp(x, y, d),
    }
}

/// Compares every `(mode, eps)` against the exact oracle on every spec.
///
/// The first instance outside `[exact, (1 + eps) * exact]` aborts the run
/// with its seed.
pub fn run_ratio_experiment(specs: &[GenSpec], eps_list: &[(Mode, BigRational)]) -> Result<ExperimentReport> {
    let mut rows = Vec::new();
    for spec in specs {
        let (x, y) = generate_instance(spec)?;
        let d = spec.family.distance();
        let exact = exact_dtw_dp(&x, &y, &d)?;
        for (mode, eps) in eps_list {
            let started = Instant::now();
            let approx = run_mode(*mode, &x, &y, &d, eps)?;
            let t_approx = started.elapsed();
            let upper = &exact.value * (BigRational::one() + eps);
            if approx.value < exact.value || approx.value > upper {
                return Err(Error::RatioViolation {
                    seed: spec.seed,
                    epsilon: format!("{} {}", mode.label(), ratio::render(eps)),
                    exact: ratio::render(&exact.value),
                    approx: ratio::render(&approx.value),
                });
            }
            let ratio = if exact.value.is_zero() {
                1.0
            } else {
                to_f64(&(&approx.value / &exact.value))
            };
            rows.push(RatioRow {
                seed: spec.seed,
                k: approx.stats.k,
                l: approx.stats.l,
                m: approx.stats.m,
                n: approx.stats.n,
                mode: mode.label(),
                eps: ratio::render(eps),
                exact: ratio::render(&exact.value),
                approx: ratio::render(&approx.value),
                ratio,
                vertices: approx.stats.vertices,
                edges: approx.stats.edges,
                beta_star: approx.stats.beta_star,
                t_exact_ms: ms(exact.stats.elapsed),
                t_approx_ms: ms(t_approx),
            });
        }
    }
    rows.sort_by_key(|r| r.seed);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(1.0, f64::max);
    let mean_ratio = if rows.is_empty() {
        1.0
    } else {
        rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len() as f64
    };
    Ok(ExperimentReport {
        rows,
        max_ratio,
        mean_ratio,
    })
}

impl ExperimentReport {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Report(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Report(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub seed: u64,
    pub k: usize,
    pub l: usize,
    pub m: u64,
    pub n: u64,
    pub eps: String,
    pub vertices: usize,
    pub edges: usize,
    pub beta_star: usize,
    /// `k * l * beta* * log^2_{1+eps}(m + n)`.
    pub bound_unit: f64,
    pub edges_per_unit: f64,
    pub exceeds_bound: bool,
    pub t_approx_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub constant: f64,
    pub rows: Vec<ScalingRow>,
}

/// `k * l * beta* * log^2_{1+eps}(m + n)` for one measured instance.
pub fn edge_bound_unit(k: usize, l: usize, beta_star: usize, m: u64, n: u64, eps: &BigRational) -> f64 {
    let log = ((m + n) as f64).ln() / (1.0 + to_f64(eps)).ln();
    (k * l * beta_star) as f64 * log * log
}

fn scaling_row(spec: &GenSpec, eps: &BigRational) -> Result<ScalingRow> {
    let (x, y) = generate_instance(spec)?;
    let r = approx_dtw(&x, &y, &spec.family.distance(), eps)?;
    let s = &r.stats;
    let unit = edge_bound_unit(s.k, s.l, s.beta_star, s.m, s.n, eps);
    Ok(ScalingRow {
        seed: spec.seed,
        k: s.k,
        l: s.l,
        m: s.m,
        n: s.n,
        eps: ratio::render(eps),
        vertices: s.vertices,
        edges: s.edges,
        beta_star: s.beta_star,
        bound_unit: unit,
        edges_per_unit: s.edges as f64 / unit,
        exceeds_bound: false,
        t_approx_ms: ms(s.elapsed),
    })
}

/// Largest observed `|E| / (k * l * beta* * log^2_{1+eps}(m + n))` over a
/// calibration set.
pub fn calibrate_edge_constant(specs: &[GenSpec], eps: &BigRational) -> Result<f64> {
    let mut c: f64 = 0.0;
    for spec in specs {
        c = c.max(scaling_row(spec, eps)?.edges_per_unit);
    }
    Ok(c)
}

/// Measures `|E|` for `k = l` taken from `k_list`, seeding instance `t` with
/// `base.seed + t`, and flags rows above `constant * bound_unit`.
pub fn run_scaling_experiment(
    k_list: &[usize],
    eps: &BigRational,
    base: &GenSpec,
    constant: f64,
) -> Result<ScalingReport> {
    let mut rows = Vec::with_capacity(k_list.len());
    for (t, &k) in k_list.iter().enumerate() {
        let spec = GenSpec {
            k,
            l: k,
            seed: base.seed.wrapping_add(t as u64),
            ..base.clone()
        };
        let mut row = scaling_row(&spec, eps)?;
        row.exceeds_bound = row.edges as f64 > constant * row.bound_unit;
        rows.push(row);
    }
    Ok(ScalingReport { constant, rows })
}

impl ScalingReport {
    /// CSV with a leading `# c=<constant>` comment line.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# c={}", self.constant).map_err(|e| Error::Report(e.to_string()))?;
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Report(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Report(e.to_string()))
    }
}
