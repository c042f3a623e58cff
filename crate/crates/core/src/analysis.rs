//! Experiment harness: a brute-force reference decoder, loss-landscape
//! sweeps, gradient-descent fits in representation space and noisy
//! prediction simulation.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::angle::{wrap_radians, Angle};
use crate::error::{OrientError, Result};
use crate::loss::LossKind;
use crate::metrics::EvalBatch;
use crate::repr::{canonicalize, decode, encode, encode_into, ReprKind, ReprScheme, ReprVector};

/// Smallest grid accepted by the reference decoder.
pub const MIN_ORACLE_GRID: usize = 10_000;

const TERNARY_ITERATIONS: usize = 100;

/// `n` angles evenly spaced over `[-π, π)`, starting at `-π`.
pub fn uniform_grid(n: usize) -> Vec<Angle> {
    (0..n)
        .map(|k| Angle::wrap(-PI + TAU * k as f64 / n as f64).expect("finite"))
        .collect()
}

/// Brute-force decoder: nearest encoding on a dense grid, refined by a
/// ternary search inside the winning cell.
///
/// It shares nothing with the closed-form decoders beyond `encode` and
/// `canonicalize`, which makes it the reference they are tested against.
#[derive(Debug, Clone)]
pub struct GridOracle {
    scheme: ReprScheme,
    grid_size: usize,
    table: Vec<f64>,
}

impl GridOracle {
    pub fn new(scheme: ReprScheme, grid_size: usize) -> Result<Self> {
        if grid_size < MIN_ORACLE_GRID {
            return Err(OrientError::invalid(format!(
                "oracle grid must have at least {MIN_ORACLE_GRID} points, got {grid_size}"
            )));
        }
        let dim = scheme.dimension();
        let mut table = vec![0.0; grid_size * dim];
        table
            .par_chunks_exact_mut(dim)
            .enumerate()
            .for_each(|(k, row)| encode_into(&scheme, grid_angle(k, grid_size), row));
        Ok(Self { scheme, grid_size, table })
    }

    pub fn scheme(&self) -> &ReprScheme {
        &self.scheme
    }

    pub fn decode(&self, vec: &ReprVector) -> Result<Angle> {
        if vec.scheme() != &self.scheme {
            return Err(OrientError::invalid(format!(
                "oracle built for `{}` cannot decode `{}`",
                self.scheme,
                vec.scheme()
            )));
        }
        let target = canonicalize(vec)?;
        let target = target.values();
        let dim = self.scheme.dimension();
        let best = self
            .table
            .chunks_exact(dim)
            .map(|row| sq_dist(row, target))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
            .expect("non-empty grid");

        let cell = TAU / self.grid_size as f64;
        let center = -PI + cell * best as f64;
        let (mut lo, mut hi) = (center - cell, center + cell);
        let mut buf = vec![0.0; dim];
        let mut cost = |theta: f64| {
            encode_into(&self.scheme, Angle::wrap(theta).expect("finite"), &mut buf);
            sq_dist(&buf, target)
        };
        for _ in 0..TERNARY_ITERATIONS {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if cost(m1) <= cost(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        Angle::wrap(0.5 * (lo + hi))
    }
}

#[inline]
fn grid_angle(k: usize, n: usize) -> Angle {
    Angle::wrap(-PI + TAU * k as f64 / n as f64).expect("finite")
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// One-shot form of [`GridOracle::decode`].
pub fn oracle_decode(vec: &ReprVector, grid_size: usize) -> Result<Angle> {
    GridOracle::new(*vec.scheme(), grid_size)?.decode(vec)
}

/// A vector near the encoding of `theta` that still satisfies the scheme's
/// canonical form. Each component is moved by an independent angular error
/// drawn from `[-spread, spread]`: (cos, sin) pairs are rotated, affinities
/// and offsets are shifted, confidences are left alone.
pub fn perturbed_canonical<R: Rng + ?Sized>(
    scheme: &ReprScheme,
    theta: Angle,
    spread: f64,
    rng: &mut R,
) -> ReprVector {
    let mut jitter = || if spread > 0.0 { rng.random_range(-spread..=spread) } else { 0.0 };
    let mut v = encode(scheme, theta);
    let rotate = |pair: &mut [f64], d: f64| {
        let (c, s) = (pair[0], pair[1]);
        pair[0] = c * d.cos() - s * d.sin();
        pair[1] = c * d.sin() + s * d.cos();
    };
    let t = theta.radians();
    match scheme.kind() {
        ReprKind::GlobalScalar | ReprKind::LocalScalar => {
            let x = v.values()[0] + jitter() / PI;
            v.values_mut()[0] = wrap_radians(x * PI) / PI;
        }
        ReprKind::SingleBin => {
            let d = jitter();
            rotate(v.values_mut(), d);
        }
        ReprKind::VotingBins => {
            for pair in v.values_mut().chunks_exact_mut(2) {
                rotate(pair, jitter());
            }
        }
        ReprKind::Multibin => {
            for triple in v.values_mut().chunks_exact_mut(3) {
                if triple[0] > 0.0 {
                    rotate(&mut triple[1..], jitter());
                }
            }
        }
        ReprKind::ConfidenceBins => {
            let half = scheme.nominal_width() / 2.0;
            for pair in v.values_mut().chunks_exact_mut(2) {
                if pair[0] > 0.0 {
                    pair[1] = (pair[1] + jitter() / half).clamp(-1.0, 1.0);
                }
            }
        }
        ReprKind::Tricosine => {
            let bins = scheme.bins();
            for (slot, bin) in v.values_mut().iter_mut().zip(&bins) {
                *slot = (t - bin.center.radians() + jitter()).cos();
            }
        }
    }
    v
}

/// Loss as a function of the predicted angle for a fixed ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeSweep {
    pub scheme: ReprScheme,
    pub loss: LossKind,
    pub gt_angle: Angle,
    pub num_points: usize,
    /// `(theta_pred, loss)` over [`uniform_grid`]`(num_points)`.
    pub samples: Vec<(Angle, f64)>,
}

impl LandscapeSweep {
    pub fn to_csv(&self) -> String {
        let rows = self.samples.iter().map(|(t, l)| vec![format_sig(t.radians()), format_sig(*l)]);
        write_csv(&["theta_pred", "loss"], rows)
    }

    /// Index of the smallest loss (first one on ties).
    pub fn argmin(&self) -> usize {
        self.samples
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn grid_step(&self) -> f64 {
        TAU / self.num_points as f64
    }
}

/// Evaluates `loss(encode(θ), encode(gt))` for `θ` on a uniform grid.
pub fn sweep_landscape(
    scheme: ReprScheme,
    loss: LossKind,
    gt_angle: Angle,
    num_points: usize,
) -> Result<LandscapeSweep> {
    loss.ensure_supports(&scheme)?;
    if num_points == 0 {
        return Err(OrientError::invalid("landscape needs at least one point"));
    }
    let target = encode(&scheme, gt_angle);
    let samples = uniform_grid(num_points)
        .into_par_iter()
        .map(|theta| Ok((theta, loss.evaluate(&encode(&scheme, theta), &target)?.value)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LandscapeSweep { scheme, loss, gt_angle, num_points, samples })
}

/// One recorded gradient-descent iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct FitStep {
    pub step: usize,
    pub loss: f64,
    /// `None` when the iterate cannot be decoded (e.g. a zero-length pair).
    pub decoded: Option<Angle>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub scheme: ReprScheme,
    pub loss: LossKind,
    pub gt_angle: Angle,
    pub init_vector: ReprVector,
    pub step_size: f64,
    pub steps: usize,
    /// Iterates `0..=steps`; shorter only when `halted` is set.
    pub trajectory: Vec<FitStep>,
    pub final_vector: ReprVector,
    /// Step at which the loss became undefined, with the cause.
    pub halted: Option<(usize, OrientError)>,
}

impl FitTrace {
    pub fn to_csv(&self) -> String {
        let rows = self.trajectory.iter().map(|s| {
            vec![
                s.step.to_string(),
                format_sig(s.loss),
                s.decoded.map(|a| format_sig(a.radians())).unwrap_or_else(|| "nan".into()),
            ]
        });
        write_csv(&["step", "loss", "decoded_angle"], rows)
    }

    pub fn first(&self) -> &FitStep {
        &self.trajectory[0]
    }

    pub fn last(&self) -> &FitStep {
        self.trajectory.last().expect("trajectory holds the initial state")
    }

    /// First step whose loss is at or below `level`.
    pub fn steps_to_reach(&self, level: f64) -> Option<usize> {
        self.trajectory.iter().find(|s| s.loss <= level).map(|s| s.step)
    }
}

/// Plain gradient descent on the prediction vector toward `encode(gt_angle)`.
pub fn fit_representation(
    scheme: ReprScheme,
    loss: LossKind,
    gt_angle: Angle,
    init_vector: ReprVector,
    step_size: f64,
    steps: usize,
) -> Result<FitTrace> {
    loss.ensure_supports(&scheme)?;
    if init_vector.scheme() != &scheme {
        return Err(OrientError::invalid("initial vector does not match the scheme"));
    }
    if !(step_size > 0.0 && step_size <= 1.0) {
        return Err(OrientError::invalid(format!("step size must lie in (0, 1], got {step_size}")));
    }
    let target = encode(&scheme, gt_angle);
    let mut current = init_vector.clone();
    let mut trajectory = Vec::with_capacity(steps + 1);
    let mut halted = None;
    for step in 0..=steps {
        let report = match loss.evaluate(&current, &target) {
            Ok(r) => r,
            Err(e) => {
                halted = Some((step, e));
                break;
            }
        };
        trajectory.push(FitStep { step, loss: report.value, decoded: decode(&current).ok() });
        if step == steps {
            break;
        }
        for (x, g) in current.values_mut().iter_mut().zip(&report.gradient) {
            *x -= step_size * g;
        }
    }
    Ok(FitTrace {
        scheme,
        loss,
        gt_angle,
        init_vector,
        step_size,
        steps,
        trajectory,
        final_vector: current,
        halted,
    })
}

/// Encodes each angle, adds `N(0, sigma²)` to every component, canonicalizes
/// and decodes.
///
/// Instance `i` draws from its own ChaCha stream `i` under `seed`, so the
/// result does not depend on thread scheduling. Vectors that cannot be
/// canonicalized are decoded raw; undecodable ones predict zero.
pub fn simulate_noisy_predictions(
    scheme: ReprScheme,
    angles: &[Angle],
    noise_sigma: f64,
    seed: u64,
) -> Result<EvalBatch> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(OrientError::invalid(format!("noise sigma must be finite and >= 0, got {noise_sigma}")));
    }
    let normal = Normal::new(0.0, noise_sigma)
        .map_err(|e| OrientError::invalid(format!("noise sigma {noise_sigma}: {e}")))?;
    let predictions: Vec<Angle> = angles
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut v = encode(&scheme, theta);
            if noise_sigma > 0.0 {
                for x in v.values_mut() {
                    *x += normal.sample(&mut rng);
                }
            }
            let v = canonicalize(&v).unwrap_or(v);
            decode(&v).unwrap_or(Angle::ZERO)
        })
        .collect();
    EvalBatch::new(predictions, angles.to_vec())
}

/// Formats with 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..DIGITS).contains(&exp) {
        let s = format!("{:.*e}", (DIGITS - 1) as usize, x);
        let (mantissa, e) = s.split_once('e').expect("exponent");
        return format!("{}e{}", trim_zeros(mantissa), e);
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
