//! Encoding angles into representation vectors and decoding them back.

use std::f64::consts::{FRAC_PI_6, PI};

use rayon::prelude::*;

use crate::angle::{circular_mean_radians, signed_diff, Angle};
use crate::error::{OrientError, Result};
use crate::repr::scheme::wrapped;
use crate::repr::{ReprKind, ReprScheme, ReprVector};

/// Agreement threshold used by the voting-bin decoder (30 degrees).
pub const VOTE_THRESHOLD: f64 = FRAC_PI_6;

/// Norm below which a (cos, sin) pair carries no direction.
pub const DEGENERATE_NORM: f64 = 1e-9;

/// Encodes a canonical angle under `scheme`.
pub fn encode(scheme: &ReprScheme, theta: Angle) -> ReprVector {
    let mut values = vec![0.0; scheme.dimension()];
    encode_into(scheme, theta, &mut values);
    ReprVector::from_parts(*scheme, values)
}

/// Writes the encoding of `theta` into `out`, which must have length
/// `scheme.dimension()`.
pub fn encode_into(scheme: &ReprScheme, theta: Angle, out: &mut [f64]) {
    assert_eq!(out.len(), scheme.dimension());
    let t = theta.radians();
    match scheme.kind() {
        ReprKind::GlobalScalar | ReprKind::LocalScalar => out[0] = t / PI,
        ReprKind::SingleBin => {
            out[0] = t.cos();
            out[1] = t.sin();
        }
        ReprKind::Tricosine => {
            for (i, slot) in out.iter_mut().enumerate() {
                let c = scheme.bin(i).center.radians();
                *slot = signed_diff(t, c).cos();
            }
        }
        ReprKind::VotingBins => {
            for (i, pair) in out.chunks_exact_mut(2).enumerate() {
                let d = signed_diff(t, scheme.bin(i).center.radians());
                pair[0] = d.cos();
                pair[1] = d.sin();
            }
        }
        ReprKind::ConfidenceBins => {
            out.fill(0.0);
            let k = scheme.containing_bin(theta);
            let bin = scheme.bin(k);
            out[2 * k] = 1.0;
            out[2 * k + 1] = signed_diff(t, bin.center.radians()) / (bin.width / 2.0);
        }
        ReprKind::Multibin => {
            out.fill(0.0);
            let holders: Vec<_> = scheme.bins().into_iter().filter(|b| b.contains(theta)).collect();
            let conf = 1.0 / holders.len() as f64;
            for b in holders {
                let d = b.offset_from_start(theta);
                let slot = &mut out[3 * b.index..3 * b.index + 3];
                slot[0] = conf;
                slot[1] = d.cos();
                slot[2] = d.sin();
            }
        }
    }
}

/// Decodes a vector back into a canonical angle.
///
/// The vector need not be canonical; raw regressor outputs are accepted as
/// long as they are finite.
pub fn decode(vec: &ReprVector) -> Result<Angle> {
    vec.ensure_finite()?;
    let scheme = vec.scheme();
    let v = vec.values();
    match scheme.kind() {
        ReprKind::GlobalScalar | ReprKind::LocalScalar => Angle::wrap(v[0] * PI),
        ReprKind::SingleBin => {
            if v[0].hypot(v[1]) < DEGENERATE_NORM {
                return Err(OrientError::DegenerateVector(format!(
                    "single_bin vector [{}, {}] has no direction",
                    v[0], v[1]
                )));
            }
            Angle::wrap(v[1].atan2(v[0]))
        }
        ReprKind::Multibin => {
            let k = argmax(v.iter().step_by(3).copied());
            let start = scheme.bin(k).start.radians();
            Angle::wrap(start + v[3 * k + 2].atan2(v[3 * k + 1]))
        }
        ReprKind::ConfidenceBins => {
            let k = argmax(v.iter().step_by(2).copied());
            let bin = scheme.bin(k);
            let u = v[2 * k + 1].clamp(-1.0, 1.0);
            Angle::wrap(bin.center.radians() + u * bin.width / 2.0)
        }
        ReprKind::VotingBins => {
            let candidates: Vec<f64> = v
                .chunks_exact(2)
                .enumerate()
                .map(|(i, p)| wrapped(scheme.bin(i).center.radians() + p[1].atan2(p[0])))
                .collect();
            let keep = vote(&candidates, VOTE_THRESHOLD);
            circular_mean_radians(candidates.iter().zip(&keep).filter(|(_, k)| **k).map(|(c, _)| *c))
        }
        ReprKind::Tricosine => decode_tricosine(scheme, v),
    }
}

/// First index of the maximum; NaN-free input assumed.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, x) in values.enumerate() {
        if x > best.1 {
            best = (i, x);
        }
    }
    best.0
}

/// Decides which voting-bin candidates survive.
///
/// A candidate is voted out when the median of its distances to the other
/// candidates exceeds `threshold` while at least one pair among those others
/// agrees within `threshold`. If every candidate would be voted out, all are
/// kept.
pub fn vote(candidates: &[f64], threshold: f64) -> Vec<bool> {
    let n = candidates.len();
    let mut keep = vec![true; n];
    if n < 3 {
        return keep;
    }
    for i in 0..n {
        let mut dists: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| signed_diff(candidates[i], candidates[j]).abs())
            .collect();
        dists.sort_by(f64::total_cmp);
        let m = dists.len();
        let median = if m % 2 == 1 {
            dists[m / 2]
        } else {
            0.5 * (dists[m / 2 - 1] + dists[m / 2])
        };
        if median <= threshold {
            continue;
        }
        let others_agree = (0..n).filter(|&j| j != i).any(|j| {
            (j + 1..n)
                .filter(|&k| k != i)
                .any(|k| signed_diff(candidates[j], candidates[k]).abs() <= threshold)
        });
        if others_agree {
            keep[i] = false;
        }
    }
    if keep.iter().all(|k| !k) {
        keep.fill(true);
    }
    keep
}

/// Tricosine decoding: each affinity gives two candidates `c_i ± acos(v_i)`;
/// the sign assignment whose circular mean best reproduces all three
/// affinities wins.
fn decode_tricosine(scheme: &ReprScheme, v: &[f64]) -> Result<Angle> {
    let centers: Vec<f64> = (0..3).map(|i| scheme.bin(i).center.radians()).collect();
    let affinity: Vec<f64> = v.iter().map(|x| x.clamp(-1.0, 1.0)).collect();
    let spread: Vec<f64> = affinity.iter().map(|x| x.acos()).collect();

    let mut best: Option<(f64, f64)> = None;
    let mut last_err = None;
    for mask in 0u8..8 {
        let cands = (0..3).map(|i| {
            let sign = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
            centers[i] + sign * spread[i]
        });
        let theta = match circular_mean_radians(cands) {
            Ok(t) => t.radians(),
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let score: f64 = (0..3)
            .map(|i| {
                let r = signed_diff(theta, centers[i]).cos() - affinity[i];
                r * r
            })
            .sum();
        best = match best {
            None => Some((score, theta)),
            Some((bs, bt)) if score < bs - 1e-15 || (score <= bs + 1e-15 && theta < bt) => {
                Some((score, theta))
            }
            keep => keep,
        };
    }
    match best {
        Some((_, theta)) => Angle::wrap(theta),
        None => Err(last_err.unwrap_or_else(|| OrientError::invalid("tricosine decode failed"))),
    }
}

/// Projects a raw vector onto the scheme's valid value ranges.
///
/// (cos, sin) pairs are rescaled to unit length, which leaves their direction
/// untouched; confidences and affinities are clipped; scalars are wrapped.
/// Multibin pairs that are exactly `(0, 0)` mark "angle not in this bin" and
/// are kept as they are.
pub fn canonicalize(vec: &ReprVector) -> Result<ReprVector> {
    vec.ensure_finite()?;
    let scheme = *vec.scheme();
    let mut out = vec.values().to_vec();
    let unit = |pair: &mut [f64], allow_zero: bool| -> Result<()> {
        let n = pair[0].hypot(pair[1]);
        if n == 0.0 && allow_zero {
            return Ok(());
        }
        if n < DEGENERATE_NORM {
            return Err(OrientError::DegenerateVector(format!(
                "({}, {}) cannot be scaled to a unit pair",
                pair[0], pair[1]
            )));
        }
        pair[0] /= n;
        pair[1] /= n;
        Ok(())
    };
    match scheme.kind() {
        ReprKind::GlobalScalar | ReprKind::LocalScalar => out[0] = wrapped(out[0] * PI) / PI,
        ReprKind::SingleBin => unit(&mut out, false)?,
        ReprKind::Tricosine => out.iter_mut().for_each(|x| *x = x.clamp(-1.0, 1.0)),
        ReprKind::VotingBins => {
            for pair in out.chunks_exact_mut(2) {
                unit(pair, false)?;
            }
        }
        ReprKind::ConfidenceBins => {
            for pair in out.chunks_exact_mut(2) {
                pair[0] = pair[0].clamp(0.0, 1.0);
                pair[1] = pair[1].clamp(-1.0, 1.0);
            }
        }
        ReprKind::Multibin => {
            for triple in out.chunks_exact_mut(3) {
                triple[0] = triple[0].clamp(0.0, 1.0);
                unit(&mut triple[1..], true)?;
            }
        }
    }
    Ok(ReprVector::from_parts(scheme, out))
}

/// Encodes many angles; order is preserved.
pub fn encode_batch(scheme: &ReprScheme, angles: &[Angle]) -> Vec<ReprVector> {
    angles.par_iter().map(|&a| encode(scheme, a)).collect()
}

/// Decodes many vectors; order is preserved.
pub fn decode_batch(vectors: &[ReprVector]) -> Vec<Result<Angle>> {
    vectors.par_iter().map(decode).collect()
}
