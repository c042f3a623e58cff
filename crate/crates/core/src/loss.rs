//! Losses over representation vectors, each returning its value together
//! with the analytic gradient with respect to the prediction.

use std::fmt;
use std::str::FromStr;

use crate::error::{OrientError, Result};
use crate::repr::{ReprKind, ReprScheme, ReprVector, DEGENERATE_NORM};

/// Loss value and gradient with respect to the prediction vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub value: f64,
    pub gradient: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    L2,
    Angular,
    Multibin,
}

impl LossKind {
    pub fn id(self) -> &'static str {
        match self {
            LossKind::L2 => "l2",
            LossKind::Angular => "angular",
            LossKind::Multibin => "multibin",
        }
    }

    pub fn supports(self, scheme: &ReprScheme) -> bool {
        match self {
            LossKind::L2 => true,
            LossKind::Angular => scheme.kind() == ReprKind::SingleBin,
            LossKind::Multibin => scheme.kind() == ReprKind::Multibin,
        }
    }

    pub fn ensure_supports(self, scheme: &ReprScheme) -> Result<()> {
        if self.supports(scheme) {
            Ok(())
        } else {
            Err(OrientError::invalid(format!("loss `{}` cannot be used with scheme `{scheme}`", self.id())))
        }
    }

    pub fn evaluate(self, pred: &ReprVector, target: &ReprVector) -> Result<LossReport> {
        match self {
            LossKind::L2 => l2_loss(pred, target),
            LossKind::Angular => angular_loss(pred, target),
            LossKind::Multibin => multibin_loss(pred, target),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for LossKind {
    type Err = OrientError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(LossKind::L2),
            "angular" => Ok(LossKind::Angular),
            "multibin" => Ok(LossKind::Multibin),
            other => Err(OrientError::invalid(format!(
                "unknown loss `{other}` (expected l2, angular or multibin)"
            ))),
        }
    }
}

fn same_scheme(pred: &ReprVector, target: &ReprVector) -> Result<()> {
    if pred.scheme() != target.scheme() {
        return Err(OrientError::invalid(format!(
            "prediction scheme `{}` does not match target scheme `{}`",
            pred.scheme(),
            target.scheme()
        )));
    }
    pred.ensure_finite()?;
    target.ensure_finite()
}

/// Sum of squared component errors.
pub fn l2_loss(pred: &ReprVector, target: &ReprVector) -> Result<LossReport> {
    same_scheme(pred, target)?;
    let diff: Vec<f64> = pred.values().iter().zip(target.values()).map(|(p, t)| p - t).collect();
    Ok(LossReport {
        value: diff.iter().map(|d| d * d).sum(),
        gradient: diff.iter().map(|d| 2.0 * d).collect(),
    })
}

/// `1 - (x_g·x + y_g·y) / |(x, y)|` for a Single Bin prediction `(x, y)` and
/// unit target `(x_g, y_g)`.
///
/// The prediction's length is normalized away, so only its direction is
/// penalized. The gradient vanishes at the antipode of the target.
pub fn angular_loss(pred: &ReprVector, target: &ReprVector) -> Result<LossReport> {
    same_scheme(pred, target)?;
    if pred.scheme().kind() != ReprKind::SingleBin {
        return Err(OrientError::invalid("angular loss needs single_bin vectors"));
    }
    let (x, y) = (pred.values()[0], pred.values()[1]);
    let (xg, yg) = (target.values()[0], target.values()[1]);
    if ((xg.hypot(yg)) - 1.0).abs() > 1e-6 {
        return Err(OrientError::invalid(format!(
            "angular loss target must be unit length, got norm {}",
            xg.hypot(yg)
        )));
    }
    let n = x.hypot(y);
    if n <= DEGENERATE_NORM {
        return Err(OrientError::DegenerateVector(
            "angular loss is undefined for a zero-length prediction".into(),
        ));
    }
    let (value, gradient) = cosine_term(x, y, xg, yg, n);
    Ok(LossReport { value, gradient: gradient.to_vec() })
}

/// `1 - cos` between prediction `(x, y)` of norm `n` and unit `(xg, yg)`,
/// with its gradient.
fn cosine_term(x: f64, y: f64, xg: f64, yg: f64, n: f64) -> (f64, [f64; 2]) {
    let dot = xg * x + yg * y;
    let n3 = n * n * n;
    let value = 1.0 - dot / n;
    let grad = [-xg / n + dot * x / n3, -yg / n + dot * y / n3];
    (value, grad)
}

/// Multibin loss: softmax cross-entropy on the bin confidences plus a
/// confidence-weighted `1 - cos` orientation term on every bin the target
/// angle falls in, weighted 1:1.
///
/// A predicted offset pair of zero length carries no direction; its
/// orientation term is taken as `1 - 0` with zero gradient.
pub fn multibin_loss(pred: &ReprVector, target: &ReprVector) -> Result<LossReport> {
    same_scheme(pred, target)?;
    if pred.scheme().kind() != ReprKind::Multibin {
        return Err(OrientError::invalid("multibin loss needs multibin vectors"));
    }
    let p = pred.values();
    let t = target.values();
    let bins = pred.scheme().num_bins();
    let mut gradient = vec![0.0; p.len()];

    // softmax cross-entropy
    let logits: Vec<f64> = (0..bins).map(|b| p[3 * b]).collect();
    let weights: Vec<f64> = (0..bins).map(|b| t[3 * b]).collect();
    let zmax = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum_exp: f64 = logits.iter().map(|z| (z - zmax).exp()).sum();
    let lse = zmax + sum_exp.ln();
    let mass: f64 = weights.iter().sum();
    let mut value: f64 = logits.iter().zip(&weights).map(|(z, w)| w * (lse - z)).sum();
    for b in 0..bins {
        let softmax = (logits[b] - lse).exp();
        gradient[3 * b] = softmax * mass - weights[b];
    }

    // orientation
    for b in 0..bins {
        let w = weights[b];
        if w <= 0.0 {
            continue;
        }
        let (tc, ts) = (t[3 * b + 1], t[3 * b + 2]);
        let tn = tc.hypot(ts);
        if tn < DEGENERATE_NORM {
            return Err(OrientError::invalid(format!(
                "target bin {b} has confidence {w} but no offset direction"
            )));
        }
        let (x, y) = (p[3 * b + 1], p[3 * b + 2]);
        let n = x.hypot(y);
        if n < DEGENERATE_NORM {
            value += w;
            continue;
        }
        let (term, g) = cosine_term(x, y, tc / tn, ts / tn, n);
        value += w * term;
        gradient[3 * b + 1] = w * g[0];
        gradient[3 * b + 2] = w * g[1];
    }
    Ok(LossReport { value, gradient })
}

/// Central-difference gradient of `loss` with respect to the prediction.
pub fn finite_diff_gradient<F>(loss: F, pred: &ReprVector, target: &ReprVector, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&ReprVector, &ReprVector) -> Result<LossReport>,
{
    if !(h > 0.0 && h <= 1e-3) {
        return Err(OrientError::invalid(format!("step h must lie in (0, 1e-3], got {h}")));
    }
    let mut probe = pred.clone();
    let mut grad = Vec::with_capacity(pred.len());
    for i in 0..pred.len() {
        let x = pred.values()[i];
        probe.values_mut()[i] = x + h;
        let up = loss(&probe, target)?.value;
        probe.values_mut()[i] = x - h;
        let down = loss(&probe, target)?.value;
        probe.values_mut()[i] = x;
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// `‖a - b‖ / max(‖a‖, ‖b‖)`, or the absolute error when both are zero.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::repr::encode;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn sb(x: f64, y: f64) -> ReprVector {
        ReprVector::new(ReprScheme::single_bin(), vec![x, y]).unwrap()
    }

    fn enc(scheme: &ReprScheme, t: f64) -> ReprVector {
        encode(scheme, Angle::wrap(t).unwrap())
    }

    #[test]
    fn l2_examples() {
        let r = l2_loss(&sb(1.0, 0.0), &sb(0.0, 1.0)).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.gradient, vec![2.0, -2.0]);
        for scheme in ReprScheme::standard_set() {
            let v = enc(&scheme, 0.7);
            let r = l2_loss(&v, &v).unwrap();
            assert_eq!(r.value, 0.0);
            assert!(r.gradient.iter().all(|g| *g == 0.0));
        }
    }

    #[test]
    fn l2_single_bin_is_chord_length_squared() {
        let s = ReprScheme::single_bin();
        let target = enc(&s, 0.0);
        for k in 0..360 {
            let t = -PI + TAU * k as f64 / 360.0;
            // (cos t - 1)^2 + sin^2 t
            let expected = (t.cos() - 1.0).powi(2) + t.sin().powi(2);
            let r = l2_loss(&enc(&s, t), &target).unwrap();
            assert!((r.value - expected).abs() < 1e-14);
            assert!((r.value - (2.0 - 2.0 * t.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn l2_rejects_mismatched_schemes() {
        let a = enc(&ReprScheme::single_bin(), 0.1);
        let b = enc(&ReprScheme::tricosine(), 0.1);
        assert!(matches!(l2_loss(&a, &b), Err(OrientError::InvalidInput(_))));
    }

    #[test]
    fn angular_examples() {
        assert_eq!(angular_loss(&sb(1.0, 0.0), &sb(1.0, 0.0)).unwrap().value, 0.0);
        let r = angular_loss(&sb(-1.0, 0.0), &sb(1.0, 0.0)).unwrap();
        assert_eq!(r.value, 2.0);
        assert!(r.gradient.iter().all(|g| g.abs() < 1e-15));
        assert_eq!(angular_loss(&sb(0.0, 1.0), &sb(1.0, 0.0)).unwrap().value, 1.0);
        assert!(matches!(
            angular_loss(&sb(0.0, 0.0), &sb(1.0, 0.0)),
            Err(OrientError::DegenerateVector(_))
        ));
        assert!(angular_loss(&sb(1.0, 0.0), &sb(2.0, 0.0)).is_err());
    }

    #[test]
    fn angular_gradient_stalls_near_antipode() {
        let target = sb(1.0, 0.0);
        let pred = sb((PI - 1e-4).cos(), (PI - 1e-4).sin());
        let analytic = angular_loss(&pred, &target).unwrap().gradient;
        let numeric = finite_diff_gradient(angular_loss, &pred, &target, 1e-6).unwrap();
        let norm = |g: &[f64]| g.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm(&analytic) < 1e-3);
        assert!(norm(&numeric) < 1e-3);
    }

    #[test]
    fn multibin_loss_at_bin_center() {
        let s = ReprScheme::multibin(2, 0.1).unwrap();
        let v = encode(&s, s.bin(0).center);
        let r = multibin_loss(&v, &v).unwrap();
        // oracle: CE(softmax([1, 0]), [1, 0]) = ln(1 + e^-1), orientation term 0
        let ce = (1.0 + (-1.0f64).exp()).ln();
        assert!((r.value - ce).abs() < 1e-14, "{}", r.value);
        assert!(r.gradient[1].abs() < 1e-15 && r.gradient[2].abs() < 1e-15);
    }

    #[test]
    fn multibin_orientation_term_vanishes_on_matching_offsets() {
        let s = ReprScheme::multibin(2, 0.1).unwrap();
        let target = enc(&s, 0.4);
        let mut pred = target.clone();
        // change only the confidences
        pred.values_mut()[0] = 3.0;
        pred.values_mut()[3] = -1.0;
        let r = multibin_loss(&pred, &target).unwrap();
        let z = [3.0f64, -1.0];
        let lse = (z[0].exp() + z[1].exp()).ln();
        assert!((r.value - (lse - 3.0)).abs() < 1e-14);
    }

    #[test]
    fn multibin_zero_offset_costs_full_weight() {
        let s = ReprScheme::multibin(2, 0.1).unwrap();
        let target = enc(&s, 0.0);
        let pred = enc(&s, 2.5);
        let r = multibin_loss(&pred, &target).unwrap();
        let lse = (1.0f64.exp() + 1.0).ln();
        // pred confidences [0, 1] against target [1, 0]; bin 0 pred offsets are (0, 0)
        assert!((r.value - (lse + 1.0)).abs() < 1e-14);
        assert_eq!(&r.gradient[1..3], &[0.0, 0.0]);
    }

    #[test]
    fn finite_diff_rejects_bad_steps() {
        let v = sb(1.0, 0.0);
        assert!(finite_diff_gradient(l2_loss, &v, &v, 0.0).is_err());
        assert!(finite_diff_gradient(l2_loss, &v, &v, 1e-2).is_err());
        let g = finite_diff_gradient(l2_loss, &v, &v, 1e-6).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn loss_ids_parse() {
        for k in [LossKind::L2, LossKind::Angular, LossKind::Multibin] {
            assert_eq!(k.id().parse::<LossKind>().unwrap(), k);
        }
        assert!("mse".parse::<LossKind>().is_err());
        assert!(!LossKind::Angular.supports(&ReprScheme::tricosine()));
        assert!(LossKind::L2.supports(&ReprScheme::tricosine()));
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mb = ReprScheme::multibin(2, 0.1).unwrap();
        for _ in 0..100 {
            let target = enc(&ReprScheme::single_bin(), rng.random_range(-PI..PI));
            let r = rng.random_range(0.3..2.0);
            let phi: f64 = rng.random_range(-PI..PI);
            let pred = sb(r * phi.cos(), r * phi.sin());
            for loss in [l2_loss, angular_loss] {
                let a = loss(&pred, &target).unwrap().gradient;
                let n = finite_diff_gradient(loss, &pred, &target, 1e-6).unwrap();
                assert!(relative_error(&a, &n) < 1e-5);
            }

            let target = enc(&mb, rng.random_range(-PI..PI));
            let values: Vec<f64> = (0..6).map(|_| rng.random_range(-1.5..1.5)).collect();
            let pred = ReprVector::new(mb, values).unwrap();
            let a = multibin_loss(&pred, &target).unwrap().gradient;
            let n = finite_diff_gradient(multibin_loss, &pred, &target, 1e-6).unwrap();
            assert!(relative_error(&a, &n) < 1e-5);
        }
    }

    proptest! {
        #[test]
        fn l2_is_twice_angular_on_unit_vectors(t in -PI..PI, g in -PI..PI) {
            let s = ReprScheme::single_bin();
            let (p, q) = (enc(&s, t), enc(&s, g));
            let l2 = l2_loss(&p, &q).unwrap().value;
            let ang = angular_loss(&p, &q).unwrap().value;
            prop_assert!((l2 - 2.0 * ang).abs() < 1e-12);
            prop_assert!((0.0..=2.0).contains(&ang));
        }

        #[test]
        fn angular_ignores_radial_length(t in -PI..PI, g in -PI..PI, s in 1e-3f64..1e3) {
            let scheme = ReprScheme::single_bin();
            let p = enc(&scheme, t);
            let scaled = sb(s * p.values()[0], s * p.values()[1]);
            let q = enc(&scheme, g);
            let a = angular_loss(&p, &q).unwrap().value;
            let b = angular_loss(&scaled, &q).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn identity_of_indiscernibles(t in -PI..PI) {
            let s = ReprScheme::single_bin();
            let v = enc(&s, t);
            prop_assert!(angular_loss(&v, &v).unwrap().value.abs() < 1e-15);
            prop_assert_eq!(l2_loss(&v, &v).unwrap().value, 0.0);
        }
    }
}
