//! Orientation Similarity.

use crate::angle::Angle;
use crate::error::{OrientError, Result};

/// Paired predictions and ground truths.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalBatch {
    predictions: Vec<Angle>,
    ground_truths: Vec<Angle>,
}

impl EvalBatch {
    pub fn new(predictions: Vec<Angle>, ground_truths: Vec<Angle>) -> Result<Self> {
        if predictions.is_empty() {
            return Err(OrientError::invalid("evaluation batch is empty"));
        }
        if predictions.len() != ground_truths.len() {
            return Err(OrientError::invalid(format!(
                "{} predictions but {} ground truths",
                predictions.len(),
                ground_truths.len()
            )));
        }
        Ok(Self { predictions, ground_truths })
    }

    pub fn predictions(&self) -> &[Angle] {
        &self.predictions
    }

    pub fn ground_truths(&self) -> &[Angle] {
        &self.ground_truths
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }
}

/// Similarity of one pair, `(1 + cos(pred - gt)) / 2`.
#[inline]
pub fn pair_similarity(pred: Angle, gt: Angle) -> f64 {
    (1.0 + (pred.radians() - gt.radians()).cos()) / 2.0
}

/// Mean of [`pair_similarity`] over the batch, in `[0, 1]`.
///
/// Terms are summed with Neumaier compensation so the result does not
/// depend on summation order beyond the last few ulps.
pub fn orientation_similarity(batch: &EvalBatch) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (p, g) in batch.predictions.iter().zip(&batch.ground_truths) {
        let x = pair_similarity(*p, *g);
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    ((sum + comp) / batch.len() as f64).clamp(0.0, 1.0)
}

/// Orientation similarity implied by an angular loss value: `1 - L / 2`.
pub fn os_from_angular_loss(loss_value: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&loss_value) {
        return Err(OrientError::invalid(format!(
            "angular loss must lie in [0, 2], got {loss_value}"
        )));
    }
    Ok(1.0 - loss_value / 2.0)
}
