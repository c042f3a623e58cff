use crate::error::{OrientError, Result};
use crate::repr::{ReprKind, ReprScheme};

/// Values of one angle under one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ReprVector {
    scheme: ReprScheme,
    values: Vec<f64>,
}

impl ReprVector {
    /// Wraps raw values; only the length is checked, so raw model outputs
    /// are accepted.
    pub fn new(scheme: ReprScheme, values: Vec<f64>) -> Result<Self> {
        if values.len() != scheme.dimension() {
            return Err(OrientError::invalid(format!(
                "{scheme} expects {} values, got {}",
                scheme.dimension(),
                values.len()
            )));
        }
        Ok(Self { scheme, values })
    }

    pub(crate) fn from_parts(scheme: ReprScheme, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), scheme.dimension());
        Self { scheme, values }
    }

    #[inline]
    pub fn scheme(&self) -> &ReprScheme {
        &self.scheme
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(OrientError::invalid(format!(
                "component {i} of {} vector is not finite",
                self.scheme
            ))),
            None => Ok(()),
        }
    }

    /// Euclidean distance to another vector of the same length.
    pub fn distance(&self, other: &ReprVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// True when the vector has the shape `encode` produces: unit (cos, sin)
    /// pairs, confidences in `[0, 1]`, affinities and scalars in range.
    ///
    /// Multibin slots of a bin that does not hold the angle are `(0, 0)` and
    /// are exempt from the unit-pair check.
    pub fn is_canonical(&self, tol: f64) -> bool {
        let v = &self.values;
        let unit = |c: f64, s: f64| (c.hypot(s) - 1.0).abs() <= tol;
        let in_range = |x: f64, lo: f64, hi: f64| x >= lo - tol && x <= hi + tol;
        match self.scheme.kind() {
            ReprKind::GlobalScalar | ReprKind::LocalScalar => in_range(v[0], -1.0, 1.0),
            ReprKind::SingleBin => unit(v[0], v[1]),
            ReprKind::Tricosine => v.iter().all(|&x| in_range(x, -1.0, 1.0)),
            ReprKind::VotingBins => v.chunks_exact(2).all(|p| unit(p[0], p[1])),
            ReprKind::ConfidenceBins => v
                .chunks_exact(2)
                .all(|p| in_range(p[0], 0.0, 1.0) && in_range(p[1], -1.0, 1.0)),
            ReprKind::Multibin => v.chunks_exact(3).all(|t| {
                in_range(t[0], 0.0, 1.0) && (unit(t[1], t[2]) || (t[1] == 0.0 && t[2] == 0.0))
            }),
        }
    }
}

impl AsRef<[f64]> for ReprVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
