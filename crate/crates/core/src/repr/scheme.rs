use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::angle::{wrap_radians, Angle};
use crate::error::{OrientError, Result};

/// Representation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReprKind {
    /// Normalized global yaw (rotation_y / π).
    GlobalScalar,
    /// Normalized observation angle (alpha / π).
    LocalScalar,
    /// `[cos θ, sin θ]`.
    SingleBin,
    /// Overlapping bins, each `[confidence, cos Δ, sin Δ]` with Δ measured from
    /// the bin's starting edge.
    Multibin,
    /// Non-overlapping bins, each `[confidence, normalized offset from center]`.
    ConfidenceBins,
    /// Non-overlapping bins, each `[cos Δ, sin Δ]` with Δ measured from the
    /// bin center; decoded by an outlier-rejecting vote.
    VotingBins,
    /// Cosine affinity to three bin centers.
    Tricosine,
}

impl ReprKind {
    pub fn is_scalar(self) -> bool {
        matches!(self, ReprKind::GlobalScalar | ReprKind::LocalScalar)
    }

    fn token(self) -> &'static str {
        match self {
            ReprKind::GlobalScalar => "scalar_global",
            ReprKind::LocalScalar => "scalar_local",
            ReprKind::SingleBin => "single_bin",
            ReprKind::Multibin => "multibin",
            ReprKind::ConfidenceBins => "conf",
            ReprKind::VotingBins => "voting",
            ReprKind::Tricosine => "tricosine",
        }
    }
}

pub const DEFAULT_MULTIBIN_BINS: usize = 2;
pub const DEFAULT_MULTIBIN_OVERLAP: f64 = 0.1;
pub const DEFAULT_CONFIDENCE_BINS: usize = 2;
pub const DEFAULT_VOTING_BINS: usize = 4;
pub const TRICOSINE_BINS: usize = 3;

/// Codec descriptor: representation kind plus bin parameters.
///
/// Construct through the named constructors or [`ReprScheme::new`]; the
/// fields are validated once and never change afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReprScheme {
    kind: ReprKind,
    num_bins: usize,
    overlap: f64,
}

impl ReprScheme {
    pub fn new(kind: ReprKind, num_bins: usize, overlap: f64) -> Result<Self> {
        let bad = |msg: String| Err(OrientError::InvalidScheme(msg));
        match kind {
            ReprKind::GlobalScalar | ReprKind::LocalScalar | ReprKind::SingleBin => {
                if num_bins != 1 {
                    return bad(format!("{} takes exactly 1 bin, got {num_bins}", kind.token()));
                }
            }
            ReprKind::Multibin => {
                if num_bins < 2 {
                    return bad(format!("multibin needs at least 2 bins, got {num_bins}"));
                }
            }
            ReprKind::ConfidenceBins => {
                if num_bins < 2 {
                    return bad(format!("conf needs at least 2 bins, got {num_bins}"));
                }
            }
            ReprKind::VotingBins => {
                if num_bins < 3 {
                    return bad(format!("voting needs at least 3 bins, got {num_bins}"));
                }
            }
            ReprKind::Tricosine => {
                if num_bins != TRICOSINE_BINS {
                    return bad(format!("tricosine uses exactly 3 bins, got {num_bins}"));
                }
            }
        }
        if kind == ReprKind::Multibin {
            if !(0.0..0.5).contains(&overlap) {
                return bad(format!("overlap must lie in [0, 0.5), got {overlap}"));
            }
        } else if overlap != 0.0 {
            return bad(format!("{} does not support overlap", kind.token()));
        }
        Ok(Self { kind, num_bins, overlap })
    }

    pub fn global_scalar() -> Self {
        Self { kind: ReprKind::GlobalScalar, num_bins: 1, overlap: 0.0 }
    }

    pub fn local_scalar() -> Self {
        Self { kind: ReprKind::LocalScalar, num_bins: 1, overlap: 0.0 }
    }

    pub fn single_bin() -> Self {
        Self { kind: ReprKind::SingleBin, num_bins: 1, overlap: 0.0 }
    }

    pub fn tricosine() -> Self {
        Self { kind: ReprKind::Tricosine, num_bins: TRICOSINE_BINS, overlap: 0.0 }
    }

    pub fn multibin(num_bins: usize, overlap: f64) -> Result<Self> {
        Self::new(ReprKind::Multibin, num_bins, overlap)
    }

    pub fn confidence_bins(num_bins: usize) -> Result<Self> {
        Self::new(ReprKind::ConfidenceBins, num_bins, 0.0)
    }

    pub fn voting_bins(num_bins: usize) -> Result<Self> {
        Self::new(ReprKind::VotingBins, num_bins, 0.0)
    }

    /// The configurations exercised throughout the test and acceptance
    /// suites.
    pub fn standard_set() -> Vec<ReprScheme> {
        vec![
            Self::global_scalar(),
            Self::local_scalar(),
            Self::single_bin(),
            Self::multibin(DEFAULT_MULTIBIN_BINS, DEFAULT_MULTIBIN_OVERLAP).unwrap(),
            Self::confidence_bins(2).unwrap(),
            Self::confidence_bins(4).unwrap(),
            Self::voting_bins(DEFAULT_VOTING_BINS).unwrap(),
            Self::tricosine(),
        ]
    }

    #[inline]
    pub fn kind(&self) -> ReprKind {
        self.kind
    }

    #[inline]
    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    /// Fraction of the circle covered by bin overlap (Multibin only).
    #[inline]
    pub fn overlap_fraction(&self) -> f64 {
        self.overlap
    }

    /// Length of an encoded vector.
    pub fn dimension(&self) -> usize {
        match self.kind {
            ReprKind::GlobalScalar | ReprKind::LocalScalar => 1,
            ReprKind::SingleBin => 2,
            ReprKind::Tricosine => 3,
            ReprKind::VotingBins | ReprKind::ConfidenceBins => 2 * self.num_bins,
            ReprKind::Multibin => 3 * self.num_bins,
        }
    }

    /// True when `encode` is a continuous map of the angle.
    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, ReprKind::SingleBin | ReprKind::Tricosine | ReprKind::VotingBins)
    }

    /// Nominal (un-widened) bin width, `2π / num_bins`.
    pub fn nominal_width(&self) -> f64 {
        TAU / self.num_bins as f64
    }

    /// Half of each boundary's overlap, added to both edges of every bin.
    fn edge_extension(&self) -> f64 {
        self.overlap * PI / self.num_bins as f64
    }

    /// Nominal starting edge of bin 0.
    fn first_start(&self) -> f64 {
        match self.kind {
            // Bin 0 is centered on straight ahead, matching the usual
            // two-bin Multibin layout with bin centers at 0 and π.
            ReprKind::Multibin => -self.nominal_width() / 2.0,
            _ => -PI,
        }
    }

    /// Geometry of bin `index`; Multibin bins include their overlap margins.
    pub fn bin(&self, index: usize) -> BinGeometry {
        assert!(index < self.num_bins, "bin index {index} out of range");
        let ext = self.edge_extension();
        let width = self.nominal_width() + 2.0 * ext;
        let start = self.first_start() + index as f64 * self.nominal_width() - ext;
        BinGeometry {
            index,
            start: Angle::wrap(start).expect("finite"),
            center: Angle::wrap(start + width / 2.0).expect("finite"),
            width,
        }
    }

    pub fn bins(&self) -> Vec<BinGeometry> {
        (0..self.num_bins).map(|i| self.bin(i)).collect()
    }

    /// Index of the nominal bin containing `theta` (half-open `[start, end)`).
    pub fn containing_bin(&self, theta: Angle) -> usize {
        let w = self.nominal_width();
        let rel = (theta.radians() - self.first_start()).rem_euclid(TAU);
        ((rel / w).floor() as usize).min(self.num_bins - 1)
    }
}

impl fmt::Display for ReprScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ReprKind::Multibin => {
                write!(f, "multibin:bins={},overlap={}", self.num_bins, self.overlap)
            }
            ReprKind::ConfidenceBins | ReprKind::VotingBins => {
                write!(f, "{}:bins={}", self.kind.token(), self.num_bins)
            }
            _ => f.write_str(self.kind.token()),
        }
    }
}

impl FromStr for ReprScheme {
    type Err = OrientError;

    /// Parses `kind[:key=value{,key=value}]`, e.g. `multibin:bins=2,overlap=0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| OrientError::InvalidScheme(msg);
        let (head, params) = match s.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (s, None),
        };
        let kind = match head.trim() {
            "scalar_global" => ReprKind::GlobalScalar,
            "scalar_local" => ReprKind::LocalScalar,
            "single_bin" => ReprKind::SingleBin,
            "multibin" => ReprKind::Multibin,
            "conf" => ReprKind::ConfidenceBins,
            "voting" => ReprKind::VotingBins,
            "tricosine" => ReprKind::Tricosine,
            other => return Err(bad(format!("unknown scheme kind `{other}`"))),
        };
        let (mut bins, mut overlap) = match kind {
            ReprKind::Multibin => (DEFAULT_MULTIBIN_BINS, DEFAULT_MULTIBIN_OVERLAP),
            ReprKind::ConfidenceBins => (DEFAULT_CONFIDENCE_BINS, 0.0),
            ReprKind::VotingBins => (DEFAULT_VOTING_BINS, 0.0),
            ReprKind::Tricosine => (TRICOSINE_BINS, 0.0),
            _ => (1, 0.0),
        };
        if let Some(params) = params {
            let (mut seen_bins, mut seen_overlap) = (false, false);
            for pair in params.split(',') {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, got `{pair}`")))?;
                match key.trim() {
                    "bins" if !seen_bins => {
                        seen_bins = true;
                        bins = value
                            .trim()
                            .parse()
                            .map_err(|_| bad(format!("bins must be a positive integer, got `{value}`")))?;
                    }
                    "overlap" if !seen_overlap => {
                        seen_overlap = true;
                        overlap = value
                            .trim()
                            .parse()
                            .map_err(|_| bad(format!("overlap must be a number, got `{value}`")))?;
                    }
                    "bins" | "overlap" => return Err(bad(format!("duplicate key `{}`", key.trim()))),
                    other => return Err(bad(format!("unknown key `{other}`"))),
                }
            }
        }
        ReprScheme::new(kind, bins, overlap)
    }
}

/// One angular bin. For Multibin the bin is the widened interval
/// `[start, start + width)`, overlap margins included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinGeometry {
    pub index: usize,
    pub start: Angle,
    pub center: Angle,
    pub width: f64,
}

impl BinGeometry {
    /// Offset of `theta` from the starting edge, in `[0, 2π)`.
    pub fn offset_from_start(&self, theta: Angle) -> f64 {
        (theta.radians() - self.start.radians()).rem_euclid(TAU)
    }

    pub fn contains(&self, theta: Angle) -> bool {
        self.offset_from_start(theta) < self.width
    }

    pub fn end(&self) -> Angle {
        Angle::wrap(self.start.radians() + self.width).expect("finite")
    }
}

#[inline]
pub(crate) fn wrapped(raw: f64) -> f64 {
    wrap_radians(raw)
}
