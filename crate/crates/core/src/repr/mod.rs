//! Orientation representations and their codecs.
//!
//! | descriptor                     | dim | layout                                 |
//! |--------------------------------|-----|----------------------------------------|
//! | `scalar_global`, `scalar_local`| 1   | `[θ/π]`                                |
//! | `single_bin`                   | 2   | `[cos θ, sin θ]`                       |
//! | `tricosine`                    | 3   | `[cos(θ-c₀), cos(θ-c₁), cos(θ-c₂)]`    |
//! | `conf:bins=n`                  | 2n  | per bin `[conf, offset/half-width]`    |
//! | `voting:bins=n`                | 2n  | per bin `[cos Δ, sin Δ]` from center   |
//! | `multibin:bins=n,overlap=f`    | 3n  | per bin `[conf, cos Δ, sin Δ]` from start |

mod codec;
mod scheme;
mod vector;

pub use codec::{
    canonicalize, decode, decode_batch, encode, encode_batch, encode_into, vote, DEGENERATE_NORM,
    VOTE_THRESHOLD,
};
pub use scheme::{
    BinGeometry, ReprKind, ReprScheme, DEFAULT_CONFIDENCE_BINS, DEFAULT_MULTIBIN_BINS,
    DEFAULT_MULTIBIN_OVERLAP, DEFAULT_VOTING_BINS, TRICOSINE_BINS,
};
pub use vector::ReprVector;
