//! Exact arithmetic for wall-and-chamber geometry and Brill-Noether loci on
//! polarized abelian surfaces.
//!
//! The library works entirely inside the rank-3 lattice of numerical
//! characters `(ch0, ch1/H, ch2)` attached to a polarized abelian surface with
//! self-intersection `H^2`. On top of that lattice it provides:
//!
//! - [`lattice`]: the Mukai pairing, squares, and twisted characters, all in
//!   arbitrary-precision integers and rationals. No floating point anywhere.
//! - [`stability`]: central charges and slopes for the `(alpha, beta)` family
//!   of stability conditions, together with exact wall geometry (circles and
//!   vertical lines in the upper half-plane) and enumeration of the potential
//!   walls of a class over a compact region.
//! - [`bncore`]: the piecewise-linear bound `delta_klm`, expected dimensions,
//!   stratum verdicts, and the non-emptiness/dimension/component verdicts for
//!   Brill-Noether loci `V^r_d(|H|)` and section loci `M^{r+1}_H(v)`.
//! - [`oracle`]: independent brute-force re-implementations used to
//!   cross-check `bncore` (they share no code path with it).
//! - [`cli`]: the `bnwalls` command-line front end with JSON/CSV/SVG output.
//!
//! All verdicts are decided by exact integer and rational comparisons;
//! floating point appears only when rendering SVG coordinates.

pub mod bncore;
pub mod cli;
pub mod lattice;
pub mod oracle;
pub mod stability;

mod jsonnum;

pub use lattice::{Character, Surface, TwistedCharacter};
pub use stability::{ChargeValue, Region, Slope, StabilityPoint, Wall};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Result type used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid surface: H^2 must be a positive even integer, got {0}")]
    InvalidSurface(BigInt),

    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(BigRational),

    #[error("delta_klm is only defined for t >= 0, got {0}")]
    NegativeArgument(BigRational),

    #[error("chi must be negative, got {0}")]
    NonNegativeChi(BigInt),

    #[error("chi = d + 1 - g vanishes; the verdict is undefined for d = g - 1")]
    ChiZero,

    #[error("central charge of {0} vanishes: the point lies on its kernel line")]
    ZeroCharge(Character),

    #[error("{} and {} are proportional: they span no wall", .0.0, .0.1)]
    Proportional(Box<(Character, Character)>),

    #[error("class has negative square {0}: no semistable objects exist")]
    NegativeSquare(BigInt),

    #[error("stratum (k = {k}, h = {h}) is empty for chi = {chi}")]
    EmptyStratum { k: i64, h: i64, chi: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Convenience constructor for exact rationals, mostly used in tests and by
/// the CLI argument parser.
pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
