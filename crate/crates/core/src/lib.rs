//! Computational geometry of quaternionic hyperbolic space.
//!
//! The crate models H^n over the quaternions through the projective model: a
//! right vector space Q^{n,1} carrying the indefinite Hermitian form
//! `⟨v,w⟩ = v̄₁w₁ + … + v̄ₙwₙ − v̄ₙ₊₁wₙ₊₁`, with points the negative lines.
//! On top of that sit bisectors (equidistant hypersurfaces), their
//! quaternionic and real spines, the slice decomposition by quaternionic
//! hyperplanes, and fan decompositions into complex blades.
//!
//! Everything is generic over a scalar backend: exact rationals, where every
//! predicate is decided with no rounding, or `f64` with a single global
//! relative tolerance. The harness module drives seeded property suites over
//! both backends and emits machine-checkable certificates of the exact runs.

pub mod bisector;
pub mod encode;
pub mod fan;
pub mod harness;
pub mod isometry;
pub mod linalg;
pub mod model;
pub mod prng;
pub mod quaternion;
pub mod scalar;

pub use bisector::Bisector;
pub use fan::{Blade, FanDecomposition};
pub use isometry::{Isometry, Reflection};
pub use linalg::{HVector, HermitianSpace, SignClass, Subspace};
pub use model::{BallPoint, ProjectivePoint, TotallyGeodesicSubmanifold};
pub use quaternion::{ImaginaryDirection, Quaternion};
pub use scalar::{Exact, FloatScalar, Scalar};
