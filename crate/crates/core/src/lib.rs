//! Dynamics of matrix semigroups acting on projective space, on its
//! circle extensions `ℙ_c(V)`, and on the torus `𝕋^d`.

pub mod eigen;
pub mod error;
pub mod matrix;
pub mod projective;
pub mod random;
pub mod limit_set;
pub mod semigroup;
pub mod stats;
pub mod torus;
pub mod walk;

pub use eigen::{eigen_dominant, is_expanding, kak, spectral_radius, EigenInfo, KakFactorization};
pub use error::{Error, Result};
pub use matrix::{Domain, ExactMatrix, FloatMatrix};
pub use projective::{act, proj_distance, ProjectivePoint};
pub use semigroup::{GeneratorSet, HypothesisVerdict, Status, Word};
pub use limit_set::{LimitPoint, LimitSetApprox, Spectrum};
pub use stats::MeanEstimate;
pub use torus::{OrbitReport, RationalTorusPoint, TorusPoint};
pub use walk::{PcPoint, WalkConfig};
