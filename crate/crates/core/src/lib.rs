//! Monte Carlo laboratory for bivariate largest-claims and ECOMOR treaties.
//!
//! Claims pairs are drawn from a bivariate model, counted by a (mixed) Poisson
//! process, reduced to linear functions of their upper order statistics, and
//! compared against the weak limit of the normalized treaty pair.

pub mod counting;
pub mod dependence;
pub mod error;
pub mod harness;
pub mod limitlaws;
pub mod marginals;
pub mod norming;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod treaties;

pub use counting::CountingModel;
pub use dependence::{BivariateClaimModel, DependenceModel};
pub use error::{Error, Result};
pub use limitlaws::{StandardLaw, TreatyLimitSpec};
pub use marginals::{MarginalModel, MdaClass};
pub use norming::{MarginalNorming, NormingConstants};
pub use rng::{RandomStream, StreamTag};
pub use treaties::{Scheme, TreatySpec};
