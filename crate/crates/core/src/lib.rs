//! Bivariate (Reitsma) meta-analysis of diagnostic test accuracy with a
//! likelihood-based sensitivity analysis for selective publication.
//!
//! Studies enter as 2×2 tables ([`data::DiagnosticStudy`]) and are reduced to
//! logit sensitivity/specificity pairs with known within-study variances. The
//! [`reitsma`] module fits the bivariate normal random-effects model and
//! computes SROC/SAUC; [`selection`] and [`likelihood`] add a probit selection
//! function on a t-type statistic for a contrast of the two logits, indexed by
//! the marginal publication probability `p`.

pub mod cli;
pub mod data;
pub mod error;
pub mod inference;
pub mod likelihood;
pub mod normal;
pub mod optimize;
pub mod quadrature;
pub mod reitsma;
pub mod selection;
pub mod simulation;

pub use data::{DiagnosticStudy, StudySummary};
pub use error::{Error, Result};
pub use likelihood::{SaConfig, SaFit};
pub use reitsma::BivariateParams;
pub use selection::{ContrastVector, SelectionParams};
