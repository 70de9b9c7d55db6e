//! Polynomial arithmetic: sparse bivariate Laurent polynomials, dense
//! univariate polynomials with a certified root solver, and resultants /
//! elimination built on both.

pub mod bivariate;
pub mod resultant;
pub mod univariate;

pub use bivariate::{cpow, BivariateLaurent};
pub use resultant::{
    eliminant, eliminant_auto, lu_determinant, resultant_sample, sylvester_resultant,
    sylvester_resultant_formal, Var,
};
pub use univariate::{Root, RootSet, UnivariatePoly};
