//! Teaching dimension of regularized linear learners.
//!
//! A teacher who knows both a target model and the learning algorithm can
//! construct a training set that makes the learner output exactly that
//! model; the teaching dimension is the smallest size of such a set. This
//! crate computes lower bounds on that size for learners that minimize
//! `sum_i loss(x_i' theta, y_i) + (lambda/2) ||w||_A^2`, constructs provably
//! minimal teaching sets for ridge regression, SVM, and logistic regression
//! (homogeneous and inhomogeneous), and certifies each construction by
//! checking first-order optimality and by independently retraining the
//! learner.
//!
//! - [`model`]: the learner family, losses and subdifferentials, objective.
//! - [`lambert`]: Lambert W kernel behind the logistic constructions.
//! - [`bounds`]: the three lower bounds and closed-form teaching dimensions.
//! - [`construct`]: minimal teaching-set constructions.
//! - [`solvers`]: independent trainers (closed-form ridge, damped Newton,
//!   subgradient descent with a dual polish for the hinge).
//! - [`verify`]: KKT residuals, solver recovery, uniqueness probing.
//! - [`oracle`]: brute-force and finite-difference cross-checks.
//!
//! The crate is `no_std` (with `alloc`); IO, serialization, and the command
//! line live in the companion `teachdim` crate.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod construct;
pub mod error;
pub mod lambert;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    Example, LearnerSpec, LossKind, Parameters, Provenance, PsdMatrix, TargetModel, TeachingGoal,
    TeachingSet, Vector,
};
