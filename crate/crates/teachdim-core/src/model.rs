//! Learner family, losses, and objective evaluation.
//!
//! The learner trains by regularized empirical risk minimization: it returns
//! the minimizers of `sum_i loss(x_i' theta, y_i) + (lambda/2) ||w||_A^2`,
//! where `A` is a positive semidefinite regularizer matrix (identity unless
//! stated otherwise) and, for inhomogeneous learners, `theta = [w; b]` with
//! the bias `b` left unregularized.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative eigenvalue tolerance used by [`rank`] when none is supplied.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Relative tolerance for the symmetry check of [`PsdMatrix`].
const SYMMETRY_TOL: f64 = 1e-12;

/// Relative tolerance on the most negative eigenvalue of a [`PsdMatrix`].
const PSD_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Vectors and matrices
// ---------------------------------------------------------------------------

/// A finite real vector of dimension >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    entries: DVector<f64>,
}

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Vector { entries: DVector::from_vec(entries) })
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Vector::new(entries.to_vec())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Vector::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.entries.as_slice()
    }

    /// Exact zero test; the zero-target branches of the theory are stated
    /// for theta* identically zero, not merely small.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| *e == 0.0)
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(self.entries.dot(&other.entries))
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector { entries: &self.entries * c }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other.dim())?;
        Ok(Vector { entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other.dim())?;
        Ok(Vector { entries: &self.entries - &other.entries })
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other });
        }
        Ok(())
    }

    pub(crate) fn dv(&self) -> &DVector<f64> {
        &self.entries
    }

    pub(crate) fn from_dv(entries: DVector<f64>) -> Self {
        Vector { entries }
    }
}

/// A symmetric positive semidefinite matrix.
///
/// Symmetry is required to within `1e-12` relative to the largest entry and
/// the spectrum may dip below zero only by `1e-10` relative to the largest
/// eigenvalue magnitude; the stored matrix is symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    m: DMatrix<f64>,
}

impl PsdMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: entries.len() });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite);
        }
        let m = DMatrix::from_row_slice(dim, dim, &entries);
        let scale = entries.iter().fold(0.0f64, |acc, e| acc.max(libm::fabs(*e)));
        for i in 0..dim {
            for j in (i + 1)..dim {
                if libm::fabs(m[(i, j)] - m[(j, i)]) > SYMMETRY_TOL * scale.max(1.0) {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let sym = (&m + m.transpose()) * 0.5;
        let eigs = sym.clone().symmetric_eigen().eigenvalues;
        let max_mag = eigs.iter().fold(0.0f64, |acc, e| acc.max(libm::fabs(*e)));
        if eigs.iter().any(|e| *e < -PSD_TOL * max_mag) {
            return Err(Error::NotPsd);
        }
        Ok(PsdMatrix { m: sym })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        Ok(PsdMatrix { m: DMatrix::identity(dim, dim) })
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            entries[i * dim + i] = *d;
        }
        PsdMatrix::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                if libm::fabs(self.m[(i, j)] - expect) > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.dim() });
        }
        Ok(Vector::from_dv(&self.m * v.dv()))
    }

    pub(crate) fn dm(&self) -> &DMatrix<f64> {
        &self.m
    }
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

/// The three loss functions of the learner family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// `(u - y)^2 / 2`, regression labels in R.
    Squared,
    /// `max(1 - y u, 0)`, labels in {-1, +1}.
    Hinge,
    /// `log(1 + exp(-y u))`, labels in {-1, +1}.
    Logistic,
}

impl LossKind {
    pub fn is_classification(self) -> bool {
        !matches!(self, LossKind::Squared)
    }

    pub fn is_smooth(self) -> bool {
        !matches!(self, LossKind::Hinge)
    }

    pub fn validate_label(self, y: f64) -> Result<()> {
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        if self.is_classification() && y != 1.0 && y != -1.0 {
            return Err(Error::InvalidLabel(y));
        }
        Ok(())
    }
}

/// Value of the loss at prediction `u` with label `y`.
pub fn loss_value(loss: LossKind, u: f64, y: f64) -> Result<f64> {
    loss.validate_label(y)?;
    Ok(match loss {
        LossKind::Squared => 0.5 * (u - y) * (u - y),
        LossKind::Hinge => (1.0 - y * u).max(0.0),
        LossKind::Logistic => {
            // log(1 + exp(-m)) computed without overflow for large |m|.
            let m = y * u;
            if m >= 0.0 {
                libm::log1p(libm::exp(-m))
            } else {
                -m + libm::log1p(libm::exp(m))
            }
        }
    })
}

/// A closed interval of subgradients; a singleton for smooth losses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgradientInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SubgradientInterval {
    pub fn singleton(v: f64) -> Self {
        SubgradientInterval { lo: v, hi: v }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }
}

/// Logistic sigmoid `1 / (1 + exp(-z))`, overflow-safe.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Subdifferential of the loss with respect to the prediction `u`.
///
/// Squared: `{u - y}`. Logistic: `{-y / (1 + exp(y u))}`. Hinge at margin
/// `m = y u`: `{-y}` below the margin, `{0}` beyond it, and the whole
/// interval between `-y` and `0` exactly on it.
pub fn loss_subdifferential(loss: LossKind, u: f64, y: f64) -> Result<SubgradientInterval> {
    loss.validate_label(y)?;
    Ok(match loss {
        LossKind::Squared => SubgradientInterval::singleton(u - y),
        LossKind::Logistic => SubgradientInterval::singleton(-y * sigmoid(-y * u)),
        LossKind::Hinge => {
            let m = y * u;
            if m < 1.0 {
                SubgradientInterval::singleton(-y)
            } else if m > 1.0 {
                SubgradientInterval::singleton(0.0)
            } else {
                SubgradientInterval { lo: (-y).min(0.0), hi: (-y).max(0.0) }
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Learner specification, targets, parameters, training data
// ---------------------------------------------------------------------------

/// One learner from the regularized-ERM family: a loss, a homogeneity flag,
/// the regularization coefficient, and an optional PSD regularizer matrix
/// (identity when absent; applies only to the weights, never the bias).
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSpec {
    pub loss: LossKind,
    pub homogeneous: bool,
    pub lambda: f64,
    pub regularizer: Option<PsdMatrix>,
}

impl LearnerSpec {
    pub fn new(loss: LossKind, homogeneous: bool, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(LearnerSpec { loss, homogeneous, lambda, regularizer: None })
    }

    pub fn with_regularizer(mut self, a: PsdMatrix) -> Self {
        self.regularizer = Some(a);
        self
    }

    pub fn regularizer_is_identity(&self) -> bool {
        match &self.regularizer {
            None => true,
            Some(a) => a.is_identity(1e-12),
        }
    }

    /// `||w||_A^2` under this learner's regularizer.
    pub fn weight_norm_sq(&self, w: &Vector) -> Result<f64> {
        match &self.regularizer {
            None => Ok(w.norm_sq()),
            Some(a) => mahalanobis_norm_sq(w, a),
        }
    }

    /// Regularizer as an explicit matrix of the given weight dimension.
    pub(crate) fn regularizer_matrix(&self, dim: usize) -> Result<DMatrix<f64>> {
        match &self.regularizer {
            None => Ok(DMatrix::identity(dim, dim)),
            Some(a) => {
                if a.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: a.dim() });
                }
                Ok(a.dm().clone())
            }
        }
    }

    /// Regularizer acting on the effective parameter `[w; b]` (or `w` in the
    /// homogeneous case); the bias row and column are zero.
    pub(crate) fn effective_regularizer(&self, weight_dim: usize) -> Result<DMatrix<f64>> {
        let a = self.regularizer_matrix(weight_dim)?;
        if self.homogeneous {
            Ok(a)
        } else {
            let mut padded = DMatrix::zeros(weight_dim + 1, weight_dim + 1);
            padded.view_mut((0, 0), (weight_dim, weight_dim)).copy_from(&a);
            Ok(padded)
        }
    }
}

/// What the teacher wants the learner to end up with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeachingGoal {
    /// The learner must recover the parameter exactly.
    ExactParameter,
    /// Any positive scaling of the parameter is acceptable (classifiers only).
    DecisionBoundary,
}

/// A parameter point: weights plus, for inhomogeneous learners, a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    pub weights: Vector,
    pub bias: Option<f64>,
}

impl Parameters {
    pub fn new(weights: Vector, bias: Option<f64>) -> Result<Self> {
        if let Some(b) = bias {
            if !b.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Parameters { weights, bias })
    }

    pub fn zeros(weight_dim: usize, with_bias: bool) -> Result<Self> {
        Parameters::new(Vector::zeros(weight_dim)?, if with_bias { Some(0.0) } else { None })
    }

    pub fn weight_dim(&self) -> usize {
        self.weights.dim()
    }

    /// Prediction `x' w + b`.
    pub fn predict(&self, x: &Vector) -> Result<f64> {
        Ok(x.dot(&self.weights)? + self.bias.unwrap_or(0.0))
    }

    /// The stacked vector `[w; b]` (just `w` when no bias is present).
    pub fn effective(&self) -> DVector<f64> {
        match self.bias {
            None => self.weights.dv().clone(),
            Some(b) => {
                let mut v = DVector::zeros(self.weights.dim() + 1);
                v.rows_mut(0, self.weights.dim()).copy_from(self.weights.dv());
                v[self.weights.dim()] = b;
                v
            }
        }
    }

    pub(crate) fn from_effective(eff: &DVector<f64>, has_bias: bool) -> Self {
        if has_bias {
            let d = eff.len() - 1;
            Parameters {
                weights: Vector::from_dv(eff.rows(0, d).into_owned()),
                bias: Some(eff[d]),
            }
        } else {
            Parameters { weights: Vector::from_dv(eff.clone()), bias: None }
        }
    }

    /// Euclidean distance between stacked parameter vectors.
    pub fn distance(&self, other: &Parameters) -> Result<f64> {
        if self.weight_dim() != other.weight_dim() || self.bias.is_some() != other.bias.is_some() {
            return Err(Error::DimensionMismatch {
                expected: self.weight_dim(),
                got: other.weight_dim(),
            });
        }
        Ok((self.effective() - other.effective()).norm())
    }

    pub fn effective_norm(&self) -> f64 {
        self.effective().norm()
    }

    pub fn scale(&self, t: f64) -> Parameters {
        Parameters { weights: self.weights.scale(t), bias: self.bias.map(|b| t * b) }
    }
}

/// The model the teacher wants to teach.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetModel {
    pub weights: Vector,
    pub bias: Option<f64>,
    pub goal: TeachingGoal,
}

impl TargetModel {
    pub fn exact(weights: Vector, bias: Option<f64>) -> Result<Self> {
        let p = Parameters::new(weights, bias)?;
        Ok(TargetModel { weights: p.weights, bias: p.bias, goal: TeachingGoal::ExactParameter })
    }

    /// A decision-boundary target; requires nonzero weights.
    pub fn boundary(weights: Vector, bias: Option<f64>) -> Result<Self> {
        if weights.is_zero() {
            return Err(Error::ZeroTarget);
        }
        let p = Parameters::new(weights, bias)?;
        Ok(TargetModel { weights: p.weights, bias: p.bias, goal: TeachingGoal::DecisionBoundary })
    }

    pub fn params(&self) -> Parameters {
        Parameters { weights: self.weights.clone(), bias: self.bias }
    }

    pub fn weight_dim(&self) -> usize {
        self.weights.dim()
    }
}

/// Check that a learner and a target fit together: the bias is present
/// exactly for inhomogeneous learners, a decision-boundary goal pairs only
/// with a classification loss and nonzero weights, and the regularizer (if
/// any) matches the weight dimension.
pub fn validate_pair(spec: &LearnerSpec, target: &TargetModel) -> Result<()> {
    if spec.homogeneous != target.bias.is_none() {
        return Err(Error::BiasMismatch);
    }
    if let Some(a) = &spec.regularizer {
        if a.dim() != target.weight_dim() {
            return Err(Error::DimensionMismatch {
                expected: target.weight_dim(),
                got: a.dim(),
            });
        }
    }
    if target.goal == TeachingGoal::DecisionBoundary {
        if !spec.loss.is_classification() {
            return Err(Error::BoundaryForRidge);
        }
        if target.weights.is_zero() {
            return Err(Error::ZeroTarget);
        }
    }
    Ok(())
}

/// One training item.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: Vector,
    pub y: f64,
}

impl Example {
    pub fn new(x: Vector, y: f64) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Example { x, y })
    }
}

/// Which construction produced a teaching set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    HomRidge,
    HomSvm,
    HomLogistic,
    InhomRidge,
    InhomSvm,
    InhomLogistic,
    External,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::HomRidge => "hom_ridge",
            Provenance::HomSvm => "hom_svm",
            Provenance::HomLogistic => "hom_logistic",
            Provenance::InhomRidge => "inhom_ridge",
            Provenance::InhomSvm => "inhom_svm",
            Provenance::InhomLogistic => "inhom_logistic",
            Provenance::External => "external",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "hom_ridge" => Provenance::HomRidge,
            "hom_svm" => Provenance::HomSvm,
            "hom_logistic" => Provenance::HomLogistic,
            "inhom_ridge" => Provenance::InhomRidge,
            "inhom_svm" => Provenance::InhomSvm,
            "inhom_logistic" => Provenance::InhomLogistic,
            "external" => Provenance::External,
            _ => return None,
        })
    }
}

/// An ordered multiset of training items; repeats are allowed and order is
/// preserved so serialized output is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct TeachingSet {
    pub items: Vec<Example>,
    pub provenance: Provenance,
    /// The positive scaling applied to the target before construction;
    /// 1 unless the goal was a decision boundary.
    pub scale_factor: f64,
}

impl TeachingSet {
    pub fn new(items: Vec<Example>, provenance: Provenance, scale_factor: f64) -> Result<Self> {
        if !scale_factor.is_finite() || scale_factor <= 0.0 {
            return Err(Error::InvalidScale);
        }
        if let Some(first) = items.first() {
            let d = first.x.dim();
            if items.iter().any(|it| it.x.dim() != d) {
                return Err(Error::DimensionMismatch { expected: d, got: 0 });
            }
        }
        Ok(TeachingSet { items, provenance, scale_factor })
    }

    pub fn empty(provenance: Provenance) -> Self {
        TeachingSet { items: Vec::new(), provenance, scale_factor: 1.0 }
    }

    pub fn size(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.items.first().map(|it| it.x.dim())
    }

    /// Labels valid for the loss and dimensions consistent with `weight_dim`.
    pub fn validate_for(&self, spec: &LearnerSpec, weight_dim: usize) -> Result<()> {
        for item in &self.items {
            spec.loss.validate_label(item.y)?;
            if item.x.dim() != weight_dim {
                return Err(Error::DimensionMismatch { expected: weight_dim, got: item.x.dim() });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Squared Mahalanobis norm `v' A v`.
pub fn mahalanobis_norm_sq(v: &Vector, a: &PsdMatrix) -> Result<f64> {
    if v.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: v.dim() });
    }
    Ok(v.dv().dot(&(a.dm() * v.dv())))
}

/// Number of eigenvalues exceeding `tol` times the largest eigenvalue.
/// The zero matrix has rank 0.
pub fn rank(a: &PsdMatrix, tol: f64) -> usize {
    let eigs = a.eigenvalues();
    let max = eigs.iter().fold(0.0f64, |acc, e| acc.max(libm::fabs(*e)));
    if max == 0.0 {
        return 0;
    }
    eigs.iter().filter(|e| **e > tol * max).count()
}

/// Regularized empirical risk of `params` on the training set.
pub fn objective(spec: &LearnerSpec, set: &TeachingSet, params: &Parameters) -> Result<f64> {
    if spec.homogeneous != params.bias.is_none() {
        return Err(Error::BiasMismatch);
    }
    set.validate_for(spec, params.weight_dim())?;
    let mut total = 0.0;
    for item in &set.items {
        let u = params.predict(&item.x)?;
        total += loss_value(spec.loss, u, item.y)?;
    }
    let reg = spec.weight_norm_sq(&params.weights)?;
    Ok(total + 0.5 * spec.lambda * reg)
}
