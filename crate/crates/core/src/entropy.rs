//! Gaussian-surrogate entropies and the patch mutual information of a frame
//! pair.
//!
//! The patch samples of a pair are modelled as jointly Gaussian. With `Ω`
//! the `2d × 2d` sample covariance (normalized by `1/N`) and `Ω_prev`,
//! `Ω_curr` its diagonal `d × d` blocks,
//!
//! ```text
//! H(Σ)  = ½ · ln((2πe)^k · det Σ)            (k = dimension of Σ)
//! PMI   = H(Ω_prev) + H(Ω_curr) − H(Ω)
//! ```
//!
//! Every matrix gets a diagonal jitter of `ε · trace(Σ)/k` before it is
//! factorized, starting at `ε = 1e-8` and growing tenfold up to `1e-2` until
//! the Cholesky factorization succeeds. Scaling the jitter by the mean
//! variance keeps the estimate invariant to intensity scale.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::patch::{embed_pair, PatchGrid, PatchMatrix};

/// `ln(2πe)`, the per-dimension entropy constant.
pub const LN_2PI_E: f64 = 2.837_877_066_409_345_5;

/// Diagonal jitter schedule, relative to the mean diagonal of each matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    pub epsilon: f64,
    pub max_epsilon: f64,
    pub growth: f64,
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization {
            epsilon: 1e-8,
            max_epsilon: 1e-2,
            growth: 10.0,
        }
    }
}

impl Regularization {
    pub fn validate(&self) -> Result<()> {
        let ok = self.epsilon.is_finite()
            && self.epsilon > 0.0
            && self.max_epsilon.is_finite()
            && self.max_epsilon >= self.epsilon
            && self.growth > 1.0;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "regularization needs 0 < epsilon <= max_epsilon and growth > 1, got {self:?}"
            )));
        }
        Ok(())
    }

    fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::successors(Some(self.epsilon), move |e| Some(e * self.growth))
            .take_while(move |&e| e <= self.max_epsilon * (1.0 + 1e-12))
    }
}

/// Result of factorizing one regularized covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factorized {
    /// Absolute amount added to every diagonal entry.
    pub jitter: f64,
    /// `ln det(Σ + jitter·I)`.
    pub log_det: f64,
    /// Set when the first jitter level was not enough.
    pub escalated: bool,
}

/// Joint covariance of a patch matrix and its two marginal blocks.
///
/// The matrices are stored without jitter; the jitter actually used for each
/// one and the resulting log-determinants are in the `*_factor` fields.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceDecomposition {
    pub joint: DMatrix<f64>,
    pub marginal_prev: DMatrix<f64>,
    pub marginal_curr: DMatrix<f64>,
    pub joint_factor: Factorized,
    pub prev_factor: Factorized,
    pub curr_factor: Factorized,
}

impl CovarianceDecomposition {
    /// Embedding dimension `d` of one frame.
    pub fn dim(&self) -> usize {
        self.marginal_prev.nrows()
    }

    pub fn escalated(&self) -> bool {
        self.joint_factor.escalated || self.prev_factor.escalated || self.curr_factor.escalated
    }
}

/// Sample covariance `(1/N) · (X − mean)(X − mean)ᵀ` of the columns of `x`.
///
/// Rows are centered before the product, so adding a constant to a row does
/// not change the result beyond round-off.
pub fn sample_covariance(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = x.ncols();
    if n < 2 {
        return Err(Error::ShapeMismatch(format!(
            "covariance needs at least 2 samples, got {n}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("patch samples"));
    }
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        let first = row[0];
        if row.iter().all(|&v| v == first) {
            // exact zero, so constant frames are recognized by a zero trace
            row.fill(0.0);
        } else {
            let mean = row.sum() / n as f64;
            row.add_scalar_mut(-mean);
        }
    }
    let mut cov = DMatrix::zeros(x.nrows(), x.nrows());
    cov.gemm(1.0 / n as f64, &centered, &centered.transpose(), 0.0);
    // gemm does not promise a bitwise-symmetric result
    for i in 0..cov.nrows() {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

/// Adds escalating trace-scaled jitter until `cov` factorizes.
pub fn factorize(cov: &DMatrix<f64>, reg: &Regularization) -> Result<Factorized> {
    let k = cov.nrows();
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("covariance"));
    }
    let scale = cov.trace() / k as f64;
    if scale <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut last = reg.epsilon;
    for (step, eps) in reg.steps().enumerate() {
        last = eps;
        let jitter = eps * scale;
        let mut m = cov.clone();
        for i in 0..k {
            m[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(m) {
            let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
            if log_det.is_finite() {
                return Ok(Factorized {
                    jitter,
                    log_det,
                    escalated: step > 0,
                });
            }
        }
    }
    Err(Error::JitterExhausted(last))
}

/// Joint covariance of `p` with its marginal blocks, each factorized with
/// its own trace-scaled jitter.
pub fn covariance(p: &PatchMatrix, reg: &Regularization) -> Result<CovarianceDecomposition> {
    let joint = sample_covariance(&p.data)?;
    let d = p.data.nrows() / 2;
    let marginal_prev = joint.view((0, 0), (d, d)).into_owned();
    let marginal_curr = joint.view((d, d), (d, d)).into_owned();
    let prev_factor = factorize(&marginal_prev, reg)?;
    let curr_factor = factorize(&marginal_curr, reg)?;
    let joint_factor = factorize(&joint, reg)?;
    Ok(CovarianceDecomposition {
        joint,
        marginal_prev,
        marginal_curr,
        joint_factor,
        prev_factor,
        curr_factor,
    })
}

/// `½ · (k·ln(2πe) + ln det Σ)` in nats.
#[inline]
pub fn entropy_from_log_det(dim: usize, log_det: f64) -> f64 {
    0.5 * (dim as f64 * LN_2PI_E + log_det)
}

/// Differential entropy of a Gaussian with covariance `cov`, in nats.
///
/// Uses a Cholesky factorization; if `cov` is not numerically positive
/// definite, falls back to a symmetric eigendecomposition with eigenvalues
/// clamped from below at `1e-8 · trace(cov)/k`.
pub fn gaussian_entropy(cov: &DMatrix<f64>) -> Result<f64> {
    let k = cov.nrows();
    if k == 0 || !cov.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "covariance must be square and non-empty, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("covariance"));
    }
    let log_det = match Cholesky::new(cov.clone()) {
        Some(chol) => 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>(),
        None => {
            let floor = (Regularization::default().epsilon * cov.trace() / k as f64).max(f64::MIN_POSITIVE);
            SymmetricEigen::new(cov.clone())
                .eigenvalues
                .iter()
                .map(|&l| l.max(floor).ln())
                .sum()
        }
    };
    Ok(entropy_from_log_det(k, log_det))
}

/// Patch mutual information of one frame pair, with its entropy terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmiValue {
    /// Mutual information in nats.
    pub value: f64,
    pub h_prev: f64,
    pub h_curr: f64,
    pub h_joint: f64,
    /// Set when any covariance needed more than the base jitter.
    pub degenerate: bool,
}

impl PmiValue {
    pub fn from_decomposition(cov: &CovarianceDecomposition) -> Self {
        let d = cov.dim();
        let h_prev = entropy_from_log_det(d, cov.prev_factor.log_det);
        let h_curr = entropy_from_log_det(d, cov.curr_factor.log_det);
        let h_joint = entropy_from_log_det(2 * d, cov.joint_factor.log_det);
        PmiValue {
            value: h_prev + h_curr - h_joint,
            h_prev,
            h_curr,
            h_joint,
            degenerate: cov.escalated(),
        }
    }
}

/// PMI between two frames with the default jitter schedule.
pub fn pmi(prev: &Frame, curr: &Frame, grid: &PatchGrid) -> Result<PmiValue> {
    pmi_with(prev, curr, grid, &Regularization::default())
}

pub fn pmi_with(prev: &Frame, curr: &Frame, grid: &PatchGrid, reg: &Regularization) -> Result<PmiValue> {
    let p = embed_pair(prev, curr, grid)?;
    let cov = covariance(&p, reg)?;
    Ok(PmiValue::from_decomposition(&cov))
}
