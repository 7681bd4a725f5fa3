//! Training objectives over target maps: penalty-reduced focal loss on the
//! center heatmap, masked L1 regression, Laplacian depth-uncertainty loss and
//! heading-bin cross-entropy.

use ndarray::{s, Array2, ArrayView2, ArrayView3, Zip};
use serde::{Deserialize, Serialize};

use crate::codec::TargetMaps;
use crate::error::{Error, Result};

/// Focusing exponent applied to the prediction.
pub const FOCAL_GAMMA: f64 = 2.0;
/// Exponent of the `(1 - H*)` penalty reduction around centers.
pub const FOCAL_BETA: f64 = 4.0;
/// Predictions are clamped to `[eps, 1 - eps]` before taking logs.
pub const HEATMAP_EPS: f64 = 1e-7;

fn check_shape(expected: &[usize], found: &[usize]) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch {
            expected: expected.to_vec(),
            found: found.to_vec(),
        });
    }
    Ok(())
}

/// Focal loss normalized by the number of cells where `target == 1`; zero
/// when there are none.
pub fn focal_loss(pred: ArrayView3<'_, f64>, target: ArrayView3<'_, f64>, gamma: f64, beta: f64) -> Result<f64> {
    check_shape(target.shape(), pred.shape())?;
    let mut sum = 0.0;
    let mut n_pos = 0usize;
    Zip::from(&pred).and(&target).for_each(|&h, &t| {
        let h = h.clamp(HEATMAP_EPS, 1.0 - HEATMAP_EPS);
        if t == 1.0 {
            n_pos += 1;
            sum += (1.0 - h).powf(gamma) * h.ln();
        } else {
            sum += (1.0 - t).powf(beta) * h.powf(gamma) * (1.0 - h).ln();
        }
    });
    if n_pos == 0 {
        return Ok(0.0);
    }
    Ok(-sum / n_pos as f64)
}

/// `lambda` times the mean absolute error over all channels of masked cells.
pub fn l1_loss(
    pred: ArrayView3<'_, f64>,
    target: ArrayView3<'_, f64>,
    mask: ArrayView2<'_, bool>,
    lambda: f64,
) -> Result<f64> {
    check_shape(target.shape(), pred.shape())?;
    check_shape(&target.shape()[1..], mask.shape())?;
    let channels = pred.dim().0;
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((r, c), &m) in mask.indexed_iter() {
        if !m {
            continue;
        }
        for k in 0..channels {
            sum += (pred[[k, r, c]] - target[[k, r, c]]).abs();
        }
        count += channels;
    }
    if count == 0 {
        return Ok(0.0);
    }
    Ok(lambda * sum / count as f64)
}

/// Laplace negative log-likelihood (up to a constant) of the depth residual,
/// with the scale given as `log_sigma`:
/// mean over the mask of `sqrt(2) |d - d*| / sigma + log sigma`.
pub fn laplacian_uncertainty_loss(
    depth: ArrayView2<'_, f64>,
    log_sigma: ArrayView2<'_, f64>,
    depth_target: ArrayView2<'_, f64>,
    mask: ArrayView2<'_, bool>,
) -> Result<f64> {
    check_shape(depth_target.shape(), depth.shape())?;
    check_shape(depth_target.shape(), log_sigma.shape())?;
    check_shape(depth_target.shape(), mask.shape())?;
    if Zip::from(&log_sigma).and(&mask).any(|&ls, &m| m && !ls.is_finite()) {
        // Perfect-confidence maps store log sigma = -inf, where the
        // likelihood is undefined.
        return Err(Error::InvalidArgument("log_sigma must be finite on supervised cells".into()));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    Zip::from(&depth)
        .and(&log_sigma)
        .and(&depth_target)
        .and(&mask)
        .for_each(|&d, &ls, &t, &m| {
            if m {
                sum += std::f64::consts::SQRT_2 * (d - t).abs() * (-ls).exp() + ls;
                count += 1;
            }
        });
    if count == 0 {
        return Ok(0.0);
    }
    Ok(sum / count as f64)
}

/// Mean softmax cross-entropy of heading-bin logits at masked cells.
pub fn bin_ce_loss(
    logits: ArrayView3<'_, f64>,
    target_bins: ArrayView2<'_, usize>,
    mask: ArrayView2<'_, bool>,
) -> Result<f64> {
    check_shape(&logits.shape()[1..], target_bins.shape())?;
    check_shape(target_bins.shape(), mask.shape())?;
    let n_bins = logits.dim().0;
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((r, c), &m) in mask.indexed_iter() {
        if !m {
            continue;
        }
        let t = target_bins[[r, c]];
        if t >= n_bins {
            return Err(Error::InvalidArgument(format!("bin index {t} out of range for {n_bins} bins")));
        }
        let column = logits.slice(s![.., r, c]);
        let max = column.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let log_sum_exp = max + column.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
        sum += log_sum_exp - column[t];
        count += 1;
    }
    if count == 0 {
        return Ok(0.0);
    }
    Ok(sum / count as f64)
}

/// Per-term weights; every weight defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub focal: f64,
    pub offset: f64,
    pub size_2d: f64,
    pub size_3d: f64,
    pub depth_uncertainty: f64,
    pub bin_ce: f64,
    pub residual: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            focal: 1.0,
            offset: 1.0,
            size_2d: 1.0,
            size_3d: 1.0,
            depth_uncertainty: 1.0,
            bin_ce: 1.0,
            residual: 1.0,
        }
    }
}

/// Unweighted loss terms and their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub focal: f64,
    pub offset_l1: f64,
    pub size2d_l1: f64,
    pub size3d_l1: f64,
    pub depth_uncertainty: f64,
    pub bin_ce: f64,
    pub residual_l1: f64,
    pub weights: LossWeights,
    pub total: f64,
}

/// Evaluates every term of `pred` against `target`, masked by the target's
/// object cells. The heading residual is compared in the ground-truth bin only.
pub fn compute_losses(pred: &TargetMaps, target: &TargetMaps, weights: LossWeights) -> Result<LossBreakdown> {
    pred.validate()?;
    target.validate()?;
    check_shape(target.heatmap.shape(), pred.heatmap.shape())?;
    check_shape(target.bin_logits.shape(), pred.bin_logits.shape())?;
    let mask = target.valid_mask.view();
    let bins = target.bin_indices();

    let gather = |maps: &TargetMaps| -> Array2<f64> {
        Array2::from_shape_fn(bins.dim(), |(r, c)| maps.bin_residual[[bins[[r, c]], r, c]])
    };
    let (res_pred, res_target) = (gather(pred), gather(target));

    let focal = focal_loss(pred.heatmap.view(), target.heatmap.view(), FOCAL_GAMMA, FOCAL_BETA)?;
    let offset_l1 = l1_loss(pred.offset_2d.view(), target.offset_2d.view(), mask, 1.0)?;
    let size2d_l1 = l1_loss(pred.size_2d.view(), target.size_2d.view(), mask, 1.0)?;
    let size3d_l1 = l1_loss(pred.size_3d.view(), target.size_3d.view(), mask, 1.0)?;
    let depth_uncertainty =
        laplacian_uncertainty_loss(pred.depth.view(), pred.log_sigma.view(), target.depth.view(), mask)?;
    let bin_ce = bin_ce_loss(pred.bin_logits.view(), bins.view(), mask)?;
    let residual_l1 = l1_loss(
        res_pred.view().insert_axis(ndarray::Axis(0)),
        res_target.view().insert_axis(ndarray::Axis(0)),
        mask,
        1.0,
    )?;

    let w = weights;
    let total = w.focal * focal
        + w.offset * offset_l1
        + w.size_2d * size2d_l1
        + w.size_3d * size3d_l1
        + w.depth_uncertainty * depth_uncertainty
        + w.bin_ce * bin_ce
        + w.residual * residual_l1;
    Ok(LossBreakdown {
        focal,
        offset_l1,
        size2d_l1,
        size3d_l1,
        depth_uncertainty,
        bin_ce,
        residual_l1,
        weights,
        total,
    })
}
