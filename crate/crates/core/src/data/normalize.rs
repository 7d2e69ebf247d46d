use ndarray::Axis;
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};

/// Per-feature minimum and maximum used by min-max scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn fit_normalizer(ds: &Dataset) -> NormalizationParams {
    let (min, max) = ds
        .features
        .axis_iter(Axis(1))
        .map(|col| {
            col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
        })
        .unzip();
    NormalizationParams { min, max }
}

/// Applies `x' = (x - min) / (max - min)` column-wise.
///
/// Constant columns (`max == min`) map to 0. Values outside the fitted range
/// are not clipped.
pub fn normalize(ds: &Dataset, params: &NormalizationParams) -> Result<Dataset, DataError> {
    if params.min.len() != ds.n_features() || params.max.len() != ds.n_features() {
        return Err(DataError::WidthMismatch {
            expected: ds.n_features(),
            found: params.min.len(),
        });
    }
    let mut out = ds.clone();
    for (j, mut col) in out.features.axis_iter_mut(Axis(1)).enumerate() {
        let (lo, hi) = (params.min[j], params.max[j]);
        let range = hi - lo;
        if range > 0.0 {
            col.mapv_inplace(|v| (v - lo) / range);
        } else {
            col.fill(0.0);
        }
    }
    Ok(out)
}
