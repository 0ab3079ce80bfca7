#pragma once

#include <vector>

#include "sepnmf/masked_matrix.hpp"

namespace sepnmf {

struct PcaModel {
    Matrix components;                // f x c, orthonormal columns, descending variance
    Vector explained_variance_ratio;  // c entries, non-increasing, sums to 1
    Vector cumulative_ratio;          // running sums of the ratios
};

struct CoefficientProfile {
    std::vector<Vector> sorted_coefficients;  // per component, loadings sorted descending
    std::vector<int> significant_counts;      // entries with |coef| > 10% of the max |coef|
};

// Missing entries replaced by the observed column mean.
Matrix mean_impute(const MaskedMatrix& x);

// Covariance PCA on column-centered data. With standardize, columns are also
// scaled to unit variance (zero-variance columns are left centered).
PcaModel fit_pca(const Matrix& x, bool standardize = false);

// Smallest component count whose cumulative ratio reaches the threshold.
int components_needed(const PcaModel& model, double threshold);

CoefficientProfile signed_coefficient_profile(const PcaModel& model, int k);

}  // namespace sepnmf
