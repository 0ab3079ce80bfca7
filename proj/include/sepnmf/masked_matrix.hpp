#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sepnmf/errors.hpp"

namespace sepnmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Non-negative matrix with an explicit missing-entry mask (true = observed).
///
/// Missing cells are normalized to 0 in storage, so plain matrix products over
/// `values()` already exclude them and masked values can never leak into a fit.
/// Instances are immutable after construction.
class MaskedMatrix {
public:
    /// Validating constructor: every observed entry must be finite and >= 0.
    /// Throws NegativeValueError / InvalidInputError otherwise, and
    /// DuplicateIdError on repeated row or column ids.
    MaskedMatrix(Matrix values, Mask mask, std::vector<std::string> row_ids,
                 std::vector<std::string> col_ids);

    /// Ids auto-generated as r0..r{n-1} / c0..c{f-1}.
    MaskedMatrix(Matrix values, Mask mask);

    /// Fully observed matrix.
    explicit MaskedMatrix(Matrix values);
    MaskedMatrix(Matrix values, std::vector<std::string> row_ids, std::vector<std::string> col_ids);

    /// Non-finite cells become missing; everything else must be >= 0.
    static MaskedMatrix from_dense_with_nan(const Matrix& values, std::vector<std::string> row_ids,
                                            std::vector<std::string> col_ids);

    Index n_rows() const { return values_.rows(); }
    Index n_cols() const { return values_.cols(); }

    /// Values with missing entries stored as 0.
    const Matrix& values() const { return values_; }
    const Mask& mask() const { return mask_; }
    /// Mask as 0/1 doubles, for use in masked aggregates.
    const Matrix& weights() const { return weights_; }

    const std::vector<std::string>& row_ids() const { return row_ids_; }
    const std::vector<std::string>& col_ids() const { return col_ids_; }

    bool observed(Index i, Index j) const { return mask_(i, j); }
    bool fully_observed() const { return mask_.all(); }
    Index observed_count() const { return mask_.cast<Index>().sum(); }
    Index observed_count_col(Index j) const { return mask_.col(j).cast<Index>().sum(); }

    /// Restriction to a subset of columns (order preserved as given).
    MaskedMatrix select_columns(const std::vector<Index>& cols) const;

private:
    Matrix values_;
    Mask mask_;
    Matrix weights_;
    std::vector<std::string> row_ids_;
    std::vector<std::string> col_ids_;
};

/// 3-way tensor with per-entry masks; slice count is 2 for median separation.
class Tensor3 {
public:
    Tensor3(std::vector<Matrix> slices, std::vector<Mask> masks);

    Index n_rows() const { return slices_.front().rows(); }
    Index n_cols() const { return slices_.front().cols(); }
    Index n_slices() const { return static_cast<Index>(slices_.size()); }

    const Matrix& slice(Index s) const { return slices_[static_cast<std::size_t>(s)]; }
    const Mask& mask(Index s) const { return masks_[static_cast<std::size_t>(s)]; }

    double masked_sq_norm() const;

private:
    std::vector<Matrix> slices_;
    std::vector<Mask> masks_;
};

/// Sum of squares over observed entries; 0 when nothing is observed.
double masked_sq_norm(const MaskedMatrix& m);

/// Sum over observed entries of (x - approx)^2. Throws ShapeMismatchError.
double masked_residual_sq_norm(const MaskedMatrix& x, const Matrix& approx);

/// Median of observed values per column; even counts take the midpoint of the
/// two central order statistics. Throws EmptyColumnError.
Vector column_medians(const MaskedMatrix& m);

/// Observed count / n_rows, per column.
Vector fill_rate_by_column(const MaskedMatrix& m);

struct GroupFillRates {
    std::vector<std::string> groups;       // sorted lexicographically
    std::vector<Index> group_sizes;        // rows per group
    Matrix rates;                          // |groups| x n_cols
    Vector group_averages;                 // mean rate over columns, per group
};

/// Per (group, column) fill rates plus per-group averages.
/// Throws MissingLabelError when labels.size() != n_rows.
GroupFillRates fill_rate_by_group(const MaskedMatrix& m, const std::vector<std::string>& labels);

}  // namespace sepnmf
