#include "sepnmf/masked_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace sepnmf {

namespace {

std::vector<std::string> default_ids(const char* prefix, Index n) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
    return ids;
}

void check_unique(const std::vector<std::string>& ids, const char* axis) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            throw DuplicateIdError(std::string("duplicate ") + axis + " id '" + id + "'");
    }
}

}  // namespace

MaskedMatrix::MaskedMatrix(Matrix values, Mask mask, std::vector<std::string> row_ids,
                           std::vector<std::string> col_ids)
    : values_(std::move(values)), mask_(std::move(mask)), row_ids_(std::move(row_ids)), col_ids_(std::move(col_ids)) {
    if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols())
        throw ShapeMismatchError("values and mask shapes differ");
    if (row_ids_.empty() && values_.rows() > 0) row_ids_ = default_ids("r", values_.rows());
    if (col_ids_.empty() && values_.cols() > 0) col_ids_ = default_ids("c", values_.cols());
    if (static_cast<Index>(row_ids_.size()) != values_.rows())
        throw ShapeMismatchError("row id count does not match row count");
    if (static_cast<Index>(col_ids_.size()) != values_.cols())
        throw ShapeMismatchError("column id count does not match column count");
    check_unique(row_ids_, "row");
    check_unique(col_ids_, "column");
    for (Index j = 0; j < values_.cols(); ++j) {
        for (Index i = 0; i < values_.rows(); ++i) {
            if (!mask_(i, j)) {
                values_(i, j) = 0.0;  // normalize missing cells
                continue;
            }
            const double v = values_(i, j);
            if (!std::isfinite(v))
                throw InvalidInputError("observed entry at (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") is not finite");
            if (v < 0.0)
                throw NegativeValueError("observed entry at (" + std::to_string(i) + "," +
                                         std::to_string(j) + ") is negative");
        }
    }
    weights_ = mask_.cast<double>();
}

MaskedMatrix::MaskedMatrix(Matrix values, Mask mask)
    : MaskedMatrix(std::move(values), std::move(mask), {}, {}) {}

MaskedMatrix::MaskedMatrix(Matrix values)
    : MaskedMatrix(Matrix(values), Mask::Constant(values.rows(), values.cols(), true)) {}

MaskedMatrix::MaskedMatrix(Matrix values, std::vector<std::string> row_ids, std::vector<std::string> col_ids)
    : MaskedMatrix(Matrix(values), Mask::Constant(values.rows(), values.cols(), true),
                   std::move(row_ids), std::move(col_ids)) {}

MaskedMatrix MaskedMatrix::from_dense_with_nan(const Matrix& values, std::vector<std::string> row_ids,
                                               std::vector<std::string> col_ids) {
    Mask mask(values.rows(), values.cols());
    Matrix clean = values;
    for (Index j = 0; j < values.cols(); ++j) {
        for (Index i = 0; i < values.rows(); ++i) {
            const bool obs = std::isfinite(values(i, j));
            mask(i, j) = obs;
            if (!obs) clean(i, j) = 0.0;
        }
    }
    return MaskedMatrix(std::move(clean), std::move(mask), std::move(row_ids), std::move(col_ids));
}

MaskedMatrix MaskedMatrix::select_columns(const std::vector<Index>& cols) const {
    if (cols.empty()) throw InvalidInputError("column selection is empty");
    Matrix v(n_rows(), static_cast<Index>(cols.size()));
    Mask m(n_rows(), static_cast<Index>(cols.size()));
    std::vector<std::string> ids;
    ids.reserve(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const Index j = cols[k];
        if (j < 0 || j >= n_cols()) throw ShapeMismatchError("column index out of range");
        v.col(static_cast<Index>(k)) = values_.col(j);
        m.col(static_cast<Index>(k)) = mask_.col(j);
        ids.push_back(col_ids_[static_cast<std::size_t>(j)]);
    }
    return MaskedMatrix(std::move(v), std::move(m), row_ids_, std::move(ids));
}

Tensor3::Tensor3(std::vector<Matrix> slices, std::vector<Mask> masks)
    : slices_(std::move(slices)), masks_(std::move(masks)) {
    if (slices_.empty()) throw InvalidInputError("tensor needs at least one slice");
    if (slices_.size() != masks_.size()) throw ShapeMismatchError("slice and mask counts differ");
    const Index r = slices_.front().rows();
    const Index c = slices_.front().cols();
    for (std::size_t s = 0; s < slices_.size(); ++s) {
        if (slices_[s].rows() != r || slices_[s].cols() != c || masks_[s].rows() != r || masks_[s].cols() != c)
            throw ShapeMismatchError("tensor slices must share one shape");
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) {
                if (!masks_[s](i, j)) {
                    slices_[s](i, j) = 0.0;
                    continue;
                }
                const double v = slices_[s](i, j);
                if (!std::isfinite(v) || v < 0.0)
                    throw InvalidInputError("tensor entries must be finite and non-negative where observed");
            }
    }
}

double Tensor3::masked_sq_norm() const {
    double total = 0.0;
    for (std::size_t s = 0; s < slices_.size(); ++s)
        total += slices_[s].cwiseProduct(masks_[s].cast<double>()).squaredNorm();
    return total;
}

double masked_sq_norm(const MaskedMatrix& m) {
    // missing cells are stored as 0, so the plain squared norm is already masked
    return m.values().squaredNorm();
}

double masked_residual_sq_norm(const MaskedMatrix& x, const Matrix& approx) {
    if (approx.rows() != x.n_rows() || approx.cols() != x.n_cols())
        throw ShapeMismatchError("approx shape does not match matrix");
    return ((x.values() - approx).cwiseProduct(x.weights())).squaredNorm();
}

Vector column_medians(const MaskedMatrix& m) {
    Vector med(m.n_cols());
    std::vector<double> buf;
    for (Index j = 0; j < m.n_cols(); ++j) {
        buf.clear();
        for (Index i = 0; i < m.n_rows(); ++i)
            if (m.observed(i, j)) buf.push_back(m.values()(i, j));
        if (buf.empty()) throw EmptyColumnError(m.col_ids()[static_cast<std::size_t>(j)]);
        std::sort(buf.begin(), buf.end());
        const std::size_t n = buf.size();
        med(j) = (n % 2 == 1) ? buf[n / 2] : 0.5 * (buf[n / 2 - 1] + buf[n / 2]);
    }
    return med;
}

Vector fill_rate_by_column(const MaskedMatrix& m) {
    if (m.n_rows() < 1) throw InvalidInputError("fill rates need at least one row");
    Vector rates(m.n_cols());
    for (Index j = 0; j < m.n_cols(); ++j)
        rates(j) = static_cast<double>(m.observed_count_col(j)) / static_cast<double>(m.n_rows());
    return rates;
}

GroupFillRates fill_rate_by_group(const MaskedMatrix& m, const std::vector<std::string>& labels) {
    if (static_cast<Index>(labels.size()) != m.n_rows())
        throw MissingLabelError("need exactly one group label per row (got " +
                                std::to_string(labels.size()) + " for " + std::to_string(m.n_rows()) +
                                " rows)");
    std::map<std::string, std::vector<Index>> groups;
    for (Index i = 0; i < m.n_rows(); ++i) groups[labels[static_cast<std::size_t>(i)]].push_back(i);

    GroupFillRates out;
    out.rates.resize(static_cast<Index>(groups.size()), m.n_cols());
    out.group_averages.resize(static_cast<Index>(groups.size()));
    Index g = 0;
    for (const auto& [label, rows] : groups) {
        out.groups.push_back(label);
        out.group_sizes.push_back(static_cast<Index>(rows.size()));
        for (Index j = 0; j < m.n_cols(); ++j) {
            Index count = 0;
            for (Index i : rows) count += m.observed(i, j) ? 1 : 0;
            out.rates(g, j) = static_cast<double>(count) / static_cast<double>(rows.size());
        }
        out.group_averages(g) = out.rates.row(g).mean();
        ++g;
    }
    return out;
}

}  // namespace sepnmf
