#include "sepnmf/pca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

#include "sepnmf/errors.hpp"

namespace sepnmf {

namespace {
constexpr double kRatioSlack = 1e-9;
}

Matrix mean_impute(const MaskedMatrix& x) {
    Matrix out = x.values();
    for (Index j = 0; j < x.n_cols(); ++j) {
        const Index observed = x.observed_count_col(j);
        if (observed == 0) {
            throw EmptyColumnError(x.col_ids()[static_cast<std::size_t>(j)]);
        }
        double sum = 0.0;
        for (Index i = 0; i < x.n_rows(); ++i) {
            if (x.observed(i, j)) sum += x.values()(i, j);
        }
        const double mean = sum / static_cast<double>(observed);
        for (Index i = 0; i < x.n_rows(); ++i) {
            if (!x.observed(i, j)) out(i, j) = mean;
        }
    }
    return out;
}

PcaModel fit_pca(const Matrix& x, bool standardize) {
    const Index n = x.rows();
    const Index f = x.cols();
    if (n < 2) throw InvalidInputError("fit_pca needs at least 2 rows");
    if (f < 1) throw InvalidInputError("fit_pca needs at least 1 column");

    Matrix centered = x.rowwise() - x.colwise().mean();
    if (standardize) {
        for (Index j = 0; j < f; ++j) {
            const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(n - 1));
            if (sd > 0.0) centered.col(j) /= sd;
        }
    }

    const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw DegenerateInputError("eigendecomposition failed");
    }

    Vector eig = solver.eigenvalues().cwiseMax(0.0).reverse();
    const double total = eig.sum();
    if (total <= 0.0) throw DegenerateInputError("input has zero variance");

    PcaModel model;
    model.components = solver.eigenvectors().rowwise().reverse();
    model.explained_variance_ratio = eig / total;
    model.cumulative_ratio = Vector(f);
    double running = 0.0;
    for (Index k = 0; k < f; ++k) {
        running += model.explained_variance_ratio(k);
        model.cumulative_ratio(k) = running;
    }

    for (Index k = 0; k < f; ++k) {
        Index arg = 0;
        model.components.col(k).cwiseAbs().maxCoeff(&arg);
        if (model.components(arg, k) < 0.0) model.components.col(k) = -model.components.col(k);
    }
    return model;
}

int components_needed(const PcaModel& model, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw InvalidInputError("threshold must lie in (0, 1]");
    }
    const Index c = model.cumulative_ratio.size();
    for (Index k = 0; k < c; ++k) {
        if (model.cumulative_ratio(k) + kRatioSlack >= threshold) return static_cast<int>(k) + 1;
    }
    return static_cast<int>(c);
}

CoefficientProfile signed_coefficient_profile(const PcaModel& model, int k) {
    if (k < 1 || k > model.components.cols()) {
        throw InvalidInputError("component count out of range");
    }
    CoefficientProfile profile;
    profile.sorted_coefficients.reserve(static_cast<std::size_t>(k));
    profile.significant_counts.reserve(static_cast<std::size_t>(k));
    for (Index comp = 0; comp < k; ++comp) {
        Vector coefs = model.components.col(comp);
        const double cutoff = 0.1 * coefs.cwiseAbs().maxCoeff();
        int count = 0;
        for (Index j = 0; j < coefs.size(); ++j) {
            if (std::abs(coefs(j)) > cutoff) ++count;
        }
        std::sort(coefs.data(), coefs.data() + coefs.size(), std::greater<double>());
        profile.sorted_coefficients.push_back(std::move(coefs));
        profile.significant_counts.push_back(count);
    }
    return profile;
}

}  // namespace sepnmf
