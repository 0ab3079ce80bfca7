#include "sepnmf/nmf.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "sepnmf/sparsity.hpp"

namespace sepnmf {

void SolverConfig::validate(Index n_rows, Index n_cols) const {
    if (rank < 1) throw InvalidInputError("rank must be at least 1");
    if (rank > std::min(n_rows, n_cols))
        throw RankTooLargeError("rank " + std::to_string(rank) + " exceeds min(n_rows, n_cols) = " +
                                std::to_string(std::min(n_rows, n_cols)));
    if (max_iter < 1) throw InvalidInputError("max_iter must be at least 1");
    if (!(tol > 0.0)) throw InvalidInputError("tol must be positive");
    if (sparsity_h < 0.0 || sparsity_h >= 1.0 || sparsity_w < 0.0 || sparsity_w >= 1.0)
        throw InvalidInputError("sparsity targets must lie in [0,1)");
}

namespace detail {

double guarded_rel_error(double residual_sq, double norm_sq) {
    return norm_sq > 0.0 ? residual_sq / norm_sq : residual_sq;
}

bool converged_by_window(const std::vector<double>& trace, double tol) {
    constexpr std::size_t window = 10;
    if (trace.size() <= window) return false;
    const double before = trace[trace.size() - 1 - window];
    const double now = trace.back();
    const double denom = std::max(before, kEps);
    return (before - now) / denom < tol;
}

}  // namespace detail

namespace {

using detail::kEps;

double observed_mean(const MaskedMatrix& x) {
    const Index count = x.observed_count();
    if (count == 0) return 0.0;
    return x.values().sum() / static_cast<double>(count);
}

Matrix positive_uniform(std::mt19937_64& rng, Index rows, Index cols, double scale) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = kEps + unif(rng) * (scale - kEps);
    return m;
}

NmfModel init_random(const MaskedMatrix& x, const SolverConfig& config) {
    // mean(W H^T) = c * (s/2)^2 for iid uniform(0,s) entries, so s below
    // matches the observed mean of x in expectation
    const double mean = observed_mean(x);
    const double scale = std::max(2.0 * std::sqrt(std::max(mean, 0.0) / config.rank), 2.0 * kEps);
    std::mt19937_64 rng(config.seed);
    NmfModel model;
    model.W = positive_uniform(rng, x.n_rows(), config.rank, scale);
    model.H = positive_uniform(rng, x.n_cols(), config.rank, scale);
    return model;
}

NmfModel init_svd(const MaskedMatrix& x, const SolverConfig& config) {
    // missing cells filled with the column mean of the observed values
    Matrix filled = x.values();
    for (Index j = 0; j < x.n_cols(); ++j) {
        const Index count = x.observed_count_col(j);
        const double mean = count > 0 ? x.values().col(j).sum() / static_cast<double>(count) : 0.0;
        for (Index i = 0; i < x.n_rows(); ++i)
            if (!x.observed(i, j)) filled(i, j) = mean;
    }
    Eigen::BDCSVD<Matrix> svd(filled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    NmfModel model;
    model.W.resize(x.n_rows(), config.rank);
    model.H.resize(x.n_cols(), config.rank);
    for (int k = 0; k < config.rank; ++k) {
        Vector u = svd.matrixU().col(k);
        Vector v = svd.matrixV().col(k);
        const double sigma = svd.singularValues()(k);
        // keep the orientation whose non-negative parts carry more mass
        const double pos = u.cwiseMax(0.0).norm() * v.cwiseMax(0.0).norm();
        const double neg = (-u).cwiseMax(0.0).norm() * (-v).cwiseMax(0.0).norm();
        if (neg > pos) {
            u = -u;
            v = -v;
        }
        const double s = std::sqrt(std::max(sigma, 0.0));
        model.W.col(k) = (u.cwiseMax(0.0) * s).cwiseMax(kEps);
        model.H.col(k) = (v.cwiseMax(0.0) * s).cwiseMax(kEps);
    }
    return model;
}

void project_columns(Matrix& factor, double target) {
    for (Index k = 0; k < factor.cols(); ++k) {
        Vector col = factor.col(k);
        if (col.maxCoeff() <= kEps) continue;  // dead column, handled elsewhere
        factor.col(k) = project_sparsity(col, target);
    }
}

// Reseed dead components from the row with the largest positive masked
// residual: W column becomes that row's indicator, H column its positive
// residual. This never increases the masked objective. Returns false when no
// row has positive residual mass, in which case the column is left floored.
bool reseed_component(const MaskedMatrix& x, Matrix& W, Matrix& H, const Matrix& approx, Index k) {
    const Matrix residual = (x.values() - approx).cwiseProduct(x.weights());
    Index best_row = -1;
    double best_mass = 0.0;
    for (Index i = 0; i < residual.rows(); ++i) {
        const double mass = residual.row(i).cwiseMax(0.0).squaredNorm();
        if (mass > best_mass) {
            best_mass = mass;
            best_row = i;
        }
    }
    if (best_row < 0) return false;
    W.col(k).setZero();
    W(best_row, k) = 1.0;
    H.col(k) = residual.row(best_row).transpose().cwiseMax(0.0);
    return true;
}

}  // namespace

NmfModel init_factors(const MaskedMatrix& x, const SolverConfig& config) {
    config.validate(x.n_rows(), x.n_cols());
    return config.init == InitMethod::SeededRandom ? init_random(x, config) : init_svd(x, config);
}

std::pair<NmfModel, FitReport> fit_nmf(const MaskedMatrix& x, const SolverConfig& config) {
    config.validate(x.n_rows(), x.n_cols());
    NmfModel model = init_factors(x, config);
    Matrix& W = model.W;
    Matrix& H = model.H;
    const Matrix& Xz = x.values();
    const Matrix& M = x.weights();
    const double norm_sq = masked_sq_norm(x);
    const int c = config.rank;

    FitReport report;
    std::vector<char> reseeded(static_cast<std::size_t>(c), 0);
    std::vector<char> floored(static_cast<std::size_t>(c), 0);

    Matrix approx = W * H.transpose();
    for (int iter = 0; iter < config.max_iter; ++iter) {
        // W step
        Matrix masked_approx = approx.cwiseProduct(M);
        Matrix num = Xz * H;
        Matrix den = (masked_approx * H).cwiseMax(kEps);
        W = W.cwiseProduct(num.cwiseQuotient(den));
        if (config.sparsity_w > 0.0) project_columns(W, config.sparsity_w);

        // H step
        approx.noalias() = W * H.transpose();
        masked_approx = approx.cwiseProduct(M);
        num.noalias() = Xz.transpose() * W;
        den = (masked_approx.transpose() * W).cwiseMax(kEps);
        H = H.cwiseProduct(num.cwiseQuotient(den));
        if (config.sparsity_h > 0.0) project_columns(H, config.sparsity_h);

        approx.noalias() = W * H.transpose();

        for (Index k = 0; k < c; ++k) {
            const bool dead = W.col(k).maxCoeff() <= kEps || H.col(k).maxCoeff() <= kEps;
            if (!dead || floored[static_cast<std::size_t>(k)]) continue;
            bool revived = false;
            if (!reseeded[static_cast<std::size_t>(k)]) {
                reseeded[static_cast<std::size_t>(k)] = 1;
                report.reseeded_components.push_back(static_cast<int>(k));
                revived = reseed_component(x, W, H, approx, k);
            }
            if (!revived) {
                floored[static_cast<std::size_t>(k)] = 1;
                report.dead_components.push_back(static_cast<int>(k));
                W.col(k).setConstant(kEps);
                H.col(k).setConstant(kEps);
            }
            approx.noalias() = W * H.transpose();
        }

        const double residual_sq = ((Xz - approx).cwiseProduct(M)).squaredNorm();
        report.error_trace.push_back(detail::guarded_rel_error(residual_sq, norm_sq));
        report.iterations = iter + 1;
        if (detail::converged_by_window(report.error_trace, config.tol)) {
            report.converged = true;
            break;
        }
    }
    report.rel_sq_error = report.error_trace.back();
    return {std::move(model), std::move(report)};
}

double relative_sq_error(const MaskedMatrix& x, const NmfModel& model) {
    const double norm_sq = masked_sq_norm(x);
    if (norm_sq == 0.0) throw ZeroNormError("matrix has no nonzero observed entry");
    return masked_residual_sq_norm(x, model.reconstruction()) / norm_sq;
}

}  // namespace sepnmf
