#include "sepnmf/separative.hpp"

#include <cmath>

#include "sepnmf/sparsity.hpp"

namespace sepnmf {

namespace {

using detail::kEps;

constexpr double kDirectionDeadband = 1e-9;

std::vector<int> derive_directions(const Matrix& Q) {
    const double threshold = kDirectionDeadband * std::max(Q.maxCoeff(), 0.0);
    std::vector<int> directions(static_cast<std::size_t>(Q.cols()), 0);
    for (Index k = 0; k < Q.cols(); ++k) {
        const double diff = Q(0, k) - Q(1, k);
        if (diff > threshold)
            directions[static_cast<std::size_t>(k)] = 1;
        else if (diff < -threshold)
            directions[static_cast<std::size_t>(k)] = -1;
    }
    return directions;
}

void project_h_columns(Matrix& H, double target) {
    for (Index k = 0; k < H.cols(); ++k) {
        Vector col = H.col(k);
        if (col.maxCoeff() <= kEps) continue;
        H.col(k) = project_sparsity(col, target);
    }
}

// Fix the per-component scale freedom: unit L2 on H columns and on Q column
// pairs, with both scales absorbed into W. Reconstruction is unchanged.
void normalize_gauge(Matrix& W, Matrix& H, Matrix& Q) {
    for (Index k = 0; k < W.cols(); ++k) {
        const double hn = H.col(k).norm();
        if (hn > 0.0) {
            H.col(k) /= hn;
            W.col(k) *= hn;
        }
        const double qn = Q.col(k).norm();
        if (qn > 0.0) {
            Q.col(k) /= qn;
            W.col(k) *= qn;
        }
    }
}

}  // namespace

Separation separate(const MaskedMatrix& x) {
    const Vector baseline = column_medians(x);
    Matrix plus = x.values();
    Matrix minus = x.values();
    for (Index j = 0; j < x.n_cols(); ++j) {
        for (Index i = 0; i < x.n_rows(); ++i) {
            if (!x.observed(i, j)) {
                plus(i, j) = 0.0;
                minus(i, j) = 0.0;
                continue;
            }
            const double dev = x.values()(i, j) - baseline(j);
            plus(i, j) = std::max(0.0, dev);
            minus(i, j) = std::max(0.0, -dev);
        }
    }
    auto plus_ids = x.col_ids();
    auto minus_ids = x.col_ids();
    for (auto& id : plus_ids) id += "+";
    for (auto& id : minus_ids) id += "-";
    return Separation{
        MaskedMatrix(std::move(plus), x.mask(), x.row_ids(), std::move(plus_ids)),
        MaskedMatrix(std::move(minus), x.mask(), x.row_ids(), std::move(minus_ids)),
        baseline,
    };
}

Tensor3 separation_tensor(const Separation& sep) {
    return Tensor3({sep.x_plus.values(), sep.x_minus.values()},
                   {sep.x_plus.mask(), sep.x_minus.mask()});
}

Matrix PosNegModel::reconstruct_original(const Vector& baseline) const {
    Matrix out = W * (H_plus - H_minus).transpose();
    out.rowwise() += baseline.transpose();
    return out;
}

std::pair<PosNegModel, FitReport> fit_posneg_nmf(const MaskedMatrix& x, const SolverConfig& config) {
    const Separation sep = separate(x);
    const Index f = x.n_cols();

    Matrix concat(x.n_rows(), 2 * f);
    concat << sep.x_plus.values(), sep.x_minus.values();
    Mask concat_mask(x.n_rows(), 2 * f);
    concat_mask << sep.x_plus.mask(), sep.x_minus.mask();
    std::vector<std::string> concat_ids = sep.x_plus.col_ids();
    concat_ids.insert(concat_ids.end(), sep.x_minus.col_ids().begin(), sep.x_minus.col_ids().end());

    MaskedMatrix stacked(std::move(concat), std::move(concat_mask), x.row_ids(), std::move(concat_ids));
    auto [nmf, report] = fit_nmf(stacked, config);

    PosNegModel model;
    model.W = std::move(nmf.W);
    model.H_plus = nmf.H.topRows(f);
    model.H_minus = nmf.H.bottomRows(f);
    return {std::move(model), std::move(report)};
}

std::pair<SnmfModel, FitReport> fit_ntf2(const Tensor3& t, const SolverConfig& config) {
    if (t.n_slices() != 2) throw BadSliceCountError("separative factorization needs exactly 2 slices");
    config.validate(t.n_rows(), t.n_cols());
    const int c = config.rank;

    // W and H start from the slice sum (total deviation magnitude); Q rows
    // start identical so the slice-relabeling symmetry holds exactly
    Matrix sum_values = t.slice(0) + t.slice(1);
    Mask sum_mask = (t.mask(0).array() || t.mask(1).array()).matrix();
    MaskedMatrix slice_sum(std::move(sum_values), std::move(sum_mask));
    NmfModel start = init_factors(slice_sum, config);

    SnmfModel model;
    model.W = std::move(start.W);
    model.H = std::move(start.H);
    model.Q = Matrix::Constant(2, c, 0.5);

    Matrix& W = model.W;
    Matrix& H = model.H;
    Matrix& Q = model.Q;

    const Matrix Mw[2] = {t.mask(0).cast<double>(), t.mask(1).cast<double>()};
    const Matrix& X0 = t.slice(0);
    const Matrix& X1 = t.slice(1);
    const double norm_sq = t.masked_sq_norm();

    FitReport report;
    auto slice_approx = [&](int s) -> Matrix { return W * Q.row(s).asDiagonal() * H.transpose(); };

    for (int iter = 0; iter < config.max_iter; ++iter) {
        // W step
        {
            Matrix num = Matrix::Zero(W.rows(), c);
            Matrix den = Matrix::Zero(W.rows(), c);
            for (int s = 0; s < 2; ++s) {
                const Matrix& Xs = (s == 0) ? X0 : X1;
                const Matrix approx_m = slice_approx(s).cwiseProduct(Mw[s]);
                num += ((Xs * H).array().rowwise() * Q.row(s).array()).matrix();
                den += ((approx_m * H).array().rowwise() * Q.row(s).array()).matrix();
            }
            W = W.cwiseProduct(num.cwiseQuotient(den.cwiseMax(kEps)));
        }

        // H step
        {
            Matrix num = Matrix::Zero(H.rows(), c);
            Matrix den = Matrix::Zero(H.rows(), c);
            for (int s = 0; s < 2; ++s) {
                const Matrix& Xs = (s == 0) ? X0 : X1;
                const Matrix approx_m = slice_approx(s).cwiseProduct(Mw[s]);
                num += ((Xs.transpose() * W).array().rowwise() * Q.row(s).array()).matrix();
                den += ((approx_m.transpose() * W).array().rowwise() * Q.row(s).array()).matrix();
            }
            H = H.cwiseProduct(num.cwiseQuotient(den.cwiseMax(kEps)));
            if (config.sparsity_h > 0.0) project_h_columns(H, config.sparsity_h);
        }

        // Q step
        for (int s = 0; s < 2; ++s) {
            const Matrix& Xs = (s == 0) ? X0 : X1;
            const Matrix approx_m = slice_approx(s).cwiseProduct(Mw[s]);
            const Vector num = (W.transpose() * Xs * H).diagonal();
            const Vector den = (W.transpose() * approx_m * H).diagonal().cwiseMax(kEps);
            Q.row(s) = Q.row(s).cwiseProduct((num.cwiseQuotient(den)).transpose());
        }

        normalize_gauge(W, H, Q);

        double residual_sq = 0.0;
        for (int s = 0; s < 2; ++s) {
            const Matrix& Xs = (s == 0) ? X0 : X1;
            residual_sq += ((Xs - slice_approx(s)).cwiseProduct(Mw[s])).squaredNorm();
        }
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

std::pair<SnmfModel, FitReport> fit_snmf(const MaskedMatrix& x, const SolverConfig& config) {
    const Separation sep = separate(x);
    const Tensor3 tensor = separation_tensor(sep);
    auto [model, report] = fit_ntf2(tensor, config);
    model.directions = derive_directions(model.Q);

    const Matrix original = reconstruct_original(model, sep.baseline);
    const double norm_sq = masked_sq_norm(x);
    report.rel_sq_error_original =
        detail::guarded_rel_error(masked_residual_sq_norm(x, original), norm_sq);
    return {std::move(model), std::move(report)};
}

Matrix reconstruct_original(const SnmfModel& model, const Vector& baseline) {
    if (baseline.size() != model.H.rows())
        throw ShapeMismatchError("baseline length does not match loading rows");
    const Vector diff = (model.Q.row(0) - model.Q.row(1)).transpose();
    Matrix out = model.W * diff.asDiagonal() * model.H.transpose();
    out.rowwise() += baseline.transpose();
    return out;
}

}  // namespace sepnmf
