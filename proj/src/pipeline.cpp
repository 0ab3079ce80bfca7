#include "sepnmf/pipeline.hpp"

#include <utility>

#include "sepnmf/errors.hpp"
#include "sepnmf/pca.hpp"

namespace sepnmf {

namespace {

MaskedMatrix imputed_copy(const MaskedMatrix& x) {
    if (x.fully_observed()) return x;
    return MaskedMatrix(mean_impute(x), x.row_ids(), x.col_ids());
}

double comparable_error(const FitReport& report) {
    return report.rel_sq_error_original.value_or(report.rel_sq_error);
}

}  // namespace

RestrictedRun run_restricted(const MaskedMatrix& x, const SolverConfig& config, Variant variant,
                             bool impute_first, int bins) {
    if (!(config.sparsity_h > 0.0)) {
        throw InvalidInputError("run_restricted needs a positive sparsity_h target");
    }
    const MaskedMatrix fit_input = impute_first ? imputed_copy(x) : x;

    RestrictedRun run;
    Matrix sparse_h;
    if (variant == Variant::Nmf) {
        auto [model, report] = fit_nmf(fit_input, config);
        sparse_h = std::move(model.H);
        run.sparse_report = std::move(report);
    } else {
        auto [model, report] = fit_snmf(fit_input, config);
        sparse_h = std::move(model.H);
        run.sparse_report = std::move(report);
    }

    const double cutoff = kDropThreshold * sparse_h.cwiseAbs().maxCoeff();
    for (Index j = 0; j < sparse_h.rows(); ++j) {
        if ((sparse_h.row(j).cwiseAbs().array() > cutoff).any()) {
            run.kept_columns.push_back(j);
        } else {
            run.dropped_features.push_back(fit_input.col_ids()[static_cast<std::size_t>(j)]);
        }
    }
    if (run.kept_columns.empty()) {
        throw NoFeaturesSurviveError("sparse fit left no feature with nonzero loadings");
    }

    const MaskedMatrix restricted = fit_input.select_columns(run.kept_columns);
    const SolverConfig dense = config.with_sparsity(0.0, 0.0);
    ClusterAssignment assignment;
    if (variant == Variant::Nmf) {
        auto [model, report] = fit_nmf(restricted, dense);
        run.restricted_report = std::move(report);
        assignment = assign_clusters(model);
        run.restricted_model = std::move(model);
    } else {
        auto [model, report] = fit_snmf(restricted, dense);
        run.restricted_report = std::move(report);
        assignment = assign_clusters(model);
        run.restricted_model = std::move(model);
    }
    run.entropy = clustering_entropy(restricted, assignment, bins);
    return run;
}

ComparisonReport run_comparison(const MaskedMatrix& x, const SolverConfig& config, int bins) {
    if (!(config.sparsity_h > 0.0)) {
        throw InvalidInputError("run_comparison needs a positive sparsity_h target");
    }
    const MaskedMatrix xd = imputed_copy(x);
    const Index f = xd.n_cols();
    const SolverConfig dense = config.with_sparsity(0.0, 0.0);

    ComparisonReport report;
    const auto full_nmf = fit_nmf(xd, dense);
    auto restricted_nmf = run_restricted(xd, config, Variant::Nmf, false, bins);
    const auto full_snmf = fit_snmf(xd, dense);
    auto restricted_snmf = run_restricted(xd, config, Variant::Snmf, false, bins);

    report.rows.push_back(
        {"Full NMF", config.rank, f, 0.0, full_nmf.second.rel_sq_error, std::nullopt});
    report.rows.push_back({"Sparse NMF", config.rank, f, config.sparsity_h,
                           restricted_nmf.sparse_report.rel_sq_error, std::nullopt});
    report.rows.push_back({"Restricted NMF", config.rank,
                           static_cast<Index>(restricted_nmf.kept_columns.size()), 0.0,
                           restricted_nmf.restricted_report.rel_sq_error,
                           restricted_nmf.entropy.entropy_delta});
    report.rows.push_back(
        {"Full S2NMF", config.rank, f, 0.0, comparable_error(full_snmf.second), std::nullopt});
    report.rows.push_back({"Sparse S2NMF", config.rank, f, config.sparsity_h,
                           comparable_error(restricted_snmf.sparse_report), std::nullopt});
    report.rows.push_back({"Restricted S2NMF", config.rank,
                           static_cast<Index>(restricted_snmf.kept_columns.size()), 0.0,
                           comparable_error(restricted_snmf.restricted_report),
                           restricted_snmf.entropy.entropy_delta});
    report.nmf_entropy = std::move(restricted_nmf.entropy);
    report.snmf_entropy = std::move(restricted_snmf.entropy);
    return report;
}

}  // namespace sepnmf
