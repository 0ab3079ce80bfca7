#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sepnmf/clustering.hpp"
#include "sepnmf/nmf.hpp"
#include "sepnmf/separative.hpp"

namespace sepnmf {

enum class Variant { Nmf, Snmf };

// Loadings at or below kDropThreshold * max(H) count as null for the
// feature-drop step.
inline constexpr double kDropThreshold = 1e-10;

struct RestrictedRun {
    FitReport sparse_report;
    std::vector<std::string> dropped_features;
    std::vector<Index> kept_columns;  // indices into the input matrix
    FitReport restricted_report;
    std::variant<NmfModel, SnmfModel> restricted_model;
    EntropyReport entropy;  // clustering entropy on the restricted matrix
};

// Sparse fit, drop of all-null-loading features, dense refit on the surviving
// columns, clustering entropy of the refit. config.sparsity_h must be > 0.
RestrictedRun run_restricted(const MaskedMatrix& x, const SolverConfig& config, Variant variant,
                             bool impute_first = true, int bins = kDefaultEntropyBins);

struct ComparisonRow {
    std::string model;
    int dimension = 0;
    Index features = 0;
    double h_sparsity = 0.0;  // configured target for this row
    double rel_error = 0.0;
    std::optional<double> entropy_delta;  // restricted rows only
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;  // fixed order: Full/Sparse/Restricted x NMF/S2NMF
    EntropyReport nmf_entropy;
    EntropyReport snmf_entropy;
};

// Runs all six variants with a shared seed on the mean-imputed matrix.
ComparisonReport run_comparison(const MaskedMatrix& x, const SolverConfig& config,
                                int bins = kDefaultEntropyBins);

}  // namespace sepnmf
