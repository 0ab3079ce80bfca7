#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sepnmf/dataset.hpp"
#include "sepnmf/masked_matrix.hpp"

namespace sepnmf {

// Planted low-rank benchmark: block-structured factors, optional per-component
// deviation signs, pure-noise padding columns, independent missingness, and
// group labels correlated with the planted row blocks.
struct SynthSpec {
    Index n_rows = 500;
    Index n_cols = 77;
    int rank = 6;
    double noise_level = 2.0;
    double missing_rate = 0.0;
    bool two_sided = true;
    Index noise_features = 0;
    std::uint64_t seed = 0;
    double baseline_level = 50.0;
    double deviation_scale = 40.0;

    void validate() const;  // throws InvalidSpecError
};

struct GroundTruth {
    Matrix w;                      // n_rows x rank
    Matrix h;                      // n_cols x rank, zero rows for noise features
    std::vector<int> directions;   // +1 / -1 per component
    std::vector<bool> relevance;   // per column, false for pure-noise columns
    std::vector<int> row_cluster;  // planted dominant component per row
    std::vector<int> col_cluster;  // per column, -1 for noise columns
};

std::pair<Dataset, GroundTruth> generate(const SynthSpec& spec);

}  // namespace sepnmf
