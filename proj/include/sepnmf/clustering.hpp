#pragma once

#include <string>
#include <vector>

#include "sepnmf/masked_matrix.hpp"
#include "sepnmf/nmf.hpp"
#include "sepnmf/separative.hpp"

namespace sepnmf {

// Row/column co-clustering derived from factor leverages.
struct ClusterAssignment {
    std::vector<int> row_cluster;  // n entries in [0, cluster_count)
    std::vector<int> col_cluster;  // f entries in [0, cluster_count)
    Matrix row_leverage;           // n x c, rows sum to 1
    Matrix col_leverage;           // f x c, rows sum to 1
    int cluster_count = 0;
};

struct DiagonalEntropy {
    int cluster = 0;
    double entropy = 0.0;
    Index size = 0;  // observed entries in the diagonal block
};

struct EntropyReport {
    double whole_matrix_entropy = 0.0;
    std::vector<DiagonalEntropy> diagonal_entropies;
    std::vector<int> empty_clusters;  // diagonal blocks with no observed entry
    double clustering_entropy = 0.0;
    double entropy_delta = 0.0;  // clustering_entropy - whole_matrix_entropy
};

struct IncidenceMatrix {
    std::vector<std::string> group_labels;
    int cluster_count = 0;
    Matrix proportions;  // |groups| x cluster_count, rows sum to 1
};

struct HeatmapOrder {
    std::vector<Index> row_order;
    std::vector<Index> col_order;
};

struct RankedFeature {
    std::string id;
    double loading = 0.0;
    Index column = 0;
};

inline constexpr int kDefaultEntropyBins = 10;
inline constexpr double kEntropyRangeMin = 0.0;
inline constexpr double kEntropyRangeMax = 100.0;

// Row-normalized squared coefficients. All-zero rows map to the uniform
// distribution so every row remains a valid probability vector.
Matrix leverage(const Matrix& factor);

ClusterAssignment assign_clusters(const NmfModel& model);
ClusterAssignment assign_clusters(const SnmfModel& model);

// Rows sorted by (cluster, descending max leverage), columns likewise.
// Stable, so equal keys keep their input order.
HeatmapOrder reorder_for_heatmap(const MaskedMatrix& x, const ClusterAssignment& a);

// Shannon entropy of the histogram of `values` over `bins` equal-width bins
// spanning [kEntropyRangeMin, kEntropyRangeMax], normalized by log(bins).
// Out-of-range values are clamped into the end bins.
double normalized_entropy(const std::vector<double>& values, int bins = kDefaultEntropyBins);

EntropyReport clustering_entropy(const MaskedMatrix& x, const ClusterAssignment& a,
                                 int bins = kDefaultEntropyBins);

IncidenceMatrix incidence(const std::vector<std::string>& groups, const ClusterAssignment& a);

// Per component, the k features with the largest loadings, descending,
// ties broken by column index.
std::vector<std::vector<RankedFeature>> top_features(const Matrix& h,
                                                     const std::vector<std::string>& col_ids,
                                                     int k);

}  // namespace sepnmf
