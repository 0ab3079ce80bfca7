#include "sepnmf/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sepnmf/errors.hpp"

namespace sepnmf {

namespace {

std::vector<int> argmax_rows(const Matrix& lev) {
    std::vector<int> out(static_cast<std::size_t>(lev.rows()));
    for (Index i = 0; i < lev.rows(); ++i) {
        int best = 0;
        for (Index k = 1; k < lev.cols(); ++k) {
            if (lev(i, k) > lev(i, best)) best = static_cast<int>(k);
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

ClusterAssignment assign_from_factors(const Matrix& w, const Matrix& h) {
    ClusterAssignment a;
    a.row_leverage = leverage(w);
    a.col_leverage = leverage(h);
    a.row_cluster = argmax_rows(a.row_leverage);
    a.col_cluster = argmax_rows(a.col_leverage);
    a.cluster_count = static_cast<int>(w.cols());
    return a;
}

std::vector<Index> sorted_order(const std::vector<int>& cluster, const Matrix& lev) {
    std::vector<Index> order(cluster.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const auto ca = cluster[static_cast<std::size_t>(a)];
        const auto cb = cluster[static_cast<std::size_t>(b)];
        if (ca != cb) return ca < cb;
        return lev(a, ca) > lev(b, cb);
    });
    return order;
}

double entropy_of_counts(const std::vector<Index>& counts, Index total, int bins) {
    double e = 0.0;
    for (Index c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        e += p * std::log(1.0 / p);
    }
    return e / std::log(static_cast<double>(bins));
}

int bin_of(double v, int bins) {
    const double width = (kEntropyRangeMax - kEntropyRangeMin) / bins;
    const auto raw = static_cast<int>(std::floor((v - kEntropyRangeMin) / width));
    return std::clamp(raw, 0, bins - 1);
}

}  // namespace

Matrix leverage(const Matrix& factor) {
    const Index c = factor.cols();
    Matrix lev(factor.rows(), c);
    for (Index i = 0; i < factor.rows(); ++i) {
        const double total = factor.row(i).squaredNorm();
        if (total > 0.0) {
            lev.row(i) = factor.row(i).array().square() / total;
        } else {
            lev.row(i).setConstant(1.0 / static_cast<double>(c));
        }
    }
    return lev;
}

ClusterAssignment assign_clusters(const NmfModel& model) {
    return assign_from_factors(model.W, model.H);
}

ClusterAssignment assign_clusters(const SnmfModel& model) {
    return assign_from_factors(model.W, model.H);
}

HeatmapOrder reorder_for_heatmap(const MaskedMatrix& x, const ClusterAssignment& a) {
    if (static_cast<Index>(a.row_cluster.size()) != x.n_rows() ||
        static_cast<Index>(a.col_cluster.size()) != x.n_cols()) {
        throw ShapeMismatchError("cluster assignment does not match matrix shape");
    }
    HeatmapOrder order;
    order.row_order = sorted_order(a.row_cluster, a.row_leverage);
    order.col_order = sorted_order(a.col_cluster, a.col_leverage);
    return order;
}

double normalized_entropy(const std::vector<double>& values, int bins) {
    if (bins < 2) throw BadBinCountError("normalized_entropy needs at least 2 bins");
    if (values.empty()) throw EmptyInputError("normalized_entropy on empty values");
    std::vector<Index> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        ++counts[static_cast<std::size_t>(bin_of(v, bins))];
    }
    return entropy_of_counts(counts, static_cast<Index>(values.size()), bins);
}

EntropyReport clustering_entropy(const MaskedMatrix& x, const ClusterAssignment& a, int bins) {
    if (bins < 2) throw BadBinCountError("clustering_entropy needs at least 2 bins");
    if (static_cast<Index>(a.row_cluster.size()) != x.n_rows() ||
        static_cast<Index>(a.col_cluster.size()) != x.n_cols()) {
        throw ShapeMismatchError("cluster assignment does not match matrix shape");
    }

    EntropyReport report;
    std::vector<double> whole;
    whole.reserve(static_cast<std::size_t>(x.n_rows() * x.n_cols()));
    std::vector<std::vector<double>> diag(static_cast<std::size_t>(a.cluster_count));
    for (Index i = 0; i < x.n_rows(); ++i) {
        const int rk = a.row_cluster[static_cast<std::size_t>(i)];
        for (Index j = 0; j < x.n_cols(); ++j) {
            if (!x.observed(i, j)) continue;
            whole.push_back(x.values()(i, j));
            if (rk == a.col_cluster[static_cast<std::size_t>(j)]) {
                diag[static_cast<std::size_t>(rk)].push_back(x.values()(i, j));
            }
        }
    }

    double weighted = 0.0;
    Index total_size = 0;
    for (int k = 0; k < a.cluster_count; ++k) {
        const auto& vals = diag[static_cast<std::size_t>(k)];
        if (vals.empty()) {
            report.empty_clusters.push_back(k);
            continue;
        }
        DiagonalEntropy d;
        d.cluster = k;
        d.entropy = normalized_entropy(vals, bins);
        d.size = static_cast<Index>(vals.size());
        weighted += d.entropy * static_cast<double>(d.size);
        total_size += d.size;
        report.diagonal_entropies.push_back(d);
    }
    if (report.diagonal_entropies.empty()) {
        throw AllDiagonalsEmptyError("every diagonal cluster is empty");
    }
    report.clustering_entropy = weighted / static_cast<double>(total_size);
    report.whole_matrix_entropy = normalized_entropy(whole, bins);
    report.entropy_delta = report.clustering_entropy - report.whole_matrix_entropy;
    return report;
}

IncidenceMatrix incidence(const std::vector<std::string>& groups, const ClusterAssignment& a) {
    if (groups.size() != a.row_cluster.size()) {
        throw MissingLabelError("need exactly one group label per row");
    }
    std::map<std::string, std::vector<Index>> by_group;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        by_group[groups[i]].push_back(static_cast<Index>(i));
    }

    IncidenceMatrix inc;
    inc.cluster_count = a.cluster_count;
    inc.proportions = Matrix::Zero(static_cast<Index>(by_group.size()), a.cluster_count);
    Index g = 0;
    for (const auto& [label, rows] : by_group) {
        inc.group_labels.push_back(label);
        for (Index r : rows) {
            inc.proportions(g, a.row_cluster[static_cast<std::size_t>(r)]) += 1.0;
        }
        inc.proportions.row(g) /= static_cast<double>(rows.size());
        ++g;
    }
    return inc;
}

std::vector<std::vector<RankedFeature>> top_features(const Matrix& h,
                                                     const std::vector<std::string>& col_ids,
                                                     int k) {
    if (k < 1) throw InvalidInputError("top_features needs k >= 1");
    if (static_cast<Index>(col_ids.size()) != h.rows()) {
        throw ShapeMismatchError("column id count does not match loading rows");
    }
    const auto take = std::min<Index>(k, h.rows());
    std::vector<std::vector<RankedFeature>> out(static_cast<std::size_t>(h.cols()));
    for (Index comp = 0; comp < h.cols(); ++comp) {
        std::vector<Index> order(static_cast<std::size_t>(h.rows()));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            if (h(a, comp) != h(b, comp)) return h(a, comp) > h(b, comp);
            return a < b;
        });
        auto& ranked = out[static_cast<std::size_t>(comp)];
        ranked.reserve(static_cast<std::size_t>(take));
        for (Index r = 0; r < take; ++r) {
            const Index j = order[static_cast<std::size_t>(r)];
            ranked.push_back({col_ids[static_cast<std::size_t>(j)], h(j, comp), j});
        }
    }
    return out;
}

}  // namespace sepnmf
