#include "sepnmf/synth.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "sepnmf/errors.hpp"

namespace sepnmf {

namespace {
constexpr double kDominantBase = 0.7;
constexpr double kDominantSpread = 0.3;
constexpr double kOffBlockW = 0.2;
constexpr double kOffBlockH = 0.15;
constexpr double kLabelFidelity = 0.8;
}  // namespace

void SynthSpec::validate() const {
    if (n_rows < 1 || n_cols < 1) throw InvalidSpecError("matrix dimensions must be positive");
    if (rank < 1) throw InvalidSpecError("rank must be at least 1");
    if (noise_features < 0 || noise_features >= n_cols) {
        throw InvalidSpecError("noise_features must leave at least one informative column");
    }
    const Index signal = n_cols - noise_features;
    if (rank > std::min(n_rows, signal)) {
        throw InvalidSpecError("rank exceeds min(n_rows, n_cols - noise_features)");
    }
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
        throw InvalidSpecError("missing_rate must lie in [0, 1)");
    }
    if (noise_level < 0.0) throw InvalidSpecError("noise_level must be non-negative");
    if (deviation_scale <= 0.0) throw InvalidSpecError("deviation_scale must be positive");
    if (!(baseline_level >= 0.0 && baseline_level <= 100.0)) {
        throw InvalidSpecError("baseline_level must lie in [0, 100]");
    }
}

std::pair<Dataset, GroundTruth> generate(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const Index n = spec.n_rows;
    const Index f = spec.n_cols;
    const Index signal = f - spec.noise_features;
    const int c = spec.rank;

    GroundTruth truth;
    truth.row_cluster.resize(static_cast<std::size_t>(n));
    truth.col_cluster.assign(static_cast<std::size_t>(f), -1);
    truth.relevance.assign(static_cast<std::size_t>(f), false);

    truth.w = Matrix(n, c);
    for (Index i = 0; i < n; ++i) {
        const int block = static_cast<int>((i * c) / n);
        truth.row_cluster[static_cast<std::size_t>(i)] = block;
        for (int k = 0; k < c; ++k) {
            const double u = unif(rng);
            truth.w(i, k) = (k == block) ? kDominantBase + kDominantSpread * u : kOffBlockW * u;
        }
    }

    truth.h = Matrix::Zero(f, c);
    for (Index j = 0; j < signal; ++j) {
        const int block = static_cast<int>((j * c) / signal);
        truth.col_cluster[static_cast<std::size_t>(j)] = block;
        truth.relevance[static_cast<std::size_t>(j)] = true;
        for (int k = 0; k < c; ++k) {
            const double u = unif(rng);
            truth.h(j, k) = (k == block) ? kDominantBase + kDominantSpread * u : kOffBlockH * u;
        }
    }

    truth.directions.resize(static_cast<std::size_t>(c), 1);
    if (spec.two_sided) {
        for (int k = 0; k < c; ++k) {
            truth.directions[static_cast<std::size_t>(k)] = unif(rng) < 0.5 ? 1 : -1;
        }
    }

    Vector signed_scale(c);
    for (int k = 0; k < c; ++k) {
        signed_scale(k) = spec.deviation_scale * truth.directions[static_cast<std::size_t>(k)];
    }
    const Matrix deviations = truth.w * signed_scale.asDiagonal() * truth.h.transpose();

    Matrix values(n, f);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < f; ++j) {
            const double x = spec.baseline_level + deviations(i, j) + spec.noise_level * gauss(rng);
            values(i, j) = std::clamp(x, 0.0, 100.0);
        }
    }

    Mask mask = Mask::Constant(n, f, true);
    if (spec.missing_rate > 0.0) {
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < f; ++j) {
                if (unif(rng) < spec.missing_rate) mask(i, j) = false;
            }
        }
    }

    std::vector<std::string> row_ids;
    row_ids.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) row_ids.push_back("r" + std::to_string(i));

    std::vector<std::string> col_ids;
    col_ids.reserve(static_cast<std::size_t>(f));
    for (Index j = 0; j < f; ++j) {
        const int block = truth.col_cluster[static_cast<std::size_t>(j)];
        col_ids.push_back(block >= 0 ? "th" + std::to_string(block) + "_f" + std::to_string(j)
                                     : "noise_f" + std::to_string(j));
    }

    std::uniform_int_distribution<int> any_sector(0, c - 1);
    std::vector<std::string> groups;
    groups.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        int sector = truth.row_cluster[static_cast<std::size_t>(i)];
        if (unif(rng) >= kLabelFidelity) sector = any_sector(rng);
        groups.push_back("sec" + std::to_string(sector));
    }

    Dataset dataset{MaskedMatrix(std::move(values), std::move(mask), std::move(row_ids),
                                 std::move(col_ids)),
                    std::move(groups), std::nullopt};
    std::vector<std::string> prefixes;
    prefixes.reserve(static_cast<std::size_t>(f));
    for (const auto& id : dataset.matrix.col_ids()) {
        prefixes.push_back(id.substr(0, id.find('_')));
    }
    dataset.feature_prefixes = std::move(prefixes);
    return {std::move(dataset), std::move(truth)};
}

}  // namespace sepnmf
