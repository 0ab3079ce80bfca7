#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sepnmf/masked_matrix.hpp"

namespace sepnmf {

enum class InitMethod { SeededRandom, SvdBased };

struct SolverConfig {
    int rank = 2;
    int max_iter = 2000;
    double tol = 1e-6;          // relative improvement over a 10-iteration window
    std::uint64_t seed = 0;
    double sparsity_h = 0.0;    // Hoyer target per H column, 0 = off
    double sparsity_w = 0.0;    // Hoyer target per W column, 0 = off
    InitMethod init = InitMethod::SeededRandom;

    /// Throws InvalidInputError / RankTooLargeError against a given shape.
    void validate(Index n_rows, Index n_cols) const;

    SolverConfig with_rank(int r) const {
        SolverConfig c = *this;
        c.rank = r;
        return c;
    }
    SolverConfig with_sparsity(double h, double w = 0.0) const {
        SolverConfig c = *this;
        c.sparsity_h = h;
        c.sparsity_w = w;
        return c;
    }
};

struct NmfModel {
    Matrix W;  // n x c scores
    Matrix H;  // f x c loadings

    Matrix reconstruction() const { return W * H.transpose(); }
};

struct FitReport {
    double rel_sq_error = 0.0;              // masked residual / masked norm of x
    int iterations = 0;
    bool converged = false;
    std::vector<double> error_trace;        // one relative error per sweep
    std::vector<int> reseeded_components;   // components restarted from the residual once
    std::vector<int> dead_components;       // components left at the floor after a second death
    std::optional<double> rel_sq_error_original;  // separative fits: error of the reconstructed matrix
};

/// Strictly positive starting factors. Seeded-random draws are calibrated so
/// mean(W H^T) is close to the mean of the observed entries; SVD-based init
/// uses the non-negative parts of the leading singular vectors, floored.
NmfModel init_factors(const MaskedMatrix& x, const SolverConfig& config);

/// Masked multiplicative-update NMF, with optional per-column Hoyer sparsity
/// projection after each factor update.
std::pair<NmfModel, FitReport> fit_nmf(const MaskedMatrix& x, const SolverConfig& config);

/// masked_residual_sq_norm(x, W H^T) / masked_sq_norm(x). Throws ZeroNormError
/// when x has no nonzero observed entry.
double relative_sq_error(const MaskedMatrix& x, const NmfModel& model);

namespace detail {

constexpr double kEps = 1e-12;  // denominator floor and dead-entry threshold

/// Relative error with a zero-norm convention: when the masked norm of x is 0,
/// the absolute residual is returned instead of a ratio. Used by the fitting
/// loops, which must handle all-zero inputs.
double guarded_rel_error(double residual_sq, double norm_sq);

/// Convergence rule shared by the matrix and tensor solvers: relative
/// improvement over a 10-sweep window below tol.
bool converged_by_window(const std::vector<double>& trace, double tol);

}  // namespace detail

}  // namespace sepnmf
