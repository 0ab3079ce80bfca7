#pragma once

#include "sepnmf/nmf.hpp"

namespace sepnmf {

/// Median separation x = x_plus - x_minus + baseline, exact on observed
/// entries, with min(x_plus, x_minus) = 0 everywhere.
struct Separation {
    MaskedMatrix x_plus;
    MaskedMatrix x_minus;
    Vector baseline;  // column medians of the observed values
};

/// Split a matrix into positive/negative deviations from its column medians.
/// Masks are preserved on both slices. Throws EmptyColumnError.
Separation separate(const MaskedMatrix& x);

/// Stack a separation into the 2-slice tensor [X+ | X-].
Tensor3 separation_tensor(const Separation& sep);

struct PosNegModel {
    Matrix W;        // n x c
    Matrix H_plus;   // f x c
    Matrix H_minus;  // f x c

    /// W (H+ - H-)^T + baseline, broadcast over rows. May be negative.
    Matrix reconstruct_original(const Vector& baseline) const;
};

/// NMF of the horizontal concatenation [X+ | X-]; the loadings split into
/// H_plus (first f rows) and H_minus (last f rows). The report error is
/// relative to the concatenated matrix.
std::pair<PosNegModel, FitReport> fit_posneg_nmf(const MaskedMatrix& x, const SolverConfig& config);

struct SnmfModel {
    Matrix W;                 // n x c
    Matrix H;                 // f x c, shared across the two slices
    Matrix Q;                 // 2 x c slice weights; row 0 = plus, row 1 = minus
    std::vector<int> directions;  // per component: +1, -1, or 0 inside the deadband

    Matrix slice_reconstruction(Index s) const {
        return W * Q.row(s).asDiagonal() * H.transpose();
    }
};

/// Rank-c factorization of a 2-slice tensor with slice s approximated by
/// W diag(Q[s,:]) H^T, via alternating masked multiplicative updates.
/// Q rows start equal, so relabeling the slices only swaps the Q rows.
/// Directions are left empty; fit_snmf fills them.
std::pair<SnmfModel, FitReport> fit_ntf2(const Tensor3& t, const SolverConfig& config);

/// Separative NMF: separate, stack, factorize the tensor, then derive each
/// component's direction from the sign of Q[plus,k] - Q[minus,k] (with a small
/// deadband). The report carries both the tensor-relative error (headline) and
/// the error of the reconstructed original matrix.
std::pair<SnmfModel, FitReport> fit_snmf(const MaskedMatrix& x, const SolverConfig& config);

/// W diag(Q[plus,:] - Q[minus,:]) H^T + baseline broadcast over rows.
/// Recovers original scores, so entries may be negative.
Matrix reconstruct_original(const SnmfModel& model, const Vector& baseline);

}  // namespace sepnmf
