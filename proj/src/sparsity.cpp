#include "sepnmf/sparsity.hpp"

#include <cmath>

namespace sepnmf {

double hoyer_sparsity(const Vector& v) {
    const Index n = v.size();
    if (n < 2) throw LengthOneError("sparsity is undefined for vectors of length < 2");
    const double l2 = v.norm();
    if (l2 == 0.0) throw ZeroVectorError("sparsity is undefined for the zero vector");
    const double l1 = v.cwiseAbs().sum();
    const double sqn = std::sqrt(static_cast<double>(n));
    return (sqn - l1 / l2) / (sqn - 1.0);
}

Vector project_sparsity(const Vector& v, double target) {
    const Index n = v.size();
    if (n < 2) throw LengthOneError("cannot project a vector of length < 2");
    const double l2 = v.norm();
    if (l2 == 0.0) throw ZeroVectorError("cannot project the zero vector");
    if (!(target > 0.0 && target < 1.0))
        throw InvalidInputError("sparsity target must lie in (0,1)");

    const double sqn = std::sqrt(static_cast<double>(n));
    const double l1 = l2 * (sqn - target * (sqn - 1.0));  // implied L1 for the target

    Vector x = v.array() + (l1 - v.sum()) / static_cast<double>(n);
    std::vector<bool> zeroed(static_cast<std::size_t>(n), false);
    Index free_count = n;

    for (Index pass = 0; pass <= n; ++pass) {
        // midpoint of the feasible simplex slice on the free coordinates
        Vector mid = Vector::Zero(n);
        const double m = l1 / static_cast<double>(free_count);
        for (Index i = 0; i < n; ++i)
            if (!zeroed[static_cast<std::size_t>(i)]) mid(i) = m;

        Vector w = x - mid;
        double a = w.squaredNorm();
        if (a < 1e-30) {
            // x sits at the midpoint; pick a deterministic in-plane direction
            w.setZero();
            Index first = 0;
            while (zeroed[static_cast<std::size_t>(first)]) ++first;
            for (Index i = 0; i < n; ++i)
                if (!zeroed[static_cast<std::size_t>(i)])
                    w(i) = (i == first) ? 1.0 - 1.0 / static_cast<double>(free_count)
                                        : -1.0 / static_cast<double>(free_count);
            a = w.squaredNorm();
        }
        const double b = 2.0 * mid.dot(w);
        const double c = mid.squaredNorm() - l2 * l2;
        const double disc = std::max(0.0, b * b - 4.0 * a * c);
        const double alpha = (-b + std::sqrt(disc)) / (2.0 * a);
        x = mid + alpha * w;

        bool any_negative = false;
        for (Index i = 0; i < n; ++i)
            if (x(i) < 0.0) {
                any_negative = true;
                break;
            }
        if (!any_negative) return x;

        for (Index i = 0; i < n; ++i)
            if (x(i) < 0.0 && !zeroed[static_cast<std::size_t>(i)]) {
                zeroed[static_cast<std::size_t>(i)] = true;
                x(i) = 0.0;
                --free_count;
            }
        if (free_count <= 1) {
            // one surviving coordinate carries the whole L2 mass
            x.setZero();
            Index best = 0;
            double best_v = -1.0;
            for (Index i = 0; i < n; ++i)
                if (v(i) > best_v) {
                    best_v = v(i);
                    best = i;
                }
            x(best) = l2;
            return x;
        }
        const double shift = (x.sum() - l1) / static_cast<double>(free_count);
        for (Index i = 0; i < n; ++i)
            if (!zeroed[static_cast<std::size_t>(i)]) x(i) -= shift;
    }
    return x.cwiseMax(0.0);
}

}  // namespace sepnmf
