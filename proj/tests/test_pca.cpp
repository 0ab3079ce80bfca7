#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "sepnmf/errors.hpp"
#include "sepnmf/pca.hpp"
#include "test_support.hpp"

using namespace sepnmf;
using testsupport::random_masked;
using testsupport::random_matrix;

TEST_CASE("mean imputation fills gaps with observed column means") {
    Matrix v(3, 2);
    v << 1, 7,
         0, 7,
         3, 7;
    Mask m(3, 2);
    m << true, true,
         false, true,
         true, true;
    const Matrix filled = mean_impute(MaskedMatrix(v, m));
    CHECK(filled(0, 0) == 1.0);
    CHECK(filled(1, 0) == doctest::Approx(2.0));
    CHECK(filled(2, 0) == 3.0);
    CHECK(filled.col(1).isConstant(7.0));
}

TEST_CASE("mean imputation is the identity on fully observed input") {
    const auto x = random_masked(10, 5, 1.0, 201);
    CHECK(testsupport::bitwise_equal(mean_impute(x), x.values()));
}

TEST_CASE("mean imputation broadcasts a single observed value") {
    Matrix v = Matrix::Zero(4, 1);
    v(2, 0) = 7.0;
    Mask m = Mask::Constant(4, 1, false);
    m(2, 0) = true;
    const Matrix filled = mean_impute(MaskedMatrix(v, m));
    CHECK(filled.col(0).isConstant(7.0));
}

TEST_CASE("mean imputation preserves observed column means and rejects empty columns") {
    const auto x = random_masked(20, 6, 0.6, 202);
    const Matrix filled = mean_impute(x);
    for (Index j = 0; j < 6; ++j) {
        double sum = 0.0;
        Index count = 0;
        for (Index i = 0; i < 20; ++i) {
            if (!x.observed(i, j)) continue;
            sum += x.values()(i, j);
            ++count;
        }
        REQUIRE(count > 0);
        CHECK(filled.col(j).mean() == doctest::Approx(sum / static_cast<double>(count)));
    }

    Mask empty = Mask::Constant(3, 2, true);
    empty.col(1).setConstant(false);
    CHECK_THROWS_AS(mean_impute(MaskedMatrix(Matrix::Ones(3, 2), empty)), EmptyColumnError);
}

TEST_CASE("rank-1 data concentrates all variance in the first component") {
    Matrix x(2, 2);
    x << 1, 1,
         -1, -1;
    const auto model = fit_pca(x);
    CHECK(model.explained_variance_ratio(0) == doctest::Approx(1.0));
    CHECK(model.explained_variance_ratio(1) == doctest::Approx(0.0));
}

TEST_CASE("isotropic cross splits variance evenly") {
    Matrix x(4, 2);
    x << 2, 0,
         -2, 0,
         0, 2,
         0, -2;
    const auto model = fit_pca(x);
    CHECK(model.explained_variance_ratio(0) == doctest::Approx(0.5));
    CHECK(model.explained_variance_ratio(1) == doctest::Approx(0.5));
}

TEST_CASE("variance ratios match the SVD of the centered matrix") {
    const Matrix x = random_matrix(100, 10, 203, 0.0, 100.0);
    const auto model = fit_pca(x);

    const Matrix centered = x.rowwise() - x.colwise().mean();
    Eigen::JacobiSVD<Matrix> svd(centered);
    const Vector sigma = svd.singularValues();
    const double total = sigma.array().square().sum();
    for (Index k = 0; k < 10; ++k) {
        CHECK(std::abs(model.explained_variance_ratio(k) -
                       sigma(k) * sigma(k) / total) <= 1e-8);
    }
}

TEST_CASE("components are orthonormal and ratios well formed") {
    const Matrix x = random_matrix(60, 8, 204, 0.0, 100.0);
    const auto model = fit_pca(x);
    const Matrix gram = model.components.transpose() * model.components;
    CHECK((gram - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-8);
    for (Index k = 1; k < 8; ++k) {
        CHECK(model.explained_variance_ratio(k) <=
              model.explained_variance_ratio(k - 1) + 1e-12);
        CHECK(model.cumulative_ratio(k) >= model.cumulative_ratio(k - 1) - 1e-12);
    }
    CHECK(model.explained_variance_ratio.minCoeff() >= 0.0);
    CHECK(std::abs(model.cumulative_ratio(7) - 1.0) <= 1e-9);
}

TEST_CASE("variance ratios are invariant under row permutation") {
    const Matrix x = random_matrix(30, 5, 205, 0.0, 10.0);
    Matrix permuted(30, 5);
    for (Index i = 0; i < 30; ++i) permuted.row((i * 7) % 30) = x.row(i);
    const auto a = fit_pca(x);
    const auto b = fit_pca(permuted);
    CHECK((a.explained_variance_ratio - b.explained_variance_ratio).cwiseAbs().maxCoeff() <=
          1e-9);
}

TEST_CASE("constant matrices are degenerate") {
    CHECK_THROWS_AS(fit_pca(Matrix::Constant(5, 3, 4.0)), DegenerateInputError);
    CHECK_THROWS_AS(fit_pca(Matrix::Zero(1, 3)), InvalidInputError);
}

TEST_CASE("standardized fit ignores per-column scale") {
    const Matrix x = random_matrix(40, 4, 206, 0.0, 1.0);
    Matrix rescaled = x;
    rescaled.col(0) *= 1000.0;
    rescaled.col(2) *= 0.001;
    const auto a = fit_pca(x, true);
    const auto b = fit_pca(rescaled, true);
    CHECK((a.explained_variance_ratio - b.explained_variance_ratio).cwiseAbs().maxCoeff() <=
          1e-9);
}

TEST_CASE("component count needed to reach a variance threshold") {
    Matrix x(2, 2);
    x << 1, 1,
         -1, -1;
    const auto rank1 = fit_pca(x);
    CHECK(components_needed(rank1, 0.9) == 1);

    PcaModel model;
    model.explained_variance_ratio = Vector(3);
    model.explained_variance_ratio << 0.5, 0.3, 0.2;
    model.cumulative_ratio = Vector(3);
    model.cumulative_ratio << 0.5, 0.8, 1.0;
    CHECK(components_needed(model, 0.8) == 2);
    CHECK(components_needed(model, 0.81) == 3);
    CHECK(components_needed(model, 1.0) == 3);

    CHECK_THROWS_AS(components_needed(model, 0.0), InvalidInputError);
    CHECK_THROWS_AS(components_needed(model, 1.5), InvalidInputError);
}

TEST_CASE("signed coefficient profile sorts and counts significant loadings") {
    PcaModel model;
    model.components = Matrix(3, 2);
    model.components << 0.8, 1.0,
                        -0.6, 0.01,
                        0.0, 0.01;
    model.explained_variance_ratio = Vector::Constant(2, 0.5);
    model.cumulative_ratio = Vector(2);
    model.cumulative_ratio << 0.5, 1.0;

    const auto profile = signed_coefficient_profile(model, 2);
    REQUIRE(profile.sorted_coefficients.size() == 2);
    Vector expected(3);
    expected << 0.8, 0.0, -0.6;
    CHECK((profile.sorted_coefficients[0] - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(profile.significant_counts[0] == 2);
    CHECK(profile.significant_counts[1] == 1);

    CHECK_THROWS_AS(signed_coefficient_profile(model, 0), InvalidInputError);
    CHECK_THROWS_AS(signed_coefficient_profile(model, 3), InvalidInputError);
}

TEST_CASE("significance counts match a direct recount") {
    const Matrix x = random_matrix(50, 6, 207, 0.0, 100.0);
    const auto model = fit_pca(x);
    const auto profile = signed_coefficient_profile(model, 6);
    for (Index k = 0; k < 6; ++k) {
        const double cutoff = 0.1 * model.components.col(k).cwiseAbs().maxCoeff();
        int count = 0;
        for (Index j = 0; j < 6; ++j) {
            if (std::abs(model.components(j, k)) > cutoff) ++count;
        }
        CHECK(profile.significant_counts[static_cast<std::size_t>(k)] == count);
        const Vector& sorted = profile.sorted_coefficients[static_cast<std::size_t>(k)];
        for (Index j = 1; j < sorted.size(); ++j) CHECK(sorted(j) <= sorted(j - 1));
    }
}

TEST_CASE("largest-magnitude coefficient of each component is positive") {
    const Matrix x = random_matrix(30, 5, 208, 0.0, 50.0);
    const auto model = fit_pca(x);
    for (Index k = 0; k < 5; ++k) {
        Index arg = 0;
        model.components.col(k).cwiseAbs().maxCoeff(&arg);
        CHECK(model.components(arg, k) > 0.0);
    }
}
