#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gsr/generate.hpp"
#include "gsr/metrics.hpp"
#include "test_helpers.hpp"

using gsr::GenParams;
using gsr::Index;
using gsr::Matrix;
using gsr::Vector;

TEST_CASE("generated columns are unit norm and uncorrelated groups well conditioned",
          "[generate]") {
    const auto inst = gsr::generate_instance(GenParams::make(80, 20, 4, 4, 10.0, 0.0, 0.0, 91));
    for (Index j = 0; j < inst.design.cols(); ++j)
        CHECK(std::abs(inst.design.matrix().col(j).norm() - 1.0) < 1e-12);
    CHECK(inst.design.columns_unit_norm(1e-12));

    for (Index g = 0; g < inst.design.num_groups(); ++g) {
        const Matrix gram = inst.design.group_block(g).transpose() * inst.design.group_block(g);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        const double cond = eig.eigenvalues()(3) / eig.eigenvalues()(0);
        CHECK(cond < 100.0);  // theta = 0: condition number O(1)
    }
}

TEST_CASE("correlated groups have condition numbers of order 1e2", "[generate]") {
    // full experiment-scale geometry with theta = 3
    const auto inst =
        gsr::generate_instance(GenParams::make(800, 500, 1, 4, 10.0, 3.0, 0.0, 92));
    std::vector<double> conds;
    for (Index g = 0; g < inst.design.num_groups(); ++g) {
        const Matrix gram = inst.design.group_block(g).transpose() * inst.design.group_block(g);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        conds.push_back(eig.eigenvalues()(3) / eig.eigenvalues()(0));
    }
    std::sort(conds.begin(), conds.end());
    const double median = conds[conds.size() / 2];
    CHECK(median > 10.0);
    CHECK(median < 1e4);
}

TEST_CASE("noiseless generation and signal invariants", "[generate]") {
    const auto inst = gsr::generate_instance(GenParams::make(30, 10, 3, 4, 7.0, 2.0, 0.0, 93));
    CHECK(inst.noise_norm == 0.0);
    CHECK((inst.y - inst.y_clean).norm() == 0.0);
    CHECK(inst.true_active.count() == 3);

    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    Index nonzeros = 0;
    for (Index i = 0; i < inst.x_true.size(); ++i) {
        const double a = std::abs(inst.x_true[i]);
        if (a == 0.0) continue;
        ++nonzeros;
        min_abs = std::min(min_abs, a);
        max_abs = std::max(max_abs, a);
    }
    CHECK(nonzeros == 3 * 4);
    CHECK(min_abs == 1.0);  // one entry pinned at magnitude exactly 1
    CHECK(max_abs <= 7.0);
    CHECK(gsr::support_groups(inst.design.partition(), inst.x_true) == inst.true_active);
}

TEST_CASE("identical seeds reproduce the instance bit for bit", "[generate]") {
    const auto a = gsr::generate_instance(GenParams::make(20, 8, 2, 3, 5.0, 2.0, 1e-2, 94));
    const auto b = gsr::generate_instance(GenParams::make(20, 8, 2, 3, 5.0, 2.0, 1e-2, 94));
    CHECK((a.design.matrix() - b.design.matrix()).norm() == 0.0);
    CHECK((a.x_true - b.x_true).norm() == 0.0);
    CHECK((a.y - b.y).norm() == 0.0);
    CHECK(a.true_active == b.true_active);

    const auto c = gsr::generate_instance(GenParams::make(20, 8, 2, 3, 5.0, 2.0, 1e-2, 95));
    CHECK((a.y - c.y).norm() > 0.0);
}

TEST_CASE("noise norm concentrates at sigma * sqrt(n)", "[generate][statistical]") {
    const double sigma = 0.5;
    const Index n = 50;
    double mean = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const auto inst = gsr::generate_instance(
            GenParams::make(n, 30, 1, 2, 1.0, 0.0, sigma, 9600 + static_cast<std::uint64_t>(t)));
        mean += inst.noise_norm;
    }
    mean /= trials;
    const double expected = sigma * std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - expected) / expected < 0.05);
}

TEST_CASE("parameter validation", "[generate]") {
    CHECK_THROWS_AS(gsr::generate_instance(GenParams::make(10, 4, 5, 2, 1.0, 0.0, 0.0, 1)),
                    gsr::InvalidArgument);  // T > N
    CHECK_THROWS_AS(gsr::generate_instance(GenParams::make(20, 4, 2, 2, 0.5, 0.0, 0.0, 1)),
                    gsr::InvalidArgument);  // DR < 1
    CHECK_THROWS_AS(gsr::generate_instance(GenParams::make(20, 4, 2, 2, 1.0, -1.0, 0.0, 1)),
                    gsr::InvalidArgument);  // theta < 0
    GenParams bad = GenParams::make(20, 4, 2, 2, 1.0, 0.0, 0.0, 1);
    bad.p = 9;
    CHECK_THROWS_AS(gsr::generate_instance(bad), gsr::InvalidArgument);  // p != N*s
    CHECK_THROWS_AS(gsr::generate_instance(GenParams::make(10, 2, 1, 2, 1.0, 0.0, 0.0, 1)),
                    gsr::InvalidArgument);  // n > p
}

TEST_CASE("recovery metrics", "[generate]") {
    const auto inst = gsr::generate_instance(GenParams::make(20, 8, 2, 3, 5.0, 0.0, 1e-2, 97));

    SECTION("perfect reconstruction") {
        const auto m = gsr::compute_metrics(inst.x_true, inst);
        CHECK(m.relative_error == 0.0);
        CHECK(m.exact_recovery);
        CHECK(std::isinf(m.psnr));
        CHECK(m.residual_norm == Catch::Approx(inst.noise_norm).margin(1e-12));
    }

    SECTION("zero estimate has unit relative error") {
        const auto m = gsr::compute_metrics(Vector::Zero(24), inst);
        CHECK(m.relative_error == 1.0);
        CHECK_FALSE(m.exact_recovery);
    }

    SECTION("formulas match a direct recomputation") {
        gsr::Rng rng(98);
        const Vector x_hat = test_helpers::gaussian_vector(24, rng);
        const auto m = gsr::compute_metrics(x_hat, inst);
        const double err = (x_hat - inst.x_true).norm();
        CHECK(m.relative_error == Catch::Approx(err / inst.x_true.norm()).epsilon(1e-13));
        const double v = x_hat.cwiseAbs().maxCoeff();
        const double mse = err * err / 24.0;
        CHECK(m.psnr == Catch::Approx(10.0 * std::log10(v * v / mse)).epsilon(1e-12));
        CHECK(m.residual_norm ==
              Catch::Approx((inst.design.matrix() * x_hat - inst.y).norm()).epsilon(1e-13));
    }

    SECTION("exact recovery is strict set equality") {
        CHECK(gsr::exact_recovery(gsr::ActiveSet({1, 3}), gsr::ActiveSet({1, 3})));
        CHECK_FALSE(gsr::exact_recovery(gsr::ActiveSet({1, 3, 4}), gsr::ActiveSet({1, 3})));
        CHECK_FALSE(gsr::exact_recovery(gsr::ActiveSet({0}), gsr::ActiveSet({1})));
    }

    SECTION("zero truth degrades to absolute error with a flag") {
        auto zeroed = inst;
        zeroed.x_true.setZero();
        zeroed.true_active = gsr::ActiveSet{};
        gsr::Rng rng(99);
        const Vector x_hat = test_helpers::gaussian_vector(24, rng);
        const auto m = gsr::compute_metrics(x_hat, zeroed);
        CHECK(m.relative_is_absolute);
        CHECK(m.relative_error == Catch::Approx(x_hat.norm()).epsilon(1e-14));
    }
}
