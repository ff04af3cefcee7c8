#include <catch2/catch_amalgamated.hpp>

#include "gsr/design.hpp"
#include "gsr/penalty.hpp"
#include "test_helpers.hpp"

using gsr::GroupPartition;
using gsr::Index;
using gsr::Matrix;
using gsr::Vector;
namespace th = test_helpers;

TEST_CASE("orthonormal group has identity factor", "[design]") {
    gsr::Rng rng(11);
    const Matrix q = th::random_orthogonal(6, rng).leftCols(3);
    const auto design = gsr::prepare_design(q, GroupPartition({3}));
    CHECK((design.factor(0) - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((design.factor_inv(0) - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("duplicated column trips the rank check", "[design]") {
    gsr::Rng rng(12);
    Matrix psi(5, 4);
    psi.leftCols(2) = th::gaussian_matrix(5, 2, rng);
    const Vector c = th::gaussian_vector(5, rng).normalized();
    psi.col(2) = c;
    psi.col(3) = c;
    try {
        gsr::prepare_design(psi, GroupPartition({2, 2}));
        FAIL("expected RankDeficientGroup");
    } catch (const gsr::RankDeficientGroup& e) {
        CHECK(e.group() == 1);
    }
}

TEST_CASE("factor squares back to the group Gram", "[design]") {
    gsr::Rng rng(13);
    // one theta-correlated 10 x 4 group
    const Matrix psi = th::correlated_design_matrix(10, 1, 4, 2.0, rng);
    const auto design = gsr::prepare_design(psi, GroupPartition({4}));
    const Matrix gram = psi.transpose() * psi;
    const Matrix square = design.factor(0) * design.factor(0);
    CHECK((square - gram).norm() / gram.norm() < 1e-10);
    CHECK((design.factor_inv(0) * design.factor(0) - Matrix::Identity(4, 4)).norm() < 1e-10);
    CHECK((design.factor(0) - design.factor(0).transpose()).norm() < 1e-12);
}

TEST_CASE("transforms are identities for orthonormal groups", "[design]") {
    gsr::Rng rng(14);
    const Matrix q = th::random_orthogonal(8, rng).leftCols(6);
    const auto design = gsr::prepare_design(q, GroupPartition({3, 3}));
    const Vector x = th::gaussian_vector(6, rng);
    CHECK((gsr::transform_primal(design, x) - x).norm() < 1e-12);
    CHECK((gsr::transform_dual(design, x) - x).norm() < 1e-12);
}

TEST_CASE("transform of zero is zero and transforms invert each other", "[design]") {
    gsr::Rng rng(15);
    const auto design = th::random_design(12, 3, 3, 1.5, rng);
    CHECK(gsr::transform_primal(design, Vector::Zero(9)).norm() == 0.0);

    const Vector x = th::gaussian_vector(9, rng);
    const Vector back = gsr::transform_dual(design, gsr::transform_primal(design, x));
    CHECK((back - x).norm() / x.norm() < 1e-10);
}

TEST_CASE("whitened group blocks are isometries", "[design]") {
    gsr::Rng rng(16);
    const auto design = th::random_design(15, 4, 3, 3.0, rng);
    for (Index g = 0; g < design.num_groups(); ++g) {
        for (int rep = 0; rep < 5; ++rep) {
            const Vector v = th::gaussian_vector(3, rng);
            const double mapped = (design.group_block(g) * (design.factor_inv(g) * v)).norm();
            CHECK(std::abs(mapped - v.norm()) / v.norm() < 1e-10);
        }
    }
}

TEST_CASE("group count is invariant under nonsingular block transforms", "[design]") {
    gsr::Rng rng(17);
    const GroupPartition part({3, 3, 3, 3});
    Vector x = Vector::Zero(12);
    x.segment(3, 3) = th::gaussian_vector(3, rng);
    x.segment(9, 3) = th::gaussian_vector(3, rng);
    const double count = gsr::group_norm(part, x, 0.0, 2.0);

    std::vector<Matrix> m;
    for (Index g = 0; g < 4; ++g) m.push_back(th::random_conditioned(3, 100.0, rng));
    Vector tx = x;
    for (Index g = 0; g < 4; ++g)
        tx.segment(part.offset(g), 3) = m[static_cast<std::size_t>(g)] * x.segment(part.offset(g), 3);
    CHECK(gsr::group_norm(part, tx, 0.0, 2.0) == count);
}

TEST_CASE("design construction rejects bad shapes", "[design]") {
    gsr::Rng rng(18);
    const Matrix psi = th::gaussian_matrix(6, 4, rng);
    CHECK_THROWS_AS(gsr::prepare_design(psi, GroupPartition({3, 3})),
                    gsr::DimensionMismatch);
    CHECK_THROWS_AS(gsr::prepare_design(th::gaussian_matrix(2, 6, rng), GroupPartition({3, 3})),
                    gsr::InvalidArgument);
    const auto design = gsr::prepare_design(psi, GroupPartition({2, 2}));
    CHECK_THROWS_AS(gsr::transform_primal(design, Vector::Zero(5)), gsr::DimensionMismatch);
}

TEST_CASE("labelled design records the load-time permutation", "[design]") {
    gsr::Rng rng(19);
    const Matrix psi = th::correlated_design_matrix(10, 3, 2, 0.0, rng);
    // interleave the two groups: columns 0,2,4 -> group 0, columns 1,3,5 -> group 1...
    const std::vector<Index> labels{0, 1, 0, 1, 2, 2};
    const auto design = gsr::prepare_design(psi, labels);
    REQUIRE(design.has_permutation());
    CHECK(design.column_permutation() == std::vector<Index>{0, 2, 1, 3, 4, 5});
    CHECK((design.matrix().col(1) - psi.col(2)).norm() == 0.0);

    const Vector x = th::gaussian_vector(6, rng);
    CHECK((design.to_original_order(design.to_internal_order(x)) - x).norm() == 0.0);
}
