#include <doctest.h>

#include <Eigen/Dense>

#include "wzk/curvature.hpp"
#include "wzk/rng.hpp"

using namespace wzk;

namespace {
Eigen::VectorXd unit(int n, int i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i - 1] = 1.0;
    return e;
}
}  // namespace

TEST_CASE("space forms carry the pinned sign convention") {
    const auto S2 = constant_curvature<double>(2, 1.0);
    CHECK(S2(1, 2, 1, 2) == -1.0);  // K(1,2) = -R_1212 = 1
    const double a = 0.7;
    const auto H2 = constant_curvature<double>(2, -a);
    CHECK(H2(1, 2, 1, 2) == a);
    const auto flat = constant_curvature<double>(5, 0.0);
    CHECK(flat.raw().cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(constant_curvature<double>(1, 1.0), domain_error);
}

TEST_CASE("validate reports symmetry defects") {
    const auto rep = validate(constant_curvature<double>(4, 1.0));
    CHECK(rep.antisymmetry == 0.0);
    CHECK(rep.pair == 0.0);
    CHECK(rep.bianchi == 0.0);
    CHECK(rep.passes());

    auto broken = constant_curvature<double>(3, 1.0);
    broken.at(1, 2, 1, 3) = 0.25;  // orbit not completed: pair swap missing
    const auto rep2 = validate(broken);
    CHECK(rep2.pair > 0.0);
    CHECK(!rep2.passes());

    const auto P = product(constant_curvature<double>(2, -1.0), constant_curvature<double>(4, 1.0));
    CHECK(validate(P).passes());
}

TEST_CASE("product curvature is block diagonal") {
    const auto P = product(constant_curvature<double>(2, -1.0), constant_curvature<double>(4, 1.0));
    CHECK(P.dim() == 6);
    CHECK(P(1, 2, 1, 2) == 1.0);   // surface of curvature -1
    CHECK(P(3, 4, 3, 4) == -1.0);  // unit sphere factor
    CHECK(P(1, 3, 1, 4) == 0.0);   // mixed components vanish
    const auto F = product(constant_curvature<double>(2, 0.0), constant_curvature<double>(3, 0.0));
    CHECK(F.raw().cwiseAbs().maxCoeff() == 0.0);
    CHECK(sectional(P, unit(6, 1), unit(6, 3)) == 0.0);
}

TEST_CASE("sectional curvature of space forms is constant over random planes") {
    const double kappa = 0.37;
    const auto R = constant_curvature<double>(5, kappa);
    RngStream rng(99, 0);
    for (int t = 0; t < 1000; ++t) {
        const Frame<double> F = random_frame(5, rng);
        const Eigen::VectorXd u = F.Q.row(0), v = F.Q.row(1);
        CHECK(std::abs(sectional(R, u, v) - kappa) <= 1e-12);
    }
    CHECK_THROWS_AS(sectional(R, unit(5, 1), (2.0 * unit(5, 2)).eval()), domain_error);
    CHECK_THROWS_AS(sectional(R, unit(5, 1), unit(5, 1)), domain_error);
}

TEST_CASE("sectional curvature on the product's diagonal sphere plane") {
    const auto P = product(constant_curvature<double>(2, -1.0), constant_curvature<double>(4, 1.0));
    const Eigen::VectorXd u = ((unit(6, 3) + unit(6, 4)) / std::sqrt(2.0)).eval();
    CHECK(sectional(P, u, unit(6, 5)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ricci contraction") {
    const auto R = constant_curvature<double>(4, 1.0);
    CHECK((ricci(R) - 3.0 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    const auto zero = constant_curvature<double>(3, 0.0);
    CHECK(ricci(zero).cwiseAbs().maxCoeff() == 0.0);
    const auto P = product(constant_curvature<double>(2, -1.0), constant_curvature<double>(4, 1.0));
    Eigen::VectorXd d(6);
    d << -1, -1, 3, 3, 3, 3;
    CHECK((ricci(P) - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mixed-component reconstruction from sectional curvatures") {
    const double kappa = 1.3;
    const auto R = constant_curvature<double>(4, kappa);
    const auto K = sectional_oracle(R);
    CHECK(std::abs(reconstruct_mixed(K, 4, 1, 2, 3)) <= 1e-12);
    CHECK(reconstruct_mixed(K, 4, 1, 2, 2) == doctest::Approx(-kappa).epsilon(1e-12));
    CHECK_THROWS_AS(reconstruct_mixed(K, 4, 1, 1, 2), domain_error);

    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const int n = 3 + static_cast<int>(seed % 4);  // 3..6
        const auto T = random_tensor(n, seed);
        const auto KT = sectional_oracle(T);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int l = 1; l <= n; ++l) {
                    if (i == j || i == l) continue;
                    const double got = reconstruct_mixed(KT, n, i, j, l);
                    CHECK(std::abs(got - T(i, j, i, l)) <= 1e-12);
                }
    }
}

TEST_CASE("full reconstruction from sectional curvatures") {
    const auto S = constant_curvature<double>(5, 0.8);
    const auto KS = sectional_oracle(S);
    CHECK(std::abs(reconstruct_full(KS, 5, 1, 2, 3, 4)) <= 1e-12);
    CHECK_THROWS_AS(reconstruct_full(KS, 5, 1, 1, 3, 4), domain_error);

    const auto P = product(constant_curvature<double>(2, -0.5), constant_curvature<double>(4, 1.0));
    const auto KP = sectional_oracle(P);
    CHECK(std::abs(reconstruct_full(KP, 6, 3, 4, 5, 6)) <= 1e-12);

    for (std::uint64_t seed = 200; seed < 300; ++seed) {
        const int n = 4 + static_cast<int>(seed % 3);  // 4..6
        const auto T = random_tensor(n, seed);
        const auto KT = sectional_oracle(T);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int l = k + 1; l <= n; ++l) {
                        if (k == i || k == j || l == i || l == j) continue;
                        const double got = reconstruct_full(KT, n, i, j, k, l);
                        CHECK(std::abs(got - T(i, j, k, l)) <= 1e-10);
                    }
    }
}

TEST_CASE("random tensors satisfy the symmetries identically and are reproducible") {
    for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
        const auto R = random_tensor(6, seed);
        const auto rep = validate(R);
        CHECK(rep.antisymmetry <= 1e-12);
        CHECK(rep.pair <= 1e-12);
        CHECK(rep.bianchi <= 1e-12);
    }
    const auto A = random_tensor(5, 123);
    const auto B = random_tensor(5, 123);
    CHECK(A == B);  // bitwise
    const auto C = random_tensor(5, 124);
    CHECK(!(A == C));
}

TEST_CASE("the generator tensor of the identity matrix is the unit space form") {
    for (int n = 2; n <= 5; ++n) {
        const auto Rh = curvature_from_symmetric<double>(Eigen::MatrixXd::Identity(n, n));
        const auto S = constant_curvature<double>(n, 1.0);
        CHECK((Rh.raw() - S.raw()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("rotation: identity, isotropy, and ricci conjugation") {
    const auto R = random_tensor(5, 9);
    const auto Rid = rotate(R, Frame<double>::identity(5));
    CHECK((Rid.raw() - R.raw()).cwiseAbs().maxCoeff() == 0.0);

    RngStream rng(5, 0);
    const auto S = constant_curvature<double>(5, -0.4);
    for (int t = 0; t < 5; ++t) {
        const Frame<double> F = random_frame(5, rng);
        const auto S2 = rotate(S, F);
        CHECK((S2.raw() - S.raw()).cwiseAbs().maxCoeff() <= 1e-12);
    }

    for (int t = 0; t < 10; ++t) {
        const Frame<double> F = random_frame(5, rng);
        const auto RR = rotate(R, F);
        const Eigen::MatrixXd lhs = ricci(RR);
        const Eigen::MatrixXd rhs = F.Q * ricci(R) * F.Q.transpose();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(validate(RR).passes(1e-11));
    }

    Frame<double> bad{Eigen::MatrixXd::Ones(5, 5)};
    CHECK_THROWS_AS(rotate(R, bad), domain_error);
}
