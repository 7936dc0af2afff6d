#include <doctest.h>

#include <Eigen/Dense>

#include "wzk/multiindex.hpp"

using namespace wzk;

namespace {
MultiIndex mi(std::vector<int> v) { return MultiIndex(std::move(v)); }
}  // namespace

TEST_CASE("enumeration is lexicographic and complete") {
    const auto b42 = enumerate_multiindices(4, 2);
    REQUIRE(b42.size() == 6);
    CHECK(b42[0] == mi({1, 2}));
    CHECK(b42[1] == mi({1, 3}));
    CHECK(b42[2] == mi({1, 4}));
    CHECK(b42[3] == mi({2, 3}));
    CHECK(b42[4] == mi({2, 4}));
    CHECK(b42[5] == mi({3, 4}));

    const auto b30 = enumerate_multiindices(3, 0);
    REQUIRE(b30.size() == 1);
    CHECK(b30[0].length() == 0);

    const auto b55 = enumerate_multiindices(5, 5);
    REQUIRE(b55.size() == 1);
    CHECK(b55[0] == mi({1, 2, 3, 4, 5}));

    CHECK_THROWS_AS(enumerate_multiindices(3, -1), domain_error);
    CHECK_THROWS_AS(enumerate_multiindices(3, 4), domain_error);

    for (int n = 0; n <= 8; ++n)
        for (int p = 0; p <= n; ++p) {
            const auto basis = enumerate_multiindices(n, p);
            CHECK(basis.size() == binomial(n, p));
            for (std::size_t r = 1; r < basis.size(); ++r) CHECK(basis[r - 1] < basis[r]);
        }
}

TEST_CASE("overlap counts shared labels") {
    CHECK(overlap(mi({1, 2, 3}), mi({2, 3, 4})) == 2);
    CHECK(overlap(mi({1, 2}), mi({1, 2})) == 2);
    CHECK(overlap(mi({1, 2}), mi({3, 4})) == 0);
    CHECK_THROWS_AS(overlap(mi({1, 2}), mi({1, 2, 3})), domain_error);
}

TEST_CASE("elementary actions carry the index-counting sign") {
    const auto ann = apply_elementary(Elementary::annihilate, 2, mi({1, 2, 3}));
    CHECK(ann.sign == -1);
    REQUIRE(ann.index.has_value());
    CHECK(*ann.index == mi({1, 3}));

    const auto cre = apply_elementary(Elementary::create, 2, mi({1, 3}));
    CHECK(cre.sign == -1);
    REQUIRE(cre.index.has_value());
    CHECK(*cre.index == mi({1, 2, 3}));

    const auto zero = apply_elementary(Elementary::annihilate, 4, mi({1, 2, 3}));
    CHECK(zero.sign == 0);
    CHECK(!zero.index.has_value());
}

TEST_CASE("create and annihilate are adjoint, and square to zero") {
    for (int n = 2; n <= 6; ++n)
        for (int p = 0; p < n; ++p) {
            const auto lower = enumerate_multiindices(n, p);
            const auto upper = enumerate_multiindices(n, p + 1);
            for (int i = 1; i <= n; ++i) {
                for (const auto& I : lower)
                    for (const auto& J : upper) {
                        // <create(i) v^I, v^J> vs <v^I, annihilate(i) v^J>
                        const auto c = apply_create(i, I);
                        const int lhs = (c.sign != 0 && *c.index == J) ? c.sign : 0;
                        const auto a = apply_annihilate(i, J);
                        const int rhs = (a.sign != 0 && *a.index == I) ? a.sign : 0;
                        CHECK(lhs == rhs);
                    }
                for (const auto& I : lower) {
                    const auto c1 = apply_create(i, I);
                    if (c1.sign != 0) CHECK(apply_create(i, *c1.index).sign == 0);
                    const auto a1 = apply_annihilate(i, I);
                    if (a1.sign != 0) CHECK(apply_annihilate(i, *a1.index).sign == 0);
                }
            }
        }
}

TEST_CASE("overlap matrices: structure and row sums") {
    const auto A321 = overlap_matrix(3, 2, 1);
    REQUIRE(A321.entries.rows() == 3);
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) CHECK(A321.entries(r, s) == (r == s ? 0.0 : 1.0));

    for (int n = 2; n <= 5; ++n)
        for (int p = 0; p <= n; ++p) {
            const auto I = overlap_matrix(n, p, p);
            CHECK(I.entries.isIdentity(0.0));
        }

    // complement pairing: each 2-subset of {1..4} meets exactly its complement
    const auto A420 = overlap_matrix(4, 2, 0);
    const auto basis = enumerate_multiindices(4, 2);
    for (int r = 0; r < 6; ++r)
        for (int s = 0; s < 6; ++s) {
            const bool complement = (basis[static_cast<std::size_t>(r)].mask() ^
                                     basis[static_cast<std::size_t>(s)].mask()) == 0xFu;
            CHECK(A420.entries(r, s) == (complement ? 1.0 : 0.0));
        }

    CHECK_THROWS_AS(overlap_matrix(3, 4, 1), domain_error);
    CHECK_THROWS_AS(overlap_matrix(3, 2, 3), domain_error);

    for (int n = 0; n <= 8; ++n)
        for (int p = 0; p <= n; ++p)
            for (int k = 0; k <= p; ++k) {
                const auto A = overlap_matrix(n, p, k);
                const double expected =
                    static_cast<double>(binomial(p, p - k)) * static_cast<double>(binomial(n - p, p - k));
                CHECK((A.entries - A.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
                const Eigen::VectorXd rowsums = A.entries.rowwise().sum();
                for (Eigen::Index r = 0; r < rowsums.size(); ++r) CHECK(rowsums[r] == expected);
            }
}

TEST_CASE("all-ones vector is an exact eigenvector of every overlap matrix") {
    for (int n = 1; n <= 8; ++n)
        for (int p = 0; p <= n; ++p)
            for (int k = 0; k <= p; ++k) {
                const auto A = overlap_matrix(n, p, k);
                const Eigen::VectorXd ones = Eigen::VectorXd::Ones(A.entries.rows());
                const double r = static_cast<double>(binomial(p, p - k)) * static_cast<double>(binomial(n - p, p - k));
                CHECK((A.entries * ones - r * ones).cwiseAbs().maxCoeff() == 0.0);
            }
}

TEST_CASE("power iteration matches the closed form and an independent eigensolver") {
    const auto A321 = overlap_matrix(3, 2, 1);
    const double lam321 = perron_eigenvalue(A321);
    CHECK(lam321 == doctest::Approx(2.0).epsilon(1e-10));
    // independent route: full symmetric eigendecomposition
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es321(A321.entries);
    CHECK(lam321 == doctest::Approx(es321.eigenvalues().maxCoeff()).epsilon(1e-10));

    const auto A632 = overlap_matrix(6, 3, 2);
    const double lam632 = perron_eigenvalue(A632);
    CHECK(lam632 == doctest::Approx(9.0).epsilon(1e-10));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es632(A632.entries);
    CHECK(lam632 == doctest::Approx(es632.eigenvalues().maxCoeff()).epsilon(1e-10));

    for (int n = 2; n <= 6; ++n) CHECK(perron_eigenvalue(overlap_matrix(n, 2, 2)) == doctest::Approx(1.0));
}

TEST_CASE("perron eigenvalue equals C(p,p-k)*C(n-p,p-k) for all n <= 8") {
    for (int n = 1; n <= 8; ++n)
        for (int p = 0; p <= n; ++p)
            for (int k = 0; k <= p; ++k) {
                const double expected =
                    static_cast<double>(binomial(p, p - k)) * static_cast<double>(binomial(n - p, p - k));
                const double got = perron_eigenvalue(overlap_matrix(n, p, k));
                CHECK(std::abs(got - expected) <= 1e-8);
            }
}
