#pragma once

// Exterior-algebra combinatorics: multi-indices labeling the wedge basis of
// Lambda^p, creation/annihilation actions with signs, and the 0/1 overlap
// matrices whose Perron eigenvalue has the closed form C(p,p-k)*C(n-p,p-k).
//
// Index values are 1-based (frame vectors v^1..v^n); basis positions are
// 0-based ranks into the lexicographic enumeration, which is the single
// basis-order convention used by every module.

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wzk/errors.hpp"

namespace wzk {

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

// Strictly increasing tuple of integers in 1..n; length p >= 0.
struct MultiIndex {
    std::vector<int> indices;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> ix) : indices(std::move(ix)) {
        for (std::size_t t = 0; t < indices.size(); ++t) {
            if (indices[t] < 1) throw domain_error("MultiIndex entries must be >= 1");
            if (t > 0 && indices[t] <= indices[t - 1])
                throw domain_error("MultiIndex entries must be strictly increasing");
        }
    }

    int length() const { return static_cast<int>(indices.size()); }

    bool contains(int i) const {
        for (int v : indices)
            if (v == i) return true;
        return false;
    }

    std::uint32_t mask() const {
        std::uint32_t m = 0;
        for (int v : indices) m |= (1u << (v - 1));
        return m;
    }

    static MultiIndex from_mask(std::uint32_t m) {
        MultiIndex out;
        for (int v = 1; m != 0; ++v, m >>= 1)
            if (m & 1u) out.indices.push_back(v);
        return out;
    }

    bool operator==(const MultiIndex& o) const { return indices == o.indices; }
    bool operator!=(const MultiIndex& o) const { return indices != o.indices; }
    bool operator<(const MultiIndex& o) const { return indices < o.indices; }
};

// |I ∩ J| as sets. Lengths must agree.
inline int overlap(const MultiIndex& a, const MultiIndex& b) {
    if (a.length() != b.length()) throw domain_error("overlap: multi-index lengths differ");
    return std::popcount(a.mask() & b.mask());
}

enum class Elementary { create, annihilate };

// sign = 0 means the action annihilates the basis element (index absent/present).
struct ElementaryResult {
    int sign = 0;
    std::optional<MultiIndex> index;
};

namespace detail {
// (-1)^{number of indices in `mask` strictly below i}
inline int sign_below(std::uint32_t mask, int i) {
    const std::uint32_t below = mask & ((1u << (i - 1)) - 1u);
    return (std::popcount(below) & 1) ? -1 : 1;
}
}  // namespace detail

// Interior multiplication a^i (annihilate) and its adjoint wedge (a^i)* (create)
// on the wedge basis, with the left-to-right index-counting sign.
inline ElementaryResult apply_elementary(Elementary kind, int i, const MultiIndex& I) {
    if (i < 1) throw domain_error("apply_elementary: index must be >= 1");
    const std::uint32_t m = I.mask();
    const std::uint32_t bit = 1u << (i - 1);
    if (kind == Elementary::annihilate) {
        if (!(m & bit)) return {};
        return {detail::sign_below(m, i), MultiIndex::from_mask(m ^ bit)};
    }
    if (m & bit) return {};
    return {detail::sign_below(m, i), MultiIndex::from_mask(m | bit)};
}

inline ElementaryResult apply_annihilate(int i, const MultiIndex& I) {
    return apply_elementary(Elementary::annihilate, i, I);
}

inline ElementaryResult apply_create(int i, const MultiIndex& I) {
    return apply_elementary(Elementary::create, i, I);
}

// All C(n,p) multi-indices in lexicographic order. This order defines the
// Lambda^p basis indexing used everywhere.
inline std::vector<MultiIndex> enumerate_multiindices(int n, int p) {
    if (p < 0 || p > n) throw domain_error("enumerate_multiindices: need 0 <= p <= n");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(binomial(n, p)));
    std::vector<int> cur(static_cast<std::size_t>(p));
    for (int t = 0; t < p; ++t) cur[static_cast<std::size_t>(t)] = t + 1;
    while (true) {
        MultiIndex mi;
        mi.indices = cur;
        out.push_back(std::move(mi));
        if (p == 0) break;
        // advance to the lexicographic successor
        int t = p - 1;
        while (t >= 0 && cur[static_cast<std::size_t>(t)] == n - (p - 1 - t)) --t;
        if (t < 0) break;
        ++cur[static_cast<std::size_t>(t)];
        for (int s = t + 1; s < p; ++s) cur[static_cast<std::size_t>(s)] = cur[static_cast<std::size_t>(s - 1)] + 1;
    }
    return out;
}

// Lexicographic wedge basis with O(1) rank lookup by bitmask.
class WedgeBasis {
public:
    WedgeBasis(int n, int p) : n_(n), p_(p) {
        if (n < 0 || n > 20) throw domain_error("WedgeBasis: supported dimensions are 0 <= n <= 20");
        if (p < 0 || p > n) throw domain_error("WedgeBasis: need 0 <= p <= n");
        elems_ = enumerate_multiindices(n, p);
        rank_of_mask_.assign(std::size_t{1} << n, -1);
        for (std::size_t r = 0; r < elems_.size(); ++r) rank_of_mask_[elems_[r].mask()] = static_cast<int>(r);
    }

    int n() const { return n_; }
    int p() const { return p_; }
    int size() const { return static_cast<int>(elems_.size()); }
    const MultiIndex& operator[](int r) const { return elems_[static_cast<std::size_t>(r)]; }
    const std::vector<MultiIndex>& elements() const { return elems_; }

    int rank(std::uint32_t mask) const {
        const int r = rank_of_mask_[mask];
        if (r < 0) throw domain_error("WedgeBasis::rank: mask is not a basis element");
        return r;
    }
    int rank(const MultiIndex& I) const { return rank(I.mask()); }

private:
    int n_, p_;
    std::vector<MultiIndex> elems_;
    std::vector<int> rank_of_mask_;
};

// 0/1 matrix on the Lambda^p basis with entry(I,J) = 1 iff |I∩J| = k.
// Every row sums to C(p,p-k)*C(n-p,p-k).
struct OverlapMatrix {
    int n = 0, p = 0, k = 0;
    Eigen::MatrixXd entries;
};

inline OverlapMatrix overlap_matrix(int n, int p, int k) {
    if (!(0 <= k && k <= p && p <= n)) throw domain_error("overlap_matrix: need 0 <= k <= p <= n");
    const WedgeBasis basis(n, p);
    const int N = basis.size();
    OverlapMatrix A{n, p, k, Eigen::MatrixXd::Zero(N, N)};
    std::vector<std::uint32_t> masks(static_cast<std::size_t>(N));
    for (int r = 0; r < N; ++r) masks[static_cast<std::size_t>(r)] = basis[r].mask();
    for (int r = 0; r < N; ++r)
        for (int s = 0; s < N; ++s)
            if (std::popcount(masks[static_cast<std::size_t>(r)] & masks[static_cast<std::size_t>(s)]) == k)
                A.entries(r, s) = 1.0;
    return A;
}

// Largest eigenvalue by power iteration started from the all-ones vector
// (an exact eigenvector: rows sum to a constant), relative tolerance 1e-10.
inline double perron_eigenvalue(const OverlapMatrix& A) {
    const Eigen::MatrixXd& M = A.entries;
    const Eigen::Index N = M.rows();
    if (N == 0) throw domain_error("perron_eigenvalue: empty matrix");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(N) / std::sqrt(static_cast<double>(N));
    double lambda = 0.0;
    constexpr int kMaxIter = 100000;
    constexpr double kRelTol = 1e-10;
    for (int it = 0; it < kMaxIter; ++it) {
        const Eigen::VectorXd y = M * x;
        const double next = x.dot(y);
        const double nrm = y.norm();
        if (nrm == 0.0) return 0.0;  // overlap class is empty
        const bool settled = it > 0 && std::abs(next - lambda) <= kRelTol * std::max(1.0, std::abs(next));
        lambda = next;
        if (settled) return lambda;
        x = y / nrm;
    }
    throw numeric_error("perron_eigenvalue: power iteration did not converge (n=" + std::to_string(A.n) +
                        ", p=" + std::to_string(A.p) + ", k=" + std::to_string(A.k) +
                        ", last estimate " + std::to_string(lambda) + ")");
}

}  // namespace wzk
