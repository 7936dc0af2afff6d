#pragma once

// Finite abstract simplicial complexes, integer boundary matrices with the
// alternating-face signs, and the combinatorial Hodge Laplacians
// L_q = d_q^T d_q + d_{q+1} d_{q+1}^T, where the spectral-gap interlacing
// lambda1^q >= min(lambda1^{q-1}, lambda1^{q+1}) is an exact theorem.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "wzk/errors.hpp"
#include "wzk/rng.hpp"

namespace wzk {

// Downward-closed family of sorted vertex subsets over vertices 1..V.
class SimplicialComplex {
public:
    static SimplicialComplex from_maximal(int vertices, const std::vector<std::vector<int>>& maximal) {
        if (vertices < 1 || vertices > 24) throw domain_error("SimplicialComplex: need 1 <= vertices <= 24");
        SimplicialComplex cx;
        cx.vertices_ = vertices;
        std::vector<bool> present(std::size_t{1} << vertices, false);
        for (const auto& s : maximal) {
            std::uint32_t m = 0;
            for (int v : s) {
                if (v < 1 || v > vertices) throw domain_error("SimplicialComplex: vertex out of range");
                m |= 1u << (v - 1);
            }
            if (m == 0) throw domain_error("SimplicialComplex: empty simplex");
            // close downward over all nonempty subsets
            for (std::uint32_t sub = m; sub != 0; sub = (sub - 1) & m) present[sub] = true;
        }
        for (std::uint32_t m = 1; m < present.size(); ++m) {
            if (!present[m]) continue;
            const int d = std::popcount(m) - 1;
            if (static_cast<int>(cx.by_dim_.size()) <= d) cx.by_dim_.resize(static_cast<std::size_t>(d) + 1);
            cx.by_dim_[static_cast<std::size_t>(d)].push_back(m);
        }
        // masks enumerated in increasing order coincide with lexicographic order
        // of the reversed vertex lists; sort each dimension lexicographically
        for (auto& level : cx.by_dim_)
            std::sort(level.begin(), level.end(), [](std::uint32_t a, std::uint32_t b) {
                return SimplicialComplex::unpack(a) < SimplicialComplex::unpack(b);
            });
        return cx;
    }

    int vertices() const { return vertices_; }
    int dim() const { return static_cast<int>(by_dim_.size()) - 1; }
    int count(int q) const {
        if (q < 0 || q > dim()) return 0;
        return static_cast<int>(by_dim_[static_cast<std::size_t>(q)].size());
    }
    std::vector<int> simplex(int q, int idx) const { return unpack(by_dim_[static_cast<std::size_t>(q)][static_cast<std::size_t>(idx)]); }

    int index_of(int q, std::uint32_t mask) const {
        const auto& level = by_dim_[static_cast<std::size_t>(q)];
        for (std::size_t i = 0; i < level.size(); ++i)
            if (level[i] == mask) return static_cast<int>(i);
        throw domain_error("SimplicialComplex: simplex not present");
    }

    std::uint32_t mask(int q, int idx) const { return by_dim_[static_cast<std::size_t>(q)][static_cast<std::size_t>(idx)]; }

    static std::vector<int> unpack(std::uint32_t m) {
        std::vector<int> out;
        for (int v = 1; m != 0; ++v, m >>= 1)
            if (m & 1u) out.push_back(v);
        return out;
    }

private:
    int vertices_ = 0;
    std::vector<std::vector<std::uint32_t>> by_dim_;
};

// Boundary operator from q-chains to (q-1)-chains with alternating-face signs.
// Exact integer entries. Empty matrix when the complex has no q-simplices.
inline Eigen::MatrixXi boundary_matrix(const SimplicialComplex& cx, int q) {
    if (q < 1) throw domain_error("boundary_matrix: need q >= 1");
    const int cols = cx.count(q), rows = cx.count(q - 1);
    Eigen::MatrixXi B = Eigen::MatrixXi::Zero(rows, cols);
    if (cols == 0) return B;
    std::map<std::uint32_t, int> face_index;
    for (int r = 0; r < rows; ++r) face_index[cx.mask(q - 1, r)] = r;
    for (int c = 0; c < cols; ++c) {
        const std::vector<int> verts = cx.simplex(q, c);
        const std::uint32_t m = cx.mask(q, c);
        for (std::size_t pos = 0; pos < verts.size(); ++pos) {
            const std::uint32_t face = m ^ (1u << (verts[pos] - 1));
            B(face_index.at(face), c) = (pos % 2 == 0) ? 1 : -1;
        }
    }
    return B;
}

// L_q = d_q^T d_q + d_{q+1} d_{q+1}^T; positive semidefinite with kernel of
// dimension equal to the q-th Betti number.
inline Eigen::MatrixXd hodge_laplacian(const SimplicialComplex& cx, int q) {
    const int nq = cx.count(q);
    if (nq == 0) throw domain_error("hodge_laplacian: complex is empty in degree " + std::to_string(q));
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nq, nq);
    if (q >= 1) {
        const Eigen::MatrixXd B = boundary_matrix(cx, q).cast<double>();
        L += B.transpose() * B;
    }
    if (cx.count(q + 1) > 0) {
        const Eigen::MatrixXd B = boundary_matrix(cx, q + 1).cast<double>();
        L += B * B.transpose();
    }
    return L;
}

constexpr double kKernelCutoff = 1e-9;

// Smallest eigenvalue above the kernel cutoff; +infinity when L_q = 0.
inline double spectral_gap(const SimplicialComplex& cx, int q) {
    const Eigen::MatrixXd L = hodge_laplacian(cx, q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("spectral_gap: eigensolver failed");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > kKernelCutoff) return es.eigenvalues()[i];
    return std::numeric_limits<double>::infinity();
}

inline int betti_number(const SimplicialComplex& cx, int q) {
    const Eigen::MatrixXd L = hodge_laplacian(cx, q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("betti_number: eigensolver failed");
    int k = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] <= kKernelCutoff) ++k;
    return k;
}

struct GapReport {
    std::vector<double> lambda1;  // per degree 0..dim
    std::vector<int> betti;
    std::vector<bool> interlacing_ok;
    bool all_ok = true;
};

// lambda1^q >= min(lambda1^{q-1}, lambda1^{q+1}) - 1e-9 in every degree,
// absent neighbors treated as +infinity.
inline GapReport check_interlacing(const SimplicialComplex& cx) {
    GapReport rep;
    const int top = cx.dim();
    for (int q = 0; q <= top; ++q) {
        rep.lambda1.push_back(spectral_gap(cx, q));
        rep.betti.push_back(betti_number(cx, q));
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (int q = 0; q <= top; ++q) {
        const double below = (q - 1 >= 0) ? rep.lambda1[static_cast<std::size_t>(q - 1)] : inf;
        const double above = (q + 1 <= top) ? rep.lambda1[static_cast<std::size_t>(q + 1)] : inf;
        const double floor = std::min(below, above);
        const bool ok = (floor == inf) || rep.lambda1[static_cast<std::size_t>(q)] >= floor - 1e-9;
        rep.interlacing_ok.push_back(ok);
        rep.all_ok = rep.all_ok && ok;
    }
    return rep;
}

// Erdos-Renyi graph on V vertices with edge probability p_edge, completed to
// its clique (flag) complex. Varied Betti profiles across degrees.
inline SimplicialComplex random_clique_complex(int V, double p_edge, RngStream& rng) {
    if (V < 1 || V > 16) throw domain_error("random_clique_complex: need 1 <= V <= 16");
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(V) + 1, 0);
    for (int a = 1; a <= V; ++a)
        for (int b = a + 1; b <= V; ++b)
            if (rng.next_uniform01() < p_edge) {
                adj[static_cast<std::size_t>(a)] |= 1u << (b - 1);
                adj[static_cast<std::size_t>(b)] |= 1u << (a - 1);
            }
    std::vector<std::vector<int>> cliques;
    for (std::uint32_t m = 1; m < (1u << V); ++m) {
        bool is_clique = true;
        for (int v = 1; v <= V && is_clique; ++v)
            if (m & (1u << (v - 1)))
                is_clique = (m & ~(1u << (v - 1)) & ~adj[static_cast<std::size_t>(v)]) == 0;
        if (is_clique) cliques.push_back(SimplicialComplex::unpack(m));
    }
    return SimplicialComplex::from_maximal(V, cliques);
}

}  // namespace wzk
