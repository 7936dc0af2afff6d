#pragma once

// Algebraic curvature tensors at a point, in an implied orthonormal frame.
// Sign convention: on the unit round 2-sphere K(1,2) = -R_1212 = 1, so a
// space form of curvature kappa has R_ijkl = -kappa*(d_ik d_jl - d_il d_jk).
// Tensor indices are 1-based throughout, matching the frame labels v^1..v^n.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "wzk/errors.hpp"
#include "wzk/rng.hpp"

namespace wzk {

template <typename Scalar>
class RiemannTensor {
    static_assert(std::is_floating_point_v<Scalar>);

public:
    explicit RiemannTensor(int n) : n_(n) {
        if (n < 1) throw domain_error("RiemannTensor: dimension must be >= 1");
        const auto nn = static_cast<Eigen::Index>(n);
        store_ = Eigen::VectorX<Scalar>::Zero(nn * nn * nn * nn);
    }

    int dim() const { return n_; }

    Scalar operator()(int i, int j, int k, int l) const { return store_[flat(i, j, k, l)]; }
    Scalar& at(int i, int j, int k, int l) { return store_[flat(i, j, k, l)]; }

    // Writes v to R_ijkl and its full symmetry orbit (both antisymmetries and
    // the pair swap). Used by readers that list only generating entries.
    void set_with_symmetries(int i, int j, int k, int l, Scalar v) {
        at(i, j, k, l) = v;
        at(j, i, k, l) = -v;
        at(i, j, l, k) = -v;
        at(j, i, l, k) = v;
        at(k, l, i, j) = v;
        at(l, k, i, j) = -v;
        at(k, l, j, i) = -v;
        at(l, k, j, i) = v;
    }

    const Eigen::VectorX<Scalar>& raw() const { return store_; }
    Eigen::VectorX<Scalar>& raw() { return store_; }

    bool operator==(const RiemannTensor& o) const { return n_ == o.n_ && store_ == o.store_; }

private:
    Eigen::Index flat(int i, int j, int k, int l) const {
        if (i < 1 || j < 1 || k < 1 || l < 1 || i > n_ || j > n_ || k > n_ || l > n_)
            throw domain_error("RiemannTensor: index out of range");
        const auto n = static_cast<Eigen::Index>(n_);
        return ((static_cast<Eigen::Index>(i - 1) * n + (j - 1)) * n + (k - 1)) * n + (l - 1);
    }

    int n_;
    Eigen::VectorX<Scalar> store_;
};

// Orthonormal frame, rows w^1..w^n expressed in the ambient frame.
template <typename Scalar>
struct Frame {
    Eigen::MatrixX<Scalar> Q;

    int dim() const { return static_cast<int>(Q.rows()); }

    Scalar orthogonality_defect() const {
        const auto n = Q.rows();
        return (Q.transpose() * Q - Eigen::MatrixX<Scalar>::Identity(n, n)).cwiseAbs().maxCoeff();
    }

    static Frame identity(int n) { return Frame{Eigen::MatrixX<Scalar>::Identity(n, n)}; }
};

template <typename Scalar>
inline void require_frame(const Frame<Scalar>& F, const char* who) {
    if (F.Q.rows() != F.Q.cols() || F.orthogonality_defect() > Scalar(1e-10))
        throw domain_error(std::string(who) + ": frame is not orthogonal within 1e-10");
}

// Symmetry defects of a curvature tensor; passes() iff all <= 1e-12.
template <typename Scalar>
struct SymmetryReport {
    Scalar antisymmetry = 0;  // max |R_ijkl + R_jikl|, |R_ijkl + R_ijlk|
    Scalar pair = 0;          // max |R_ijkl - R_klij|
    Scalar bianchi = 0;       // max |R_ijkl + R_jkil + R_kijl|

    bool passes(Scalar tol = Scalar(1e-12)) const {
        return antisymmetry <= tol && pair <= tol && bianchi <= tol;
    }
};

template <typename Scalar>
inline SymmetryReport<Scalar> validate(const RiemannTensor<Scalar>& R) {
    const int n = R.dim();
    SymmetryReport<Scalar> rep;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int l = 1; l <= n; ++l) {
                    const Scalar v = R(i, j, k, l);
                    rep.antisymmetry = std::max(rep.antisymmetry, std::abs(v + R(j, i, k, l)));
                    rep.antisymmetry = std::max(rep.antisymmetry, std::abs(v + R(i, j, l, k)));
                    rep.pair = std::max(rep.pair, std::abs(v - R(k, l, i, j)));
                    rep.bianchi = std::max(rep.bianchi, std::abs(v + R(j, k, i, l) + R(k, i, j, l)));
                }
    return rep;
}

template <typename Scalar>
inline void require_valid(const RiemannTensor<Scalar>& R, const char* who) {
    if (!validate(R).passes()) throw domain_error(std::string(who) + ": tensor fails curvature symmetries");
}

// Space form of sectional curvature kappa.
template <typename Scalar>
inline RiemannTensor<Scalar> constant_curvature(int n, Scalar kappa) {
    if (n < 2) throw domain_error("constant_curvature: dimension must be >= 2");
    RiemannTensor<Scalar> R(n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            if (i == j) continue;
            // R_ijij = -kappa, R_ijji = +kappa; all other components vanish
            R.at(i, j, i, j) = -kappa;
            R.at(i, j, j, i) = kappa;
        }
    return R;
}

// Block-diagonal curvature of a metric product; all mixed components vanish.
template <typename Scalar>
inline RiemannTensor<Scalar> product(const RiemannTensor<Scalar>& R1, const RiemannTensor<Scalar>& R2) {
    const int n1 = R1.dim(), n2 = R2.dim();
    RiemannTensor<Scalar> R(n1 + n2);
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n1; ++j)
            for (int k = 1; k <= n1; ++k)
                for (int l = 1; l <= n1; ++l) R.at(i, j, k, l) = R1(i, j, k, l);
    for (int i = 1; i <= n2; ++i)
        for (int j = 1; j <= n2; ++j)
            for (int k = 1; k <= n2; ++k)
                for (int l = 1; l <= n2; ++l) R.at(n1 + i, n1 + j, n1 + k, n1 + l) = R2(i, j, k, l);
    return R;
}

// Sectional curvature K(u,v) = -R(u,v,u,v) of the plane spanned by an
// orthonormal pair. Callers must normalize; inputs are validated, not fixed.
template <typename Scalar, typename DU, typename DV>
inline Scalar sectional(const RiemannTensor<Scalar>& R, const Eigen::MatrixBase<DU>& u,
                        const Eigen::MatrixBase<DV>& v) {
    const int n = R.dim();
    if (u.size() != n || v.size() != n) throw domain_error("sectional: vector size mismatch");
    constexpr double tol = 1e-10;
    if (std::abs(static_cast<double>(u.norm()) - 1.0) > tol || std::abs(static_cast<double>(v.norm()) - 1.0) > tol ||
        std::abs(static_cast<double>(u.dot(v))) > tol)
        throw domain_error("sectional: (u,v) is not an orthonormal pair within 1e-10");
    Scalar acc = 0;
    for (int i = 1; i <= n; ++i) {
        const Scalar ui = u[i - 1];
        if (ui == Scalar(0)) continue;
        for (int j = 1; j <= n; ++j) {
            const Scalar vj = v[j - 1];
            if (vj == Scalar(0)) continue;
            for (int k = 1; k <= n; ++k) {
                const Scalar uk = u[k - 1];
                if (uk == Scalar(0)) continue;
                for (int l = 1; l <= n; ++l) acc += R(i, j, k, l) * ui * vj * uk * v[l - 1];
            }
        }
    }
    return -acc;
}

// Ricci contraction, sign fixed so that constant_curvature(n,1) gives (n-1)*I;
// equivalently Ric(u,u) is the sum of K(u,e_j) over an orthonormal completion.
template <typename Scalar>
inline Eigen::MatrixX<Scalar> ricci(const RiemannTensor<Scalar>& R) {
    const int n = R.dim();
    Eigen::MatrixX<Scalar> ric = Eigen::MatrixX<Scalar>::Zero(n, n);
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            Scalar s = 0;
            for (int i = 1; i <= n; ++i) s -= R(i, a, i, b);
            ric(a - 1, b - 1) = s;
        }
    return ric;
}

// Sectional-curvature oracle: K on orthonormal pairs of vectors.
template <typename Scalar>
using SectionalOracle = std::function<Scalar(const Eigen::VectorX<Scalar>&, const Eigen::VectorX<Scalar>&)>;

template <typename Scalar>
inline SectionalOracle<Scalar> sectional_oracle(const RiemannTensor<Scalar>& R) {
    return [R](const Eigen::VectorX<Scalar>& u, const Eigen::VectorX<Scalar>& v) { return sectional(R, u, v); };
}

namespace detail {
template <typename Scalar>
inline Eigen::VectorX<Scalar> basis_vector(int n, int i) {
    Eigen::VectorX<Scalar> e = Eigen::VectorX<Scalar>::Zero(n);
    e[i - 1] = Scalar(1);
    return e;
}

// <R(a,b)a,c> for an orthonormal triple, by polarization of sectional values:
// = K(a,c)/2 + K(a,b)/2 - K(a,(c+b)/sqrt2).
template <typename Scalar>
inline Scalar mixed_from_oracle(const SectionalOracle<Scalar>& K, const Eigen::VectorX<Scalar>& a,
                                const Eigen::VectorX<Scalar>& b, const Eigen::VectorX<Scalar>& c) {
    const Eigen::VectorX<Scalar> mid = (c + b) / std::sqrt(Scalar(2));
    return K(a, c) / Scalar(2) + K(a, b) / Scalar(2) - K(a, mid);
}
}  // namespace detail

// R_ijil from sectional curvatures alone: -K(i,j) on the diagonal (j = l),
// otherwise the polarization K(i,l)/2 + K(i,j)/2 - K(i,(l+j)/sqrt2).
template <typename Scalar>
inline Scalar reconstruct_mixed(const SectionalOracle<Scalar>& K, int n, int i, int j, int l) {
    if (i == j || i == l) throw domain_error("reconstruct_mixed: need i distinct from j and l");
    const auto e = [n](int t) { return detail::basis_vector<Scalar>(n, t); };
    if (j == l) return -K(e(i), e(j));
    return detail::mixed_from_oracle(K, e(i), e(j), e(l));
}

// R_ijkl for distinct i,j,k,l from sectional curvatures alone, via the
// difference-vector identity 3R_ijkl = -2R_(i-k)j(i-k)l + 2R_(j-k)i(j-k)l
//                                      + R_ijil + R_kjkl - R_jijl - R_kikl,
// each term evaluated through the polarization above (the difference vectors
// (v^i - v^k)/sqrt2 stay orthonormal to the remaining basis vectors).
template <typename Scalar>
inline Scalar reconstruct_full(const SectionalOracle<Scalar>& K, int n, int i, int j, int k, int l) {
    if (i == j || i == k || i == l || j == k || j == l || k == l)
        throw domain_error("reconstruct_full: indices must be distinct");
    const auto e = [n](int t) { return detail::basis_vector<Scalar>(n, t); };
    const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
    const Eigen::VectorX<Scalar> d_ik = (e(i) - e(k)) * inv_sqrt2;
    const Eigen::VectorX<Scalar> d_jk = (e(j) - e(k)) * inv_sqrt2;
    using detail::mixed_from_oracle;
    const Scalar t1 = mixed_from_oracle(K, d_ik, e(j), e(l));
    const Scalar t2 = mixed_from_oracle(K, d_jk, e(i), e(l));
    const Scalar t3 = mixed_from_oracle(K, e(i), e(j), e(l));
    const Scalar t4 = mixed_from_oracle(K, e(k), e(j), e(l));
    const Scalar t5 = mixed_from_oracle(K, e(j), e(i), e(l));
    const Scalar t6 = mixed_from_oracle(K, e(k), e(i), e(l));
    return (Scalar(-2) * t1 + Scalar(2) * t2 + t3 + t4 - t5 - t6) / Scalar(3);
}

// Curvature-like tensor of a symmetric matrix h:
// R_h(i,j,k,l) = h_il h_jk - h_ik h_jl. These satisfy all the curvature
// symmetries identically and span the algebraic curvature tensors.
template <typename Scalar>
inline RiemannTensor<Scalar> curvature_from_symmetric(const Eigen::MatrixX<Scalar>& h) {
    const int n = static_cast<int>(h.rows());
    RiemannTensor<Scalar> R(n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int l = 1; l <= n; ++l)
                    R.at(i, j, k, l) = h(i - 1, l - 1) * h(j - 1, k - 1) - h(i - 1, k - 1) * h(j - 1, l - 1);
    return R;
}

// Seeded random algebraic curvature tensor: sum of n(n+1)/2 terms c_a * R_{h_a}
// with symmetric h_a and coefficients c_a drawn uniformly from [-1,1].
inline RiemannTensor<double> random_tensor(int n, std::uint64_t seed) {
    if (n < 2) throw domain_error("random_tensor: dimension must be >= 2");
    RngStream rng(seed, 0x52544e53ULL);  // dedicated stream tag for tensor draws
    RiemannTensor<double> R(n);
    const int terms = n * (n + 1) / 2;
    for (int t = 0; t < terms; ++t) {
        Eigen::MatrixXd h(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                const double v = rng.next_uniform(-1.0, 1.0);
                h(a, b) = v;
                h(b, a) = v;
            }
        const double c = rng.next_uniform(-1.0, 1.0);
        const RiemannTensor<double> Rh = curvature_from_symmetric<double>(h);
        R.raw() += c * Rh.raw();
    }
    return R;
}

// Express R in the rotated frame w^a = sum_i Q_ai v^i:
// R'_abcd = Q_ai Q_bj Q_ck Q_dl R_ijkl, contracted one slot at a time.
template <typename Scalar>
inline RiemannTensor<Scalar> rotate(const RiemannTensor<Scalar>& R, const Frame<Scalar>& F) {
    require_frame(F, "rotate");
    const int n = R.dim();
    if (F.dim() != n) throw domain_error("rotate: frame dimension mismatch");
    const Eigen::MatrixX<Scalar>& Q = F.Q;
    const auto idx = [n](int a, int b, int c, int d) {
        return ((static_cast<Eigen::Index>(a) * n + b) * n + c) * n + d;  // 0-based
    };
    Eigen::VectorX<Scalar> cur = R.raw();
    Eigen::VectorX<Scalar> nxt(cur.size());
    // after s contractions the first s slots live in the rotated frame
    for (int slot = 0; slot < 4; ++slot) {
        nxt.setZero();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        // rotate the last slot, then cycle it to the front
                        Scalar s = 0;
                        for (int m = 0; m < n; ++m) s += Q(d, m) * cur[idx(a, b, c, m)];
                        nxt[idx(d, a, b, c)] = s;
                    }
        std::swap(cur, nxt);
    }
    RiemannTensor<Scalar> out(n);
    out.raw() = cur;
    return out;
}

// Haar-ish random orthogonal frame: QR of a Gaussian matrix with the R-diagonal
// sign fix, deterministic in the stream.
inline Frame<double> random_frame(int n, RngStream& rng) {
    Eigen::MatrixXd G(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) G(a, b) = rng.next_normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Rm = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < n; ++c)
        if (Rm(c, c) < 0) Q.col(c) *= -1.0;
    return Frame<double>{Q};
}

}  // namespace wzk
