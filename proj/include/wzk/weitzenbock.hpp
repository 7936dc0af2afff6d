#pragma once

// The Weitzenboeck curvature operator on p-forms as an explicit symmetric
// matrix over the lexicographic wedge basis, assembled from the elementary
// creation/annihilation composition R_ijkl (a^i)* a^j (a^k)* a^l.
//
// The ordering and overall sign are pinned by two identities that the tests
// enforce on every tensor:
//   (A) degree 1 reproduces the Ricci matrix;
//   (B) on a decomposable frame wedge w^1 ^ ... ^ w^p the quadratic form
//       equals the mixed sectional sum  sum_{i<=p<j} K(w^i, w^j).

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "wzk/curvature.hpp"
#include "wzk/errors.hpp"
#include "wzk/multiindex.hpp"

namespace wzk {

// Symmetric matrix of size C(n,p) acting on Lambda^p in the lexicographic basis.
template <typename Scalar>
struct FormOperator {
    int n = 0, p = 0;
    Eigen::MatrixX<Scalar> matrix;

    int size() const { return static_cast<int>(matrix.rows()); }
};

template <typename Scalar>
inline FormOperator<Scalar> assemble(const RiemannTensor<Scalar>& R, int p) {
    const int n = R.dim();
    if (p < 0 || p > n) throw domain_error("assemble: need 0 <= p <= n");
    require_valid(R, "assemble");
    const WedgeBasis basis(n, p);
    const int N = basis.size();
    Eigen::MatrixX<Scalar> M = Eigen::MatrixX<Scalar>::Zero(N, N);

    for (int col = 0; col < N; ++col) {
        const std::uint32_t J = basis[col].mask();
        for (int l = 1; l <= n; ++l) {
            if (!(J & (1u << (l - 1)))) continue;
            const int s4 = detail::sign_below(J, l);
            const std::uint32_t m1 = J ^ (1u << (l - 1));
            for (int k = 1; k <= n; ++k) {
                if (m1 & (1u << (k - 1))) continue;
                const int s3 = detail::sign_below(m1, k);
                const std::uint32_t m2 = m1 | (1u << (k - 1));
                for (int j = 1; j <= n; ++j) {
                    if (!(m2 & (1u << (j - 1)))) continue;
                    const int s2 = detail::sign_below(m2, j);
                    const std::uint32_t m3 = m2 ^ (1u << (j - 1));
                    for (int i = 1; i <= n; ++i) {
                        if (m3 & (1u << (i - 1))) continue;
                        const Scalar r = R(i, j, k, l);
                        if (r == Scalar(0)) continue;
                        const int s1 = detail::sign_below(m3, i);
                        const std::uint32_t m4 = m3 | (1u << (i - 1));
                        M(basis.rank(m4), col) += Scalar(s1 * s2 * s3 * s4) * r;
                    }
                }
            }
        }
    }

    const Scalar scale = std::max<Scalar>(Scalar(1), M.cwiseAbs().maxCoeff());
    const Scalar defect = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (defect > Scalar(1e-12) * scale)
        throw numeric_error("assemble: operator asymmetry defect " + std::to_string(static_cast<double>(defect)) +
                            " exceeds tolerance; assembly is inconsistent");
    FormOperator<Scalar> op{n, p, ((M + M.transpose()) / Scalar(2)).eval()};
    return op;
}

// Unique extension of a symmetric endomorphism S of Lambda^1 to Lambda^p as a
// derivation (one wedge slot at a time): sum_{r,s} S_rs (a^r)* a^s. Its
// eigenvalues are all p-fold sums of eigenvalues of S.
template <typename Scalar>
inline FormOperator<Scalar> derivation_extend(const Eigen::MatrixX<Scalar>& S, int p) {
    const int n = static_cast<int>(S.rows());
    if (S.cols() != n) throw domain_error("derivation_extend: matrix must be square");
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * std::max<Scalar>(Scalar(1), S.cwiseAbs().maxCoeff()))
        throw domain_error("derivation_extend: matrix must be symmetric");
    if (p < 0 || p > n) throw domain_error("derivation_extend: need 0 <= p <= n");
    const WedgeBasis basis(n, p);
    const int N = basis.size();
    Eigen::MatrixX<Scalar> M = Eigen::MatrixX<Scalar>::Zero(N, N);
    for (int col = 0; col < N; ++col) {
        const std::uint32_t J = basis[col].mask();
        for (int s = 1; s <= n; ++s) {
            if (!(J & (1u << (s - 1)))) continue;
            const int sg1 = detail::sign_below(J, s);
            const std::uint32_t m1 = J ^ (1u << (s - 1));
            for (int r = 1; r <= n; ++r) {
                if (m1 & (1u << (r - 1))) continue;
                const int sg2 = detail::sign_below(m1, r);
                const std::uint32_t m2 = m1 | (1u << (r - 1));
                M(basis.rank(m2), col) += Scalar(sg1 * sg2) * S(r - 1, s - 1);
            }
        }
    }
    return FormOperator<Scalar>{n, p, std::move(M)};
}

// h-deformed operator. Degree 1 is Ric - 2*Hess(h); for p > 1 this extends the
// Hessian term as a derivation, which is the natural extension of the degree-1
// formula (the degree-1 case is the only one with a closed-form reference).
template <typename Scalar>
inline FormOperator<Scalar> assemble_h(const RiemannTensor<Scalar>& R, const Eigen::MatrixX<Scalar>& hess_h, int p) {
    FormOperator<Scalar> op = assemble(R, p);
    if (hess_h.rows() != R.dim() || hess_h.cols() != R.dim())
        throw domain_error("assemble_h: Hessian dimension mismatch");
    const FormOperator<Scalar> ext = derivation_extend<Scalar>((Scalar(-2) * hess_h).eval(), p);
    op.matrix += ext.matrix;
    return op;
}

template <typename Scalar>
inline Eigen::VectorX<Scalar> spectrum(const FormOperator<Scalar>& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixX<Scalar>> es(op.matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("spectrum: eigensolver failed");
    return es.eigenvalues();  // ascending
}

template <typename Scalar>
inline Scalar min_eigenvalue(const FormOperator<Scalar>& op) {
    return spectrum(op)[0];
}

template <typename Scalar>
inline Scalar quadratic_form(const FormOperator<Scalar>& op, const Eigen::VectorX<Scalar>& omega) {
    if (omega.size() != op.matrix.rows()) throw domain_error("quadratic_form: coefficient length mismatch");
    return omega.dot(op.matrix * omega);
}

// Coefficients of the decomposable wedge of the first p rows of a frame:
// coeff[I] = det of the p x p minor of rows 1..p and columns I.
template <typename Scalar>
inline Eigen::VectorX<Scalar> decomposable_coefficients(const Frame<Scalar>& F, int p) {
    const int n = F.dim();
    if (p < 0 || p > n) throw domain_error("decomposable_coefficients: need 0 <= p <= n");
    const WedgeBasis basis(n, p);
    Eigen::VectorX<Scalar> out(basis.size());
    Eigen::MatrixX<Scalar> minor(p, p);
    for (int r = 0; r < basis.size(); ++r) {
        const MultiIndex& I = basis[r];
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b) minor(a, b) = F.Q(a, I.indices[static_cast<std::size_t>(b)] - 1);
        out[r] = (p == 0) ? Scalar(1) : Scalar(minor.determinant());
    }
    return out;
}

// Hodge star on the lexicographic bases: v^I -> sign(I, I^c) v^{I^c}, the sign
// of (I, I^c) as a permutation of (1..n). A signed permutation matrix, so
// composing with its transpose gives the identity and star_{n-p} * star_p =
// (-1)^{p(n-p)} * identity.
struct HodgeStar {
    int n = 0, p = 0;
    Eigen::MatrixXd matrix;  // C(n,n-p) x C(n,p), entries +-1
};

inline HodgeStar hodge_star(int n, int p) {
    if (p < 0 || p > n) throw domain_error("hodge_star: need 0 <= p <= n");
    const WedgeBasis from(n, p), to(n, n - p);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(to.size(), from.size());
    const std::uint32_t full = (n == 0) ? 0u : ((n == 32) ? ~0u : ((1u << n) - 1u));
    for (int r = 0; r < from.size(); ++r) {
        const std::uint32_t m = from[r].mask();
        const std::uint32_t mc = full ^ m;
        int inversions = 0;
        for (int a = 1; a <= n; ++a)
            if (m & (1u << (a - 1))) inversions += std::popcount(mc & ((1u << (a - 1)) - 1u));
        M(to.rank(mc), r) = (inversions & 1) ? -1.0 : 1.0;
    }
    return HodgeStar{n, p, std::move(M)};
}

namespace detail {
// Sign of sorting an index sequence (0 if it has duplicates), plus the mask.
inline int wedge_sort_sign(std::vector<int> seq, std::uint32_t& mask_out) {
    int sign = 1;
    for (std::size_t a = 0; a < seq.size(); ++a)
        for (std::size_t b = a + 1; b < seq.size(); ++b) {
            if (seq[a] == seq[b]) return 0;
            if (seq[a] > seq[b]) sign = -sign;
        }
    mask_out = 0;
    for (int v : seq) mask_out |= (1u << (v - 1));
    return sign;
}
}  // namespace detail

// Structural facts about the operator in the wedge basis:
//  - entries between multi-indices sharing fewer than p-2 labels vanish;
//  - the entry between v^i^v^j^v^I and v^k^v^l^v^I (i,j,k,l distinct, not in I)
//    equals 2*R_ijkl.
struct StructureReport {
    double max_far_entry = 0.0;     // |J cap K| < p-2 class
    double max_pair_defect = 0.0;   // deviation from 2*R_ijkl
    bool passes(double tol = 1e-12) const { return max_far_entry <= tol && max_pair_defect <= tol; }
};

template <typename Scalar>
inline StructureReport structure_check(const RiemannTensor<Scalar>& R, int p) {
    const int n = R.dim();
    if (p < 2 || p > n - 2) throw domain_error("structure_check: need 2 <= p <= n-2");
    const FormOperator<Scalar> op = assemble(R, p);
    const WedgeBasis basis(n, p);
    StructureReport rep;

    for (int r = 0; r < basis.size(); ++r)
        for (int s = 0; s < basis.size(); ++s)
            if (std::popcount(basis[r].mask() & basis[s].mask()) < p - 2)
                rep.max_far_entry = std::max(rep.max_far_entry, std::abs(static_cast<double>(op.matrix(r, s))));

    const WedgeBasis inner(n, p - 2);
    for (int t = 0; t < inner.size(); ++t) {
        const MultiIndex& I = inner[t];
        const std::uint32_t im = I.mask();
        for (int i = 1; i <= n; ++i) {
            if (im & (1u << (i - 1))) continue;
            for (int j = 1; j <= n; ++j) {
                if (j == i || (im & (1u << (j - 1)))) continue;
                for (int k = 1; k <= n; ++k) {
                    if (k == i || k == j || (im & (1u << (k - 1)))) continue;
                    for (int l = 1; l <= n; ++l) {
                        if (l == i || l == j || l == k || (im & (1u << (l - 1)))) continue;
                        std::vector<int> rowseq{k, l}, colseq{i, j};
                        rowseq.insert(rowseq.end(), I.indices.begin(), I.indices.end());
                        colseq.insert(colseq.end(), I.indices.begin(), I.indices.end());
                        std::uint32_t rowmask = 0, colmask = 0;
                        const int sr = detail::wedge_sort_sign(rowseq, rowmask);
                        const int sc = detail::wedge_sort_sign(colseq, colmask);
                        const double lhs =
                            sr * sc * static_cast<double>(op.matrix(basis.rank(rowmask), basis.rank(colmask)));
                        const double rhs = 2.0 * static_cast<double>(R(i, j, k, l));
                        rep.max_pair_defect = std::max(rep.max_pair_defect, std::abs(lhs - rhs));
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace wzk
