#pragma once

// Mixed sectional-curvature sums over orthonormal frames, their extremization
// over the orthogonal group, the pinching constant C(n,p), and the worked
// surface-times-sphere product example.
//
// Sigma_p(Q) = sum_{i<=p<j} K(w^i, w^j) for frame rows w. It equals the
// quadratic form of the degree-p curvature operator on the unit decomposable
// w^1 ^ ... ^ w^p, hence depends only on the span of the first p rows.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "wzk/curvature.hpp"
#include "wzk/errors.hpp"
#include "wzk/multiindex.hpp"
#include "wzk/rng.hpp"
#include "wzk/weitzenbock.hpp"

namespace wzk {

template <typename Scalar>
inline Scalar sum_p(const RiemannTensor<Scalar>& R, const Frame<Scalar>& F, int p) {
    const int n = R.dim();
    if (p < 1 || p > n - 1) throw domain_error("sum_p: need 1 <= p <= n-1");
    if (F.dim() != n) throw domain_error("sum_p: frame dimension mismatch");
    require_frame(F, "sum_p");
    Scalar acc = 0;
    for (int i = 0; i < p; ++i)
        for (int j = p; j < n; ++j)
            acc += sectional(R, F.Q.row(i).transpose().eval(), F.Q.row(j).transpose().eval());
    return acc;
}

// Pinching constant
//   C(n,p) = x / (1 + x),  x = p(n-p)/2 + (4/3) C(p,2) C(n-p,2),
// the threshold below which a frame-uniform two-sided bound on Sigma_p forces
// the degree-p curvature operator positive.
inline double pinch_constant(int n, int p) {
    if (p < 2 || p > n - 2) throw domain_error("pinch_constant: need 2 <= p <= n-2");
    const double x = 0.5 * p * (n - p) +
                     (4.0 / 3.0) * static_cast<double>(binomial(p, 2)) * static_cast<double>(binomial(n - p, 2));
    return x / (1.0 + x);
}

// Lower bound on the operator implied by bounds C*A < Sigma_p < A:
//   C*A - [p(n-p)/2 + (4/3) C(p,2) C(n-p,2)] * (A - C*A).
// Vanishes identically when C = pinch_constant(n,p).
inline double pinch_lower_bound(double A, double C, int n, int p) {
    if (!(A > 0.0)) throw domain_error("pinch_lower_bound: need A > 0");
    if (!(C > 0.0 && C <= 1.0)) throw domain_error("pinch_lower_bound: need 0 < C <= 1");
    if (p < 0 || p > n) throw domain_error("pinch_lower_bound: need 0 <= p <= n");
    const double coef = 0.5 * p * (n - p) +
                        (4.0 / 3.0) * static_cast<double>(binomial(p, 2)) * static_cast<double>(binomial(n - p, 2));
    return C * A - coef * (A - C * A);
}

namespace detail {

inline double& tensor_entry(Eigen::VectorXd& t, int n, int i, int j, int k, int l) {
    return t[((static_cast<Eigen::Index>(i - 1) * n + (j - 1)) * n + (k - 1)) * n + (l - 1)];
}
inline double tensor_entry(const Eigen::VectorXd& t, int n, int i, int j, int k, int l) {
    return t[((static_cast<Eigen::Index>(i - 1) * n + (j - 1)) * n + (k - 1)) * n + (l - 1)];
}

inline double sigma_from_rotated(const Eigen::VectorXd& t, int n, int p) {
    double acc = 0.0;
    for (int i = 1; i <= p; ++i)
        for (int j = p + 1; j <= n; ++j) acc -= tensor_entry(t, n, i, j, i, j);
    return acc;
}

// Apply the row rotation (w_a, w_b) -> (c w_a + s w_b, -s w_a + c w_b) to all
// four slots of the rotated-frame tensor.
inline void rotate_plane(Eigen::VectorXd& t, int n, int a, int b, double c, double s) {
    const auto nI = static_cast<Eigen::Index>(n);
    const Eigen::Index strides[4] = {nI * nI * nI, nI * nI, nI, 1};
    for (int slot = 0; slot < 4; ++slot) {
        const Eigen::Index stride = strides[slot];
        // iterate over all positions of the other three slots
        Eigen::Index dims[3], di = 0;
        for (int q = 0; q < 4; ++q)
            if (q != slot) dims[di++] = strides[q];
        for (Eigen::Index x = 0; x < nI; ++x)
            for (Eigen::Index y = 0; y < nI; ++y)
                for (Eigen::Index z = 0; z < nI; ++z) {
                    const Eigen::Index base = x * dims[0] + y * dims[1] + z * dims[2];
                    double& ta = t[base + (a - 1) * stride];
                    double& tb = t[base + (b - 1) * stride];
                    const double va = ta, vb = tb;
                    ta = c * va + s * vb;
                    tb = -s * va + c * vb;
                }
    }
}

// Restriction of Sigma_p to the Givens angle in the mixed plane (a <= p < b).
// A single-harmonic trig polynomial; planes inside {1..p} or {p+1..n} leave
// Sigma_p unchanged and are skipped by the sweeps.
struct PlaneObjective {
    double A1 = 0, A2 = 0, A3 = 0, B1 = 0, B2 = 0, B3 = 0, kab = 0, rest = 0;

    static PlaneObjective make(const Eigen::VectorXd& t, int n, int p, int a, int b, double sigma_now) {
        PlaneObjective o;
        for (int j = p + 1; j <= n; ++j) {
            if (j == b) continue;
            o.A1 += tensor_entry(t, n, a, j, a, j);
            o.A2 += tensor_entry(t, n, a, j, b, j);
            o.A3 += tensor_entry(t, n, b, j, b, j);
        }
        for (int i = 1; i <= p; ++i) {
            if (i == a) continue;
            o.B1 += tensor_entry(t, n, i, a, i, a);
            o.B2 += tensor_entry(t, n, i, a, i, b);
            o.B3 += tensor_entry(t, n, i, b, i, b);
        }
        o.kab = -tensor_entry(t, n, a, b, a, b);
        o.rest = sigma_now - o.eval(0.0);
        return o;
    }

    double eval(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const double head = -(c * c * A1 + 2.0 * c * s * A2 + s * s * A3);
        const double tail = -(s * s * B1 - 2.0 * c * s * B2 + c * c * B3);
        return rest + head + tail + kab;
    }
};

// Coarse bracket on [-pi/2, pi/2], then golden-section to angle tolerance 1e-8.
template <typename F>
inline double golden_minimize(const F& f, double lo, double hi) {
    constexpr int kGrid = 16;
    double best_t = lo, best_v = f(lo);
    for (int g = 1; g <= kGrid; ++g) {
        const double t = lo + (hi - lo) * g / kGrid;
        const double v = f(t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double a = std::max(lo, best_t - (hi - lo) / kGrid);
    double b = std::min(hi, best_t + (hi - lo) / kGrid);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-8) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    const double mid = 0.5 * (a + b);
    return f(mid) <= best_v ? mid : best_t;
}

// Cyclic coordinate descent over mixed Givens planes; dir=+1 minimizes
// Sigma_p, dir=-1 maximizes. Returns the optimized frame.
inline Eigen::MatrixXd givens_descent(const RiemannTensor<double>& R, int p, Eigen::MatrixXd Q, double dir) {
    const int n = R.dim();
    Eigen::VectorXd t = rotate(R, Frame<double>{Q}).raw();
    double sigma = sigma_from_rotated(t, n, p);
    constexpr int kMaxSweeps = 100;
    constexpr double kHalfPi = 1.5707963267948966;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool improved = false;
        for (int a = 1; a <= p; ++a)
            for (int b = p + 1; b <= n; ++b) {
                const PlaneObjective obj = PlaneObjective::make(t, n, p, a, b, sigma);
                const auto f = [&](double th) { return dir * obj.eval(th); };
                const double theta = golden_minimize(f, -kHalfPi, kHalfPi);
                const double cand = obj.eval(theta);
                if (dir * cand < dir * sigma - 1e-13 * (1.0 + std::abs(sigma))) {
                    const double c = std::cos(theta), s = std::sin(theta);
                    rotate_plane(t, n, a, b, c, s);
                    const Eigen::VectorXd qa = Q.row(a - 1), qb = Q.row(b - 1);
                    Q.row(a - 1) = c * qa + s * qb;
                    Q.row(b - 1) = -s * qa + c * qb;
                    sigma = cand;
                    improved = true;
                }
            }
        sigma = sigma_from_rotated(t, n, p);  // absorb line-search drift
        if (!improved) break;
    }
    return Q;
}

}  // namespace detail

struct ExtremizeResult {
    double m = 0.0, M = 0.0;                    // best min / max of Sigma_p found
    Frame<double> witness_min, witness_max;
    double spread_min = 0.0, spread_max = 0.0;  // best-vs-worst across restarts
    int restarts = 0;
};

// Heuristic extremization of Sigma_p over the orthogonal group: random
// starting frames, cyclic Givens coordinate descent with golden-section line
// searches. Deterministic given the seed.
inline ExtremizeResult extremize_sum(const RiemannTensor<double>& R, int p, int restarts, std::uint64_t seed) {
    const int n = R.dim();
    if (restarts < 1) throw domain_error("extremize_sum: need restarts >= 1");
    if (p < 1 || p > n - 1) throw domain_error("extremize_sum: need 1 <= p <= n-1");
    require_valid(R, "extremize_sum");

    ExtremizeResult out;
    out.restarts = restarts;
    double worst_min = 0.0, worst_max = 0.0;
    for (int r = 0; r < restarts; ++r) {
        RngStream rs(seed, static_cast<std::uint64_t>(r));
        const Eigen::MatrixXd Q0 = random_frame(n, rs).Q;

        const Eigen::MatrixXd Qmin = detail::givens_descent(R, p, Q0, +1.0);
        const double vmin = sum_p(R, Frame<double>{Qmin}, p);
        const Eigen::MatrixXd Qmax = detail::givens_descent(R, p, Q0, -1.0);
        const double vmax = sum_p(R, Frame<double>{Qmax}, p);

        if (r == 0 || vmin < out.m) {
            out.m = vmin;
            out.witness_min = Frame<double>{Qmin};
        }
        if (r == 0 || vmax > out.M) {
            out.M = vmax;
            out.witness_max = Frame<double>{Qmax};
        }
        worst_min = (r == 0) ? vmin : std::max(worst_min, vmin);
        worst_max = (r == 0) ? vmax : std::min(worst_max, vmax);
    }
    out.spread_min = worst_min - out.m;
    out.spread_max = out.M - worst_max;
    return out;
}

struct PinchReport {
    int n = 0, p = 0;
    double m = 0.0, M = 0.0;  // extremized Sigma_p
    double C = 0.0;           // pinch_constant(n,p)
    bool pinched = false;
    bool has_interval = false;
    double A_low = 0.0, A_high = 0.0;  // admissible (M, m/C) when pinched
    Frame<double> witness_min, witness_max;
    double spread_min = 0.0, spread_max = 0.0;
    int restarts = 0;
    std::uint64_t seed = 0;
};

// Pinched iff M > 0 and m > C*M, with a relative margin of 1e-9 against
// boundary flapping. When pinched the admissible interval (M, m/C) is nonempty.
inline PinchReport is_pinched(const RiemannTensor<double>& R, int p, int restarts, std::uint64_t seed) {
    PinchReport rep;
    rep.n = R.dim();
    rep.p = p;
    rep.C = pinch_constant(rep.n, p);
    const ExtremizeResult ext = extremize_sum(R, p, restarts, seed);
    rep.m = ext.m;
    rep.M = ext.M;
    rep.witness_min = ext.witness_min;
    rep.witness_max = ext.witness_max;
    rep.spread_min = ext.spread_min;
    rep.spread_max = ext.spread_max;
    rep.restarts = restarts;
    rep.seed = seed;
    rep.pinched = rep.M > 0.0 && (rep.m - rep.C * rep.M) > 1e-9 * std::max(1.0, std::abs(rep.M));
    if (rep.pinched) {
        rep.has_interval = true;
        rep.A_low = rep.M;
        rep.A_high = rep.m / rep.C;
    }
    return rep;
}

// Off-diagonal magnitude bounds implied by B < Sigma_p < A on all frames:
// entries between multi-indices sharing p-1 labels are bounded by (A-B)/2,
// those sharing p-2 labels by (4/3)(A-B), and all farther entries vanish.
struct OffdiagonalBoundsReport {
    double bound_near = 0.0, bound_far = 0.0;
    double worst_near = 0.0, worst_far = 0.0, max_vanishing = 0.0;
    double ratio_near = 0.0, ratio_far = 0.0;
    bool holds = false;
};

template <typename Scalar>
inline OffdiagonalBoundsReport offdiagonal_bounds_check(const RiemannTensor<Scalar>& R, int p, double A, double B) {
    const int n = R.dim();
    if (p < 2 || p > n - 2) throw domain_error("offdiagonal_bounds_check: need 2 <= p <= n-2");
    if (!(A >= B)) throw domain_error("offdiagonal_bounds_check: need A >= B");
    const FormOperator<Scalar> op = assemble(R, p);
    const WedgeBasis basis(n, p);
    OffdiagonalBoundsReport rep;
    rep.bound_near = 0.5 * (A - B);
    rep.bound_far = (4.0 / 3.0) * (A - B);
    for (int r = 0; r < basis.size(); ++r)
        for (int s = 0; s < basis.size(); ++s) {
            if (r == s) continue;
            const int ov = std::popcount(basis[r].mask() & basis[s].mask());
            const double v = std::abs(static_cast<double>(op.matrix(r, s)));
            if (ov == p - 1)
                rep.worst_near = std::max(rep.worst_near, v);
            else if (ov == p - 2)
                rep.worst_far = std::max(rep.worst_far, v);
            else
                rep.max_vanishing = std::max(rep.max_vanishing, v);
        }
    const auto ratio = [](double worst, double bound) {
        if (worst == 0.0) return 0.0;
        return bound > 0.0 ? worst / bound : std::numeric_limits<double>::infinity();
    };
    rep.ratio_near = ratio(rep.worst_near, rep.bound_near);
    rep.ratio_far = ratio(rep.worst_far, rep.bound_far);
    const double tiny = 1e-12 * (1.0 + std::abs(A - B));
    rep.holds = rep.worst_near <= rep.bound_near + tiny && rep.worst_far <= rep.bound_far + tiny &&
                rep.max_vanishing <= tiny;
    return rep;
}

// Right-hand side of the Lawson-Simons-type immersion threshold:
// ||alpha||^2/2 - n|H|^2/2 for second fundamental form alpha and mean
// curvature H. Dimension conventions are the caller's responsibility.
inline double lawson_simons_threshold(double alpha_norm_sq, double mean_curv_norm_sq, int n) {
    if (alpha_norm_sq < 0.0 || mean_curv_norm_sq < 0.0)
        throw domain_error("lawson_simons_threshold: norms must be nonnegative");
    return 0.5 * alpha_norm_sq - 0.5 * n * mean_curv_norm_sq;
}

// Worked example: the product of a surface of constant curvature -a with the
// round 4-sphere. The degree-3 operator is diagonal with entries 4-a (on
// multi-indices containing exactly one surface label) and 3 (otherwise), so
// it is positive exactly when a < 4.
struct ProductExampleReport {
    double a = 0.0;
    int n = 6, p = 3;
    FormOperator<double> r3;
    double max_offdiag = 0.0;
    std::vector<double> diag;
    int count_one_surface = 0;  // entries 4-a; 12 of them
    int count_other = 0;        // entries 3; 8 of them
    double max_classification_defect = 0.0;
    double min_eig = 0.0;
    double positivity_threshold = 4.0;
    bool r3_positive = false;
    std::vector<double> sigma3_samples;
    PinchReport pinch_p2, pinch_p3;
    bool consistent = false;
};

inline ProductExampleReport product_example(double a, int restarts = 8, std::uint64_t seed = 12345) {
    if (!(a > 0.0)) throw domain_error("product_example: need a > 0");
    ProductExampleReport rep;
    rep.a = a;
    const RiemannTensor<double> R = product(constant_curvature<double>(2, -a), constant_curvature<double>(4, 1.0));
    rep.r3 = assemble(R, 3);
    const WedgeBasis basis(6, 3);

    double class_defect = 0.0;
    for (int r = 0; r < basis.size(); ++r) {
        for (int s = 0; s < basis.size(); ++s)
            if (r != s) rep.max_offdiag = std::max(rep.max_offdiag, std::abs(rep.r3.matrix(r, s)));
        const double v = rep.r3.matrix(r, r);
        rep.diag.push_back(v);
        const int surface_labels = std::popcount(basis[r].mask() & 0x3u);
        const double expected = (surface_labels == 1) ? 4.0 - a : 3.0;
        if (surface_labels == 1)
            ++rep.count_one_surface;
        else
            ++rep.count_other;
        class_defect = std::max(class_defect, std::abs(v - expected));
    }
    rep.max_classification_defect = class_defect;
    rep.min_eig = min_eigenvalue(rep.r3);
    rep.r3_positive = rep.min_eig > 1e-12;

    for (int t = 0; t < 16; ++t) {
        RngStream rs(seed, 0xF5A0u + static_cast<std::uint64_t>(t));
        const Frame<double> F = random_frame(6, rs);
        rep.sigma3_samples.push_back(sum_p(R, F, 3));
    }

    rep.pinch_p2 = is_pinched(R, 2, restarts, seed);
    rep.pinch_p3 = is_pinched(R, 3, restarts, seed);

    const double lo = std::min(3.0, 4.0 - a), hi = std::max(3.0, 4.0 - a);
    bool samples_ok = true;
    for (double s : rep.sigma3_samples) samples_ok = samples_ok && (s >= lo - 1e-9 && s <= hi + 1e-9);
    const bool expected_positive = lo > 1e-12;
    rep.consistent = rep.max_offdiag <= 1e-12 && rep.max_classification_defect <= 1e-12 &&
                     rep.count_one_surface == 12 && rep.count_other == 8 &&
                     std::abs(rep.min_eig - lo) <= 1e-10 && samples_ok && rep.r3_positive == expected_positive;
    return rep;
}

}  // namespace wzk
