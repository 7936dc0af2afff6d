#pragma once

// Brownian motion on flat tori, round unit spheres, and their products;
// seeded Feynman-Kac estimation of E exp(-1/2 int_0^t f(x_s) ds); exponential
// decay-rate fits (strong stochastic positivity); the time integral of the
// functional; and the damped parallel flow on p-forms dominated by it.
//
// Generator convention: the reference heat semigroup is exp(-t/2 * Laplacian),
// so increments have variance dt per tangent coordinate (NOT dt/2). A factor-2
// slip here would silently corrupt every fitted rate.
//
// Reproducibility: path i draws from the counter-based stream (seed, i), and
// reductions accumulate fixed 64-path chunks combined in chunk order, so
// results are bitwise independent of the number of worker threads.

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "wzk/curvature.hpp"
#include "wzk/errors.hpp"
#include "wzk/weitzenbock.hpp"

namespace wzk {

struct ModelManifold {
    struct Factor {
        enum class Kind { torus, sphere };
        Kind kind = Kind::torus;
        int dim = 0;        // intrinsic dimension
        double side = 0.0;  // torus circumference per coordinate
    };
    std::vector<Factor> factors;

    static ModelManifold torus(int n, double side) {
        if (n < 1 || !(side > 0.0)) throw domain_error("ModelManifold::torus: need n >= 1 and side > 0");
        return ModelManifold{{Factor{Factor::Kind::torus, n, side}}};
    }
    static ModelManifold sphere(int n) {
        if (n < 1) throw domain_error("ModelManifold::sphere: need n >= 1");
        return ModelManifold{{Factor{Factor::Kind::sphere, n, 0.0}}};
    }
    static ModelManifold product(const std::vector<ModelManifold>& parts) {
        if (parts.empty()) throw domain_error("ModelManifold::product: need at least one factor");
        ModelManifold out;
        for (const auto& m : parts)
            for (const auto& f : m.factors) out.factors.push_back(f);
        return out;
    }

    int dimension() const {
        int d = 0;
        for (const auto& f : factors) d += f.dim;
        return d;
    }
    int coord_size() const {
        int c = 0;
        for (const auto& f : factors) c += (f.kind == Factor::Kind::torus) ? f.dim : f.dim + 1;
        return c;
    }

    Eigen::VectorXd default_start() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(coord_size());
        int off = 0;
        for (const auto& f : factors) {
            if (f.kind == Factor::Kind::sphere) x[off + f.dim] = 1.0;  // pole
            off += (f.kind == Factor::Kind::torus) ? f.dim : f.dim + 1;
        }
        return x;
    }

    void check_start(const Eigen::VectorXd& x) const {
        if (x.size() != coord_size()) throw domain_error("start point has the wrong coordinate size");
        int off = 0;
        for (const auto& f : factors) {
            const int width = (f.kind == Factor::Kind::torus) ? f.dim : f.dim + 1;
            if (f.kind == Factor::Kind::sphere) {
                const double nrm = x.segment(off, width).norm();
                if (std::abs(nrm - 1.0) > 1e-9)
                    throw domain_error("sphere start coordinates must be a unit vector");
            }
            off += width;
        }
    }

    // One step: Gaussian increments of variance dt per tangent coordinate;
    // sphere factors take the tangential step through the exact exponential map.
    void step(Eigen::VectorXd& x, double dt, RngStream& rng) const {
        const double sd = std::sqrt(dt);
        int off = 0;
        for (const auto& f : factors) {
            if (f.kind == Factor::Kind::torus) {
                for (int c = 0; c < f.dim; ++c) {
                    double v = std::fmod(x[off + c] + sd * rng.next_normal(), f.side);
                    if (v < 0.0) v += f.side;
                    x[off + c] = v;
                }
                off += f.dim;
            } else {
                const int width = f.dim + 1;
                Eigen::VectorXd g(width);
                for (int c = 0; c < width; ++c) g[c] = sd * rng.next_normal();
                auto xs = x.segment(off, width);
                Eigen::VectorXd v = g - g.dot(xs) * xs;
                const double r = v.norm();
                if (r > 0.0) {
                    const Eigen::VectorXd moved = std::cos(r) * xs + std::sin(r) * (v / r);
                    xs = moved / moved.norm();
                }
                off += width;
            }
        }
    }

    // Geodesic midpoint of one step segment, factor by factor.
    Eigen::VectorXd midpoint(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1) const {
        Eigen::VectorXd mid(x0.size());
        int off = 0;
        for (const auto& f : factors) {
            if (f.kind == Factor::Kind::torus) {
                for (int c = 0; c < f.dim; ++c) {
                    double d = std::fmod(x1[off + c] - x0[off + c], f.side);
                    if (d > 0.5 * f.side) d -= f.side;
                    if (d < -0.5 * f.side) d += f.side;
                    double v = std::fmod(x0[off + c] + 0.5 * d, f.side);
                    if (v < 0.0) v += f.side;
                    mid[off + c] = v;
                }
                off += f.dim;
            } else {
                const int width = f.dim + 1;
                Eigen::VectorXd m = x0.segment(off, width) + x1.segment(off, width);
                const double nrm = m.norm();
                mid.segment(off, width) = (nrm > 1e-12) ? (m / nrm).eval() : x0.segment(off, width).eval();
                off += width;
            }
        }
        return mid;
    }
};

struct PathSample {
    Eigen::VectorXd times;   // 0, dt, ..., K*dt
    Eigen::MatrixXd points;  // (K+1) x coord_size
    double dt = 0.0;
};

inline long grid_steps(double T, double dt) {
    if (!(dt > 0.0)) throw domain_error("need dt > 0");
    if (T < dt) throw domain_error("need T >= dt");
    return std::max<long>(1, std::lround(T / dt));
}

inline PathSample simulate_bm(const ModelManifold& model, const Eigen::VectorXd& x0, double T, double dt,
                              RngStream rng) {
    const long K = grid_steps(T, dt);
    model.check_start(x0);
    PathSample path;
    path.dt = dt;
    path.times.resize(K + 1);
    for (long k = 0; k <= K; ++k) path.times[k] = static_cast<double>(k) * dt;
    path.points.resize(K + 1, model.coord_size());
    Eigen::VectorXd x = x0;
    path.points.row(0) = x.transpose();
    for (long k = 1; k <= K; ++k) {
        model.step(x, dt, rng);
        path.points.row(k) = x.transpose();
    }
    return path;
}

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

inline ScalarField constant_field(double c) {
    return [c](const Eigen::VectorXd&) { return c; };
}

// offset + <coeffs, x> over the ambient coordinates
inline ScalarField affine_field(double offset, Eigen::VectorXd coeffs) {
    return [offset, coeffs = std::move(coeffs)](const Eigen::VectorXd& x) {
        if (x.size() != coeffs.size()) throw domain_error("affine field: coordinate size mismatch");
        return offset + coeffs.dot(x);
    };
}

inline int default_thread_count() {
    if (const char* env = std::getenv("WZK_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return std::min(v, 64);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(8u, std::max(1u, hw)));
}

namespace detail {

// Chunked Welford/Chan accumulation; merged result independent of thread layout.
struct Welford {
    long count = 0;
    Eigen::VectorXd mean, m2;

    explicit Welford(Eigen::Index s = 0) : mean(Eigen::VectorXd::Zero(s)), m2(Eigen::VectorXd::Zero(s)) {}

    void add(const Eigen::VectorXd& x) {
        ++count;
        const Eigen::VectorXd delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta.cwiseProduct(x - mean);
    }

    void merge(const Welford& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
        const Eigen::VectorXd delta = o.mean - mean;
        const double nt = na + nb;
        mean += delta * (nb / nt);
        m2 += o.m2 + delta.cwiseProduct(delta) * (na * nb / nt);
        count += o.count;
    }

    Eigen::VectorXd stderr_() const {
        if (count < 2) return Eigen::VectorXd::Zero(mean.size());
        const double n = static_cast<double>(count);
        return (m2 / (n - 1.0)).cwiseMax(0.0).cwiseSqrt() / std::sqrt(n);
    }
};

constexpr long kChunk = 64;

// Per-path outputs: exp(-1/2 int f) at the checkpoint steps, optionally
// followed by the trapezoid time integral of that functional over the grid.
inline Welford run_fk_paths(const ModelManifold& model, const ScalarField& f, const Eigen::VectorXd& x0, long K,
                            double dt, long N, std::uint64_t seed, const std::vector<long>& checkpoint_steps,
                            bool with_time_integral, int threads) {
    model.check_start(x0);
    const Eigen::Index S = static_cast<Eigen::Index>(checkpoint_steps.size()) + (with_time_integral ? 1 : 0);
    const long nchunks = (N + kChunk - 1) / kChunk;

    const auto process_chunk = [&](long c) {
        Welford acc(S);
        Eigen::VectorXd out(S);
        const long lo = c * kChunk, hi = std::min(N, lo + kChunk);
        for (long i = lo; i < hi; ++i) {
            RngStream rng(seed, static_cast<std::uint64_t>(i));
            Eigen::VectorXd x = x0;
            double integral = 0.0;   // int_0^t f
            double time_int = 0.0;   // int_0^t exp(-1/2 int f)
            double f_prev = f(x);
            double y_prev = 1.0;
            std::size_t ci = 0;
            while (ci < checkpoint_steps.size() && checkpoint_steps[ci] == 0) {
                out[static_cast<Eigen::Index>(ci)] = 1.0;
                ++ci;
            }
            for (long k = 1; k <= K; ++k) {
                model.step(x, dt, rng);
                const double f_cur = f(x);
                integral += 0.5 * dt * (f_prev + f_cur);
                f_prev = f_cur;
                const double y = std::exp(-0.5 * integral);
                time_int += 0.5 * dt * (y_prev + y);
                y_prev = y;
                while (ci < checkpoint_steps.size() && checkpoint_steps[ci] == k) {
                    out[static_cast<Eigen::Index>(ci)] = y;
                    ++ci;
                }
            }
            if (with_time_integral) out[S - 1] = time_int;
            acc.add(out);
        }
        return acc;
    };

    std::vector<Welford> chunks(static_cast<std::size_t>(nchunks));
    const int nthreads = std::max(1, std::min<long>(threads, nchunks));
    if (nthreads <= 1) {
        for (long c = 0; c < nchunks; ++c) chunks[static_cast<std::size_t>(c)] = process_chunk(c);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&] {
                for (long c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1))
                    chunks[static_cast<std::size_t>(c)] = process_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    Welford total(S);
    for (const auto& ch : chunks) total.merge(ch);
    return total;
}

inline std::vector<long> rate_fit_steps(long K) {
    // checkpoints at T/2, 5T/8, 6T/8, 7T/8, T
    std::vector<long> steps;
    for (int j = 4; j <= 8; ++j) steps.push_back(std::lround(static_cast<double>(K) * j / 8.0));
    return steps;
}

}  // namespace detail

struct FkEstimate {
    double mean = 0.0;
    double se = 0.0;
};

// Monte Carlo estimate of E exp(-1/2 int_0^T f(x_s) ds), trapezoid in time.
inline FkEstimate feynman_kac(const ModelManifold& model, const ScalarField& f, const Eigen::VectorXd& x0, double T,
                              double dt, long N, std::uint64_t seed, int threads = -1) {
    if (N < 2) throw domain_error("feynman_kac: need N >= 2");
    const long K = grid_steps(T, dt);
    if (threads < 0) threads = default_thread_count();
    const auto w = detail::run_fk_paths(model, f, x0, K, dt, N, seed, {K}, false, threads);
    return FkEstimate{w.mean[0], w.stderr_()[0]};
}

struct DecayCurve {
    Eigen::VectorXd times, mean, se;
    long n_paths = 0;
    double dt = 0.0;
};

// Mean decay curve at every stride-th grid node (always including 0 and K).
inline DecayCurve decay_curve(const ModelManifold& model, const ScalarField& f, const Eigen::VectorXd& x0, double T,
                              double dt, long N, std::uint64_t seed, long stride = 1, int threads = -1) {
    if (N < 2) throw domain_error("decay_curve: need N >= 2");
    const long K = grid_steps(T, dt);
    if (stride < 1) stride = 1;
    if (threads < 0) threads = default_thread_count();
    std::vector<long> steps;
    for (long k = 0; k < K; k += stride) steps.push_back(k);
    steps.push_back(K);
    const auto w = detail::run_fk_paths(model, f, x0, K, dt, N, seed, steps, false, threads);
    DecayCurve cur;
    cur.n_paths = N;
    cur.dt = dt;
    const auto S = static_cast<Eigen::Index>(steps.size());
    cur.times.resize(S);
    for (Eigen::Index s = 0; s < S; ++s) cur.times[s] = static_cast<double>(steps[static_cast<std::size_t>(s)]) * dt;
    cur.mean = w.mean;
    cur.se = w.stderr_();
    return cur;
}

enum class SspVerdict { positive, negative, inconclusive };

inline const char* to_string(SspVerdict v) {
    switch (v) {
        case SspVerdict::positive: return "positive";
        case SspVerdict::negative: return "negative";
        default: return "inconclusive";
    }
}

struct RateEstimate {
    double rate = 0.0;  // fitted slope of log E exp(-1/2 int f) in 1/time units
    double se = 0.0;
    long n_paths = 0;
    double T = 0.0, dt = 0.0;
    SspVerdict verdict = SspVerdict::inconclusive;
};

// Least-squares slope of log E exp(-1/2 int f) over checkpoints in [T/2, T],
// the finite-horizon proxy for the decay-rate limsup. Verdict positive only
// if rate + 2*se < 0 (and negative only if rate - 2*se > 0).
inline RateEstimate ssp_rate(const ModelManifold& model, const ScalarField& f, const Eigen::VectorXd& x0, double T,
                             double dt, long N, std::uint64_t seed, int threads = -1) {
    if (N < 2) throw domain_error("ssp_rate: need N >= 2");
    const long K = grid_steps(T, dt);
    if (K < 8) throw domain_error("ssp_rate: need at least 8 grid steps for the checkpoint fit");
    if (threads < 0) threads = default_thread_count();
    const std::vector<long> steps = detail::rate_fit_steps(K);
    const auto w = detail::run_fk_paths(model, f, x0, K, dt, N, seed, steps, false, threads);

    const int S = static_cast<int>(steps.size());
    Eigen::VectorXd t(S), y(S), sig(S);
    for (int s = 0; s < S; ++s) {
        const double m = w.mean[s];
        if (!(m > 0.0) || !std::isfinite(m))
            throw numeric_error("ssp_rate: Feynman-Kac means underflowed at the fit checkpoints; "
                                "use a shorter horizon T");
        t[s] = static_cast<double>(steps[static_cast<std::size_t>(s)]) * dt;
        y[s] = std::log(m);
        sig[s] = w.stderr_()[s] / m;
    }
    const double tbar = t.mean(), ybar = y.mean();
    const double stt = (t.array() - tbar).square().sum();
    const double slope = ((t.array() - tbar) * (y.array() - ybar)).sum() / stt;
    double var = 0.0;
    for (int s = 0; s < S; ++s) {
        const double c = (t[s] - tbar) / stt;
        var += c * c * sig[s] * sig[s];
    }
    RateEstimate est;
    est.rate = slope;
    est.se = std::sqrt(var);
    est.n_paths = N;
    est.T = static_cast<double>(K) * dt;
    est.dt = dt;
    if (est.rate + 2.0 * est.se < 0.0)
        est.verdict = SspVerdict::positive;
    else if (est.rate - 2.0 * est.se > 0.0)
        est.verdict = SspVerdict::negative;
    else
        est.verdict = SspVerdict::inconclusive;
    return est;
}

struct FkTimeIntegral {
    double value = 0.0;    // int_0^inf E exp(-1/2 int_0^t f) dt
    double se = 0.0;       // Monte Carlo error of the truncated part
    double horizon = 0.0;  // grid horizon actually integrated
    double rate = 0.0;     // fitted tail rate
    double tail = 0.0;     // analytic tail added past the horizon
};

// Time integral of the Feynman-Kac functional: trapezoid over the grid, the
// horizon doubled until the fitted exponential tail contributes less than tol,
// then the tail added analytically. Requires a strictly negative decay rate.
inline FkTimeIntegral fk_time_integral(const ModelManifold& model, const ScalarField& f, const Eigen::VectorXd& x0,
                                       double dt, long N, std::uint64_t seed, double tol, int threads = -1) {
    if (N < 2) throw domain_error("fk_time_integral: need N >= 2");
    if (!(tol > 0.0)) throw domain_error("fk_time_integral: need tol > 0");
    if (threads < 0) threads = default_thread_count();
    double T = 5.0;
    constexpr double kMaxHorizon = 512.0;
    while (true) {
        const long K = grid_steps(T, dt);
        std::vector<long> steps = detail::rate_fit_steps(K);
        const auto w = detail::run_fk_paths(model, f, x0, K, dt, N, seed, steps, true, threads);
        const double mean_T = w.mean[static_cast<Eigen::Index>(steps.size()) - 1];
        const double integral = w.mean[w.mean.size() - 1];
        const double integral_se = w.stderr_()[w.mean.size() - 1];

        if (mean_T <= 0.0) {  // functional underflowed: the tail is numerically zero
            return FkTimeIntegral{integral, integral_se, static_cast<double>(K) * dt, 0.0, 0.0};
        }
        bool have_rate = true;
        double slope = 0.0;
        {
            const int S = static_cast<int>(steps.size());
            Eigen::VectorXd t(S), y(S);
            for (int s = 0; s < S; ++s) {
                const double m = w.mean[s];
                if (!(m > 0.0)) {
                    have_rate = false;
                    break;
                }
                t[s] = static_cast<double>(steps[static_cast<std::size_t>(s)]) * dt;
                y[s] = std::log(m);
            }
            if (have_rate) {
                const double tbar = t.mean(), ybar = y.mean();
                slope = ((t.array() - tbar) * (y.array() - ybar)).sum() / (t.array() - tbar).square().sum();
            }
        }
        if (have_rate && slope < -1e-12) {
            const double tail = mean_T / (-slope);
            if (tail < tol)
                return FkTimeIntegral{integral + tail, integral_se, static_cast<double>(K) * dt, slope, tail};
        } else if (have_rate && T >= kMaxHorizon) {
            throw numeric_error("fk_time_integral: nonpositive decay rate at horizon " + std::to_string(T) +
                                "; the integral appears divergent");
        }
        if (T >= kMaxHorizon)
            throw numeric_error("fk_time_integral: tail still above tolerance at the maximum horizon");
        T *= 2.0;
    }
}

// Field of curvature tensors along the path, expressed in a parallel frame.
struct TensorField {
    std::function<RiemannTensor<double>(const Eigen::VectorXd&)> at;
    bool constant = false;
};

inline TensorField constant_tensor_field(const RiemannTensor<double>& R) {
    return TensorField{[R](const Eigen::VectorXd&) { return R; }, true};
}

struct DampedFlowResult {
    std::vector<Eigen::MatrixXd> W;  // flow matrix at each grid node; W[0] = I
    Eigen::VectorXd rmin;            // smallest operator eigenvalue along the path
    double max_ratio = 0.0;          // |W_t v0| / (|v0| exp(-1/2 int rmin))
    double min_ratio = 0.0;
};

// Integrates dW/dt = -1/2 * Rp(x_t) * W along one path with the exponential
// midpoint rule, and reports the worst-case ratio of |W_t v0| against the
// scalar bound exp(-1/2 int rmin ds) over basis vectors and the ones vector.
// The ratio must stay within 1 + O(dt); for constant fields it equals 1.
inline DampedFlowResult solve_damped_flow(const ModelManifold& model, const TensorField& field, int p,
                                          const PathSample& path) {
    const long K = path.points.rows() - 1;
    if (K < 1) throw domain_error("solve_damped_flow: path needs at least two nodes");
    if (path.points.cols() != model.coord_size()) throw domain_error("solve_damped_flow: path/model mismatch");
    const double dt = path.dt;

    const auto operator_at = [&](const Eigen::VectorXd& x) { return assemble(field.at(x), p); };

    const FormOperator<double> op0 = operator_at(path.points.row(0).transpose());
    const int N = op0.size();

    const auto propagator = [&](const FormOperator<double>& op) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
        if (es.info() != Eigen::Success)
            throw numeric_error("solve_damped_flow: step matrix exponential failed");
        const Eigen::VectorXd ex = (-0.5 * dt * es.eigenvalues().array()).exp();
        return (es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().transpose()).eval();
    };

    Eigen::MatrixXd E_const;
    double rmin_const = 0.0;
    if (field.constant) {
        E_const = propagator(op0);
        rmin_const = min_eigenvalue(op0);
    }

    DampedFlowResult res;
    res.rmin.resize(K + 1);
    res.W.reserve(static_cast<std::size_t>(K + 1));
    for (long k = 0; k <= K; ++k)
        res.rmin[k] = field.constant ? rmin_const : min_eigenvalue(operator_at(path.points.row(k).transpose()));

    std::vector<Eigen::VectorXd> samples;
    for (int c = 0; c < N; ++c) samples.push_back(Eigen::VectorXd::Unit(N, c));
    samples.push_back(Eigen::VectorXd::Ones(N));

    Eigen::MatrixXd W = Eigen::MatrixXd::Identity(N, N);
    res.W.push_back(W);
    res.max_ratio = 1.0;
    res.min_ratio = 1.0;
    double bound_integral = 0.0;  // int rmin ds, trapezoid
    for (long k = 1; k <= K; ++k) {
        const Eigen::MatrixXd E =
            field.constant
                ? E_const
                : propagator(operator_at(model.midpoint(path.points.row(k - 1).transpose(), path.points.row(k).transpose())));
        W = E * W;
        res.W.push_back(W);
        bound_integral += 0.5 * dt * (res.rmin[k - 1] + res.rmin[k]);
        const double bound = std::exp(-0.5 * bound_integral);
        if (bound < 1e-300) continue;
        for (const auto& v0 : samples) {
            const double ratio = (W * v0).norm() / (v0.norm() * bound);
            res.max_ratio = std::max(res.max_ratio, ratio);
            res.min_ratio = std::min(res.min_ratio, ratio);
        }
    }
    return res;
}

struct Lambda0Bound {
    double value = 0.0;
    double se = 0.0;
};

// Lower bound for the bottom of the spectrum of Laplacian + f on functions:
// -2 times the fitted decay rate. Exact for constant f on a compact model.
inline Lambda0Bound lambda0_lower_bound(const RateEstimate& rate) {
    return Lambda0Bound{-2.0 * rate.rate, 2.0 * rate.se};
}

}  // namespace wzk
