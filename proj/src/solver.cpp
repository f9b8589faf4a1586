#include "lrtc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lrtc {

void SolverConfig::validate() const {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("solver: p must lie in (0, 1]");
    }
    if (theta < 0.0 || theta > 1.0) {
        throw std::invalid_argument("solver: theta must lie in [0, 1]");
    }
    double alpha_sum = 0.0;
    for (double a : alpha) {
        if (a < 0.0) {
            throw std::invalid_argument("solver: alpha weights must be nonnegative");
        }
        alpha_sum += a;
    }
    if (std::abs(alpha_sum - 1.0) > 1e-12) {
        throw std::invalid_argument("solver: alpha weights must sum to 1");
    }
    if (!(mu0 > 0.0)) {
        throw std::invalid_argument("solver: mu0 must be positive");
    }
    if (mu_growth < 1.0) {
        throw std::invalid_argument("solver: mu_growth must be at least 1");
    }
    if (!(mu_cap > 0.0) || mu0 > mu_cap) {
        throw std::invalid_argument("solver: mu_cap must be positive and at least mu0");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("solver: epsilon must be positive");
    }
    if (max_iters < 1) {
        throw std::invalid_argument("solver: max_iters must be at least 1");
    }
    if (gst_inner_iters < 1) {
        throw std::invalid_argument("solver: gst_inner_iters must be at least 1");
    }
    if (gst_inner_tol < 0.0) {
        throw std::invalid_argument("solver: gst_inner_tol must be nonnegative");
    }
}

std::array<std::size_t, 3> truncation_ranks(const Dims& dims, double theta) {
    if (theta < 0.0 || theta > 1.0) {
        throw std::invalid_argument("truncation_ranks: theta must lie in [0, 1]");
    }
    std::array<std::size_t, 3> r{};
    for (int k = 0; k < 3; ++k) {
        const std::size_t other = total_size(dims) / dims[k];
        const std::size_t m = std::min(dims[static_cast<std::size_t>(k)], other);
        const double raw = std::ceil(theta * static_cast<double>(m));
        r[static_cast<std::size_t>(k)] = std::min(m, static_cast<std::size_t>(raw));
    }
    return r;
}

double decayed_theta(double theta0, double beta, double missing_rate) {
    if (theta0 < 0.0 || theta0 > 1.0) {
        throw std::invalid_argument("decayed_theta: theta0 must lie in [0, 1]");
    }
    if (beta < 0.0) {
        throw std::invalid_argument("decayed_theta: beta must be nonnegative");
    }
    if (missing_rate < 0.0 || missing_rate > 1.0) {
        throw std::invalid_argument("decayed_theta: missing rate must lie in [0, 1]");
    }
    return theta0 * std::exp(-beta * missing_rate);
}

double missing_rate(const MaskTensor& P) {
    return static_cast<double>(P.count_zeros()) / static_cast<double>(P.size());
}

SolverState init_state(const Tensor3& T, const MaskTensor& P, const SolverConfig& cfg) {
    cfg.validate();
    if (T.dims() != P.dims()) {
        throw std::invalid_argument("init_state: tensor and mask dims differ");
    }
    double observed_sum = 0.0;
    double observed_max_abs = 0.0;
    std::size_t observed_count = 0;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (P[i]) {
            observed_sum += T[i];
            observed_max_abs = std::max(observed_max_abs, std::abs(T[i]));
            ++observed_count;
        }
    }
    if (observed_count == 0) {
        throw std::invalid_argument("init_state: mask leaves no observed entries");
    }
    if (observed_max_abs == 0.0) {
        throw std::invalid_argument("init_state: observed entries are all zero");
    }
    const double mean = observed_sum / static_cast<double>(observed_count);

    SolverState state;
    state.X = Tensor3(T.dims());
    for (std::size_t i = 0; i < T.size(); ++i) {
        state.X[i] = P[i] ? T[i] : mean;
    }
    for (int k = 0; k < 3; ++k) {
        const std::size_t rows = T.dims()[static_cast<std::size_t>(k)];
        const std::size_t cols = T.size() / rows;
        state.M[static_cast<std::size_t>(k)] =
            Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        state.Z[static_cast<std::size_t>(k)] =
            Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
    state.mu = cfg.mu0;
    state.iter = 0;
    return state;
}

SolverState step(const SolverState& state, const Tensor3& T, const MaskTensor& P,
                 const SolverConfig& cfg) {
    const Dims& dims = T.dims();
    if (state.X.dims() != dims || P.dims() != dims) {
        throw std::invalid_argument("step: state inconsistent with tensor/mask dims");
    }
    const std::array<std::size_t, 3> ranks = truncation_ranks(dims, cfg.theta);
    const double mu = state.mu;

    SolverState next = state;

    // M-subproblem per mode: prox of the unfolded iterate plus scaled dual.
    for (int k = 0; k < 3; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const Matrix Y = unfold(state.X, k) + state.Z[ku] / mu;
        GstParams gp;
        gp.p = cfg.p;
        gp.lambda = cfg.alpha[ku] / mu;
        gp.inner_iters = cfg.gst_inner_iters;
        gp.inner_tol = cfg.gst_inner_tol;
        try {
            next.M[ku] = truncated_spn_prox(Y, ranks[ku], gp);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("iteration " + std::to_string(state.iter + 1) + ", mode " +
                                     std::to_string(k) + ": " + e.what());
        }
    }

    // X-subproblem: penalty-weighted average of the folded mode estimates,
    // then the observation projection.
    Tensor3 acc(dims);
    double mu_sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const Matrix D = next.M[ku] - next.Z[ku] / mu;
        axpy(mu, fold(D, k, dims), acc);
        mu_sum += mu;
    }
    next.X = scale(acc, 1.0 / mu_sum);
    for (std::size_t i = 0; i < next.X.size(); ++i) {
        if (P[i]) {
            next.X[i] = T[i];
        }
    }

    // Dual ascent on the projected iterate.
    for (int k = 0; k < 3; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        next.Z[ku] = state.Z[ku] + mu * (unfold(next.X, k) - next.M[ku]);
    }

    next.mu = std::min(mu * cfg.mu_growth, cfg.mu_cap);
    next.iter = state.iter + 1;
    next.residuals.push_back(frobenius_norm(subtract(next.X, state.X)) / frobenius_norm(state.X));
    return next;
}

CompletionResult solve(const Tensor3& T, const MaskTensor& P, const SolverConfig& cfg) {
    SolverState state = init_state(T, P, cfg);
    bool converged = false;
    for (int j = 0; j < cfg.max_iters; ++j) {
        state = step(state, T, P, cfg);
        if (state.residuals.back() < cfg.epsilon) {
            converged = true;
            break;
        }
    }

    CompletionResult result;
    result.iterations = state.iter;
    result.converged = converged;
    result.residual_trace = state.residuals;
    result.truncation_ranks = truncation_ranks(T.dims(), cfg.theta);
    for (int k = 0; k < 3; ++k) {
        result.per_mode_spn[static_cast<std::size_t>(k)] = schatten_p_norm(unfold(state.X, k), cfg.p);
    }
    result.X_hat = std::move(state.X);
    return result;
}

double truncated_objective(const Tensor3& X, const std::array<std::size_t, 3>& ranks, double p,
                           const std::array<double, 3>& alpha) {
    double obj = 0.0;
    for (int k = 0; k < 3; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        obj += alpha[ku] * truncated_spn_pow(unfold(X, k), ranks[ku], p);
    }
    return obj;
}

}  // namespace lrtc
