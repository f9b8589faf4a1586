#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "lrtc/gst.hpp"
#include "lrtc/tensor.hpp"

namespace lrtc {

/// Hyperparameters of the ADMM completion solver. `theta` is the final
/// truncation rate, i.e. already decayed if a decay schedule applies.
struct SolverConfig {
    double p = 0.5;                               // Schatten exponent in (0, 1]
    double theta = 0.0;                           // truncation rate in [0, 1]
    std::array<double, 3> alpha = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};  // mode weights, sum to 1
    double mu0 = 1e-5;                            // initial penalty
    double mu_growth = 1.05;                      // per-iteration penalty growth
    double mu_cap = 1e5;                          // penalty ceiling
    double epsilon = 1e-4;                        // relative-change stopping tolerance
    int max_iters = 200;
    int gst_inner_iters = 10;
    double gst_inner_tol = 1e-12;

    void validate() const;
};

/// Per-iteration solver variables. The mode matrices M and duals Z live in
/// unfolded coordinates; their shapes match unfold(X, k).
struct SolverState {
    Tensor3 X;
    std::array<Matrix, 3> M;
    std::array<Matrix, 3> Z;
    double mu = 0.0;
    int iter = 0;
    std::vector<double> residuals;  // relative change per completed sweep
};

struct CompletionResult {
    Tensor3 X_hat;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_trace;
    std::array<std::size_t, 3> truncation_ranks = {0, 0, 0};
    std::array<double, 3> per_mode_spn = {0.0, 0.0, 0.0};  // Schatten-p norm of each unfolding
};

/// Per-mode truncation ranks r_k = ceil(theta * min(I_k, prod of the other
/// extents)).
std::array<std::size_t, 3> truncation_ranks(const Dims& dims, double theta);

/// Truncation rate decayed with the observed missing rate:
/// theta0 * exp(-beta * psi).
double decayed_theta(double theta0, double beta, double missing_rate);

/// Fraction of zero (missing) bits in the mask.
double missing_rate(const MaskTensor& P);

/// Observed entries copied from T, missing entries set to the mean of the
/// observed ones, M and Z zeroed. Rejects masks with no observed entry and
/// observed data that is identically zero (the relative-change residual
/// would be undefined).
SolverState init_state(const Tensor3& T, const MaskTensor& P, const SolverConfig& cfg);

/// One full ADMM sweep in the fixed order M_1, M_2, M_3, X, Z_1, Z_2, Z_3,
/// followed by the penalty growth step and the residual append.
SolverState step(const SolverState& state, const Tensor3& T, const MaskTensor& P,
                 const SolverConfig& cfg);

/// Iterates step() until the relative change drops below cfg.epsilon or
/// cfg.max_iters sweeps have run. Non-convergence is reported through the
/// converged flag, not an error.
CompletionResult solve(const Tensor3& T, const MaskTensor& P, const SolverConfig& cfg);

/// The surrogate objective sum_k alpha_k * sum_{i > r_k} sigma_i^p over the
/// unfoldings of X.
double truncated_objective(const Tensor3& X, const std::array<std::size_t, 3>& ranks, double p,
                           const std::array<double, 3>& alpha);

}  // namespace lrtc
