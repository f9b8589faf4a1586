#pragma once

#include <cstddef>
#include <vector>

#include "lrtc/tensor.hpp"

namespace lrtc {

/// Parameters of the scalar generalized soft-thresholding operator: the
/// minimizer of 0.5*(x-y)^2 + lambda*x^p over x >= 0.
struct GstParams {
    double p = 0.5;            // Schatten exponent, in (0, 1]
    double lambda = 1.0;       // regularization weight, > 0
    int inner_iters = 10;      // fixed-point iteration count J
    double inner_tol = 1e-12;  // early exit when successive iterates differ by less; 0 disables

    void validate() const;
};

/// Economy-size SVD, singular values sorted non-ascending.
struct SvdTriple {
    Matrix U;
    std::vector<double> sigma;
    Matrix V;
};

SvdTriple svd_econ(const Matrix& m);

/// Thresholding value tau below which the GST minimizer is exactly zero.
/// Defined for p strictly inside (0, 1); the p = 1 soft-threshold case is
/// handled by gst() directly.
double gst_threshold(double p, double lambda);

/// Generalized soft-thresholding of a nonnegative scalar. Returns 0 when
/// y <= tau; otherwise the fixed point of x = y - lambda*p*x^(p-1),
/// reached from x = y. For p = 1 this is max(y - lambda, 0).
double gst(double y, const GstParams& params);

/// Proximal operator of lambda * (sum of the singular values beyond the
/// top r, each raised to p). The top r singular values of the input pass
/// through unchanged; the rest are GST-shrunk. Output singular values
/// stay non-ascending, which is checked at runtime.
Matrix truncated_spn_prox(const Matrix& Y, std::size_t r, const GstParams& params);

/// Schatten p-norm (sum sigma_i^p)^(1/p) of a matrix.
double schatten_p_norm(const Matrix& m, double p);

/// sum_{i > r} sigma_i^p: the truncated Schatten-p contribution of one
/// unfolding, already raised to the power p.
double truncated_spn_pow(const Matrix& m, std::size_t r, double p);

}  // namespace lrtc
