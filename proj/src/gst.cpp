#include "lrtc/gst.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/SVD>

namespace lrtc {

void GstParams::validate() const {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("gst: p must lie in (0, 1]");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("gst: lambda must be positive");
    }
    if (inner_iters < 1) {
        throw std::invalid_argument("gst: inner_iters must be at least 1");
    }
    if (inner_tol < 0.0) {
        throw std::invalid_argument("gst: inner_tol must be nonnegative");
    }
}

SvdTriple svd_econ(const Matrix& m) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw std::runtime_error("SVD failed to converge");
    }
    SvdTriple out;
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    const auto& s = svd.singularValues();
    out.sigma.assign(s.data(), s.data() + s.size());

    // Eigen sorts non-ascending already; enforce it regardless of backend.
    if (!std::is_sorted(out.sigma.begin(), out.sigma.end(), std::greater<double>())) {
        std::vector<std::size_t> perm(out.sigma.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::stable_sort(perm.begin(), perm.end(),
                         [&](std::size_t a, std::size_t b) { return out.sigma[a] > out.sigma[b]; });
        Matrix U = out.U;
        Matrix V = out.V;
        std::vector<double> sigma = out.sigma;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            out.U.col(static_cast<Eigen::Index>(i)) = U.col(static_cast<Eigen::Index>(perm[i]));
            out.V.col(static_cast<Eigen::Index>(i)) = V.col(static_cast<Eigen::Index>(perm[i]));
            out.sigma[i] = sigma[perm[i]];
        }
    }
    return out;
}

double gst_threshold(double p, double lambda) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("gst_threshold: p must lie strictly in (0, 1)");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("gst_threshold: lambda must be positive");
    }
    const double b = 2.0 * lambda * (1.0 - p);
    return std::pow(b, 1.0 / (2.0 - p)) + lambda * p * std::pow(b, (p - 1.0) / (2.0 - p));
}

double gst(double y, const GstParams& params) {
    params.validate();
    if (y < 0.0) {
        throw std::invalid_argument("gst: input must be nonnegative");
    }
    if (params.p == 1.0) {
        return std::max(y - params.lambda, 0.0);
    }
    const double tau = gst_threshold(params.p, params.lambda);
    if (y <= tau) {
        return 0.0;
    }
    double x = y;
    for (int j = 0; j < params.inner_iters; ++j) {
        const double next = y - params.lambda * params.p * std::pow(x, params.p - 1.0);
        const double delta = std::abs(next - x);
        x = next;
        if (params.inner_tol > 0.0 && delta < params.inner_tol) {
            break;
        }
    }
    return x;
}

Matrix truncated_spn_prox(const Matrix& Y, std::size_t r, const GstParams& params) {
    params.validate();
    const std::size_t k = static_cast<std::size_t>(std::min(Y.rows(), Y.cols()));
    if (r > k) {
        throw std::invalid_argument("truncated_spn_prox: truncation r exceeds min(rows, cols)");
    }
    SvdTriple svd = svd_econ(Y);
    std::vector<double> delta(k);
    for (std::size_t i = 0; i < k; ++i) {
        delta[i] = (i < r) ? svd.sigma[i] : gst(svd.sigma[i], params);
    }
    // The scalar shrinkage is monotone in its input, so a sorted spectrum
    // must stay sorted; a violation here means a broken inner iteration.
    for (std::size_t i = 1; i < k; ++i) {
        if (delta[i] > delta[i - 1] + 1e-9 * std::max(1.0, delta[i - 1])) {
            throw std::runtime_error("truncated_spn_prox: shrunk singular values lost their ordering");
        }
    }
    Eigen::VectorXd d(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        d[static_cast<Eigen::Index>(i)] = delta[i];
    }
    return svd.U * d.asDiagonal() * svd.V.transpose();
}

double schatten_p_norm(const Matrix& m, double p) {
    if (!(p > 0.0)) {
        throw std::invalid_argument("schatten_p_norm: p must be positive");
    }
    Eigen::BDCSVD<Matrix> svd(m);
    double s = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        s += std::pow(svd.singularValues()[i], p);
    }
    return std::pow(s, 1.0 / p);
}

double truncated_spn_pow(const Matrix& m, std::size_t r, double p) {
    if (!(p > 0.0)) {
        throw std::invalid_argument("truncated_spn_pow: p must be positive");
    }
    Eigen::BDCSVD<Matrix> svd(m);
    double s = 0.0;
    for (Eigen::Index i = static_cast<Eigen::Index>(r); i < svd.singularValues().size(); ++i) {
        s += std::pow(svd.singularValues()[i], p);
    }
    return s;
}

}  // namespace lrtc
