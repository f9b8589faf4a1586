#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lrtc/patterns.hpp"
#include "lrtc/tensor.hpp"

namespace testsupport {

/// Deterministic uniform double in [lo, hi) built from raw mt19937_64
/// output, avoiding std::uniform_real_distribution's unspecified mapping.
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    return lo + (hi - lo) * u;
}

/// Standard normal via Box-Muller on the portable uniform above.
inline double normal(std::mt19937_64& rng) {
    double u1 = uniform_real(rng, 0.0, 1.0);
    while (u1 <= 0.0) u1 = uniform_real(rng, 0.0, 1.0);
    const double u2 = uniform_real(rng, 0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643 * u2);
}

/// Random dense tensor with entries uniform in [lo, hi).
inline lrtc::Tensor3 random_tensor(const lrtc::Dims& dims, std::uint64_t seed, double lo = -1.0,
                                   double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::vector<double> data(lrtc::total_size(dims));
    for (double& v : data) v = uniform_real(rng, lo, hi);
    return lrtc::Tensor3::from_data(dims, std::move(data));
}

/// Low-rank ground truth: a sum of `rank` outer products a⊗b⊗c with
/// factor entries uniform in [0.5, 1.5), plus a constant offset so values
/// stay well away from zero. Every unfolding has rank ≤ `rank`.
inline lrtc::Tensor3 low_rank_tensor(const lrtc::Dims& dims, std::size_t rank,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> a(rank), b(rank), c(rank);
    for (std::size_t r = 0; r < rank; ++r) {
        a[r].resize(dims[0]);
        b[r].resize(dims[1]);
        c[r].resize(dims[2]);
        for (double& v : a[r]) v = uniform_real(rng, 0.5, 1.5);
        for (double& v : b[r]) v = uniform_real(rng, 0.5, 1.5);
        for (double& v : c[r]) v = uniform_real(rng, 0.5, 1.5);
    }
    lrtc::Tensor3 t(dims);
    for (std::size_t i = 0; i < dims[0]; ++i) {
        for (std::size_t j = 0; j < dims[1]; ++j) {
            for (std::size_t k = 0; k < dims[2]; ++k) {
                double v = 0.0;
                for (std::size_t r = 0; r < rank; ++r) v += a[r][i] * b[r][j] * c[r][k];
                t(i, j, k) = v;
            }
        }
    }
    return t;
}

/// Relative Frobenius error of `approx` against `truth` restricted to the
/// entries where `where` is 1.
inline double masked_rel_error(const lrtc::Tensor3& truth, const lrtc::Tensor3& approx,
                               const lrtc::MaskTensor& where) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < where.size(); ++i) {
        if (where[i]) {
            const double d = truth[i] - approx[i];
            num += d * d;
            den += truth[i] * truth[i];
        }
    }
    return std::sqrt(num) / std::sqrt(den);
}

/// Brute-force minimizer of f(x) = 0.5*(x-y)^2 + lambda*x^p over the
/// 1e-6-spaced lattice of [0, y]. Evaluated as a two-stage refinement:
/// a coarse scan locates the basin, then every fine-lattice point in a
/// window around it (plus x = 0, always checked exactly) is compared.
/// f has at most one interior local minimum for p in (0,1], so the basin
/// found coarsely contains the fine-lattice argmin.
struct GridMin {
    double x;
    double f;
};

inline GridMin grid_search_gst(double y, double lambda, double p, double fine_step = 1e-6) {
    auto f = [&](double x) { return 0.5 * (x - y) * (x - y) + lambda * std::pow(x, p); };
    GridMin best{0.0, f(0.0)};
    if (y <= 0.0) return best;

    const std::size_t coarse_n = 20000;  // coarse pass: ~y/20000 spacing
    double coarse_best_x = 0.0;
    double coarse_best_f = best.f;
    for (std::size_t i = 1; i <= coarse_n; ++i) {
        const double x = y * static_cast<double>(i) / static_cast<double>(coarse_n);
        const double v = f(x);
        if (v < coarse_best_f) {
            coarse_best_f = v;
            coarse_best_x = x;
        }
    }

    // Fine lattice window around the coarse winner, clamped to [0, y].
    const double half_window = 2.0 * y / static_cast<double>(coarse_n);
    const double lo = std::max(0.0, coarse_best_x - half_window);
    const double hi = std::min(y, coarse_best_x + half_window);
    const std::int64_t i_lo = static_cast<std::int64_t>(std::ceil(lo / fine_step));
    const std::int64_t i_hi = static_cast<std::int64_t>(std::floor(hi / fine_step));
    for (std::int64_t i = i_lo; i <= i_hi; ++i) {
        const double x = static_cast<double>(i) * fine_step;
        const double v = f(x);
        if (v < best.f) {
            best.f = v;
            best.x = x;
        }
    }
    // The boundary x = y is on neither lattice in general; include it.
    const double vy = f(y);
    if (vy < best.f) {
        best.f = vy;
        best.x = y;
    }
    return best;
}

}  // namespace testsupport
