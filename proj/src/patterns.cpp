#include "lrtc/patterns.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lrtc {

namespace {

// Rounds half-to-even, matching the default floating-point environment.
std::size_t round_count(double x) {
    double r = std::nearbyint(x);
    if (r < 0.0) return 0;
    return static_cast<std::size_t>(r);
}

// Selection sampling: walks candidates 0..n-1 once and keeps each with
// probability (still needed) / (still available), yielding every k-subset
// with equal probability. Emits indices in increasing order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::mt19937_64& rng) {
    std::vector<std::size_t> picked;
    picked.reserve(k);
    std::uint64_t remaining = n;
    std::uint64_t needed = k;
    for (std::size_t idx = 0; idx < n && needed > 0; ++idx, --remaining) {
        if (bounded_uniform(rng, remaining) < needed) {
            picked.push_back(idx);
            --needed;
        }
    }
    return picked;
}

}  // namespace

std::string pattern_name(Pattern p) {
    switch (p) {
        case Pattern::RM: return "rm";
        case Pattern::FM0: return "fm0";
        case Pattern::FM1: return "fm1";
        case Pattern::FM2: return "fm2";
    }
    throw std::invalid_argument("unknown pattern value");
}

Pattern pattern_from_name(const std::string& name) {
    if (name == "rm") return Pattern::RM;
    if (name == "fm0") return Pattern::FM0;
    if (name == "fm1") return Pattern::FM1;
    if (name == "fm2") return Pattern::FM2;
    throw std::invalid_argument("unknown pattern name: " + name);
}

void MissingSpec::validate() const {
    if (!(rate > 0.0 && rate < 1.0)) {
        throw std::invalid_argument("missing rate must lie strictly in (0, 1)");
    }
}

std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("bounded_uniform: bound must be positive");
    // Reject the low remainder band so every residue appears equally often.
    const std::uint64_t threshold = (-bound) % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

MaskTensor generate_mask(const Dims& dims, const MissingSpec& spec) {
    spec.validate();
    const std::size_t total = total_size(dims);
    MaskTensor P(dims);
    std::mt19937_64 rng(spec.seed);

    if (spec.pattern == Pattern::RM) {
        const std::size_t k = round_count(spec.rate * static_cast<double>(total));
        if (k >= total) {
            throw std::invalid_argument("requested rate would leave no observed entry");
        }
        for (std::size_t idx : sample_without_replacement(total, k, rng)) {
            P[idx] = 0;
        }
        return P;
    }

    const int mode = spec.pattern == Pattern::FM0 ? 0 : spec.pattern == Pattern::FM1 ? 1 : 2;
    const int a = mode == 0 ? 1 : 0;       // remaining modes in ascending order
    const int b = mode == 2 ? 1 : 2;
    const std::size_t fibers = dims[static_cast<std::size_t>(a)] * dims[static_cast<std::size_t>(b)];
    const std::size_t k = round_count(spec.rate * static_cast<double>(fibers));
    if (k >= fibers) {
        throw std::invalid_argument("requested rate would leave no observed entry");
    }
    const std::size_t nb = dims[static_cast<std::size_t>(b)];
    for (std::size_t f : sample_without_replacement(fibers, k, rng)) {
        const std::size_t ia = f / nb;
        const std::size_t ib = f % nb;
        std::size_t index[3];
        index[static_cast<std::size_t>(a)] = ia;
        index[static_cast<std::size_t>(b)] = ib;
        for (std::size_t in = 0; in < dims[static_cast<std::size_t>(mode)]; ++in) {
            index[static_cast<std::size_t>(mode)] = in;
            P(index[0], index[1], index[2]) = 0;
        }
    }
    return P;
}

bool fiber_structure_check(const MaskTensor& P, int mode) {
    if (mode < 0 || mode > 2) throw std::invalid_argument("mode must be 0, 1, or 2");
    const Dims& d = P.dims();
    const int a = mode == 0 ? 1 : 0;
    const int b = mode == 2 ? 1 : 2;
    for (std::size_t ia = 0; ia < d[static_cast<std::size_t>(a)]; ++ia) {
        for (std::size_t ib = 0; ib < d[static_cast<std::size_t>(b)]; ++ib) {
            std::size_t ones = 0;
            std::size_t index[3];
            index[static_cast<std::size_t>(a)] = ia;
            index[static_cast<std::size_t>(b)] = ib;
            for (std::size_t in = 0; in < d[static_cast<std::size_t>(mode)]; ++in) {
                index[static_cast<std::size_t>(mode)] = in;
                ones += P(index[0], index[1], index[2]);
            }
            if (ones != 0 && ones != d[static_cast<std::size_t>(mode)]) return false;
        }
    }
    return true;
}

}  // namespace lrtc
