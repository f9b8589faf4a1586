#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "lrtc/tensor.hpp"

namespace lrtc {

/// The four synthetic missing patterns: element-wise random missing and
/// whole mode-n fiber missing for n = 0, 1, 2.
enum class Pattern { RM, FM0, FM1, FM2 };

std::string pattern_name(Pattern p);
Pattern pattern_from_name(const std::string& name);

struct MissingSpec {
    Pattern pattern = Pattern::RM;
    double rate = 0.5;        // target missing rate, strictly in (0, 1)
    std::uint64_t seed = 0;

    void validate() const;
};

/// Unbiased draw from [0, bound) via rejection sampling. mt19937_64 output
/// is fully specified by the standard, so masks are reproducible across
/// standard libraries (std::uniform_int_distribution is not).
std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t bound);

/// Synthesizes an observation mask over `dims`. RM removes exactly
/// round(rate * total) entries sampled without replacement in linear-index
/// order; FM-n removes round(rate * fiber count) whole mode-n fibers, the
/// fiber index pairs sampled without replacement in row-major order over
/// the remaining two modes. One mt19937_64 stream seeded with spec.seed
/// drives the selection, consuming one bounded draw per candidate.
/// Errors if the requested rate would leave no observed entry.
MaskTensor generate_mask(const Dims& dims, const MissingSpec& spec);

/// True iff no mode-n fiber of the mask is partially missing.
bool fiber_structure_check(const MaskTensor& P, int mode);

}  // namespace lrtc
