#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lrtc {

using Matrix = Eigen::MatrixXd;
using Dims = std::array<std::size_t, 3>;

inline std::size_t total_size(const Dims& d) { return d[0] * d[1] * d[2]; }

/// Dense third-order tensor of doubles, indexed (interval, location, day).
///
/// Storage is row-major over the three modes: entry (i1,i2,i3) lives at
/// linear offset i1*n2*n3 + i2*n3 + i3. All stored values are finite;
/// missingness is tracked separately by MaskTensor, never as NaN here.
class Tensor3 {
public:
    Tensor3() : dims_{0, 0, 0} {}

    /// Zero-initialized tensor. Extents must all be positive.
    explicit Tensor3(const Dims& dims);

    /// Takes ownership of `data` (length must equal the dims product) and
    /// rejects non-finite entries.
    static Tensor3 from_data(const Dims& dims, std::vector<double> data);

    const Dims& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }

    std::size_t linear_index(std::size_t i1, std::size_t i2, std::size_t i3) const {
        return (i1 * dims_[1] + i2) * dims_[2] + i3;
    }

    double operator()(std::size_t i1, std::size_t i2, std::size_t i3) const {
        return data_[linear_index(i1, i2, i3)];
    }
    double& operator()(std::size_t i1, std::size_t i2, std::size_t i3) {
        return data_[linear_index(i1, i2, i3)];
    }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Tensor3& other) const {
        return dims_ == other.dims_ && data_ == other.data_;
    }

private:
    Dims dims_;
    std::vector<double> data_;
};

/// Binary observation indicator with the same linearization as Tensor3.
/// 1 marks an observed entry, 0 a missing one.
class MaskTensor {
public:
    MaskTensor() : dims_{0, 0, 0} {}

    /// All-ones (fully observed) mask.
    explicit MaskTensor(const Dims& dims);

    /// Takes ownership of `bits`; every byte must be 0 or 1.
    static MaskTensor from_bits(const Dims& dims, std::vector<std::uint8_t> bits);

    const Dims& dims() const { return dims_; }
    std::size_t size() const { return bits_.size(); }

    std::size_t linear_index(std::size_t i1, std::size_t i2, std::size_t i3) const {
        return (i1 * dims_[1] + i2) * dims_[2] + i3;
    }

    std::uint8_t operator()(std::size_t i1, std::size_t i2, std::size_t i3) const {
        return bits_[linear_index(i1, i2, i3)];
    }
    std::uint8_t& operator()(std::size_t i1, std::size_t i2, std::size_t i3) {
        return bits_[linear_index(i1, i2, i3)];
    }

    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::uint8_t& operator[](std::size_t i) { return bits_[i]; }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    std::size_t count_ones() const;
    std::size_t count_zeros() const { return size() - count_ones(); }

    bool operator==(const MaskTensor& other) const {
        return dims_ == other.dims_ && bits_ == other.bits_;
    }

private:
    Dims dims_;
    std::vector<std::uint8_t> bits_;
};

/// Flips every bit of the mask.
MaskTensor complement(const MaskTensor& m);

/// Elementwise AND of two masks over identical dims.
MaskTensor mask_and(const MaskTensor& a, const MaskTensor& b);

/// Mode-n unfolding. The result has shape I_mode x (product of the other
/// two extents); tensor entry (i1,i2,i3) lands in row i_mode and column
/// sum_{k != mode} i_k * J_k with J_k the product of the extents I_m for
/// m < k, m != mode.
Matrix unfold(const Tensor3& t, int mode);

/// Exact inverse of unfold for the given dims; throws on shape mismatch.
Tensor3 fold(const Matrix& m, int mode, const Dims& dims);

double inner_product(const Tensor3& a, const Tensor3& b);
double frobenius_norm(const Tensor3& t);

/// Zeroes exactly the entries where the mask is 0; observed entries are
/// copied bit-exactly.
Tensor3 hadamard(const Tensor3& t, const MaskTensor& mask);

Tensor3 add(const Tensor3& a, const Tensor3& b);
Tensor3 subtract(const Tensor3& a, const Tensor3& b);
Tensor3 scale(const Tensor3& t, double s);

/// y += a*x in place.
void axpy(double a, const Tensor3& x, Tensor3& y);

}  // namespace lrtc
