#include "lrtc/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lrtc {

namespace {

void check_dims_positive(const Dims& dims) {
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
        throw std::invalid_argument("tensor extents must all be positive");
    }
}

void check_same_dims(const Dims& a, const Dims& b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

}  // namespace

Tensor3::Tensor3(const Dims& dims) : dims_(dims) {
    check_dims_positive(dims);
    data_.assign(total_size(dims), 0.0);
}

Tensor3 Tensor3::from_data(const Dims& dims, std::vector<double> data) {
    check_dims_positive(dims);
    if (data.size() != total_size(dims)) {
        throw std::invalid_argument("tensor data length does not match dims product");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("tensor entries must be finite");
        }
    }
    Tensor3 t;
    t.dims_ = dims;
    t.data_ = std::move(data);
    return t;
}

MaskTensor::MaskTensor(const Dims& dims) : dims_(dims) {
    check_dims_positive(dims);
    bits_.assign(total_size(dims), 1);
}

MaskTensor MaskTensor::from_bits(const Dims& dims, std::vector<std::uint8_t> bits) {
    check_dims_positive(dims);
    if (bits.size() != total_size(dims)) {
        throw std::invalid_argument("mask length does not match dims product");
    }
    for (std::uint8_t b : bits) {
        if (b > 1) {
            throw std::invalid_argument("mask entries must be 0 or 1");
        }
    }
    MaskTensor m;
    m.dims_ = dims;
    m.bits_ = std::move(bits);
    return m;
}

std::size_t MaskTensor::count_ones() const {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

MaskTensor complement(const MaskTensor& m) {
    std::vector<std::uint8_t> bits(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        bits[i] = static_cast<std::uint8_t>(1 - m[i]);
    }
    return MaskTensor::from_bits(m.dims(), std::move(bits));
}

MaskTensor mask_and(const MaskTensor& a, const MaskTensor& b) {
    check_same_dims(a.dims(), b.dims(), "mask_and");
    std::vector<std::uint8_t> bits(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        bits[i] = static_cast<std::uint8_t>(a[i] & b[i]);
    }
    return MaskTensor::from_bits(a.dims(), std::move(bits));
}

// Column index of entry (i1,i2,i3) in the mode-n unfolding. J_k is the
// product of extents before mode k, skipping the unfolding mode itself.
namespace {

inline std::size_t unfold_col(const Dims& d, int mode, std::size_t i1, std::size_t i2,
                              std::size_t i3) {
    switch (mode) {
        case 0: return i2 + i3 * d[1];
        case 1: return i1 + i3 * d[0];
        default: return i1 + i2 * d[0];
    }
}

void check_mode(int mode) {
    if (mode < 0 || mode > 2) {
        throw std::invalid_argument("mode must be 0, 1 or 2");
    }
}

}  // namespace

Matrix unfold(const Tensor3& t, int mode) {
    check_mode(mode);
    const Dims& d = t.dims();
    const std::size_t rows = d[mode];
    const std::size_t cols = total_size(d) / rows;
    Matrix m(rows, cols);
    for (std::size_t i1 = 0; i1 < d[0]; ++i1) {
        for (std::size_t i2 = 0; i2 < d[1]; ++i2) {
            for (std::size_t i3 = 0; i3 < d[2]; ++i3) {
                const std::size_t row = (mode == 0) ? i1 : (mode == 1) ? i2 : i3;
                m(static_cast<Eigen::Index>(row),
                  static_cast<Eigen::Index>(unfold_col(d, mode, i1, i2, i3))) = t(i1, i2, i3);
            }
        }
    }
    return m;
}

Tensor3 fold(const Matrix& m, int mode, const Dims& dims) {
    check_mode(mode);
    check_dims_positive(dims);
    const std::size_t rows = dims[mode];
    const std::size_t cols = total_size(dims) / rows;
    if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
        throw std::invalid_argument("fold: matrix shape does not match the unfold shape for these dims");
    }
    Tensor3 t(dims);
    for (std::size_t i1 = 0; i1 < dims[0]; ++i1) {
        for (std::size_t i2 = 0; i2 < dims[1]; ++i2) {
            for (std::size_t i3 = 0; i3 < dims[2]; ++i3) {
                const std::size_t row = (mode == 0) ? i1 : (mode == 1) ? i2 : i3;
                t(i1, i2, i3) = m(static_cast<Eigen::Index>(row),
                                  static_cast<Eigen::Index>(unfold_col(dims, mode, i1, i2, i3)));
            }
        }
    }
    return t;
}

double inner_product(const Tensor3& a, const Tensor3& b) {
    check_same_dims(a.dims(), b.dims(), "inner_product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double frobenius_norm(const Tensor3& t) { return std::sqrt(inner_product(t, t)); }

Tensor3 hadamard(const Tensor3& t, const MaskTensor& mask) {
    check_same_dims(t.dims(), mask.dims(), "hadamard");
    Tensor3 out(t.dims());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out[i] = mask[i] ? t[i] : 0.0;
    }
    return out;
}

Tensor3 add(const Tensor3& a, const Tensor3& b) {
    check_same_dims(a.dims(), b.dims(), "add");
    Tensor3 out(a.dims());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

Tensor3 subtract(const Tensor3& a, const Tensor3& b) {
    check_same_dims(a.dims(), b.dims(), "subtract");
    Tensor3 out(a.dims());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

Tensor3 scale(const Tensor3& t, double s) {
    Tensor3 out(t.dims());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out[i] = t[i] * s;
    }
    return out;
}

void axpy(double a, const Tensor3& x, Tensor3& y) {
    check_same_dims(x.dims(), y.dims(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += a * x[i];
    }
}

}  // namespace lrtc
