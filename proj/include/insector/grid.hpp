#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace insector {

using cdouble = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Dense row-major complex matrix. The shared carrier for channels, antenna
// weight matrices, beamspace grids and spectral masks.
class ComplexGrid {
public:
    ComplexGrid() = default;
    ComplexGrid(int rows, int cols, cdouble fill = cdouble{})
        : rows_(rows), cols_(cols) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("ComplexGrid: dimensions must be positive");
        data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    std::size_t size() const { return data_.size(); }

    cdouble& operator()(int i, int j) { return data_[index(i, j)]; }
    const cdouble& operator()(int i, int j) const { return data_[index(i, j)]; }

    // Access with indices reduced modulo the grid shape (negatives allowed).
    const cdouble& wrap(int i, int j) const {
        return data_[index(mod(i, rows_), mod(j, cols_))];
    }

    std::vector<cdouble>& data() { return data_; }
    const std::vector<cdouble>& data() const { return data_; }

    double squared_norm() const {
        double s = 0.0;
        for (const cdouble& v : data_) s += std::norm(v);
        return s;
    }
    double frobenius_norm() const { return std::sqrt(squared_norm()); }

    bool all_finite() const {
        for (const cdouble& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    ComplexGrid& operator+=(const ComplexGrid& other) {
        require_same_shape(other, "operator+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
        return *this;
    }
    ComplexGrid& operator-=(const ComplexGrid& other) {
        require_same_shape(other, "operator-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
        return *this;
    }
    ComplexGrid& operator*=(cdouble s) {
        for (cdouble& v : data_) v *= s;
        return *this;
    }

    static int mod(int a, int n) {
        int r = a % n;
        return r < 0 ? r + n : r;
    }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(j);
    }
    void require_same_shape(const ComplexGrid& other, const char* op) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cdouble> data_;
};

inline ComplexGrid operator+(ComplexGrid a, const ComplexGrid& b) { return a += b; }
inline ComplexGrid operator-(ComplexGrid a, const ComplexGrid& b) { return a -= b; }
inline ComplexGrid operator*(ComplexGrid a, cdouble s) { return a *= s; }
inline ComplexGrid operator*(cdouble s, ComplexGrid a) { return a *= s; }

// <A,B> = sum_ij A_ij * conj(B_ij)
inline cdouble inner_product(const ComplexGrid& a, const ComplexGrid& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("inner_product: shape mismatch");
    cdouble s{};
    for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * std::conj(b.data()[k]);
    return s;
}

inline ComplexGrid hadamard(const ComplexGrid& a, const ComplexGrid& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("hadamard: shape mismatch");
    ComplexGrid out = a;
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] *= b.data()[k];
    return out;
}

// 1 at (0,0), zero elsewhere
inline ComplexGrid delta_grid(int n) {
    ComplexGrid g(n, n);
    g(0, 0) = 1.0;
    return g;
}

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place unnormalized radix-2 FFT. sign = -1 for the forward exponent
// e^{-j2*pi*k*n/N}, +1 for the inverse exponent.
inline void fft_pow2(std::vector<cdouble>& a, int sign) {
    const int n = static_cast<int>(a.size());
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / len;
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                cdouble u = a[i + k];
                cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Unnormalized direct transform for lengths that are not a power of two.
inline std::vector<cdouble> dft_direct(const std::vector<cdouble>& a, int sign) {
    const int n = static_cast<int>(a.size());
    std::vector<cdouble> out(n);
    for (int k = 0; k < n; ++k) {
        cdouble s{};
        for (int m = 0; m < n; ++m) {
            const double ang = sign * 2.0 * kPi * ((static_cast<long long>(k) * m) % n) / n;
            s += a[m] * cdouble(std::cos(ang), std::sin(ang));
        }
        out[k] = s;
    }
    return out;
}

inline void transform_1d(std::vector<cdouble>& a, int sign) {
    if (is_pow2(static_cast<int>(a.size())))
        fft_pow2(a, sign);
    else
        a = dft_direct(a, sign);
}

// Separable unitary 2D transform on an arbitrary R x C grid:
//   sign=-1:  U_R * A * U_C     (forward, 1/sqrt(R), 1/sqrt(C))
//   sign=+1:  U_R^* * A * U_C^* (inverse)
inline ComplexGrid fourier2(const ComplexGrid& g, int sign) {
    const int r = g.rows(), c = g.cols();
    ComplexGrid out = g;
    std::vector<cdouble> buf;
    buf.resize(static_cast<std::size_t>(c));
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) buf[j] = out(i, j);
        transform_1d(buf, sign);
        for (int j = 0; j < c; ++j) out(i, j) = buf[j];
    }
    buf.resize(static_cast<std::size_t>(r));
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < r; ++i) buf[i] = out(i, j);
        transform_1d(buf, sign);
        for (int i = 0; i < r; ++i) out(i, j) = buf[i];
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(r) * static_cast<double>(c));
    out *= scale;
    return out;
}

}  // namespace detail

// Unitary 2D-DFT, X -> U_N X U_N with forward exponent e^{-j2*pi*m*n/N}/sqrt(N).
inline ComplexGrid dft2(const ComplexGrid& g) {
    if (!g.square()) throw std::invalid_argument("dft2: grid must be square");
    return detail::fourier2(g, -1);
}

// Exact inverse of dft2, X -> U_N^* X U_N^*.
inline ComplexGrid idft2(const ComplexGrid& g) {
    if (!g.square()) throw std::invalid_argument("idft2: grid must be square");
    return detail::fourier2(g, +1);
}

// out(i,j) = g(<i-r>, <j-c>)
inline ComplexGrid circshift2(const ComplexGrid& g, int r, int c) {
    ComplexGrid out(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) out(i, j) = g.wrap(i - r, j - c);
    return out;
}

// out(i,j) = conj(g(<-i>, <-j>))
inline ComplexGrid flip_conjugate(const ComplexGrid& g) {
    ComplexGrid out(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) out(i, j) = std::conj(g.wrap(-i, -j));
    return out;
}

// Zero-insertion upsampling: out is (R*rho_e) x (C*rho_a) with
// out(i,j) = g(i/rho_e, j/rho_a) where both divide, 0 elsewhere.
inline ComplexGrid upsample2(const ComplexGrid& g, int rho_e, int rho_a) {
    if (rho_e < 1 || rho_a < 1)
        throw std::invalid_argument("upsample2: factors must be >= 1");
    ComplexGrid out(g.rows() * rho_e, g.cols() * rho_a);
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) out(i * rho_e, j * rho_a) = g(i, j);
    return out;
}

// 2D circular convolution of two same-size square grids, computed in the
// Fourier domain: dft2(a (*) b) = N * dft2(a) .* dft2(b).
inline ComplexGrid circconv2(const ComplexGrid& a, const ComplexGrid& b) {
    if (!a.square() || !b.square() || a.rows() != b.rows())
        throw std::invalid_argument("circconv2: inputs must be same-size square grids");
    const double n = static_cast<double>(a.rows());
    ComplexGrid prod = hadamard(dft2(a), dft2(b));
    prod *= n;
    return idft2(prod);
}

}  // namespace insector
