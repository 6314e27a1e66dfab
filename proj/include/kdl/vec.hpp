#pragma once
/**
 * @file vec.hpp
 * @brief Fixed-capacity small vectors and matrices for d in {2, 3}.
 *
 * The dimension is a runtime value so a single build serves disks and balls.
 * Storage is inline (no heap), which keeps particle loops allocation free.
 * VecN is templated on the scalar so the billiard kernels can run on Jet
 * values for exact derivatives (see jet.hpp).
 */

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <span>

namespace kdl {

inline constexpr int kMaxDim = 3;

template <class T>
class VecN {
public:
    VecN() = default;
    explicit VecN(int dim) : n_(dim) {
        assert(dim >= 0 && dim <= kMaxDim);
        c_.fill(T(0.0));
    }
    VecN(std::initializer_list<T> values) : n_(static_cast<int>(values.size())) {
        assert(n_ <= kMaxDim);
        int i = 0;
        for (const T& v : values) c_[i++] = v;
    }

    static VecN from_span(std::span<const double> values) {
        VecN out(static_cast<int>(values.size()));
        for (int i = 0; i < out.n_; ++i) out.c_[i] = T(values[i]);
        return out;
    }

    static VecN unit(int dim, int axis) {
        VecN out(dim);
        out.c_[axis] = T(1.0);
        return out;
    }

    int dim() const { return n_; }
    T& operator[](int i) { return c_[i]; }
    const T& operator[](int i) const { return c_[i]; }

    T* begin() { return c_.data(); }
    T* end() { return c_.data() + n_; }
    const T* begin() const { return c_.data(); }
    const T* end() const { return c_.data() + n_; }

    VecN& operator+=(const VecN& o) {
        for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    VecN& operator-=(const VecN& o) {
        for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    VecN& operator*=(const T& s) {
        for (int i = 0; i < n_; ++i) c_[i] *= s;
        return *this;
    }
    VecN& operator/=(const T& s) {
        for (int i = 0; i < n_; ++i) c_[i] /= s;
        return *this;
    }

    friend VecN operator+(VecN a, const VecN& b) { return a += b; }
    friend VecN operator-(VecN a, const VecN& b) { return a -= b; }
    friend VecN operator-(VecN a) {
        for (int i = 0; i < a.n_; ++i) a.c_[i] = -a.c_[i];
        return a;
    }
    friend VecN operator*(VecN a, const T& s) { return a *= s; }
    friend VecN operator*(const T& s, VecN a) { return a *= s; }
    friend VecN operator/(VecN a, const T& s) { return a /= s; }

    friend bool operator==(const VecN& a, const VecN& b) {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }

private:
    std::array<T, kMaxDim> c_{};
    int n_ = 0;
};

using Vec = VecN<double>;

template <class T>
T dot(const VecN<T>& a, const VecN<T>& b) {
    T s = a[0] * b[0];
    for (int i = 1; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

template <class T>
T squared_norm(const VecN<T>& a) {
    return dot(a, a);
}

template <class T>
T norm(const VecN<T>& a) {
    using std::sqrt;
    return sqrt(squared_norm(a));
}

/// z-component of the 2D cross product.
template <class T>
T cross2(const VecN<T>& a, const VecN<T>& b) {
    return a[0] * b[1] - a[1] * b[0];
}

inline Vec cross3(const Vec& a, const Vec& b) {
    return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Small dense square matrix, row-major, dimension <= 3.
class Mat {
public:
    Mat() = default;
    explicit Mat(int dim) : n_(dim) { a_.fill(0.0); }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat outer(const Vec& a, const Vec& b) {
        Mat m(a.dim());
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j) m(i, j) = a[i] * b[j];
        return m;
    }

    int dim() const { return n_; }
    double& operator()(int i, int j) { return a_[i * kMaxDim + j]; }
    double operator()(int i, int j) const { return a_[i * kMaxDim + j]; }

    Vec operator*(const Vec& v) const {
        Vec out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }
    Mat operator*(const Mat& o) const {
        Mat out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) out(i, j) += (*this)(i, k) * o(k, j);
        return out;
    }
    Mat operator+(const Mat& o) const {
        Mat out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j) + o(i, j);
        return out;
    }
    Mat operator-(const Mat& o) const {
        Mat out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j) - o(i, j);
        return out;
    }
    Mat operator*(double s) const {
        Mat out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j) * s;
        return out;
    }
    Mat transposed() const {
        Mat out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out(i, j) = (*this)(j, i);
        return out;
    }
    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }
    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

private:
    std::array<double, kMaxDim * kMaxDim> a_{};
    int n_ = 0;
};

/// Quadratic form a^T M b.
inline double quad_form(const Mat& m, const Vec& a, const Vec& b) {
    return dot(a, m * b);
}

}  // namespace kdl
