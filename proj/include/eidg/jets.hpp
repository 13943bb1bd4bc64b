#ifndef EIDG_JETS_HPP
#define EIDG_JETS_HPP

#include <array>
#include <cmath>

namespace eidg {

/// Forward-mode second-order jet over three variables: value, gradient, and
/// symmetric Hessian.  Used to evaluate closed-form metrics together with
/// their exact first and second Cartesian derivatives.
struct Jet2 {
    double v = 0.0;
    std::array<double, 3> g{0, 0, 0};
    std::array<double, 6> h{0, 0, 0, 0, 0, 0};  // 00,01,02,11,12,22

    static int hidx(int i, int j) {
        static constexpr int k[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return k[i][j];
    }
    static Jet2 constant(double c) {
        Jet2 j;
        j.v = c;
        return j;
    }
    static Jet2 seed(double value, int axis) {
        Jet2 j;
        j.v = value;
        j.g[axis] = 1.0;
        return j;
    }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v + b.v;
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] + b.g[i];
    for (int i = 0; i < 6; ++i) r.h[i] = a.h[i] + b.h[i];
    return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v - b.v;
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] - b.g[i];
    for (int i = 0; i < 6; ++i) r.h[i] = a.h[i] - b.h[i];
    return r;
}

inline Jet2 operator-(const Jet2& a) {
    Jet2 r;
    r.v = -a.v;
    for (int i = 0; i < 3; ++i) r.g[i] = -a.g[i];
    for (int i = 0; i < 6; ++i) r.h[i] = -a.h[i];
    return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v * b.v;
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            r.h[Jet2::hidx(i, j)] = a.h[Jet2::hidx(i, j)] * b.v +
                                    a.g[i] * b.g[j] + a.g[j] * b.g[i] +
                                    a.v * b.h[Jet2::hidx(i, j)];
    return r;
}

inline Jet2 operator*(double c, const Jet2& a) {
    Jet2 r;
    r.v = c * a.v;
    for (int i = 0; i < 3; ++i) r.g[i] = c * a.g[i];
    for (int i = 0; i < 6; ++i) r.h[i] = c * a.h[i];
    return r;
}

inline Jet2 operator+(const Jet2& a, double c) { return a + Jet2::constant(c); }
inline Jet2 operator+(double c, const Jet2& a) { return a + Jet2::constant(c); }
inline Jet2 operator-(const Jet2& a, double c) { return a - Jet2::constant(c); }
inline Jet2 operator-(double c, const Jet2& a) { return Jet2::constant(c) - a; }
inline Jet2 operator*(const Jet2& a, double c) { return c * a; }

inline Jet2 inverse(const Jet2& a) {
    Jet2 r;
    const double iv = 1.0 / a.v;
    r.v = iv;
    for (int i = 0; i < 3; ++i) r.g[i] = -a.g[i] * iv * iv;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            r.h[Jet2::hidx(i, j)] =
                (2.0 * a.g[i] * a.g[j] * iv - a.h[Jet2::hidx(i, j)]) * iv * iv;
    return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inverse(b); }
inline Jet2 operator/(double c, const Jet2& b) { return c * inverse(b); }
inline Jet2 operator/(const Jet2& a, double c) { return (1.0 / c) * a; }

inline Jet2 sqrt(const Jet2& a) {
    Jet2 r;
    const double s = std::sqrt(a.v);
    r.v = s;
    const double i2s = 0.5 / s;
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * i2s;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            r.h[Jet2::hidx(i, j)] =
                a.h[Jet2::hidx(i, j)] * i2s -
                a.g[i] * a.g[j] / (4.0 * s * s * s);
    return r;
}

/// First-order jet with templated scalar payload: evaluating an algebraic
/// expression of (value, gradient)-carrying inputs yields the expression and
/// its gradient.  Used to differentiate the slice extrinsic-curvature algebra
/// whose inputs are metric values and first derivatives.
template <typename T>
struct Jet1 {
    T v{};
    std::array<T, 3> g{};
};

template <typename T>
Jet1<T> operator+(const Jet1<T>& a, const Jet1<T>& b) {
    Jet1<T> r;
    r.v = a.v + b.v;
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] + b.g[i];
    return r;
}

template <typename T>
Jet1<T> operator-(const Jet1<T>& a, const Jet1<T>& b) {
    Jet1<T> r;
    r.v = a.v - b.v;
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] - b.g[i];
    return r;
}

template <typename T>
Jet1<T> operator*(const Jet1<T>& a, const Jet1<T>& b) {
    Jet1<T> r;
    r.v = a.v * b.v;
    for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    return r;
}

template <typename T>
Jet1<T> jet1_const(T c) {
    Jet1<T> r;
    r.v = c;
    return r;
}

} // namespace eidg

#endif
