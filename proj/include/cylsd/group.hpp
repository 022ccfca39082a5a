#pragma once

/**
 * @file group.hpp
 * @brief The cylinder X = R x T, its dual Y = R x Z, and their automorphisms.
 *
 * An element of T is stored by its angle in [0, 2pi). A character y = (s, n)
 * acts on x = (t, theta) by (x, y) = exp(i (s t + n theta)).
 *
 * Every automorphism of Y is an upper-triangular matrix
 *
 *     | a  c |
 *     | 0  p |      a != 0, p = +-1,
 *
 * acting on Y by (s, n) -> (a s + c n, p n) and adjointly on X by
 * (t, theta) -> (a t, c t + p theta). X and Y automorphisms are identified
 * through this matrix.
 */

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "cylsd/error.hpp"
#include "cylsd/rational.hpp"

namespace cylsd {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduces an angle into [0, 2pi). Values that round to 2pi map to 0.
inline double reduce_angle(double theta) {
    double r = std::fmod(theta, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi - 8.0 * std::numeric_limits<double>::epsilon() * two_pi) r = 0.0;
    return r;
}

/// Distance between two angles on the circle, in [0, pi].
inline double angle_distance(double x, double y) {
    const double d = reduce_angle(x - y);
    return std::min(d, two_pi - d);
}

/// Element (t, e^{i theta}) of R x T.
class CylinderPoint {
public:
    CylinderPoint() = default;
    CylinderPoint(double t, double theta) : t_(t), theta_(reduce_angle(theta)) {}

    double t() const { return t_; }
    double theta() const { return theta_; }

    friend CylinderPoint operator+(const CylinderPoint& x, const CylinderPoint& y) {
        return {x.t_ + y.t_, x.theta_ + y.theta_};
    }
    friend CylinderPoint operator-(const CylinderPoint& x) { return {-x.t_, -x.theta_}; }
    friend CylinderPoint operator-(const CylinderPoint& x, const CylinderPoint& y) { return x + (-y); }
    friend bool operator==(const CylinderPoint&, const CylinderPoint&) = default;

private:
    double t_ = 0.0;
    double theta_ = 0.0;
};

/// Character (s, n) in R x Z.
template <Scalar T>
struct BasicDualPoint {
    T s{};
    long long n = 0;

    friend BasicDualPoint operator+(const BasicDualPoint& x, const BasicDualPoint& y) {
        return {x.s + y.s, x.n + y.n};
    }
    friend BasicDualPoint operator-(const BasicDualPoint& x) { return {-x.s, -x.n}; }
    friend BasicDualPoint operator-(const BasicDualPoint& x, const BasicDualPoint& y) { return x + (-y); }
    friend bool operator==(const BasicDualPoint&, const BasicDualPoint&) = default;

    template <Scalar U>
    BasicDualPoint<U> cast() const {
        return {scalar_cast<U>(s), n};
    }
};

using DualPoint = BasicDualPoint<double>;
using ExactDualPoint = BasicDualPoint<Rational>;

/// Value of the character y at the point x.
inline std::complex<double> pair(const CylinderPoint& x, const DualPoint& y) {
    const double phase = y.s * x.t() + static_cast<double>(y.n) * x.theta();
    return std::polar(1.0, phase);
}

/// Topological automorphism given by the matrix (a, c; 0, p).
template <Scalar T>
class BasicCylinderAuto {
public:
    BasicCylinderAuto(T a, T c, int p) : a_(std::move(a)), c_(std::move(c)), p_(p) {
        if (a_ == T(0)) throw InvalidInput("automorphism multiplier a must be nonzero");
        if (p_ != 1 && p_ != -1) throw InvalidInput("automorphism sign p must be +1 or -1");
    }

    static BasicCylinderAuto identity() { return {T(1), T(0), 1}; }

    const T& a() const { return a_; }
    const T& c() const { return c_; }
    int p() const { return p_; }

    bool is_identity() const { return a_ == T(1) && c_ == T(0) && p_ == 1; }

    template <Scalar U>
    BasicCylinderAuto<U> cast() const {
        return {scalar_cast<U>(a_), scalar_cast<U>(c_), p_};
    }

    friend bool operator==(const BasicCylinderAuto&, const BasicCylinderAuto&) = default;

private:
    T a_;
    T c_;
    int p_;
};

using CylinderAuto = BasicCylinderAuto<double>;
using ExactAuto = BasicCylinderAuto<Rational>;

/// (s, n) -> (a s + c n, p n).
template <Scalar T>
BasicDualPoint<T> apply_dual(const BasicCylinderAuto<T>& e, const BasicDualPoint<T>& y) {
    return {e.a() * y.s + e.c() * T(y.n), e.p() * y.n};
}

/// (t, theta) -> (a t, c t + p theta); the adjoint of apply_dual.
inline CylinderPoint apply_point(const CylinderAuto& d, const CylinderPoint& x) {
    return {d.a() * x.t(), d.c() * x.t() + d.p() * x.theta()};
}

/// Matrix product: apply_dual(compose(e1, e2), y) == apply_dual(e1, apply_dual(e2, y)).
/// As maps of X the same matrix is the composite "e2 after e1" (adjoints reverse order).
template <Scalar T>
BasicCylinderAuto<T> compose(const BasicCylinderAuto<T>& e1, const BasicCylinderAuto<T>& e2) {
    return {e1.a() * e2.a(), e1.a() * e2.c() + e1.c() * T(e2.p()), e1.p() * e2.p()};
}

template <Scalar T>
BasicCylinderAuto<T> invert(const BasicCylinderAuto<T>& e) {
    // (a, c; 0, p)^{-1} = (1/a, -c p / a; 0, p)
    return {T(1) / e.a(), -(e.c() * T(e.p())) / e.a(), e.p()};
}

/// Whether the one-parameter subgroup {(t, e^{i omega t})} is invariant under e,
/// i.e. c == (a - p) omega.
template <Scalar T>
bool preserves_line(const BasicCylinderAuto<T>& e, const T& omega, double tol = 1e-12) {
    return nearly_equal<T>(e.c(), (e.a() - T(e.p())) * omega, tol);
}

/// Automorphism of T (and of its dual Z): multiplication by p = +-1.
class TorusAuto {
public:
    explicit TorusAuto(int p = 1) : p_(p) {
        if (p_ != 1 && p_ != -1) throw InvalidInput("torus automorphism must be +1 or -1");
    }
    int p() const { return p_; }
    bool is_identity() const { return p_ == 1; }
    friend bool operator==(const TorusAuto&, const TorusAuto&) = default;

private:
    int p_;
};

inline long long apply_dual(const TorusAuto& e, long long n) { return e.p() * n; }
inline TorusAuto compose(const TorusAuto& e1, const TorusAuto& e2) { return TorusAuto(e1.p() * e2.p()); }
inline TorusAuto invert(const TorusAuto& e) { return e; }

}  // namespace cylsd
