#pragma once

/**
 * @file charfn.hpp
 * @brief Parametric characteristic functions on R x T and on T.
 *
 * A cylinder CF is stored through its logarithm
 *
 *     l(s, n) = -(sigma s^2 + kappa s n + lambda n^2) + i (tau s + theta n)
 *               + twist (1 - (-1)^n),
 *
 * and a torus CF through l(n) = -sigma n^2 + i theta n + twist (1 - (-1)^n).
 * The twist term is the CF of a signed measure on Z(2) = {+1, -1}; it is the
 * only non-Gaussian ingredient. Convolution adds parameters.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cylsd/error.hpp"
#include "cylsd/group.hpp"
#include "cylsd/rational.hpp"

namespace cylsd {

/// Real and imaginary part of a logarithm, kept separate so exact scalars work.
template <class T>
struct LogValue {
    T re{};
    T im{};

    LogValue& operator+=(const LogValue& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    friend LogValue operator+(LogValue x, const LogValue& y) { return x += y; }
    friend LogValue operator-(const LogValue& x, const LogValue& y) { return {x.re - y.re, x.im - y.im}; }
};

template <class T>
double magnitude(const LogValue<T>& v) {
    return std::hypot(to_double(v.re), to_double(v.im));
}

/// 1 - (-1)^n.
inline int parity_factor(long long n) { return (n % 2 == 0) ? 0 : 2; }

template <Scalar T>
struct BasicCylinderCF {
    T sigma{};   // coefficient of s^2
    T kappa{};   // coefficient of s n
    T lambda{};  // coefficient of n^2
    T tau{};     // shift, real coordinate
    T theta{};   // shift, angular coordinate
    T twist{};   // Z(2) signed-measure parameter

    template <Scalar U>
    BasicCylinderCF<U> cast() const {
        return {scalar_cast<U>(sigma), scalar_cast<U>(kappa), scalar_cast<U>(lambda),
                scalar_cast<U>(tau),   scalar_cast<U>(theta), scalar_cast<U>(twist)};
    }

    friend bool operator==(const BasicCylinderCF&, const BasicCylinderCF&) = default;
};

using CylinderCF = BasicCylinderCF<double>;
using ExactCylinderCF = BasicCylinderCF<Rational>;

template <Scalar T>
struct BasicTorusCF {
    T sigma{};
    T theta{};
    T twist{};

    template <Scalar U>
    BasicTorusCF<U> cast() const {
        return {scalar_cast<U>(sigma), scalar_cast<U>(theta), scalar_cast<U>(twist)};
    }

    friend bool operator==(const BasicTorusCF&, const BasicTorusCF&) = default;
};

using TorusCF = BasicTorusCF<double>;

/// Torus CF with theta reduced into [0, 2pi).
inline TorusCF make_torus_cf(double sigma, double theta, double twist) {
    return {sigma, reduce_angle(theta), twist};
}

/// Dual group and automorphism type belonging to each CF kind.
template <class CF>
struct cf_traits;

template <Scalar T>
struct cf_traits<BasicCylinderCF<T>> {
    using scalar = T;
    using dual = BasicDualPoint<T>;
    using automorphism = BasicCylinderAuto<T>;
};

template <Scalar T>
struct cf_traits<BasicTorusCF<T>> {
    using scalar = T;
    using dual = long long;
    using automorphism = TorusAuto;
};

/// Throws InvalidInput unless sigma >= 0, lambda >= 0 and 4 sigma lambda >= kappa^2.
/// Floating inputs get a relative slack of 1e-12 on the determinant.
template <Scalar T>
void check_admissible(const BasicCylinderCF<T>& cf) {
    if (cf.sigma < T(0)) throw InvalidInput("cylinder CF: sigma must be >= 0");
    if (cf.lambda < T(0)) throw InvalidInput("cylinder CF: lambda must be >= 0");
    const T det = T(4) * cf.sigma * cf.lambda - cf.kappa * cf.kappa;
    if constexpr (is_exact_v<T>) {
        if (det < 0) throw InvalidInput("cylinder CF: quadratic form not positive semidefinite");
    } else {
        const double scale = std::max({1.0, static_cast<double>(cf.kappa * cf.kappa),
                                       static_cast<double>(4 * cf.sigma * cf.lambda)});
        if (static_cast<double>(det) < -1e-12 * scale) {
            throw InvalidInput("cylinder CF: quadratic form not positive semidefinite");
        }
    }
}

template <Scalar T>
void check_admissible(const BasicTorusCF<T>& cf) {
    if (cf.sigma < T(0)) throw InvalidInput("torus CF: sigma must be >= 0");
}

/// Closed-form logarithm of the CF, evaluated in the working type accum_t<T>.
template <Scalar T>
LogValue<accum_t<T>> log_cf(const BasicCylinderCF<T>& cf, const BasicDualPoint<T>& y) {
    using W = accum_t<T>;
    const W s = scalar_cast<W>(y.s);
    const W n = W(y.n);
    const W quad = scalar_cast<W>(cf.sigma) * s * s + scalar_cast<W>(cf.kappa) * s * n +
                   scalar_cast<W>(cf.lambda) * n * n;
    return {-quad + scalar_cast<W>(cf.twist) * W(parity_factor(y.n)),
            scalar_cast<W>(cf.tau) * s + scalar_cast<W>(cf.theta) * n};
}

template <Scalar T>
LogValue<accum_t<T>> log_cf(const BasicTorusCF<T>& cf, long long n) {
    using W = accum_t<T>;
    const W m = W(n);
    return {-scalar_cast<W>(cf.sigma) * m * m + scalar_cast<W>(cf.twist) * W(parity_factor(n)),
            scalar_cast<W>(cf.theta) * m};
}

/// Value of the CF; never zero.
inline std::complex<double> eval(const CylinderCF& cf, const DualPoint& y) {
    const auto l = log_cf(cf, y);
    return std::exp(std::complex<double>(static_cast<double>(l.re), static_cast<double>(l.im)));
}

inline std::complex<double> eval(const TorusCF& cf, long long n) {
    const auto l = log_cf(cf, n);
    return std::exp(std::complex<double>(static_cast<double>(l.re), static_cast<double>(l.im)));
}

namespace detail {
template <Scalar T>
T wrap_theta(const T& theta) {
    if constexpr (is_exact_v<T>) {
        return theta;
    } else {
        return static_cast<T>(reduce_angle(static_cast<double>(theta)));
    }
}
}  // namespace detail

/// CF of the convolution: parameters add.
template <Scalar T>
BasicCylinderCF<T> convolve(const BasicCylinderCF<T>& x, const BasicCylinderCF<T>& y) {
    BasicCylinderCF<T> r{x.sigma + y.sigma, x.kappa + y.kappa, x.lambda + y.lambda,
                         x.tau + y.tau,     detail::wrap_theta<T>(x.theta + y.theta), x.twist + y.twist};
    check_admissible(r);
    return r;
}

template <Scalar T>
BasicTorusCF<T> convolve(const BasicTorusCF<T>& x, const BasicTorusCF<T>& y) {
    return {x.sigma + y.sigma, detail::wrap_theta<T>(x.theta + y.theta), x.twist + y.twist};
}

/// CF of the reflected distribution mu(-B): the complex conjugate.
template <Scalar T>
BasicCylinderCF<T> reflect(const BasicCylinderCF<T>& cf) {
    return {cf.sigma, cf.kappa, cf.lambda, -cf.tau, detail::wrap_theta<T>(-cf.theta), cf.twist};
}

template <Scalar T>
BasicTorusCF<T> reflect(const BasicTorusCF<T>& cf) {
    return {cf.sigma, detail::wrap_theta<T>(-cf.theta), cf.twist};
}

/// CF of mu * reflect(mu) = |CF|^2; shifts vanish and the rest doubles.
template <Scalar T>
BasicCylinderCF<T> symmetrize(const BasicCylinderCF<T>& cf) {
    return {T(2) * cf.sigma, T(2) * cf.kappa, T(2) * cf.lambda, T(0), T(0), T(2) * cf.twist};
}

template <Scalar T>
BasicTorusCF<T> symmetrize(const BasicTorusCF<T>& cf) {
    return {T(2) * cf.sigma, T(0), T(2) * cf.twist};
}

/// CF of the image alpha(xi): y -> cf(apply_dual(alpha, y)).
template <Scalar T>
BasicCylinderCF<T> pushforward(const BasicCylinderCF<T>& cf, const BasicCylinderAuto<T>& e) {
    const T& a = e.a();
    const T& c = e.c();
    const T p(e.p());
    return {cf.sigma * a * a,
            T(2) * cf.sigma * a * c + cf.kappa * a * p,
            cf.sigma * c * c + cf.kappa * c * p + cf.lambda,
            cf.tau * a,
            detail::wrap_theta<T>(cf.tau * c + cf.theta * p),
            cf.twist};
}

template <Scalar T>
BasicTorusCF<T> pushforward(const BasicTorusCF<T>& cf, const TorusAuto& e) {
    return {cf.sigma, detail::wrap_theta<T>(cf.theta * T(e.p())), cf.twist};
}

/// max |phi(u+v) + phi(u-v) - 2 phi(u) - 2 phi(v)| over a 5x5 grid, where
/// phi = -Re log CF. Zero for Gaussian CFs.
inline double parallelogram_defect(const CylinderCF& cf) {
    static const std::array<DualPoint, 5> probes{
        DualPoint{0.0, 0}, DualPoint{0.0, 1}, DualPoint{1.0, 0}, DualPoint{0.5, 1}, DualPoint{-1.0, 2}};
    auto phi = [&](const DualPoint& y) { return -log_cf(cf, y).re; };
    long double worst = 0;
    for (const auto& u : probes) {
        for (const auto& v : probes) {
            const auto d = phi(u + v) + phi(u - v) - 2 * (phi(u) + phi(v));
            worst = std::max(worst, std::abs(d));
        }
    }
    return static_cast<double>(worst);
}

inline double parallelogram_defect(const TorusCF& cf) {
    static const std::array<long long, 5> probes{0, 1, 2, -1, 3};
    auto phi = [&](long long n) { return -log_cf(cf, n).re; };
    long double worst = 0;
    for (auto u : probes) {
        for (auto v : probes) {
            worst = std::max(worst, std::abs(phi(u + v) + phi(u - v) - 2 * (phi(u) + phi(v))));
        }
    }
    return static_cast<double>(worst);
}

namespace detail {
template <class CF>
bool is_gaussian_impl(const CF& cf, double scale) {
    const bool gaussian = cf.twist == 0;
    // The quadratic part always solves the parallelogram equation.
    if (gaussian && parallelogram_defect(cf) > 1e-9 * (1.0 + scale)) {
        throw std::logic_error("twist-free CF fails the parallelogram equation");
    }
    return gaussian;
}
}  // namespace detail

/// Gaussian (degenerate included) iff there is no Z(2) twist.
inline bool is_gaussian(const CylinderCF& cf) {
    return detail::is_gaussian_impl(cf, std::abs(cf.sigma) + std::abs(cf.kappa) + std::abs(cf.lambda));
}

inline bool is_gaussian(const TorusCF& cf) { return detail::is_gaussian_impl(cf, std::abs(cf.sigma)); }

/// Signed measure p1 E_{+1} + pm1 E_{-1} on Z(2).
struct Z2SignedMeasure {
    double p1 = 1.0;
    double pm1 = 0.0;

    std::complex<double> cf(long long n) const { return {p1 + pm1 * ((n % 2 == 0) ? 1.0 : -1.0), 0.0}; }
    bool is_probability(double tol = 0.0) const { return p1 >= -tol && pm1 >= -tol; }
};

/// Masses of the Z(2) factor whose CF is exp(twist (1 - (-1)^n)).
inline Z2SignedMeasure z2_from_twist(double twist) {
    const double e = std::exp(2.0 * twist);
    return {(1.0 + e) / 2.0, (1.0 - e) / 2.0};
}

inline Z2SignedMeasure convolve(const Z2SignedMeasure& x, const Z2SignedMeasure& y) {
    return {x.p1 * y.p1 + x.pm1 * y.pm1, x.p1 * y.pm1 + x.pm1 * y.p1};
}

enum class Validity { valid, invalid, inconclusive };

inline std::string to_string(Validity v) {
    switch (v) {
        case Validity::valid: return "valid";
        case Validity::invalid: return "invalid";
        case Validity::inconclusive: return "inconclusive";
    }
    return "unknown";
}

struct ProbabilityCheck {
    Validity verdict = Validity::inconclusive;
    double min_density = 0.0;  // atom masses when sigma == 0
    double max_imag = 0.0;
    double tail_bound = 0.0;

    bool ok() const { return verdict == Validity::valid; }
};

/// Decides whether a torus CF belongs to a probability measure.
///
/// For sigma > 0 the density is recovered by Fourier inversion over
/// |n| <= truncation on a 1024-point grid; the answer is inconclusive when the
/// neglected tail sum exceeds tol. For sigma == 0 the measure is a pair of
/// atoms at theta and theta + pi and the masses are checked directly.
inline ProbabilityCheck is_valid_probability(const TorusCF& cf, int truncation = 50, double tol = 1e-9) {
    if (truncation < 1) throw InvalidInput("truncation must be >= 1");
    if (cf.sigma < 0) return {Validity::invalid, 0.0, 0.0, 0.0};

    ProbabilityCheck out;
    if (cf.sigma == 0.0) {
        const auto masses = z2_from_twist(cf.twist);
        out.min_density = std::min(masses.p1, masses.pm1);
        out.verdict = masses.is_probability(tol) ? Validity::valid : Validity::invalid;
        return out;
    }

    // |cf(n)| <= e^{2 max(twist, 0)} e^{-sigma n^2}
    const double amp = std::exp(2.0 * std::max(cf.twist, 0.0));
    double tail = 0.0;
    for (long long n = truncation + 1;; ++n) {
        const double term = amp * std::exp(-cf.sigma * static_cast<double>(n) * static_cast<double>(n));
        tail += 2.0 * term;
        if (term < 1e-300 || term < 1e-17 * tail) break;
        if (n > truncation + 1000000) {
            tail = std::numeric_limits<double>::infinity();
            break;
        }
    }
    out.tail_bound = tail;
    if (tail > tol) {
        out.verdict = Validity::inconclusive;
        return out;
    }

    constexpr int grid = 1024;
    std::vector<std::complex<double>> coeff(2 * truncation + 1);
    for (int n = -truncation; n <= truncation; ++n) coeff[n + truncation] = eval(cf, n);

    double min_re = std::numeric_limits<double>::infinity();
    double max_im = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double phi = two_pi * k / grid;
        std::complex<double> acc = 0.0;
        for (int n = -truncation; n <= truncation; ++n) {
            acc += coeff[n + truncation] * std::polar(1.0, -n * phi);
        }
        acc /= two_pi;
        min_re = std::min(min_re, acc.real());
        max_im = std::max(max_im, std::abs(acc.imag()));
    }
    out.min_density = min_re;
    out.max_imag = max_im;
    out.verdict = (min_re >= -tol && max_im <= tol) ? Validity::valid : Validity::invalid;
    return out;
}

enum class SupportKind {
    point,  // all quadratic coefficients vanish
    line,   // the subgroup {(t, e^{i omega t})}
    other,  // two-dimensional, or compact in the T direction
};

struct Support {
    SupportKind kind = SupportKind::other;
    double omega = 0.0;
};

inline std::string to_string(SupportKind k) {
    switch (k) {
        case SupportKind::point: return "point support";
        case SupportKind::line: return "line";
        case SupportKind::other: return "not a line";
    }
    return "unknown";
}

/// Support of a centred twist-free Gaussian: the line with slope
/// omega = kappa / (2 sigma) iff sigma > 0 and 4 sigma lambda = kappa^2.
template <Scalar T>
Support support_line(const BasicCylinderCF<T>& cf, double tol = 1e-10) {
    if (cf.twist != T(0)) throw InvalidInput("support_line: CF carries a Z(2) twist");
    if (cf.tau != T(0) || cf.theta != T(0)) throw InvalidInput("support_line: CF is not centred");
    if (cf.sigma == T(0) && cf.kappa == T(0) && cf.lambda == T(0)) return {SupportKind::point, 0.0};
    if (!(cf.sigma > T(0))) return {SupportKind::other, 0.0};
    const T defect = T(4) * cf.sigma * cf.lambda - cf.kappa * cf.kappa;
    if (!nearly_equal<T>(defect, T(0), tol)) return {SupportKind::other, 0.0};
    return {SupportKind::line, to_double(cf.kappa / (T(2) * cf.sigma))};
}

}  // namespace cylsd
