#pragma once

/**
 * @file independence.hpp
 * @brief Exact and grid checkers for independence of linear statistics.
 *
 * For independent xi_1..xi_n with CFs mu_j and statistics L_i = sum_j alpha_ij xi_j,
 * the statistics are independent iff for all y_1..y_n in the dual group
 *
 *     prod_j mu_j( sum_i alpha_ij~ y_i ) = prod_i prod_j mu_j( alpha_ij~ y_i ).
 *
 * Both sides are products of closed-form CFs, so the comparison is made between
 * sums of closed-form logarithms and no branch of the complex log is needed.
 *
 * The three-statistic checkers below work on the normal form
 *
 *     L_1 = xi_1 + xi_2 + xi_3,
 *     L_2 = alpha_1 xi_1 + alpha_2 xi_2 + xi_3,   alpha_i = (a_i, c_i; 0, p_i),
 *     L_3 = beta_1  xi_1 + beta_2  xi_2 + xi_3,   beta_i  = (b_i, d_i; 0, q_i).
 */

#include <array>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylsd/charfn.hpp"
#include "cylsd/error.hpp"
#include "cylsd/group.hpp"
#include "cylsd/parallel.hpp"
#include "cylsd/rational.hpp"
#include "cylsd/stat_matrix.hpp"

namespace cylsd {

namespace detail {
template <Scalar T>
auto working(const BasicCylinderCF<T>& v) {
    return v.template cast<accum_t<T>>();
}
template <Scalar T>
auto working(const BasicTorusCF<T>& v) {
    return v.template cast<accum_t<T>>();
}
template <Scalar T>
auto working(const BasicCylinderAuto<T>& v) {
    return v.template cast<accum_t<T>>();
}
inline TorusAuto working(const TorusAuto& v) { return v; }
template <Scalar T>
auto working(const BasicDualPoint<T>& v) {
    return v.template cast<accum_t<T>>();
}
inline long long working(long long v) { return v; }
}  // namespace detail

template <class Dual>
struct ResidualReport {
    double residual = 0.0;
    std::size_t grid_size = 0;
    std::size_t worst_index = 0;
    std::vector<Dual> worst_tuple;
};

/// Log-space defect of the independence equation at one tuple.
template <class CF, class Auto, class Dual>
auto independence_defect(std::span<const CF> cfs, const StatMatrix<Auto>& m, std::span<const Dual> ys) {
    const std::size_t n = m.size();
    using W = decltype(log_cf(cfs[0], ys[0]).re);
    LogValue<W> lhs{};
    LogValue<W> rhs{};
    for (std::size_t j = 0; j < n; ++j) {
        Dual arg{};
        for (std::size_t i = 0; i < n; ++i) {
            const Dual image = apply_dual(m(i, j), ys[i]);
            arg = arg + image;
            rhs += log_cf(cfs[j], image);
        }
        lhs += log_cf(cfs[j], arg);
    }
    return lhs - rhs;
}

/// Max over the grid of |log LHS - log RHS| of the independence equation.
/// Floating inputs are evaluated in long double; exact inputs exactly.
template <class CF, class Auto, class Dual>
ResidualReport<Dual> independence_residual(std::span<const CF> cfs, const StatMatrix<Auto>& m,
                                           const TupleGrid<Dual>& grid, unsigned workers = 1) {
    const std::size_t n = m.size();
    if (cfs.size() != n) {
        throw InvalidInput("dimension mismatch: " + std::to_string(cfs.size()) + " CFs for a " +
                           std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    if (grid.arity() != n) throw InvalidInput("dimension mismatch: grid tuples have arity " + std::to_string(grid.arity()));
    if (grid.empty()) throw InvalidInput("empty grid");

    using WCF = decltype(detail::working(cfs[0]));
    using WDual = decltype(detail::working(std::declval<Dual>()));
    std::vector<WCF> wcfs;
    wcfs.reserve(n);
    for (const auto& cf : cfs) wcfs.push_back(detail::working(cf));
    const auto wm = m.transform([](const Auto& e) { return detail::working(e); });

    auto score = [&](std::size_t k) {
        const auto tuple = grid.tuple(k);
        std::vector<WDual> ys;
        ys.reserve(n);
        for (const auto& y : tuple) ys.push_back(detail::working(y));
        return magnitude(independence_defect<WCF>(wcfs, wm, std::span<const WDual>(ys)));
    };
    const auto [best, index] = parallel_argmax(grid.size(), workers, score);
    const auto worst = grid.tuple(index);
    return {best, grid.size(), index, std::vector<Dual>(worst.begin(), worst.end())};
}

// ---------------------------------------------------------------------------
// Real-line conditions on (a1, a2, b1, b2)

/// Sign patterns of (a1, a2, b1, b2) compatible with positive sigma_j.
inline constexpr std::array<std::array<int, 4>, 6> sign_table{{
    {+1, -1, -1, +1},
    {+1, -1, -1, -1},
    {-1, +1, +1, -1},
    {-1, +1, -1, -1},
    {-1, -1, +1, -1},
    {-1, -1, -1, +1},
}};

/// a1 b2 - a1 a2 b2 - a1 b1 b2 - a2 b1 + a1 a2 b1 + a2 b1 b2.
inline Rational lemma2_identity(const Rational& a1, const Rational& a2, const Rational& b1, const Rational& b2) {
    return a1 * b2 - a1 * a2 * b2 - a1 * b1 * b2 - a2 * b1 + a1 * a2 * b1 + a2 * b1 * b2;
}

struct ConditionReport {
    Rational identity1;           // statement 1 polynomial; must vanish
    std::optional<int> sign_row;  // 1-based row of sign_table, if any
    bool distinct_a = false;      // a1 != a2
    bool distinct_b = false;      // b1 != b2
    Rational cross_det;           // a2 b1 - a1 b2
    Rational corner_det;          // (a1 - 1)(b2 - 1) - (a2 - 1)(b1 - 1)

    bool statement1() const { return identity1 == 0; }
    bool statement2() const { return sign_row.has_value(); }
    bool statement3() const { return distinct_a && distinct_b; }
    bool statement4() const { return cross_det != 0; }
    bool statement5() const { return corner_det != 0; }
    bool all_hold() const {
        return statement1() && statement2() && statement3() && statement4() && statement5();
    }
};

inline std::optional<int> match_sign_row(const Rational& a1, const Rational& a2, const Rational& b1, const Rational& b2) {
    const std::array<int, 4> signs{a1 > 0 ? 1 : -1, a2 > 0 ? 1 : -1, b1 > 0 ? 1 : -1, b2 > 0 ? 1 : -1};
    for (std::size_t r = 0; r < sign_table.size(); ++r) {
        if (sign_table[r] == signs) return static_cast<int>(r + 1);
    }
    return std::nullopt;
}

inline ConditionReport lemma2_conditions(const Rational& a1, const Rational& a2, const Rational& b1,
                                         const Rational& b2) {
    if (a1 == 0 || a2 == 0 || b1 == 0 || b2 == 0) throw InvalidInput("lemma2_conditions: coefficients must be nonzero");
    ConditionReport r;
    r.identity1 = lemma2_identity(a1, a2, b1, b2);
    r.sign_row = match_sign_row(a1, a2, b1, b2);
    r.distinct_a = a1 != a2;
    r.distinct_b = b1 != b2;
    r.cross_det = a2 * b1 - a1 * b2;
    r.corner_det = (a1 - 1) * (b2 - 1) - (a2 - 1) * (b1 - 1);
    return r;
}

/// Positive solution (sigma_1, sigma_2, 1) of
///   sigma_1 a_1 + sigma_2 a_2 + sigma_3 = 0,
///   sigma_1 b_1 + sigma_2 b_2 + sigma_3 = 0,
///   sigma_1 a_1 b_1 + sigma_2 a_2 b_2 + sigma_3 = 0,
/// or nullopt when the third equation fails or some sigma_j <= 0.
inline std::optional<std::array<Rational, 3>> solve_sigmas(const Rational& a1, const Rational& a2,
                                                           const Rational& b1, const Rational& b2) {
    const Rational cross = a2 * b1 - a1 * b2;
    if (cross == 0) throw InvalidInput("statement 4 violated: a2 b1 - a1 b2 = 0");
    const Rational s3 = 1;
    const Rational s1 = (b2 - a2) / cross * s3;
    const Rational s2 = (a1 - b1) / cross * s3;
    if (s1 * a1 * b1 + s2 * a2 * b2 + s3 != 0) return std::nullopt;
    if (s1 <= 0 || s2 <= 0) return std::nullopt;
    return std::array<Rational, 3>{s1, s2, s3};
}

/// Both sides of the identity
///   (a2 b1 - a1 b2)((1-b2)(1-a2)(a1-b1) + (1-b1)(1-a1)(b2-a2))
///     = -(b2-b1)(a2-a1)(a1-b1)(b2-a2),
/// which holds whenever the statement-1 polynomial vanishes.
inline std::pair<Rational, Rational> support_identity_sides(const Rational& a1, const Rational& a2, const Rational& b1,
                                                            const Rational& b2) {
    const Rational lhs = (a2 * b1 - a1 * b2) * ((1 - b2) * (1 - a2) * (a1 - b1) + (1 - b1) * (1 - a1) * (b2 - a2));
    const Rational rhs = -(b2 - b1) * (a2 - a1) * (a1 - b1) * (b2 - a2);
    return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Normal form

template <Scalar T>
struct NormalFormParams {
    T a1, a2, b1, b2;
    T c1, c2, d1, d2;
    int p1, p2, q1, q2;
};

template <Scalar T>
bool is_normal_form(const StatMatrix<BasicCylinderAuto<T>>& m) {
    const std::size_t n = m.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (!m(0, j).is_identity()) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!m(i, n - 1).is_identity()) return false;
    }
    return true;
}

template <Scalar T>
NormalFormParams<T> normal_form_params(const StatMatrix<BasicCylinderAuto<T>>& m) {
    if (m.size() != 3) throw InvalidInput("normal form parameters need a 3x3 matrix");
    if (!is_normal_form(m)) {
        throw InvalidInput("matrix is not in normal form (first row and last column must be identities)");
    }
    const auto& al1 = m(1, 0);
    const auto& al2 = m(1, 1);
    const auto& be1 = m(2, 0);
    const auto& be2 = m(2, 1);
    return {al1.a(), al2.a(), be1.a(), be2.a(), al1.c(), al2.c(), be1.c(), be2.c(),
            al1.p(), al2.p(), be1.p(), be2.p()};
}

/// A matrix in normal form together with the maps that produced it.
/// column_maps[j] sends xi_j to zeta_j = column_maps[j] xi_j; row_maps[i]
/// multiplies statistic i. Y-actions compose as in compose().
template <class Auto>
struct NormalForm {
    StatMatrix<Auto> matrix;
    std::vector<Auto> column_maps;
    std::vector<Auto> row_maps;
};

/// Brings a statistic matrix to the form with identities in the first row
/// and in the last column, by substituting zeta_j = alpha_1j xi_j and then
/// multiplying each statistic by an automorphism.
template <class Auto>
NormalForm<Auto> reduce_to_normal_form(const StatMatrix<Auto>& m) {
    const std::size_t n = m.size();
    std::vector<Auto> column_maps;
    for (std::size_t j = 0; j < n; ++j) column_maps.push_back(m(0, j));

    std::vector<Auto> stage;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) stage.push_back(compose(invert(column_maps[j]), m(i, j)));
    }
    std::vector<Auto> row_maps;
    std::vector<Auto> out;
    for (std::size_t i = 0; i < n; ++i) {
        row_maps.push_back(invert(stage[i * n + (n - 1)]));
        for (std::size_t j = 0; j < n; ++j) out.push_back(compose(stage[i * n + j], row_maps.back()));
    }
    return {StatMatrix<Auto>(n, std::move(out)), std::move(column_maps), std::move(row_maps)};
}

/// CFs of zeta_j = column_maps[j] xi_j.
template <class CF, class Auto>
std::vector<CF> transform_cfs(std::span<const CF> cfs, const NormalForm<Auto>& form) {
    if (cfs.size() != form.column_maps.size()) throw InvalidInput("dimension mismatch in transform_cfs");
    std::vector<CF> out;
    for (std::size_t j = 0; j < cfs.size(); ++j) out.push_back(pushforward(cfs[j], form.column_maps[j]));
    return out;
}

// ---------------------------------------------------------------------------
// Coefficient system of the Gaussian part

struct NamedResidual {
    std::string equation;
    double residual = 0.0;
};

struct SystemReport {
    std::vector<NamedResidual> equations;

    double max_residual() const {
        double m = 0.0;
        for (const auto& e : equations) m = std::max(m, e.residual);
        return m;
    }
    const NamedResidual& worst() const {
        return *std::max_element(equations.begin(), equations.end(),
                                 [](const auto& x, const auto& y) { return x.residual < y.residual; });
    }
    /// First equation, in listing order, whose residual exceeds tol.
    std::optional<std::string> first_failing(double tol) const {
        for (const auto& e : equations) {
            if (e.residual > tol) return e.equation;
        }
        return std::nullopt;
    }
    bool all_within(double tol) const { return !first_failing(tol).has_value(); }
};

/// Evaluates the coefficient identities obtained by substituting quadratic
/// logarithms sigma_j s^2 + kappa_j s n + lambda_j n^2 into the independence
/// equation of a normal-form matrix: the s s', s n' cross coefficients
/// ("(t1.2)"-"(t1.4)", "(t1.17)"-"(t1.22)") and the pure n polynomial
/// ("(t1.23)", maximised over (n1, n2, n3) in {-2..2}^3).
template <Scalar T>
SystemReport gaussian_system_check(std::span<const BasicCylinderCF<T>> cfs, const StatMatrix<BasicCylinderAuto<T>>& m) {
    if (cfs.size() != 3) throw InvalidInput("gaussian_system_check needs three CFs");
    for (const auto& cf : cfs) {
        if (cf.twist != T(0)) throw InvalidInput("gaussian_system_check applies to twist-free CFs only");
    }
    using W = accum_t<T>;
    const auto pr = normal_form_params(m);
    const W a1 = scalar_cast<W>(pr.a1), a2 = scalar_cast<W>(pr.a2), b1 = scalar_cast<W>(pr.b1),
            b2 = scalar_cast<W>(pr.b2), c1 = scalar_cast<W>(pr.c1), c2 = scalar_cast<W>(pr.c2),
            d1 = scalar_cast<W>(pr.d1), d2 = scalar_cast<W>(pr.d2);
    const W p1(pr.p1), p2(pr.p2), q1(pr.q1), q2(pr.q2);
    const W s1 = scalar_cast<W>(cfs[0].sigma), s2 = scalar_cast<W>(cfs[1].sigma), s3 = scalar_cast<W>(cfs[2].sigma);
    const W k1 = scalar_cast<W>(cfs[0].kappa), k2 = scalar_cast<W>(cfs[1].kappa), k3 = scalar_cast<W>(cfs[2].kappa);
    const W l1 = scalar_cast<W>(cfs[0].lambda), l2 = scalar_cast<W>(cfs[1].lambda), l3 = scalar_cast<W>(cfs[2].lambda);

    SystemReport report;
    auto add = [&](const char* name, const W& value) {
        report.equations.push_back({name, to_double(abs_value<W>(value))});
    };
    add("(t1.2)", s1 * a1 + s2 * a2 + s3);
    add("(t1.3)", s1 * b1 + s2 * b2 + s3);
    add("(t1.4)", s1 * a1 * b1 + s2 * a2 * b2 + s3);
    add("(t1.17)", k1 * a1 + k2 * a2 + k3);
    add("(t1.18)", k1 * b1 + k2 * b2 + k3);
    add("(t1.19)", W(2) * s1 * c1 + W(2) * s2 * c2 + k1 * p1 + k2 * p2 + k3);
    add("(t1.20)", W(2) * s1 * d1 + W(2) * s2 * d2 + k1 * q1 + k2 * q2 + k3);
    add("(t1.21)", W(2) * s1 * a1 * d1 + W(2) * s2 * a2 * d2 + k1 * a1 * q1 + k2 * a2 * q2 + k3);
    add("(t1.22)", W(2) * s1 * b1 * c1 + W(2) * s2 * b2 * c2 + k1 * b1 * p1 + k2 * b2 * p2 + k3);

    const W lambda = l1 + l2 + l3;
    const W x12 = k1 * c1 + k2 * c2;
    const W x13 = k1 * d1 + k2 * d2;
    const W x23 = W(2) * s1 * c1 * d1 + W(2) * s2 * c2 * d2 + k1 * c1 * q1 + k1 * d1 * p1 + k2 * c2 * q2 + k2 * d2 * p2;
    W worst(0);
    for (int n1 = -2; n1 <= 2; ++n1) {
        for (int n2 = -2; n2 <= 2; ++n2) {
            for (int n3 = -2; n3 <= 2; ++n3) {
                const W m1(n1), m2(n2), m3(n3);
                const W arg1 = m1 + p1 * m2 + q1 * m3;
                const W arg2 = m1 + p2 * m2 + q2 * m3;
                const W arg3 = m1 + m2 + m3;
                const W value = m1 * m2 * x12 + m1 * m3 * x13 + m2 * m3 * x23 + l1 * arg1 * arg1 +
                                l2 * arg2 * arg2 + l3 * arg3 * arg3 - lambda * (m1 * m1 + m2 * m2 + m3 * m3);
                const W mag = abs_value<W>(value);
                if (mag > worst) worst = mag;
            }
        }
    }
    add("(t1.23)", worst);
    return report;
}

// ---------------------------------------------------------------------------
// Subgroups L, M, N

/// Subgroups of R x Z that occur: R x {0} and Y^(2) = R x 2Z.
enum class SubgroupTag { full_r, y2 };

inline std::string to_string(SubgroupTag t) { return t == SubgroupTag::full_r ? "R" : "Y2"; }

/// True when every (s, 0) lies in the subgroup (both tags contain R x {0}).
inline bool contains_real_line(SubgroupTag) { return true; }

/// Whether (s, n) lies in the subgroup.
inline bool contains(SubgroupTag tag, long long n) { return tag == SubgroupTag::full_r ? n == 0 : n % 2 == 0; }

struct LMN {
    SubgroupTag L;
    SubgroupTag M;
    SubgroupTag N;

    /// Row of the five-case table, 1-based; 0 if the triple is not listed.
    int table_case() const {
        using enum SubgroupTag;
        if (L == full_r && M == full_r && N == full_r) return 1;
        if (L == full_r && M == y2 && N == y2) return 2;
        if (L == y2 && M == full_r && N == y2) return 3;
        if (L == y2 && M == y2 && N == full_r) return 4;
        if (L == y2 && M == y2 && N == y2) return 5;
        return 0;
    }
    friend bool operator==(const LMN&, const LMN&) = default;
};

namespace detail {
/// Image of (s, n) -> (A s + C n, P n) where only "A != 0" and P matter.
struct DualMapShape {
    bool continuous;
    long long p;
};

/// The subgroup generated by the images of several such maps, when it is
/// one of R x {0}, R x 2Z.
inline std::optional<SubgroupTag> image_sum(std::initializer_list<DualMapShape> maps) {
    bool continuous = false;
    long long g = 0;
    for (const auto& m : maps) {
        continuous = continuous || m.continuous;
        g = std::gcd(g, std::llabs(m.p));
    }
    if (!continuous) return std::nullopt;
    if (g == 0) return SubgroupTag::full_r;
    if (g == 2) return SubgroupTag::y2;
    return std::nullopt;
}

template <Scalar T>
DualMapShape minus_identity(const BasicCylinderAuto<T>& e) {
    return {e.a() != T(1), e.p() - 1};
}

template <Scalar T>
DualMapShape difference(const BasicCylinderAuto<T>& e, const BasicCylinderAuto<T>& f) {
    return {e.a() != f.a(), e.p() - f.p()};
}
}  // namespace detail

/// L = (alpha_1~ - I)Y + (beta_1~ - I)Y, M = (alpha_2~ - I)Y + (beta_2~ - I)Y,
/// N = (alpha_2~ - alpha_1~)Y + (beta_2~ - beta_1~)Y, computed from the images.
template <Scalar T>
LMN classify_LMN(const StatMatrix<BasicCylinderAuto<T>>& m) {
    if (m.size() != 3) throw InvalidInput("classify_LMN needs a 3x3 matrix");
    if (!is_normal_form(m)) throw InvalidInput("classify_LMN needs a normal-form matrix");
    const auto& al1 = m(1, 0);
    const auto& al2 = m(1, 1);
    const auto& be1 = m(2, 0);
    const auto& be2 = m(2, 1);
    const auto L = detail::image_sum({detail::minus_identity(al1), detail::minus_identity(be1)});
    if (!L) throw InvalidInput("condition (i) violated: a1 = b1 = 1, L is not R or Y2");
    const auto M = detail::image_sum({detail::minus_identity(al2), detail::minus_identity(be2)});
    if (!M) throw InvalidInput("condition (ii) violated: a2 = b2 = 1, M is not R or Y2");
    const auto N = detail::image_sum({detail::difference(al2, al1), detail::difference(be2, be1)});
    if (!N) throw InvalidInput("statement 3 violated: a1 = a2 and b1 = b2, N is not R or Y2");
    return {*L, *M, *N};
}

// ---------------------------------------------------------------------------
// Support of nu = mu_1 * mu_1~ * mu_2 * mu_2~ * mu_3 * mu_3~

struct NuSupportReport {
    double sigma = 0.0;
    double kappa = 0.0;
    double lambda = 0.0;
    double defect = 0.0;  // |4 sigma lambda - kappa^2|
    Support support;
    Rational identity_lhs;
    Rational identity_rhs;

    bool line_ok(double tol = 1e-10) const { return defect <= tol; }
    bool identity_holds() const { return identity_lhs == identity_rhs; }
    bool ok(double tol = 1e-10) const { return line_ok(tol) && identity_holds(); }
};

template <Scalar T>
NuSupportReport nu_support_check(std::span<const BasicCylinderCF<T>> cfs, const StatMatrix<BasicCylinderAuto<T>>& m) {
    if (cfs.size() != 3) throw InvalidInput("nu_support_check needs three CFs");
    BasicCylinderCF<T> nu{};
    for (const auto& cf : cfs) nu = convolve(nu, symmetrize(cf));
    NuSupportReport r;
    r.sigma = to_double(nu.sigma);
    r.kappa = to_double(nu.kappa);
    r.lambda = to_double(nu.lambda);
    const T defect = T(4) * nu.sigma * nu.lambda - nu.kappa * nu.kappa;
    r.defect = to_double(abs_value<T>(defect));
    r.support = support_line(nu);

    const auto pr = normal_form_params(m);
    const auto [lhs, rhs] = support_identity_sides(scalar_cast<Rational>(pr.a1), scalar_cast<Rational>(pr.a2),
                                                   scalar_cast<Rational>(pr.b1), scalar_cast<Rational>(pr.b2));
    r.identity_lhs = lhs;
    r.identity_rhs = rhs;
    return r;
}

}  // namespace cylsd
