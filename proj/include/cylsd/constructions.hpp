#pragma once

/**
 * @file constructions.hpp
 * @brief Explicit independent families.
 *
 * Every constructor checks the property it advertises before returning and
 * throws VerificationFailure if the check fails, so its output can be used
 * as a certified fixture. Violated preconditions throw InvalidInput.
 */

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "cylsd/charfn.hpp"
#include "cylsd/error.hpp"
#include "cylsd/group.hpp"
#include "cylsd/independence.hpp"
#include "cylsd/linalg.hpp"
#include "cylsd/rational.hpp"
#include "cylsd/stat_matrix.hpp"

namespace cylsd {

inline constexpr double construction_tol = 1e-12;

struct CylinderFamily {
    std::string family;
    StatMatrix<ExactAuto> matrix;
    std::vector<ExactCylinderCF> cfs;
    Rational omega;

    StatMatrix<CylinderAuto> float_matrix() const {
        return matrix.transform([](const ExactAuto& e) { return e.cast<double>(); });
    }
    std::vector<CylinderCF> float_cfs() const {
        std::vector<CylinderCF> out;
        for (const auto& cf : cfs) out.push_back(cf.cast<double>());
        return out;
    }
};

struct TorusFamily {
    std::string family;
    StatMatrix<TorusAuto> matrix;
    std::vector<TorusCF> cfs;
};

inline StatMatrix<TorusAuto> torus_matrix(std::size_t n, const std::vector<int>& signs) {
    std::vector<TorusAuto> entries;
    for (int p : signs) entries.emplace_back(p);
    return {n, std::move(entries)};
}

/// Normal-form statistics with alpha_i = (a_i, (a_i - p_i) omega; 0, p_i),
/// beta_i = (b_i, (b_i - q_i) omega; 0, q_i), and Gaussian CFs
/// exp(-sigma_j (s + omega n)^2) with sigma from solve_sigmas.
inline CylinderFamily remark3_family(const Rational& omega, const Rational& a1, const Rational& a2, const Rational& b1,
                                     const Rational& b2, int p1 = 1, int p2 = 1, int q1 = 1, int q2 = 1,
                                     const Rational& sigma_scale = 1) {
    if (sigma_scale <= 0) throw InvalidInput("sigma_scale must be positive");
    for (const auto& v : {a1, a2, b1, b2}) {
        if (v == 0) throw InvalidInput("automorphism multipliers must be nonzero");
    }
    const auto sigmas = solve_sigmas(a1, a2, b1, b2);
    if (!sigmas) throw InvalidInput("no positive σ solution for (a1, a2, b1, b2)");

    const ExactAuto id = ExactAuto::identity();
    const ExactAuto al1(a1, (a1 - p1) * omega, p1);
    const ExactAuto al2(a2, (a2 - p2) * omega, p2);
    const ExactAuto be1(b1, (b1 - q1) * omega, q1);
    const ExactAuto be2(b2, (b2 - q2) * omega, q2);
    StatMatrix<ExactAuto> m(3, {id, id, id, al1, al2, id, be1, be2, id});

    std::vector<ExactCylinderCF> cfs;
    for (const auto& s : *sigmas) {
        const Rational sigma = s * sigma_scale;
        cfs.push_back({sigma, 2 * sigma * omega, sigma * omega * omega, 0, 0, 0});
    }
    CylinderFamily fam{"remark3", std::move(m), std::move(cfs), omega};

    const auto system = gaussian_system_check<Rational>(fam.cfs, fam.matrix);
    if (!system.all_within(0.0)) {
        throw VerificationFailure("remark3 family fails " + *system.first_failing(0.0));
    }
    for (const auto& e : fam.matrix.entries()) {
        if (!preserves_line(e, omega)) throw VerificationFailure("remark3 automorphism does not preserve the support line");
    }
    for (const auto& cf : fam.cfs) {
        const auto sup = support_line(cf);
        if (sup.kind != SupportKind::line || !nearly_equal(sup.omega, to_double(omega), construction_tol)) {
            throw VerificationFailure("remark3 CF is not supported on the line of slope omega");
        }
    }
    const auto fcfs = fam.float_cfs();
    const auto report = independence_residual<CylinderCF>(fcfs, fam.float_matrix(), default_cylinder_grid(3));
    if (report.residual > construction_tol) {
        throw VerificationFailure("remark3 family residual " + std::to_string(report.residual) + " exceeds tolerance");
    }
    return fam;
}

/// Signed measure on Z(2) with CF exp(kappa (1 - (-1)^n)).
inline Z2SignedMeasure z2_signed_measure(double kappa) { return z2_from_twist(kappa); }

namespace detail {
inline void require_valid(const TorusCF& cf, const std::string& member) {
    const auto check = is_valid_probability(cf);
    if (!check.ok()) {
        throw InvalidInput("invalid probability: " + member + " (" + to_string(check.verdict) +
                           ", min density/mass " + std::to_string(check.min_density) + ")");
    }
}

inline void require_independent(const TorusFamily& fam) {
    const auto report =
        independence_residual<TorusCF>(fam.cfs, fam.matrix, default_torus_grid(fam.matrix.size()));
    if (report.residual > construction_tol) {
        throw VerificationFailure(fam.family + " residual " + std::to_string(report.residual) + " exceeds tolerance");
    }
}
}  // namespace detail

/// exp(-sigma n^2 + i theta1 n + kappa (1 - (-1)^n)) and
/// exp(-sigma n^2 + i theta2 n - kappa (1 - (-1)^n)), whose sum and
/// difference are independent.
inline TorusFamily lemma4_pair(double sigma, double theta1, double theta2, double kappa) {
    if (sigma < 0) throw InvalidInput("sigma must be nonnegative");
    TorusFamily fam{"lemma4", torus_matrix(2, {1, 1, 1, -1}),
                    {make_torus_cf(sigma, theta1, kappa), make_torus_cf(sigma, theta2, -kappa)}};
    detail::require_valid(fam.cfs[0], "member 1");
    detail::require_valid(fam.cfs[1], "member 2");
    detail::require_independent(fam);
    return fam;
}

/// Four variables on T with Hadamard sign statistics; mu_1 = mu_2 carry the
/// twist kappa and mu_3 = mu_4 carry -kappa.
inline TorusFamily remark4_counterexample(double sigma, double kappa) {
    if (kappa == 0.0) throw InvalidInput("not a counterexample: kappa = 0 makes every member Gaussian");
    if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
    const TorusCF plus = make_torus_cf(sigma, 0.0, kappa);
    const TorusCF minus = make_torus_cf(sigma, 0.0, -kappa);
    detail::require_valid(plus, "mu_1 = mu_2");
    detail::require_valid(minus, "mu_3 = mu_4");
    TorusFamily fam{"remark4",
                    torus_matrix(4, {1, 1, 1, 1, 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1}),
                    {plus, plus, minus, minus}};
    detail::require_independent(fam);
    for (const auto& cf : fam.cfs) {
        if (is_gaussian(cf)) throw VerificationFailure("remark4 member is Gaussian");
    }
    return fam;
}

/// L_1 = xi_1 + xi_2 + xi_3, L_2 = xi_1 - xi_2 + xi_3, L_3 = -xi_1 + xi_2 + xi_3.
inline StatMatrix<TorusAuto> lemma5_matrix() { return torus_matrix(3, {1, 1, 1, 1, -1, 1, -1, 1, 1}); }

struct Lemma5Verdict {
    std::string verdict;
    RationalMatrix system;  // one row per pair of statistics
    std::size_t nullity = 0;
    std::array<Rational, 3> sigma{};
};

/// For every pair of statistics (i, k) the Gaussian parts force
/// sum_j sigma_j h_ij h_kj = 0; the resulting homogeneous system is solved exactly.
inline Lemma5Verdict lemma5_scenario() {
    const auto m = lemma5_matrix();
    Lemma5Verdict out;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = i + 1; k < 3; ++k) {
            std::vector<Rational> row;
            for (std::size_t j = 0; j < 3; ++j) row.emplace_back(m(i, j).p() * m(k, j).p());
            out.system.push_back(std::move(row));
        }
    }
    const auto basis = nullspace(out.system);
    out.nullity = basis.size();
    out.verdict = basis.empty() ? "only degenerate solutions" : "nondegenerate solutions exist";
    return out;
}

}  // namespace cylsd
