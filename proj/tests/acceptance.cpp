// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cylsd.hpp"

using namespace cylsd;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Rational ex_a1 = 2, ex_a2 = -3, ex_b1 = Rational(-4, 5), ex_b2 = Rational(-1, 5);

// Random nonzero rationals with small numerators and denominators.
struct RationalSource {
    std::mt19937_64 rng;
    std::uniform_int_distribution<int> num{-12, 12}, den{1, 6};
    explicit RationalSource(std::uint64_t seed) : rng(seed) {}
    Rational operator()() {
        for (;;) {
            const Rational r(num(rng), den(rng));
            if (r != 0) return r;
        }
    }
};

// Tuples on the statement-1 variety: b2 solved from the other three.
std::vector<std::array<Rational, 4>> variety_tuples(std::size_t want, std::uint64_t seed) {
    RationalSource q(seed);
    std::vector<std::array<Rational, 4>> out;
    for (int tries = 0; tries < 200000 && out.size() < want; ++tries) {
        const Rational x1 = q(), x2 = q(), y1 = q();
        const Rational denom = x1 * (1 - x2) - y1 * (x1 - x2);
        if (denom == 0) continue;
        const Rational y2 = x2 * y1 * (1 - x1) / denom;
        if (y2 == 0 || x2 * y1 - x1 * y2 == 0) continue;
        out.push_back({x1, x2, y1, y2});
    }
    return out;
}

bool in_reference_sign_table(const std::array<Rational, 4>& t) {
    // Rows of the sign table for (a1, a2, b1, b2), transcribed independently of the library.
    static const char* rows[] = {"+--+", "+---", "-++-", "-+--", "--+-", "---+"};
    std::string s;
    for (const auto& v : t) s += v > 0 ? '+' : '-';
    return std::find(std::begin(rows), std::end(rows), s) != std::end(rows);
}

// ------------------------------------------------------------------ 1

Outcome criterion1() {
    Outcome o;
    const auto sig = solve_sigmas(ex_a1, ex_a2, ex_b1, ex_b2);
    o.require(sig && (*sig)[0] == 1 && (*sig)[1] == 1 && (*sig)[2] == 1, "solver gives (1,1,1)");
    // Exact substitution of sigma = (1,1,1) into the three real-line equations.
    o.require(ex_a1 + ex_a2 + 1 == 0, "sigma.a + sigma_3 = 0");
    o.require(ex_b1 + ex_b2 + 1 == 0, "sigma.b + sigma_3 = 0");
    o.require(ex_a1 * ex_b1 + ex_a2 * ex_b2 + 1 == 0, "sigma.ab + sigma_3 = 0");

    const auto fam = remark3_family(1, ex_a1, ex_a2, ex_b1, ex_b2);
    const auto grid = default_cylinder_grid(3);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = independence_residual<CylinderCF>(fam.float_cfs(), fam.float_matrix(), grid, 1);
    const double elapsed = seconds_since(t0);
    o.require(r.grid_size >= 10000, "grid has >= 1e4 tuples");
    o.require(r.residual <= 1e-12, "residual <= 1e-12");
    o.require(elapsed <= 10.0, "runtime <= 10 s");
    o.detail << "residual=" << r.residual << " tuples=" << r.grid_size << " time=" << elapsed << "s";
    return o;
}

// ------------------------------------------------------------------ 2

Outcome criterion2() {
    Outcome o;
    std::size_t accepted = 0, rejected_by_solver_on_variety = 0;
    for (const auto& t : variety_tuples(400, 2024)) {
        const auto s = solve_sigmas(t[0], t[1], t[2], t[3]);
        if (!s) {
            ++rejected_by_solver_on_variety;
            continue;
        }
        ++accepted;
        // Independent check: substitute the solver output into all three equations.
        const auto& [s1, s2, s3] = *s;
        o.require(s1 * t[0] + s2 * t[1] + s3 == 0 && s1 * t[2] + s2 * t[3] + s3 == 0 &&
                      s1 * t[0] * t[2] + s2 * t[1] * t[3] + s3 == 0,
                  "solver output solves the system");
        o.require(lemma2_identity(t[0], t[1], t[2], t[3]) == 0, "identity 1 vanishes on accepted tuple");
        o.require(in_reference_sign_table(t), "accepted sign pattern is a table row");
        o.require(match_sign_row(t[0], t[1], t[2], t[3]).has_value(), "library matches a table row");
    }

    RationalSource q(99);
    std::size_t rejected = 0, tried = 0;
    while (rejected < 200 && tried < 100000) {
        ++tried;
        const Rational a1 = q(), a2 = q(), b1 = q(), b2 = q();
        if (a2 * b1 - a1 * b2 == 0) continue;
        if (solve_sigmas(a1, a2, b1, b2)) continue;
        ++rejected;
        // Expanded independently: the third equation times the cross determinant.
        const Rational third = (b2 - a2) * a1 * b1 + (a1 - b1) * a2 * b2 + (a2 * b1 - a1 * b2);
        const Rational id = lemma2_identity(a1, a2, b1, b2);
        o.require(id == -third, "identity equals minus the third equation");
        o.require(id != 0, "identity 1 nonzero on rejected random tuple");
    }
    o.require(accepted >= 50, ">= 50 accepted families");
    o.require(rejected >= 50, ">= 50 rejected tuples");
    o.detail << "accepted=" << accepted << " (variety tuples with a nonpositive sigma: " << rejected_by_solver_on_variety
             << ") rejected_random=" << rejected;
    return o;
}

// ------------------------------------------------------------------ 3

Outcome criterion3() {
    Outcome o;
    std::vector<CylinderFamily> fams;
    for (const Rational& omega : {Rational(1), Rational(0), Rational(-3, 7), Rational(5, 2)}) {
        fams.push_back(remark3_family(omega, ex_a1, ex_a2, ex_b1, ex_b2));
    }
    for (const auto& t : variety_tuples(60, 7)) {
        if (!solve_sigmas(t[0], t[1], t[2], t[3])) continue;
        fams.push_back(remark3_family(Rational(2, 3), t[0], t[1], t[2], t[3]));
    }
    for (const auto& fam : fams) {
        const auto nu = nu_support_check<Rational>(fam.cfs, fam.matrix);
        o.require(nu.defect <= 1e-10, "4 sigma lambda - kappa^2 ~ 0");
        o.require(nu.support.kind == SupportKind::line && nu.support.omega == to_double(fam.omega), "support line is omega");
        o.require(nu.identity_holds(), "support identity exact");
        // Oracle: the symmetrized convolution has sigma = 2 sum sigma_j, kappa = 2 omega sigma, lambda = omega^2 sigma.
        Rational sum = 0;
        for (const auto& cf : fam.cfs) sum += cf.sigma;
        o.require(nu.sigma == to_double(2 * sum) && nu.kappa == to_double(4 * sum * fam.omega) &&
                      nu.lambda == to_double(2 * sum * fam.omega * fam.omega),
                  "nu parameters match parameter addition");
    }
    o.require(fams.size() >= 10, ">= 10 certified fixtures");
    o.detail << "fixtures=" << fams.size();
    return o;
}

// ------------------------------------------------------------------ 4

Outcome criterion4() {
    Outcome o;
    const auto pair = lemma4_pair(1.0, 0.3, 5.0, 0.05);
    const auto r2 = independence_residual<TorusCF>(pair.cfs, pair.matrix, default_torus_grid(2));
    o.require(r2.residual <= 1e-12, "lemma4 residual <= 1e-12");
    o.require(!is_gaussian(pair.cfs[0]) && !is_gaussian(pair.cfs[1]), "lemma4 members non-Gaussian");

    const auto four = remark4_counterexample(1.0, 0.05);
    const auto r4 = independence_residual<TorusCF>(four.cfs, four.matrix, default_torus_grid(4));
    o.require(r4.residual <= 1e-12, "remark4 residual <= 1e-12");
    for (const auto& cf : four.cfs) o.require(!is_gaussian(cf), "remark4 member non-Gaussian");
    for (const auto& cf : four.cfs) o.require(is_valid_probability(cf).ok(), "remark4 member is a probability");

    const auto v = lemma5_scenario();
    o.require(v.nullity == 0 && v.sigma == std::array<Rational, 3>{0, 0, 0}, "lemma5 sigma = 0 uniquely");

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    const auto m5 = lemma5_matrix();
    double smallest = INFINITY;
    for (int k = 0; k < 200; ++k) {
        const std::vector<TorusCF> cfs{make_torus_cf(u(rng), 0.0, 0.0), make_torus_cf(u(rng), 0.0, 0.0),
                                       make_torus_cf(u(rng), 0.0, 0.0)};
        smallest = std::min(smallest, independence_residual<TorusCF>(cfs, m5, default_torus_grid(3)).residual);
    }
    o.require(smallest > 1e-6, "every sigma > 0 triple flagged");
    o.detail << "lemma4=" << r2.residual << " remark4=" << r4.residual << " lemma5 min flagged residual=" << smallest;
    return o;
}

// ------------------------------------------------------------------ 5

Outcome criterion5() {
    Outcome o;
    using enum SubgroupTag;
    std::array<int, 6> realised_by_matrix{}, realised_by_family{};
    int excluded = 0;
    for (int mask = 0; mask < 16; ++mask) {
        const int p1 = mask & 1 ? -1 : 1, p2 = mask & 2 ? -1 : 1, q1 = mask & 4 ? -1 : 1, q2 = mask & 8 ? -1 : 1;
        // The case analysis of the lemma, written out directly.
        const SubgroupTag L = p1 == 1 && q1 == 1 ? full_r : y2;
        const SubgroupTag M = p2 == 1 && q2 == 1 ? full_r : y2;
        const SubgroupTag N = p1 == p2 && q1 == q2 ? full_r : y2;
        int expected_case = 0;
        if (L == full_r && M == full_r) expected_case = 1;
        if (L == full_r && M == y2) expected_case = N == y2 ? 2 : 0;
        if (L == y2 && M == full_r) expected_case = N == y2 ? 3 : 0;
        if (L == y2 && M == y2) expected_case = N == full_r ? 4 : 5;
        if (expected_case == 0) {
            ++excluded;
            continue;
        }

        const ExactAuto id = ExactAuto::identity();
        const StatMatrix<ExactAuto> m(3, {id, id, id, ExactAuto(ex_a1, Rational(1, 3), p1), ExactAuto(ex_a2, 2, p2), id,
                                          ExactAuto(ex_b1, -1, q1), ExactAuto(ex_b2, Rational(1, 7), q2), id});
        const auto got = classify_LMN(m);
        o.require(got == LMN{L, M, N}, "classifier matches case logic");
        o.require(got.table_case() == expected_case, "table row matches");
        ++realised_by_matrix[static_cast<std::size_t>(expected_case)];

        try {
            const auto fam = remark3_family(1, ex_a1, ex_a2, ex_b1, ex_b2, p1, p2, q1, q2);
            if (classify_LMN(fam.matrix).table_case() == expected_case) ++realised_by_family[std::size_t(expected_case)];
        } catch (const std::exception&) {
        }
    }
    for (int c = 1; c <= 5; ++c) o.require(realised_by_matrix[std::size_t(c)] > 0, "case " + std::to_string(c) + " producible");
    for (int c = 1; c <= 5; ++c) {
        o.require(realised_by_family[std::size_t(c)] > 0, "case " + std::to_string(c) + " realised by a certified family");
    }
    o.detail << "excluded=" << excluded << " cases(matrix)=";
    for (int c = 1; c <= 5; ++c) o.detail << realised_by_matrix[std::size_t(c)] << (c < 5 ? "," : "");
    o.detail << " cases(certified family)=";
    for (int c = 1; c <= 5; ++c) o.detail << realised_by_family[std::size_t(c)] << (c < 5 ? "," : "");
    return o;
}

// ------------------------------------------------------------------ 6

Outcome criterion6() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0), pos(0.1, 3.0);
    double worst = 0.0;
    int rejected_cubic = 0, rejected_odd = 0;
    const GridDomain d{};
    for (int k = 0; k < 100; ++k) {
        const double sigma = pos(rng), kappa = u(rng);
        std::vector<double> lam(static_cast<std::size_t>(d.n_max + 1));
        for (auto& v : lam) v = u(rng) * 5.0;
        auto lambda = [&](long long n) { return lam[static_cast<std::size_t>(std::llabs(n))]; };
        const auto f = sample([&](double s, long long n) { return std::complex<double>(sigma * s * s + kappa * n * s + lambda(n), 0.0); }, d);
        const auto fit = lemma8_fit(f);
        double err = std::abs(fit.sigma - sigma);
        for (long long n = d.n_min; n <= d.n_max; ++n) {
            err = std::max(err, std::abs(fit.kappa_at(n) - kappa * n));
            err = std::max(err, std::abs(fit.lambda_at(n) - lambda(n)));
        }
        worst = std::max(worst, err);

        const double eps = 0.01 + std::abs(u(rng)) / 10;
        const auto cubic = sample([&](double s, long long n) { return std::complex<double>(sigma * s * s + kappa * n * s + lambda(n) + eps * s * s * s, 0.0); }, d);
        try {
            lemma8_fit(cubic);
        } catch (const InvalidInput&) {
            ++rejected_cubic;
        }
        const auto odd = sample([&](double s, long long n) { return std::complex<double>(sigma * s * s + kappa * n * s + lambda(n) + eps * n * n * n, 0.0); }, d);
        try {
            lemma8_fit(odd);
        } catch (const InvalidInput&) {
            ++rejected_odd;
        }
    }
    o.require(worst <= 1e-9, "max parameter error <= 1e-9");
    o.require(rejected_cubic == 100, "all s^3 contaminations rejected");
    o.require(rejected_odd == 100, "all odd-lambda contaminations rejected");
    o.detail << "max_error=" << worst << " rejected s^3=" << rejected_cubic << "/100 odd=" << rejected_odd << "/100";
    return o;
}

// ------------------------------------------------------------------ 7

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome criterion7() {
    Outcome o;
    const auto fam = remark3_family(1, ex_a1, ex_a2, ex_b1, ex_b2);
    const auto cfs = fam.float_cfs();
    const auto m = fam.float_matrix();
    const auto probes = default_probes(3);

    const auto t0 = std::chrono::steady_clock::now();
    const auto samples = sample_family(cfs, 100000, 1);
    const auto r = empirical_independence(samples, m, probes, 200, 1);
    const double elapsed = seconds_since(t0);
    o.require(r.max_residual < 0.02, "max residual < 0.02");
    o.require(r.consistent_with_zero(), "bootstrap band contains 0");
    o.require(elapsed <= 60.0, "runtime <= 60 s");

    std::vector<double> small, large;
    for (std::uint64_t seed = 101; seed < 116; ++seed) {
        small.push_back(empirical_independence(sample_family(cfs, 25000, seed), m, probes, 0).max_residual);
        large.push_back(empirical_independence(sample_family(cfs, 100000, seed), m, probes, 0).max_residual);
    }
    const double ratio = median(large) / median(small);
    o.require(ratio >= 0.35 && ratio <= 0.65, "quadrupling count halves the median residual (+-30%)");
    o.detail << "max_residual=" << r.max_residual << " band=" << r.band << " time=" << elapsed
             << "s median ratio(4N/N)=" << ratio;
    return o;
}

// ------------------------------------------------------------------ 8

Outcome criterion8() {
    Outcome o;
    const auto base = BaseSequence::arithmetic(2, 1, 40);
    std::mt19937_64 rng(13);
    auto draw = [&]() {
        std::vector<long long> d;
        for (std::size_t k = 0; k < 32; ++k) d.push_back(std::uniform_int_distribution<long long>(0, base[k] - 1)(rng));
        return AdicInteger(base, d);
    };
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto x = draw(), y = draw(), z = draw();
        if (!(adic_add(x, y, base) == adic_add(y, x, base))) ++violations;
        if (!(adic_add(adic_add(x, y, base), z, base) == adic_add(x, adic_add(y, z, base), base))) ++violations;
    }
    o.require(violations == 0, "adic addition commutative and associative");

    double worst = 0.0;
    const auto prefix = BaseSequence::arithmetic(2, 1, 14);
    for (const Rational& omega : {Rational(1), Rational(0)}) {
        const auto fam = remark3_family(omega, ex_a1, ex_a2, ex_b1, ex_b2);
        worst = std::max(worst, pullback_residual(fam.cfs, fam.matrix, prefix, 6).residual);
    }
    o.require(worst <= 1e-12, "pullback residual <= 1e-12");

    bool rejected = false;
    try {
        SolenoidAuto(Rational(1, 7), 0, 1, BaseSequence(std::vector<long long>(20, 2)), 6);
    } catch (const InvalidInput&) {
        rejected = true;
    }
    o.require(rejected, "multiplier 1/7 rejected over (2,2,2,...)");
    o.detail << "adic violations=" << violations << " pullback residual=" << worst;
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 remark3 end-to-end", criterion1},       {"2 real-line identity", criterion2},
        {"3 support mechanism", criterion3},        {"4 torus dichotomy", criterion4},
        {"5 L/M/N classifier", criterion5},         {"6 quadratic-form round trip", criterion6},
        {"7 Monte Carlo corroboration", criterion7}, {"8 solenoid", criterion8},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
