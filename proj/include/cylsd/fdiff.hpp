#pragma once

// Finite differences of functions sampled on a rectangular grid in R x Z.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cylsd/charfn.hpp"
#include "cylsd/error.hpp"
#include "cylsd/group.hpp"
#include "cylsd/independence.hpp"
#include "cylsd/rational.hpp"

namespace cylsd {

/// Values f(s0 + k hs, n0 + j) for 0 <= k < ns, 0 <= j < nn.
class GridFunction {
public:
    using value_type = std::complex<double>;

    GridFunction(double s0, double hs, int ns, long long n0, int nn, std::vector<value_type> values)
        : s0_(s0), hs_(hs), ns_(ns), n0_(n0), nn_(nn), values_(std::move(values)) {
        if (!(hs_ > 0.0)) throw InvalidInput("grid step in s must be positive");
        if (ns_ < 1 || nn_ < 1) throw InvalidInput("grid must be nonempty");
        if (values_.size() != static_cast<std::size_t>(ns_) * static_cast<std::size_t>(nn_)) {
            throw InvalidInput("grid value count does not match its shape");
        }
    }

    double s0() const { return s0_; }
    double hs() const { return hs_; }
    int ns() const { return ns_; }
    long long n0() const { return n0_; }
    int nn() const { return nn_; }
    double s_at(int k) const { return s0_ + k * hs_; }
    long long n_at(int j) const { return n0_ + j; }

    const value_type& at(int k, int j) const { return values_[static_cast<std::size_t>(j) * ns_ + k]; }
    value_type& at(int k, int j) { return values_[static_cast<std::size_t>(j) * ns_ + k]; }
    const std::vector<value_type>& values() const { return values_; }

    /// Index of s on the grid, if it is a node.
    std::optional<int> s_index(double s) const {
        const double r = (s - s0_) / hs_;
        const long long k = std::llround(r);
        if (std::abs(r - static_cast<double>(k)) > 1e-9 || k < 0 || k >= ns_) return std::nullopt;
        return static_cast<int>(k);
    }
    std::optional<int> n_index(long long n) const {
        if (n < n0_ || n >= n0_ + nn_) return std::nullopt;
        return static_cast<int>(n - n0_);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    double s0_;
    double hs_;
    int ns_;
    long long n0_;
    int nn_;
    std::vector<value_type> values_;
};

struct GridDomain {
    double s_min = -5.0;
    double s_max = 5.0;
    double hs = 0.25;
    long long n_min = -6;
    long long n_max = 6;
};

inline GridFunction sample(const std::function<std::complex<double>(double, long long)>& f,
                           const GridDomain& d = {}) {
    const int ns = static_cast<int>(std::llround((d.s_max - d.s_min) / d.hs)) + 1;
    const int nn = static_cast<int>(d.n_max - d.n_min + 1);
    if (ns < 1 || nn < 1) throw InvalidInput("empty sampling domain");
    std::vector<std::complex<double>> values;
    values.reserve(static_cast<std::size_t>(ns) * nn);
    for (int j = 0; j < nn; ++j) {
        for (int k = 0; k < ns; ++k) values.push_back(f(d.s_min + k * d.hs, d.n_min + j));
    }
    return {d.s_min, d.hs, ns, d.n_min, nn, std::move(values)};
}

/// psi(s, n) = -log |cf(s, n)|^2, the exponent of the symmetrized CF.
inline GridFunction psi_grid(const CylinderCF& cf, const GridDomain& d = {}) {
    return sample([&](double s, long long n) { return std::complex<double>(-2.0 * static_cast<double>(log_cf(cf, DualPoint{s, n}).re), 0.0); },
                  d);
}

/// (Delta_h f)(y) = f(y + h) - f(y), on the nodes y for which y + h is a node.
inline GridFunction delta(const GridFunction& f, const DualPoint& h) {
    const double r = h.s / f.hs();
    const long long ks = std::llround(r);
    if (std::abs(r - static_cast<double>(ks)) > 1e-9) {
        throw InvalidInput("difference step s = " + std::to_string(h.s) + " is not a multiple of the grid step");
    }
    const long long kn = h.n;
    const int ns = f.ns() - static_cast<int>(std::llabs(ks));
    const int nn = f.nn() - static_cast<int>(std::llabs(kn));
    if (ns < 1 || nn < 1) throw InvalidInput("grid too small for the requested differences");
    const int ks0 = ks < 0 ? static_cast<int>(-ks) : 0;
    const int kn0 = kn < 0 ? static_cast<int>(-kn) : 0;

    std::vector<std::complex<double>> values;
    values.reserve(static_cast<std::size_t>(ns) * nn);
    for (int j = 0; j < nn; ++j) {
        for (int k = 0; k < ns; ++k) {
            const int kk = k + ks0;
            const int jj = j + kn0;
            values.push_back(f.at(kk + static_cast<int>(ks), jj + static_cast<int>(kn)) - f.at(kk, jj));
        }
    }
    return {f.s_at(ks0), f.hs(), ns, f.n_at(kn0), nn, std::move(values)};
}

inline GridFunction delta_power(GridFunction f, const DualPoint& h, int power) {
    for (int i = 0; i < power; ++i) f = delta(f, h);
    return f;
}

/// Steps along which polynomial_degree differences.
inline std::array<DualPoint, 4> degree_steps(const GridFunction& f) {
    return {DualPoint{f.hs(), 0}, DualPoint{0.0, 1}, DualPoint{f.hs(), 1}, DualPoint{f.hs(), -1}};
}

/// Smallest d <= max_deg with |Delta_h^{d+1} f| <= tol for every step h of
/// degree_steps(f).
inline std::optional<int> polynomial_degree(const GridFunction& f, int max_deg, double tol) {
    if (max_deg < 0) throw InvalidInput("max_deg must be nonnegative");
    if (f.ns() < max_deg + 2 || f.nn() < max_deg + 2) {
        throw InvalidInput("grid too small for " + std::to_string(max_deg + 1) + " differences");
    }
    const auto steps = degree_steps(f);
    std::array<GridFunction, 4> current{f, f, f, f};
    for (int d = 0; d <= max_deg; ++d) {
        bool vanishes = true;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            current[i] = delta(current[i], steps[i]);
            if (current[i].max_abs() > tol) vanishes = false;
        }
        if (vanishes) return d;
    }
    return std::nullopt;
}

struct Lemma8Fit {
    double sigma = 0.0;
    std::vector<long long> n_values;
    std::vector<double> kappa;   // kappa(n) for n in n_values
    std::vector<double> lambda;  // lambda(n) for n in n_values
    double residual = 0.0;

    double kappa_at(long long n) const { return kappa.at(index(n)); }
    double lambda_at(long long n) const { return lambda.at(index(n)); }
    double evaluate(double s, long long n) const { return sigma * s * s + kappa_at(n) * s + lambda_at(n); }

private:
    std::size_t index(long long n) const {
        const auto it = std::find(n_values.begin(), n_values.end(), n);
        if (it == n_values.end()) throw InvalidInput("n = " + std::to_string(n) + " is outside the fitted range");
        return static_cast<std::size_t>(it - n_values.begin());
    }
};

/// Fits f(s, n) = sigma s^2 + kappa(n) s + lambda(n) with kappa odd and
/// lambda even; throws InvalidInput when f is not of that form within tol.
inline Lemma8Fit lemma8_fit(const GridFunction& f, double tol = 1e-9) {
    for (const auto& v : f.values()) {
        if (std::abs(v.imag()) > tol) throw InvalidInput("not of Lemma 8 form: f is not real-valued");
    }
    for (int j = 0; j < f.nn(); ++j) {
        for (int k = 0; k < f.ns(); ++k) {
            const auto jm = f.n_index(-f.n_at(j));
            const auto km = f.s_index(-f.s_at(k));
            if (!jm || !km) continue;
            if (std::abs(f.at(k, j).real() - f.at(*km, *jm).real()) > tol) {
                throw InvalidInput("symmetry violated: f(-y) != f(y) at (s, n) = (" + std::to_string(f.s_at(k)) +
                                   ", " + std::to_string(f.n_at(j)) + ")");
            }
        }
    }
    if (f.ns() < 4) throw InvalidInput("grid too small for a third difference in s");
    if (delta_power(f, DualPoint{f.hs(), 0}, 3).max_abs() > tol) {
        throw InvalidInput("not of Lemma 8 form: third difference in s does not vanish");
    }

    const int ns = f.ns();
    Eigen::MatrixXd design(ns, 3);
    for (int k = 0; k < ns; ++k) {
        const double s = f.s_at(k);
        design(k, 0) = s * s;
        design(k, 1) = s;
        design(k, 2) = 1.0;
    }
    const auto qr3 = design.colPivHouseholderQr();
    std::vector<double> sigmas;
    for (int j = 0; j < f.nn(); ++j) {
        Eigen::VectorXd rhs(ns);
        for (int k = 0; k < ns; ++k) rhs(k) = f.at(k, j).real();
        sigmas.push_back(qr3.solve(rhs)(0));
    }
    double sigma = 0.0;
    for (double v : sigmas) sigma += v;
    sigma /= static_cast<double>(sigmas.size());
    for (double v : sigmas) {
        if (std::abs(v - sigma) > tol) throw InvalidInput("not of Lemma 8 form: sigma(n) is not constant");
    }

    const Eigen::MatrixXd linear = design.rightCols(2);
    const auto qr2 = linear.colPivHouseholderQr();
    Lemma8Fit fit;
    fit.sigma = sigma;
    for (int j = 0; j < f.nn(); ++j) {
        Eigen::VectorXd rhs(ns);
        for (int k = 0; k < ns; ++k) rhs(k) = f.at(k, j).real() - sigma * design(k, 0);
        const Eigen::VectorXd coef = qr2.solve(rhs);
        fit.n_values.push_back(f.n_at(j));
        fit.kappa.push_back(coef(0));
        fit.lambda.push_back(coef(1));
        for (int k = 0; k < ns; ++k) {
            fit.residual = std::max(fit.residual, std::abs(rhs(k) - coef(0) * design(k, 1) - coef(1)));
        }
    }
    for (std::size_t i = 0; i < fit.n_values.size(); ++i) {
        const long long n = fit.n_values[i];
        const auto it = std::find(fit.n_values.begin(), fit.n_values.end(), -n);
        if (it == fit.n_values.end()) continue;
        const auto m = static_cast<std::size_t>(it - fit.n_values.begin());
        if (std::abs(fit.kappa[i] + fit.kappa[m]) > tol) throw InvalidInput("symmetry violated: kappa(-n) != -kappa(n)");
        if (std::abs(fit.lambda[i] - fit.lambda[m]) > tol) throw InvalidInput("symmetry violated: lambda(-n) != lambda(n)");
    }
    if (fit.residual > tol) throw InvalidInput("not of Lemma 8 form: fit residual exceeds tolerance");
    return fit;
}

/// Difference steps inside a tagged subgroup.
inline std::vector<DualPoint> subgroup_steps(SubgroupTag tag, double hs) {
    if (tag == SubgroupTag::full_r) return {{hs, 0}, {2.0 * hs, 0}};
    return {{hs, 0}, {0.0, 2}, {hs, 2}};
}

inline std::vector<DualPoint> generic_steps(double hs) { return {{hs, 0}, {0.0, 1}, {hs, 1}}; }

/// max |Delta_h Delta_k Delta_l psi| over h from generic_steps, k from K, l from L.
inline double triple_difference_residual(const GridFunction& psi, SubgroupTag k_tag, SubgroupTag l_tag) {
    double worst = 0.0;
    for (const auto& h : generic_steps(psi.hs())) {
        const auto dh = delta(psi, h);
        for (const auto& k : subgroup_steps(k_tag, psi.hs())) {
            const auto dk = delta(dh, k);
            for (const auto& l : subgroup_steps(l_tag, psi.hs())) worst = std::max(worst, delta(dk, l).max_abs());
        }
    }
    return worst;
}

/// Residuals of the three triple-difference equations:
///   psi_1 with k in N, l in L;  psi_2 with k in N, l in M;  psi_3 with k in L, l in M.
inline std::array<double, 3> verify_lemma6(const std::array<GridFunction, 3>& psis, const LMN& tags) {
    return {triple_difference_residual(psis[0], tags.N, tags.L), triple_difference_residual(psis[1], tags.N, tags.M),
            triple_difference_residual(psis[2], tags.L, tags.M)};
}

template <Scalar T>
std::array<double, 3> verify_lemma6(const std::array<GridFunction, 3>& psis, const StatMatrix<BasicCylinderAuto<T>>& m) {
    return verify_lemma6(psis, classify_LMN(m));
}

/// Checks that kappa_1(n), kappa_2(n), kappa_3(n) solve
///   kappa_1 + kappa_2 + kappa_3 = kappa n,
///   (a1 - 1) kappa_1 + (a2 - 1) kappa_2 = -kappa n,
///   (b1 - 1) kappa_1 + (b2 - 1) kappa_2 = -kappa n,
/// and that each kappa_j(n) / n is constant over n != 0.
inline bool verify_kappa_linearity(const std::vector<long long>& ns, const std::array<std::vector<double>, 3>& kappas,
                                   double a1, double a2, double b1, double b2, double kappa_total, double tol = 1e-9) {
    for (const auto& k : kappas) {
        if (k.size() != ns.size()) throw InvalidInput("kappa tables must match the n list");
    }
    const double det = (a1 - 1.0) * (b2 - 1.0) - (a2 - 1.0) * (b1 - 1.0);
    if (det == 0.0) throw InvalidInput("statement 5 violated: corner determinant is zero");

    std::array<std::optional<double>, 3> slope;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double n = static_cast<double>(ns[i]);
        const double rhs = -kappa_total * n;
        const double k1 = (rhs * (b2 - 1.0) - (a2 - 1.0) * rhs) / det;
        const double k2 = ((a1 - 1.0) * rhs - rhs * (b1 - 1.0)) / det;
        const std::array<double, 3> expected{k1, k2, kappa_total * n - k1 - k2};
        const double scale = 1.0 + std::abs(kappa_total * n);
        for (std::size_t j = 0; j < 3; ++j) {
            if (std::abs(kappas[j][i] - expected[j]) > tol * scale) return false;
            if (ns[i] == 0) continue;
            const double ratio = kappas[j][i] / n;
            if (!slope[j]) {
                slope[j] = ratio;
            } else if (std::abs(*slope[j] - ratio) > tol * (1.0 + std::abs(ratio))) {
                return false;
            }
        }
    }
    return true;
}

// CSV with header "s,n,re,im", one row per node.

inline void write_csv(std::ostream& out, const GridFunction& f) {
    out << "s,n,re,im\n";
    out.precision(17);
    for (int j = 0; j < f.nn(); ++j) {
        for (int k = 0; k < f.ns(); ++k) {
            out << f.s_at(k) << ',' << f.n_at(j) << ',' << f.at(k, j).real() << ',' << f.at(k, j).imag() << '\n';
        }
    }
}

inline GridFunction read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty grid CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "s,n,re,im") throw InvalidInput("grid CSV header must be 's,n,re,im'");

    std::vector<double> s_values;
    std::vector<std::complex<double>> cells;
    std::vector<long long> n_values;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::array<std::string, 4> fields;
        for (auto& x : fields) {
            if (!std::getline(ss, x, ',')) throw InvalidInput("grid CSV row " + std::to_string(row) + " needs 4 fields");
        }
        try {
            const double s = std::stod(fields[0]);
            const long long n = std::stoll(fields[1]);
            const std::complex<double> v{std::stod(fields[2]), std::stod(fields[3])};
            s_values.push_back(s);
            n_values.push_back(n);
            cells.push_back(v);
        } catch (const std::logic_error&) {
            throw InvalidInput("grid CSV row " + std::to_string(row) + " is not numeric");
        }
    }
    if (s_values.empty()) throw InvalidInput("grid CSV has no data rows");

    std::vector<double> s_sorted = s_values;
    std::sort(s_sorted.begin(), s_sorted.end());
    s_sorted.erase(std::unique(s_sorted.begin(), s_sorted.end(),
                               [](double x, double y) { return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x)); }),
                   s_sorted.end());
    const auto [n_lo, n_hi] = std::minmax_element(n_values.begin(), n_values.end());
    const int ns = static_cast<int>(s_sorted.size());
    const int nn = static_cast<int>(*n_hi - *n_lo + 1);
    const double hs = ns > 1 ? (s_sorted.back() - s_sorted.front()) / (ns - 1) : 1.0;
    if (static_cast<std::size_t>(ns) * nn != s_values.size()) throw InvalidInput("grid CSV is not a full rectangular grid");

    GridFunction out(s_sorted.front(), hs, ns, *n_lo, nn,
                     std::vector<std::complex<double>>(static_cast<std::size_t>(ns) * nn));
    std::vector<bool> seen(static_cast<std::size_t>(ns) * nn, false);
    for (std::size_t r = 0; r < s_values.size(); ++r) {
        const auto k = out.s_index(s_values[r]);
        if (!k) throw InvalidInput("grid CSV s values are not uniformly spaced");
        const int j = static_cast<int>(n_values[r] - *n_lo);
        const std::size_t flat = static_cast<std::size_t>(j) * ns + *k;
        if (seen[flat]) throw InvalidInput("grid CSV repeats a node");
        seen[flat] = true;
        out.at(*k, j) = cells[r];
    }
    return out;
}

}  // namespace cylsd
