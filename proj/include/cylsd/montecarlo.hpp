#pragma once

/**
 * @file montecarlo.hpp
 * @brief Sampling of the constructed laws and empirical independence tests.
 *
 * A centred Gaussian on R x T with log-CF -(sigma s^2 + kappa s n + lambda n^2)
 * is the image of a planar normal vector (t, phi) with covariance
 *
 *     2 | sigma     kappa/2 |
 *       | kappa/2   lambda  |
 *
 * under (t, phi) -> (t, phi mod 2pi), because E exp(i(st + n phi)) equals
 * exp(-Var(st + n phi) / 2). In particular t has variance 2 sigma.
 *
 * Random streams are split into fixed blocks of sample indices, each with its
 * own seed, so results do not depend on the number of worker threads.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "cylsd/charfn.hpp"
#include "cylsd/error.hpp"
#include "cylsd/group.hpp"
#include "cylsd/parallel.hpp"
#include "cylsd/stat_matrix.hpp"

namespace cylsd {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for block `block` of stream `stream` under the master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ block);
}

inline constexpr std::size_t sample_block = 8192;

namespace detail {
/// Fills out[k] = draw(rng) block by block; block b uses derive_seed(seed, stream, b).
template <class T, class Draw>
std::vector<T> blocked_draw(std::size_t count, std::uint64_t seed, std::uint64_t stream, unsigned workers, Draw draw) {
    std::vector<T> out(count);
    const std::size_t blocks = (count + sample_block - 1) / sample_block;
    parallel_chunks(blocks, workers, [&](std::size_t b0, std::size_t b1, std::size_t) {
        for (std::size_t b = b0; b < b1; ++b) {
            std::mt19937_64 rng(derive_seed(seed, stream, b));
            const std::size_t end = std::min(count, (b + 1) * sample_block);
            for (std::size_t k = b * sample_block; k < end; ++k) out[k] = draw(rng);
        }
    });
    return out;
}
}  // namespace detail

/// Points (t, omega t) + shift with t ~ Normal(0, 2 sigma).
inline std::vector<CylinderPoint> sample_line_gaussian(double sigma, double omega, const CylinderPoint& shift,
                                                       std::size_t count, std::uint64_t seed, unsigned workers = 1) {
    if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
    if (count < 1) throw InvalidInput("count must be >= 1");
    const double sd = std::sqrt(2.0 * sigma);
    return detail::blocked_draw<CylinderPoint>(count, seed, 0, workers, [&](std::mt19937_64& rng) {
        std::normal_distribution<double> normal(0.0, sd);
        const double t = normal(rng);
        return CylinderPoint(t, omega * t) + shift;
    });
}

/// Samples of the law with the given cylinder CF. A twist is realised as a
/// jump by pi with probability (1 - e^{2 twist}) / 2, which requires twist <= 0.
inline std::vector<CylinderPoint> sample_cylinder(const CylinderCF& cf, std::size_t count, std::uint64_t seed,
                                                  unsigned workers = 1, std::uint64_t stream = 0) {
    check_admissible(cf);
    if (count < 1) throw InvalidInput("count must be >= 1");
    const auto z2 = z2_from_twist(cf.twist);
    if (!z2.is_probability()) throw InvalidInput("invalid probability: the Z(2) factor has a negative mass");
    const double sd_t = std::sqrt(2.0 * cf.sigma);
    const double slope = cf.sigma > 0.0 ? cf.kappa / (2.0 * cf.sigma) : 0.0;
    const double cond_var = cf.sigma > 0.0 ? 2.0 * (cf.lambda - cf.kappa * cf.kappa / (4.0 * cf.sigma)) : 2.0 * cf.lambda;
    const double sd_phi = std::sqrt(std::max(cond_var, 0.0));
    return detail::blocked_draw<CylinderPoint>(count, seed, stream, workers, [&](std::mt19937_64& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double z1 = normal(rng);
        const double z2v = normal(rng);
        const double t = sd_t * z1;
        double phi = slope * t + sd_phi * z2v;
        if (uniform(rng) < z2.pm1) phi += std::numbers::pi;
        return CylinderPoint(t + cf.tau, phi + cf.theta);
    });
}

/// Angles drawn from the law with the given torus CF. Atoms when sigma = 0,
/// otherwise inverse-CDF sampling of the density on a 4096-cell grid.
inline std::vector<double> sample_torus_twisted(const TorusCF& cf, std::size_t count, std::uint64_t seed,
                                                unsigned workers = 1) {
    const auto check = is_valid_probability(cf);
    if (!check.ok()) throw InvalidInput("invalid probability: torus CF is " + to_string(check.verdict));
    if (count < 1) throw InvalidInput("count must be >= 1");

    if (cf.sigma == 0.0) {
        const auto z2 = z2_from_twist(cf.twist);
        return detail::blocked_draw<double>(count, seed, 0, workers, [&](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            return reduce_angle(cf.theta + (uniform(rng) < z2.pm1 ? std::numbers::pi : 0.0));
        });
    }

    constexpr int cells = 4096;
    int truncation = 1;
    while (truncation < 4096 && std::exp(-cf.sigma * truncation * truncation + 2.0 * std::abs(cf.twist)) > 1e-17) {
        ++truncation;
    }
    std::vector<double> cdf(cells + 1, 0.0);
    for (int k = 0; k < cells; ++k) {
        const double phi = two_pi * (k + 0.5) / cells;
        double density = 1.0;
        for (int n = 1; n <= truncation; ++n) density += 2.0 * std::real(eval(cf, n) * std::polar(1.0, -n * phi));
        cdf[k + 1] = cdf[k] + std::max(density, 0.0);
    }
    for (auto& v : cdf) v /= cdf.back();

    return detail::blocked_draw<double>(count, seed, 0, workers, [&](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double u = uniform(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto k = static_cast<int>(std::clamp<std::ptrdiff_t>(it - cdf.begin() - 1, 0, cells - 1));
        const double width = cdf[k + 1] - cdf[k];
        const double frac = width > 0.0 ? (u - cdf[k]) / width : 0.5;
        return reduce_angle(two_pi * (k + frac) / cells);
    });
}

inline std::complex<double> empirical_cf(std::span<const CylinderPoint> samples, const DualPoint& y) {
    std::complex<double> acc = 0.0;
    for (const auto& x : samples) acc += pair(x, y);
    return acc / static_cast<double>(samples.size());
}

inline std::complex<double> empirical_cf(std::span<const double> angles, long long n) {
    std::complex<double> acc = 0.0;
    for (double a : angles) acc += std::polar(1.0, static_cast<double>(n) * a);
    return acc / static_cast<double>(angles.size());
}

/// Probe tuples: the Cartesian power of {(1/2,0), (1,0), (0,1), (1/2,1)}.
inline TupleGrid<DualPoint> default_probes(std::size_t arity) {
    const std::vector<DualPoint> slots{{0.5, 0}, {1.0, 0}, {0.0, 1}, {0.5, 1}};
    return cartesian_grid<DualPoint>(slots, arity, 1u << 20);
}

struct EmpiricalReport {
    std::size_t count = 0;
    std::size_t probes = 0;
    std::vector<double> residuals;  // per probe tuple
    double max_residual = 0.0;
    std::size_t worst_probe = 0;
    int replicates = 0;
    double band = 0.0;  // 95% quantile of the bootstrap sup-deviation
    double lo = 0.0;    // max(0, max_residual - band)
    double hi = 0.0;    // max_residual + band

    bool consistent_with_zero() const { return max_residual <= band; }
};

/// |E prod_i (L_i, y_i) - prod_i E (L_i, y_i)| over the probe tuples, where
/// L_i = sum_j alpha_ij xi_j. The band is the 95% percentile of
/// max_probe |D* - D| over `replicates` bootstrap resamples of the rows.
inline EmpiricalReport empirical_independence(const std::vector<std::vector<CylinderPoint>>& samples,
                                              const StatMatrix<CylinderAuto>& m, const TupleGrid<DualPoint>& probes,
                                              int replicates = 200, std::uint64_t seed = 1, unsigned workers = 1) {
    const std::size_t n = m.size();
    if (samples.size() != n) throw InvalidInput("need one sample vector per variable");
    const std::size_t count = samples.front().size();
    for (const auto& s : samples) {
        if (s.size() != count) throw InvalidInput("sample vectors must have equal length");
    }
    if (count == 0) throw InvalidInput("no samples");
    if (probes.arity() != n) throw InvalidInput("probe arity does not match the matrix");
    if (replicates < 0) throw InvalidInput("replicates must be nonnegative");

    // Distinct probe values per slot and the characters (L_i, y) per sample.
    std::vector<std::vector<DualPoint>> slot_values(n);
    std::vector<std::vector<std::size_t>> probe_slot(probes.size(), std::vector<std::size_t>(n));
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto tuple = probes.tuple(p);
        for (std::size_t i = 0; i < n; ++i) {
            auto& vals = slot_values[i];
            auto it = std::find(vals.begin(), vals.end(), tuple[i]);
            if (it == vals.end()) {
                vals.push_back(tuple[i]);
                it = vals.end() - 1;
            }
            probe_slot[p][i] = static_cast<std::size_t>(it - vals.begin());
        }
    }
    std::vector<std::vector<std::vector<std::complex<double>>>> chars(n);
    for (std::size_t i = 0; i < n; ++i) {
        chars[i].assign(slot_values[i].size(), std::vector<std::complex<double>>(count));
    }
    parallel_chunks(count, workers, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t k = b; k < e; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                CylinderPoint li(0.0, 0.0);
                for (std::size_t j = 0; j < n; ++j) li = li + apply_point(m(i, j), samples[j][k]);
                for (std::size_t v = 0; v < slot_values[i].size(); ++v) chars[i][v][k] = pair(li, slot_values[i][v]);
            }
        }
    });

    auto deviations = [&](auto&& index) {
        std::vector<std::complex<double>> d(probes.size());
        std::vector<std::vector<std::complex<double>>> marg(n);
        for (std::size_t i = 0; i < n; ++i) marg[i].assign(slot_values[i].size(), 0.0);
        std::vector<std::complex<double>> joint(probes.size(), 0.0);
        for (std::size_t r = 0; r < count; ++r) {
            const std::size_t k = index(r);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t v = 0; v < slot_values[i].size(); ++v) marg[i][v] += chars[i][v][k];
            }
            for (std::size_t p = 0; p < probes.size(); ++p) {
                std::complex<double> prod = 1.0;
                for (std::size_t i = 0; i < n; ++i) prod *= chars[i][probe_slot[p][i]][k];
                joint[p] += prod;
            }
        }
        const double inv = 1.0 / static_cast<double>(count);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            std::complex<double> prod = 1.0;
            for (std::size_t i = 0; i < n; ++i) prod *= marg[i][probe_slot[p][i]] * inv;
            d[p] = joint[p] * inv - prod;
        }
        return d;
    };

    EmpiricalReport report;
    report.count = count;
    report.probes = probes.size();
    report.replicates = replicates;
    const auto d_hat = deviations([](std::size_t r) { return r; });
    for (std::size_t p = 0; p < d_hat.size(); ++p) {
        report.residuals.push_back(std::abs(d_hat[p]));
        if (report.residuals.back() > report.max_residual) {
            report.max_residual = report.residuals.back();
            report.worst_probe = p;
        }
    }

    if (replicates > 0) {
        std::vector<double> sup(static_cast<std::size_t>(replicates));
        parallel_chunks(sup.size(), workers, [&](std::size_t b, std::size_t e, std::size_t) {
            std::vector<std::size_t> idx(count);
            for (std::size_t rep = b; rep < e; ++rep) {
                std::mt19937_64 rng(derive_seed(seed, 0xb007, rep));
                std::uniform_int_distribution<std::size_t> pick(0, count - 1);
                for (auto& v : idx) v = pick(rng);
                const auto d_star = deviations([&](std::size_t r) { return idx[r]; });
                double worst = 0.0;
                for (std::size_t p = 0; p < d_star.size(); ++p) worst = std::max(worst, std::abs(d_star[p] - d_hat[p]));
                sup[rep] = worst;
            }
        });
        std::sort(sup.begin(), sup.end());
        const auto q = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sup.size()))) - 1;
        report.band = sup[std::min(q, sup.size() - 1)];
    }
    report.lo = std::max(0.0, report.max_residual - report.band);
    report.hi = report.max_residual + report.band;
    return report;
}

/// Independent samples of each CF in the list, on separate random streams.
inline std::vector<std::vector<CylinderPoint>> sample_family(std::span<const CylinderCF> cfs, std::size_t count,
                                                             std::uint64_t seed, unsigned workers = 1) {
    std::vector<std::vector<CylinderPoint>> out;
    for (std::size_t j = 0; j < cfs.size(); ++j) out.push_back(sample_cylinder(cfs[j], count, seed, workers, j + 1));
    return out;
}

inline void write_samples_csv(std::ostream& out, std::span<const CylinderPoint> samples) {
    out << "t,theta\n";
    out.precision(17);
    for (const auto& x : samples) out << x.t() << ',' << x.theta() << '\n';
}

}  // namespace cylsd
