#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cylsd/error.hpp"
#include "cylsd/group.hpp"

namespace cylsd {

/// n x n array of automorphisms; row i is the statistic L_i = sum_j alpha_ij xi_j.
template <class Auto>
class StatMatrix {
public:
    StatMatrix(std::size_t n, std::vector<Auto> entries) : n_(n), entries_(std::move(entries)) {
        if (n_ < 2) throw InvalidInput("statistic matrix needs n >= 2");
        if (entries_.size() != n_ * n_) {
            throw InvalidInput("statistic matrix needs " + std::to_string(n_ * n_) + " entries, got " +
                               std::to_string(entries_.size()));
        }
    }

    std::size_t size() const { return n_; }
    const Auto& operator()(std::size_t i, std::size_t j) const { return entries_.at(i * n_ + j); }
    const std::vector<Auto>& entries() const { return entries_; }

    template <class F>
    auto transform(F&& f) const {
        using Out = std::decay_t<decltype(f(entries_.front()))>;
        std::vector<Out> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(f(e));
        return StatMatrix<Out>(n_, std::move(out));
    }

    friend bool operator==(const StatMatrix&, const StatMatrix&) = default;

private:
    std::size_t n_;
    std::vector<Auto> entries_;
};

/// Flat list of n-tuples of dual points.
template <class Dual>
class TupleGrid {
public:
    explicit TupleGrid(std::size_t arity) : arity_(arity) {
        if (arity_ == 0) throw InvalidInput("tuple arity must be positive");
    }

    std::size_t arity() const { return arity_; }
    std::size_t size() const { return points_.size() / arity_; }
    bool empty() const { return points_.empty(); }

    void push(std::span<const Dual> tuple) {
        if (tuple.size() != arity_) throw InvalidInput("tuple has wrong arity");
        points_.insert(points_.end(), tuple.begin(), tuple.end());
    }

    std::span<const Dual> tuple(std::size_t k) const { return {points_.data() + k * arity_, arity_}; }

private:
    std::size_t arity_;
    std::vector<Dual> points_;
};

/// Cartesian power of per-slot values. When the full cube exceeds `cap`
/// tuples, one tuple is drawn uniformly from each of `cap` equal index strata.
template <class Dual>
TupleGrid<Dual> cartesian_grid(std::span<const Dual> slot_values, std::size_t arity, std::size_t cap,
                               std::uint64_t seed = 0x5eed) {
    if (slot_values.empty()) throw InvalidInput("empty slot values");
    const std::size_t base = slot_values.size();
    long double total_ld = 1;
    for (std::size_t i = 0; i < arity; ++i) total_ld *= static_cast<long double>(base);
    const bool subsample = total_ld > static_cast<long double>(cap);
    const auto total = static_cast<unsigned long long>(total_ld);

    TupleGrid<Dual> grid(arity);
    std::vector<Dual> tuple(arity);
    auto decode = [&](unsigned long long index) {
        for (std::size_t i = 0; i < arity; ++i) {
            tuple[arity - 1 - i] = slot_values[index % base];
            index /= base;
        }
        grid.push(tuple);
    };

    if (!subsample) {
        for (unsigned long long k = 0; k < total; ++k) decode(k);
        return grid;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < cap; ++k) {
        const auto lo = static_cast<unsigned long long>(static_cast<long double>(total) * k / cap);
        auto hi = static_cast<unsigned long long>(static_cast<long double>(total) * (k + 1) / cap);
        if (hi <= lo) hi = lo + 1;
        std::uniform_int_distribution<unsigned long long> pick(lo, hi - 1);
        decode(pick(rng));
    }
    return grid;
}

enum class GridDensity { standard, dense };

/// Per-slot dual points: s in {-2,-1,-1/2,0,1/2,1,2}, n in {-2..2}; the dense
/// variant halves the s spacing and doubles the n range.
inline std::vector<DualPoint> cylinder_slot_values(GridDensity density = GridDensity::standard) {
    const std::vector<double> s_std{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    const std::vector<double> s_dense{-2.0, -1.5, -1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    const auto& s_values = density == GridDensity::standard ? s_std : s_dense;
    const int n_max = density == GridDensity::standard ? 2 : 4;
    std::vector<DualPoint> out;
    for (double s : s_values) {
        for (int n = -n_max; n <= n_max; ++n) out.push_back({s, n});
    }
    return out;
}

inline std::vector<long long> torus_slot_values(GridDensity density = GridDensity::standard) {
    const int n_max = density == GridDensity::standard ? 2 : 4;
    std::vector<long long> out;
    for (int n = -n_max; n <= n_max; ++n) out.push_back(n);
    return out;
}

inline std::size_t grid_cap(GridDensity density) { return density == GridDensity::standard ? 100000 : 400000; }

inline TupleGrid<DualPoint> default_cylinder_grid(std::size_t arity, GridDensity density = GridDensity::standard) {
    const auto slots = cylinder_slot_values(density);
    return cartesian_grid<DualPoint>(slots, arity, grid_cap(density));
}

inline TupleGrid<long long> default_torus_grid(std::size_t arity, GridDensity density = GridDensity::standard) {
    const auto slots = torus_slot_values(density);
    return cartesian_grid<long long>(slots, arity, grid_cap(density));
}

}  // namespace cylsd
