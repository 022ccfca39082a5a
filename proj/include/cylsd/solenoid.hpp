#pragma once

// a-adic integers, the rational group H_a, and independence checks on H_a x Z.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cylsd/charfn.hpp"
#include "cylsd/error.hpp"
#include "cylsd/group.hpp"
#include "cylsd/independence.hpp"
#include "cylsd/rational.hpp"
#include "cylsd/stat_matrix.hpp"

namespace cylsd {

/// Finite prefix (a_0, a_1, ...) of a base sequence, every a_k >= 2.
class BaseSequence {
public:
    explicit BaseSequence(std::vector<long long> a) : a_(std::move(a)) {
        if (a_.empty()) throw InvalidInput("base sequence must be nonempty");
        for (std::size_t k = 0; k < a_.size(); ++k) {
            if (a_[k] < 2) throw InvalidInput("base entry a_" + std::to_string(k) + " must be >= 2");
        }
        BigInt acc = 1;
        for (long long v : a_) {
            acc *= v;
            prefix_.push_back(acc);
        }
    }

    /// (start, start + step, start + 2 step, ...) with `length` entries.
    static BaseSequence arithmetic(long long start, long long step, std::size_t length) {
        std::vector<long long> a;
        for (std::size_t k = 0; k < length; ++k) a.push_back(start + step * static_cast<long long>(k));
        return BaseSequence(std::move(a));
    }

    std::size_t size() const { return a_.size(); }
    long long operator[](std::size_t k) const { return a_.at(k); }
    const std::vector<long long>& entries() const { return a_; }

    /// a_0 a_1 ... a_k.
    const BigInt& prefix_product(std::size_t k) const { return prefix_.at(k); }

    friend bool operator==(const BaseSequence& x, const BaseSequence& y) { return x.a_ == y.a_; }

private:
    std::vector<long long> a_;
    std::vector<BigInt> prefix_;
};

/// Digits x_0, x_1, ... with 0 <= x_k < a_k, truncated at the working precision.
class AdicInteger {
public:
    AdicInteger(const BaseSequence& base, std::vector<long long> digits) : digits_(std::move(digits)) {
        if (digits_.size() > base.size()) throw InvalidInput("a-adic precision exceeds the base prefix");
        for (std::size_t k = 0; k < digits_.size(); ++k) {
            if (digits_[k] < 0 || digits_[k] >= base[k]) {
                throw InvalidInput("digit x_" + std::to_string(k) + " out of range [0, " + std::to_string(base[k]) + ")");
            }
        }
    }

    static AdicInteger zero(const BaseSequence& base, std::size_t precision) {
        return {base, std::vector<long long>(precision, 0)};
    }

    std::size_t precision() const { return digits_.size(); }
    const std::vector<long long>& digits() const { return digits_; }
    friend bool operator==(const AdicInteger&, const AdicInteger&) = default;

private:
    std::vector<long long> digits_;
};

struct AdicSum {
    AdicInteger value;
    std::vector<int> carries;  // t_0, t_1, ...
};

/// x_0 + y_0 = t_0 a_0 + z_0,  x_{k+1} + y_{k+1} + t_k = t_{k+1} a_{k+1} + z_{k+1}.
inline AdicSum adic_add_with_carries(const AdicInteger& x, const AdicInteger& y, const BaseSequence& base) {
    if (x.precision() != y.precision()) throw InvalidInput("a-adic operands have different precision");
    std::vector<long long> z;
    std::vector<int> carries;
    int carry = 0;
    for (std::size_t k = 0; k < x.precision(); ++k) {
        const long long sum = x.digits()[k] + y.digits()[k] + carry;
        carry = sum >= base[k] ? 1 : 0;
        z.push_back(sum - carry * base[k]);
        carries.push_back(carry);
    }
    return {AdicInteger(base, std::move(z)), std::move(carries)};
}

inline AdicInteger adic_add(const AdicInteger& x, const AdicInteger& y, const BaseSequence& base) {
    return adic_add_with_carries(x, y, base).value;
}

/// Smallest k <= depth_limit with denominator(q) | a_0 ... a_k.
inline std::optional<std::size_t> ha_member(const Rational& q, const BaseSequence& base, std::size_t depth_limit) {
    const BigInt den = boost::multiprecision::denominator(q);
    const std::size_t last = std::min(depth_limit, base.size() - 1);
    for (std::size_t k = 0; k <= last; ++k) {
        if (base.prefix_product(k) % den == 0) return k;
    }
    return std::nullopt;
}

/// An element m / (a_0 ... a_depth) of H_a.
struct HaRational {
    Rational value;
    std::size_t depth = 0;

    static HaRational make(const Rational& q, const BaseSequence& base) {
        const auto k = ha_member(q, base, base.size() - 1);
        if (!k) throw InvalidInput(to_string(q) + " is not in H_a within the base prefix");
        return {q, *k};
    }
};

/// Generator 1 / (a_0 ... a_k) of H_a.
inline Rational ha_generator(const BaseSequence& base, std::size_t k) {
    return Rational(BigInt(1), base.prefix_product(k));
}

/// (r, n) -> (a r + c n, p n) on H_a x Z. Multiplication by a and by 1/a must
/// send every generator of depth <= check_depth into H_a (within the base prefix).
class SolenoidAuto {
public:
    SolenoidAuto(const Rational& a, const Rational& c, int p, const BaseSequence& base, std::size_t check_depth)
        : a_(a), c_(HaRational::make(c, base)), p_(p) {
        if (a == 0) throw InvalidInput("multiplier must be nonzero");
        if (p != 1 && p != -1) throw InvalidInput("p must be +1 or -1");
        if (check_depth >= base.size()) throw InvalidInput("check depth must be smaller than the base prefix length");
        for (std::size_t k = 0; k <= check_depth; ++k) {
            const Rational g = ha_generator(base, k);
            if (!ha_member(a * g, base, base.size() - 1)) {
                throw InvalidInput("multiplier " + to_string(a) + " sends 1/" + base.prefix_product(k).str() +
                                   " outside H_a");
            }
            if (!ha_member(g / a, base, base.size() - 1)) {
                throw InvalidInput("inverse multiplier 1/(" + to_string(a) + ") sends 1/" + base.prefix_product(k).str() +
                                   " outside H_a");
            }
        }
    }

    const Rational& a() const { return a_; }
    const HaRational& c() const { return c_; }
    int p() const { return p_; }
    ExactAuto as_cylinder_auto() const { return {a_, c_.value, p_}; }

private:
    Rational a_;
    HaRational c_;
    int p_;
};

/// Per-slot dual points (r, n) with r in {0, +-1/(a_0...a_k) : k <= depth}, n in {-2..2}.
inline std::vector<ExactDualPoint> ha_slot_values(const BaseSequence& base, std::size_t depth) {
    if (depth >= base.size()) throw InvalidInput("grid depth must be smaller than the base prefix length");
    std::vector<Rational> rs{0};
    for (std::size_t k = 0; k <= depth; ++k) {
        const Rational g = ha_generator(base, k);
        rs.push_back(g);
        rs.push_back(-g);
    }
    std::vector<ExactDualPoint> out;
    for (const auto& r : rs) {
        for (long long n = -2; n <= 2; ++n) out.push_back({r, n});
    }
    return out;
}

/// Independence residual of exact cylinder CFs restricted to H_a x Z, after
/// checking that every matrix entry is an automorphism of H_a x Z.
inline ResidualReport<ExactDualPoint> pullback_residual(std::span<const ExactCylinderCF> cfs,
                                                        const StatMatrix<ExactAuto>& m, const BaseSequence& base,
                                                        std::size_t grid_depth, std::size_t cap = 20000,
                                                        unsigned workers = 1) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& e = m(i, j);
            try {
                SolenoidAuto(e.a(), e.c(), e.p(), base, grid_depth);
            } catch (const InvalidInput& err) {
                throw InvalidInput("alpha[" + std::to_string(i) + "][" + std::to_string(j) +
                                   "] is not an automorphism of H_a x Z: " + err.what());
            }
        }
    }
    const auto slots = ha_slot_values(base, grid_depth);
    const auto grid = cartesian_grid<ExactDualPoint>(slots, n, cap);
    return independence_residual<ExactCylinderCF>(cfs, m, grid, workers);
}

}  // namespace cylsd
