#pragma once

// JSON fixtures, parameter files and reports.
//
// Exact quantities are written as "m/d" strings. Readers accept either such a
// string or a JSON number; numbers are converted exactly from their binary
// double value, so "0.1" and 0.1 are different inputs.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cylsd/charfn.hpp"
#include "cylsd/constructions.hpp"
#include "cylsd/error.hpp"
#include "cylsd/group.hpp"
#include "cylsd/independence.hpp"
#include "cylsd/rational.hpp"
#include "cylsd/solenoid.hpp"
#include "cylsd/stat_matrix.hpp"

namespace cylsd {

using json = nlohmann::json;

inline json rational_json(const Rational& r) { return to_string(r); }

inline Rational rational_from_json(const json& j, const std::string& what) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return rational_from_double(j.get<double>());
    throw InvalidInput(what + " must be a number or a rational string");
}

inline double double_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
    throw InvalidInput(what + " must be a number or a rational string");
}

inline int sign_from_json(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw InvalidInput(what + " must be +1 or -1");
    const int v = j.get<int>();
    if (v != 1 && v != -1) throw InvalidInput(what + " must be +1 or -1");
    return v;
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline json auto_json(const ExactAuto& e) { return {{"a", rational_json(e.a())}, {"c", rational_json(e.c())}, {"p", e.p()}}; }

inline ExactAuto auto_from_json(const json& j, const std::string& where) {
    return {rational_from_json(field(j, "a", where), where + ".a"), rational_from_json(field(j, "c", where), where + ".c"),
            sign_from_json(field(j, "p", where), where + ".p")};
}

inline json cf_json(const ExactCylinderCF& cf) {
    return {{"kind", "cylinder"},
            {"sigma", rational_json(cf.sigma)},
            {"kappa", rational_json(cf.kappa)},
            {"lambda", rational_json(cf.lambda)},
            {"tau", rational_json(cf.tau)},
            {"theta", rational_json(cf.theta)},
            {"twist", rational_json(cf.twist)}};
}

inline json cf_json(const TorusCF& cf) {
    return {{"kind", "torus"}, {"sigma", cf.sigma}, {"theta", cf.theta}, {"twist", cf.twist}};
}

inline ExactCylinderCF cylinder_cf_from_json(const json& j, const std::string& where) {
    auto get = [&](const char* key) {
        return j.contains(key) ? rational_from_json(j.at(key), where + "." + key) : Rational(0);
    };
    ExactCylinderCF cf{get("sigma"), get("kappa"), get("lambda"), get("tau"), get("theta"), get("twist")};
    check_admissible(cf);
    return cf;
}

inline TorusCF torus_cf_from_json(const json& j, const std::string& where) {
    auto get = [&](const char* key) { return j.contains(key) ? double_from_json(j.at(key), where + "." + key) : 0.0; };
    TorusCF cf{get("sigma"), get("theta"), get("twist")};
    check_admissible(cf);
    return cf;
}

template <class Entry, class ToJson>
json matrix_json(const StatMatrix<Entry>& m, ToJson to_json) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline json fixture_json(const CylinderFamily& fam) {
    json cfs = json::array();
    for (const auto& cf : fam.cfs) cfs.push_back(cf_json(cf));
    return {{"family", fam.family},
            {"group", "cylinder"},
            {"omega", rational_json(fam.omega)},
            {"matrix", matrix_json(fam.matrix, [](const ExactAuto& e) { return auto_json(e); })},
            {"cfs", cfs}};
}

inline json fixture_json(const TorusFamily& fam) {
    json cfs = json::array();
    for (const auto& cf : fam.cfs) cfs.push_back(cf_json(cf));
    return {{"family", fam.family},
            {"group", "torus"},
            {"matrix", matrix_json(fam.matrix, [](const TorusAuto& e) { return auto_json(ExactAuto(1, 0, e.p())); })},
            {"cfs", cfs}};
}

struct Fixture {
    std::string family;
    std::optional<CylinderFamily> cylinder;
    std::optional<TorusFamily> torus;
};

inline Fixture fixture_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("fixture must be a JSON object");
    const json& rows = field(j, "matrix", "fixture");
    const json& cfs = field(j, "cfs", "fixture");
    if (!rows.is_array() || !cfs.is_array()) throw InvalidInput("fixture: 'matrix' and 'cfs' must be arrays");
    const std::size_t n = rows.size();
    if (cfs.size() != n) {
        throw InvalidInput("dimension mismatch: " + std::to_string(cfs.size()) + " CFs for " + std::to_string(n) +
                           " statistics");
    }
    std::vector<ExactAuto> entries;
    for (std::size_t i = 0; i < n; ++i) {
        if (!rows[i].is_array() || rows[i].size() != n) throw InvalidInput("fixture: matrix must be square");
        for (std::size_t k = 0; k < n; ++k) {
            entries.push_back(auto_from_json(rows[i][k], "matrix[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
        }
    }
    StatMatrix<ExactAuto> matrix(n, entries);

    Fixture out;
    out.family = j.value("family", std::string("custom"));
    std::string group = j.value("group", std::string());
    if (group.empty() && n > 0) group = cfs[0].value("kind", std::string("cylinder"));

    if (group == "torus") {
        std::vector<TorusAuto> signs;
        for (const auto& e : entries) {
            if (e.a() != 1 || e.c() != 0) throw InvalidInput("torus fixture entries must have a = 1 and c = 0");
            signs.emplace_back(e.p());
        }
        std::vector<TorusCF> tcfs;
        for (std::size_t k = 0; k < n; ++k) tcfs.push_back(torus_cf_from_json(cfs[k], "cfs[" + std::to_string(k) + "]"));
        out.torus = TorusFamily{out.family, StatMatrix<TorusAuto>(n, signs), tcfs};
    } else if (group == "cylinder") {
        std::vector<ExactCylinderCF> ccfs;
        for (std::size_t k = 0; k < n; ++k) {
            ccfs.push_back(cylinder_cf_from_json(cfs[k], "cfs[" + std::to_string(k) + "]"));
        }
        const Rational omega = j.contains("omega") ? rational_from_json(j.at("omega"), "omega") : Rational(0);
        out.cylinder = CylinderFamily{out.family, std::move(matrix), std::move(ccfs), omega};
    } else {
        throw InvalidInput("fixture: unknown group '" + group + "'");
    }
    return out;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path);
    out << j.dump(2) << '\n';
}

/// {"base": [a0, a1, ...]} or {"arithmetic": {"start": s, "step": d, "length": L}}.
inline BaseSequence base_from_json(const json& j) {
    if (j.contains("base")) {
        const auto& arr = j.at("base");
        if (!arr.is_array()) throw InvalidInput("'base' must be an array of integers");
        std::vector<long long> a;
        for (const auto& v : arr) {
            if (!v.is_number_integer()) throw InvalidInput("'base' must be an array of integers");
            a.push_back(v.get<long long>());
        }
        return BaseSequence(std::move(a));
    }
    if (j.contains("arithmetic")) {
        const auto& g = j.at("arithmetic");
        const auto start = field(g, "start", "arithmetic").get<long long>();
        const auto step = g.value("step", 1LL);
        const auto length = field(g, "length", "arithmetic").get<long long>();
        if (length < 1) throw InvalidInput("arithmetic base length must be positive");
        return BaseSequence::arithmetic(start, step, static_cast<std::size_t>(length));
    }
    throw InvalidInput("base file needs 'base' or 'arithmetic'");
}

inline json condition_json(const ConditionReport& r) {
    json j{{"identity1_residual", rational_json(r.identity1)},
           {"sign_row", r.sign_row ? json(*r.sign_row) : json(nullptr)},
           {"distinct_a", r.distinct_a},
           {"distinct_b", r.distinct_b},
           {"cross_det", rational_json(r.cross_det)},
           {"corner_det", rational_json(r.corner_det)},
           {"statements",
            {{"1", r.statement1()}, {"2", r.statement2()}, {"3", r.statement3()}, {"4", r.statement4()}, {"5", r.statement5()}}},
           {"all_hold", r.all_hold()}};
    return j;
}

inline json dual_json(const DualPoint& y) { return json::array({y.s, y.n}); }
inline json dual_json(const ExactDualPoint& y) { return json::array({rational_json(y.s), y.n}); }
inline json dual_json(long long n) { return n; }

template <class Dual>
json residual_json(const ResidualReport<Dual>& r) {
    json tuple = json::array();
    for (const auto& y : r.worst_tuple) tuple.push_back(dual_json(y));
    return {{"residual", r.residual}, {"grid_size", r.grid_size}, {"worst_tuple", tuple}};
}

inline json system_json(const SystemReport& r) {
    json eqs = json::object();
    for (const auto& e : r.equations) eqs[e.equation] = e.residual;
    return eqs;
}

}  // namespace cylsd
