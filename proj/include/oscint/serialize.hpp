#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "oscint/decomposition.hpp"
#include "oscint/experiments.hpp"
#include "oscint/fewnomial.hpp"
#include "oscint/interval.hpp"
#include "oscint/piece.hpp"
#include "oscint/quadrature.hpp"
#include "oscint/version.hpp"

namespace oscint {

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex_u64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

/// JSON-safe double: infinities fold to null (JSON has no inf literal).
inline nlohmann::json json_double(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline void to_json(nlohmann::json& j, const Fewnomial& q) {
    j = nlohmann::json{{"coeffs", q.coeffs}, {"exponents", q.exponents}};
}

inline void from_json(const nlohmann::json& j, Fewnomial& q) {
    std::vector<double> coeffs = j.at("coeffs").get<std::vector<double>>();
    std::vector<int> exps = j.at("exponents").get<std::vector<int>>();
    q = make_fewnomial(std::move(coeffs), std::move(exps));
}

inline void to_json(nlohmann::json& j, const IntegerInterval& iv) {
    if (iv.is_empty()) {
        j = nullptr;
        return;
    }
    j = nlohmann::json::array({iv.lo, iv.hi});
}

inline void to_json(nlohmann::json& j, const BadPair& p) {
    j = nlohmann::json{{"j1", p.j1}, {"j2", p.j2}, {"interval", p.scales}};
}

inline void to_json(nlohmann::json& j, const GoodComponent& c) {
    j = nlohmann::json{{"lo", c.lo},
                       {"hi", c.hi},
                       {"j1", c.j1},
                       {"j2", c.j2},
                       {"margin", json_double(c.margin)},
                       {"margin_log2", json_double(c.margin_log2)}};
}

inline void to_json(nlohmann::json& j, const BadSets& b) {
    j = nlohmann::json{{"gamma", b.gamma}, {"bad0", b.level0}, {"bad1", b.level1}};
}

inline void to_json(nlohmann::json& j, const MultiplierSample& s) {
    j = nlohmann::json{{"xi", s.xi},
                       {"re", s.value.real()},
                       {"im", s.value.imag()},
                       {"abs", std::abs(s.value)},
                       {"err", s.abs_err_estimate},
                       {"certified", s.certified},
                       {"pieces", s.pieces_used}};
}

inline void to_json(nlohmann::json& j, const SupResult& r) {
    j = nlohmann::json{{"sup", r.sup},
                       {"argmax_xi", r.argmax_xi},
                       {"certified_fraction", r.certified_fraction},
                       {"asymptote_gap", r.asymptote_gap}};
}

inline void to_json(nlohmann::json& j, const DecayFit& f) {
    j = nlohmann::json{{"C_hat", f.C_hat},
                       {"delta_hat", f.delta_hat},
                       {"residual", f.residual},
                       {"l_range", f.l_range},
                       {"second_deriv_min_ratio", json_double(f.second_deriv_min_ratio)},
                       {"points_used", f.points_used}};
}

inline void to_json(nlohmann::json& j, const DominationReport& r) {
    j = nlohmann::json{{"pass", r.pass},
                       {"worst_upper", r.worst_upper},
                       {"worst_lower", json_double(r.worst_lower)},
                       {"worst_lower_j1_form", json_double(r.worst_lower_j1_form)},
                       {"scales_checked", r.scales_checked}};
}

inline void to_json(nlohmann::json& j, const SweepRecord& r) {
    j = nlohmann::json{{"seed", r.seed},
                       {"d", r.d},
                       {"exponents", r.exponents},
                       {"coeff_decades", r.coeff_decades},
                       {"sup", r.sup},
                       {"argmax_xi", r.argmax_xi},
                       {"certified_fraction", r.certified_fraction},
                       {"wall_time", r.wall_time}};
}

inline void to_json(nlohmann::json& j, const GroupSummary& g) {
    j = nlohmann::json{{"key", g.key},
                       {"count", g.count},
                       {"max_sup", g.max_sup},
                       {"median_sup", g.median_sup}};
}

inline void to_json(nlohmann::json& j, const GrowthSummary& s) {
    j = nlohmann::json{{"group_by", s.group_by}, {"groups", s.groups}};
    if (s.slope_defined) {
        j["slope"] = s.slope;
        j["slope_ci"] = nlohmann::json::array({s.ci_lo, s.ci_hi});
        j["slope_ci_half_width"] = s.ci_half_width;
    }
    if (s.tau_defined) {
        j["tau"] = s.tau;
        j["tau_p_value"] = s.tau_p_value;
    }
    if (s.c_hat) j["c_hat"] = *s.c_hat;
    if (s.exploratory) j["exploratory"] = true;
}

inline void to_json(nlohmann::json& j, const FailingInstance& f) {
    j = nlohmann::json{
        {"seed", f.seed}, {"q", f.q}, {"gamma", f.gamma}, {"property", f.property}};
}

inline void to_json(nlohmann::json& j, const PropertyCounts& c) {
    j = nlohmann::json{{"checked", c.checked}, {"failed", c.failed}};
}

inline void to_json(nlohmann::json& j, const PropertyReport& r) {
    j = nlohmann::json{{"instances", r.instances},
                       {"gammas", r.gammas},
                       {"set_equality", r.set_equality},
                       {"connectedness", r.connectedness},
                       {"cardinality", r.cardinality},
                       {"component_count", r.component_count},
                       {"domination", r.domination},
                       {"pass", r.pass()},
                       {"failures", r.failures}};
}

inline constexpr const char* kSweepCsvHeader =
    "seed,d,n,exponents,coeff_decades,sup,argmax_xi,certified_fraction,wall_time";

inline std::string csv_row(const SweepRecord& r) {
    std::string exps;
    for (std::size_t i = 0; i < r.exponents.size(); ++i) {
        if (i) exps += ';';
        exps += std::to_string(r.exponents[i]);
    }
    std::string row;
    row += std::to_string(r.seed);
    row += ',';
    row += std::to_string(r.d);
    row += ',';
    row += std::to_string(r.exponents.empty() ? 0 : r.exponents.back());
    row += ',';
    row += exps;
    row += ',';
    row += format_double(r.coeff_decades);
    row += ',';
    row += format_double(r.sup);
    row += ',';
    row += format_double(r.argmax_xi);
    row += ',';
    row += format_double(r.certified_fraction);
    row += ',';
    row += format_double(r.wall_time);
    return row;
}

/// Metadata carried by every CLI output (JSON object, or '#'-prefixed first
/// line in CSV mode).
inline nlohmann::json metadata_json(std::uint64_t config_hash, std::uint64_t seed) {
    return nlohmann::json{
        {"version", version_string}, {"config_hash", hex_u64(config_hash)}, {"seed", seed}};
}

}
