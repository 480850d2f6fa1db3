#pragma once

// JSON forms of the library's values. Exact rationals are "p/q" strings, big
// integers are JSON numbers when they fit in 64 bits and decimal strings
// otherwise, and enclosures are {"lo","hi","precision_bits"} with the ends
// rounded outward.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qinf/cantor.hpp"
#include "qinf/covering.hpp"
#include "qinf/error.hpp"
#include "qinf/expansion.hpp"
#include "qinf/faithfulness.hpp"
#include "qinf/numeric.hpp"
#include "qinf/qvector.hpp"

namespace qinf::io {

using nlohmann::json;

inline constexpr int kDigits = 20;

inline json index_json(const Index& i) {
    if (i.fits_slong_p()) return json(i.get_si());
    return json(i.get_str());
}

inline Index index_from(const json& j) {
    if (j.is_number_unsigned()) return Index(j.get<unsigned long>());
    if (j.is_number_integer()) return Index(j.get<long>());
    if (j.is_string()) return parse_index(j.get<std::string>());
    throw ParseError("expected an integer, got " + j.dump());
}

/// Exact value of a JSON number or string, read from its literal text.
inline Rational rational_from(const json& j) {
    if (j.is_string()) return parse_decimal(j.get<std::string>());
    if (j.is_number()) return parse_decimal(j.dump());
    throw ParseError("expected a number, got " + j.dump());
}

inline json interval_json(const Interval& x, int digits = kDigits) {
    return json{{"lo", x.lower_string(digits)}, {"hi", x.upper_string(digits)}, {"precision_bits", x.precision()}};
}

inline json scalar_json(const Scalar& s, int digits = kDigits) {
    if (s.is_exact()) return json(to_string(s.exact()));
    return interval_json(s.enclose(*s.precision()), digits);
}

inline json address_json(const CylinderAddress& a) {
    json arr = json::array();
    for (const auto& d : a.digits) arr.push_back(index_json(d));
    return arr;
}

inline CylinderAddress address_from(const json& j) {
    if (!j.is_array()) throw ParseError("expected a digit array, got " + j.dump());
    CylinderAddress a;
    for (const auto& d : j) {
        Index v = index_from(d);
        if (v < 0) throw ParseError("digits must be nonnegative");
        a.digits.push_back(std::move(v));
    }
    return a;
}

inline CylinderAddress parse_digits(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed digit list \"" + std::string(text) + "\"");
    }
    return address_from(j);
}

// --- Q-vectors ------------------------------------------------------------

inline QVectorSpec qvec_from_json(const json& j, Precision p = kDefaultPrecision) {
    if (!j.is_object() || !j.contains("family")) throw ParseError("Q-vector JSON needs a \"family\" field");
    const std::string family = j.at("family").get<std::string>();
    NumericMode mode = NumericMode::Exact;
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "exact") mode = NumericMode::Exact;
        else if (m == "interval") mode = NumericMode::IntervalBounds;
        else throw ParseError("unknown mode \"" + m + "\"");
    }
    if (family == "luroth") return QVectorSpec::luroth(mode, p);
    if (family == "geometric") {
        if (!j.contains("ratio")) throw ParseError("geometric Q-vector needs \"ratio\"");
        return QVectorSpec::geometric(rational_from(j.at("ratio")), mode, p);
    }
    if (family == "powerlaw") {
        if (!j.contains("m0")) throw ParseError("power-law Q-vector needs \"m0\"");
        const json& m0 = j.at("m0");
        return QVectorSpec::power_law(m0.is_string() ? m0.get<std::string>() : m0.dump(), p);
    }
    if (family == "custom") {
        if (!j.contains("weights") || !j.at("weights").is_array()) throw ParseError("custom Q-vector needs \"weights\"");
        std::vector<Rational> w;
        for (const auto& x : j.at("weights")) w.push_back(rational_from(x));
        std::optional<Rational> pad;
        if (j.contains("pad_mass")) pad = rational_from(j.at("pad_mass"));
        return QVectorSpec::custom(std::move(w), pad, mode, p);
    }
    throw ParseError("unknown Q-vector family \"" + family + "\"");
}

inline json qvec_json(const QVectorSpec& q) {
    json j = std::visit(
        [](const auto& f) -> json {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, LurothFamily>) {
                return json{{"family", "luroth"}};
            } else if constexpr (std::is_same_v<F, GeometricFamily>) {
                return json{{"family", "geometric"}, {"ratio", to_string(f.ratio)}};
            } else if constexpr (std::is_same_v<F, PowerLawFamily>) {
                return json{{"family", "powerlaw"}, {"m0", f.exponent_text}};
            } else {
                json w = json::array();
                for (const auto& r : f.user_weights) w.push_back(to_string(r));
                return json{{"family", "custom"}, {"weights", w}, {"pad_mass", to_string(f.pad_mass)}};
            }
        },
        q.family());
    j["mode"] = q.exact() ? "exact" : "interval";
    return j;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open \"" + path + "\"");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("\"" + path + "\": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write \"" + path + "\"");
    out << text;
    if (!out) throw Error("write to \"" + path + "\" failed");
}

inline QVectorSpec load_qvec(const std::string& path, Precision p = kDefaultPrecision) {
    return qvec_from_json(read_json_file(path), p);
}

// --- points and cylinders -----------------------------------------------------

/// Expansion of an exact Q-rational; throws once max_digits is exceeded.
inline QRational qrational_from_value(const QVectorSpec& spec, Rational x, std::size_t max_digits = 256) {
    if (!spec.exact()) throw InvalidArgument("rational endpoints need an exact Q-vector");
    if (x == 1) return QRational::end();
    if (x < 0 || x > 1) throw InvalidArgument("endpoint outside [0,1]");
    CylinderAddress a;
    while (x != 0) {
        if (a.rank() >= max_digits) throw ParseError("value is not a Q-rational within " + std::to_string(max_digits) + " digits");
        Index d = encode(spec, Scalar(x), 1).digits.front();
        x = (x - spec.head_sum(d).exact()) / spec.q(d).exact();
        x.canonicalize();
        a.digits.push_back(std::move(d));
    }
    return QRational::from_digits(std::move(a));
}

/// "digits:[...]", "end" or an exact rational "p/q".
inline QRational parse_qrational(const QVectorSpec& spec, std::string_view text) {
    if (text == "end") return QRational::end();
    constexpr std::string_view tag = "digits:";
    if (text.substr(0, tag.size()) == tag) return QRational::from_digits(parse_digits(text.substr(tag.size())));
    return qrational_from_value(spec, parse_rational(text));
}

inline json qrational_json(const QRational& q) {
    if (q.is_end()) return json{{"end", true}};
    return json{{"digits", address_json(q.digits())}};
}

inline json cylinder_json(const Cylinder& c) {
    return json{{"digits", address_json(c.address)}, {"left", scalar_json(c.left)}, {"length", scalar_json(c.length)}};
}

// --- covering -------------------------------------------------------------

inline json block_json(const Block& b) {
    return json{{"prefix", address_json(b.prefix)}, {"first", index_json(b.first)}, {"last", index_json(b.last)}};
}

inline json certificate_json(const QVectorSpec& spec, const CoverCertificate& c, const CoverParams& params) {
    json blocks = json::array();
    for (const auto& b : c.blocks) blocks.push_back(block_json(b));
    json residuals = json::array();
    for (const auto& r : c.residuals)
        residuals.push_back(json{{"prefix", address_json(r.prefix)},
                                 {"first", index_json(r.first)},
                                 {"left", scalar_json(r.left)},
                                 {"right", scalar_json(r.right)},
                                 {"length", scalar_json(r.length)}});
    json tails = json::array();
    for (const auto& t : c.tails)
        tails.push_back(json{{"rank_offset", t.rank_offset},
                             {"right_part", t.right_part},
                             {"parent", address_json(t.parent)},
                             {"start", index_json(t.start)},
                             {"blocks", t.block_count},
                             {"lemma_first_power_lower", t.lemma.first_power.lower_string()},
                             {"lemma_rest_power_upper", t.lemma.rest_power.upper_string()}});
    CertificateChecks chk = check_certificate(spec, c, params);
    json right = json::array();
    for (auto i : c.right_blocks) right.push_back(i);
    return json{
        {"qvec", qvec_json(spec)},
        {"input_interval", {{"a", qrational_json(c.a)}, {"b", qrational_json(c.b)}}},
        {"a_value", scalar_json(c.a_value)},
        {"b_value", scalar_json(c.b_value)},
        {"length", scalar_json(c.length)},
        {"params",
         {{"alpha", interval_json(params.alpha)},
          {"delta", interval_json(params.delta)},
          {"eps_res", interval_json(params.eps_res)}}},
        {"max_cylinder", {{"prefix", address_json(c.located.prefix)}, {"beta1", index_json(c.located.beta1)}}},
        {"blocks", blocks},
        {"right_blocks", right},
        {"residuals", residuals},
        {"tails", tails},
        {"W", interval_json(c.constants.w)},
        {"K", interval_json(c.constants.k)},
        {"alpha_volume_upper", c.alpha_volume.upper_string()},
        {"series_volume_upper", c.series_volume.upper_string()},
        {"bound_rhs_lower", c.bound_rhs.lower_string()},
        {"right_volume_upper", c.right_volume.upper_string()},
        {"right_bound_lower", c.right_bound.lower_string()},
        {"residual_length", scalar_json(c.residual_length)},
        {"precision_bits", spec.precision()},
        {"checks",
         {{"volume", chk.volume},
          {"right_part", chk.right_part},
          {"j1", chk.j1},
          {"rank_decay", chk.rank_decay},
          {"lemma", chk.lemma},
          {"residual", chk.residual},
          {"membership", chk.membership}}},
    };
}

// --- faithfulness ---------------------------------------------------------

inline json cell_json(const ConditionCell& c) {
    return json{{"n", index_json(c.n)},
                {"M", c.M ? index_json(*c.M) : json("inf")},
                {"lhs", interval_json(c.lhs)},
                {"rhs", c.rhs.is_finite() ? interval_json(c.rhs) : json("inf")},
                {"margin_lower", c.margin().lower_string()},
                {"precision_bits", c.precision}};
}

inline json verdict_json(const ConditionVerdict& v) {
    json j{{"outcome", to_string(v.outcome)}, {"cells", v.cells}};
    if (v.witness) j["witness"] = cell_json(*v.witness);
    if (v.min_margin) j["min_margin"] = cell_json(*v.min_margin);
    if (!v.reason.empty()) j["reason"] = v.reason;
    json rows = json::array();
    for (const auto& c : v.margins) rows.push_back(cell_json(c));
    j["margins"] = rows;
    return j;
}

// --- cantor ---------------------------------------------------------------

inline json cantor_json(const CantorSpec& s) {
    json levels = json::array();
    for (const auto& l : s.levels)
        levels.push_back(json{{"k", index_json(l.k)},
                              {"M", index_json(l.M)},
                              {"gamma", interval_json(l.gamma)},
                              {"window_pow", interval_json(l.window_pow)},
                              {"tail", interval_json(l.tail)},
                              {"budget_volume", interval_json(l.budget)},
                              {"precision_bits", l.precision}});
    return json{{"qvec", qvec_json(s.qvec)},
                {"alpha", to_string(s.alpha)},
                {"delta", to_string(s.delta)},
                {"L", to_string(s.L)},
                {"eps", {{"first", to_string(s.eps.first)}, {"ratio", to_string(s.eps.ratio)}}},
                {"N", index_json(s.N)},
                {"precision_bits", s.precision},
                {"levels", levels}};
}

/// Rebuilds a spec from its JSON form; gamma and the bounds are recomputed from (k, M).
inline CantorSpec cantor_from_json(const json& j, Precision base = kDefaultPrecision) {
    QVectorSpec q = qvec_from_json(j.at("qvec"), base);
    EpsilonRule eps{rational_from(j.at("eps").at("first")), rational_from(j.at("eps").at("ratio"))};
    std::vector<std::pair<Index, Index>> windows;
    for (const auto& l : j.at("levels")) windows.emplace_back(index_from(l.at("k")), index_from(l.at("M")));
    return cantor_from_levels(q, rational_from(j.at("alpha")), rational_from(j.at("delta")), rational_from(j.at("L")),
                              eps, index_from(j.at("N")), windows, base);
}

inline json crossing_json(const CrossingEstimate& e) {
    json curve = json::array();
    for (const auto& [s, v] : e.curve) curve.push_back(json{{"s", to_string(s)}, {"V", interval_json(v)}});
    json j{{"family", to_string(e.family)}, {"level", e.level}, {"low_confidence", e.low_confidence}, {"curve", curve}};
    j["crossing_estimate"] = e.crossing ? json(*e.crossing) : json(nullptr);
    j["last_above"] = e.last_above ? json(to_string(*e.last_above)) : json(nullptr);
    j["first_below"] = e.first_below ? json(to_string(*e.first_below)) : json(nullptr);
    return j;
}

}  // namespace qinf::io
