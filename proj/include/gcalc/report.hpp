#pragma once
// Machine-readable output: a small insertion-ordered JSON value with fixed
// 17-significant-digit float formatting, plus the CSV sample-dump format.
// Determinism is part of the output contract (golden files diff bytes), so
// formatting lives here and nowhere else.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gcalc/internal.hpp"
#include "gcalc/number.hpp"
#include "gcalc/support.hpp"

namespace gcalc {

/// %.17g: enough digits to round-trip any double, stable across runs.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class Json {
public:
    static Json object() { return Json(Kind::Object); }
    static Json array() { return Json(Kind::Array); }
    static Json str(std::string s) {
        Json j(Kind::String);
        j.text_ = std::move(s);
        return j;
    }
    static Json number(double v) {
        // JSON has no inf/nan literals; keep them readable and parseable.
        if (std::isnan(v)) return str("nan");
        if (std::isinf(v)) return str(v > 0 ? "inf" : "-inf");
        Json j(Kind::Raw);
        j.text_ = fmt_double(v);
        return j;
    }
    static Json integer(long long v) {
        Json j(Kind::Raw);
        j.text_ = std::to_string(v);
        return j;
    }
    static Json boolean(bool b) {
        Json j(Kind::Raw);
        j.text_ = b ? "true" : "false";
        return j;
    }

    Json& set(const std::string& key, Json v) {
        members_.emplace_back(key, std::move(v));
        return *this;
    }
    Json& push(Json v) {
        items_.push_back(std::move(v));
        return *this;
    }
    bool empty() const { return members_.empty() && items_.empty(); }

    void write(std::string& out) const {
        switch (kind_) {
            case Kind::Raw: out += text_; break;
            case Kind::String:
                out += '"';
                for (char c : text_) {
                    switch (c) {
                        case '"': out += "\\\""; break;
                        case '\\': out += "\\\\"; break;
                        case '\n': out += "\\n"; break;
                        case '\t': out += "\\t"; break;
                        default:
                            if (static_cast<unsigned char>(c) < 0x20) {
                                char esc[8];
                                std::snprintf(esc, sizeof(esc), "\\u%04x", c);
                                out += esc;
                            } else {
                                out += c;
                            }
                    }
                }
                out += '"';
                break;
            case Kind::Array: {
                out += '[';
                bool first = true;
                for (const auto& it : items_) {
                    if (!first) out += ',';
                    first = false;
                    it.write(out);
                }
                out += ']';
                break;
            }
            case Kind::Object: {
                out += '{';
                bool first = true;
                for (const auto& [k, v] : members_) {
                    if (!first) out += ',';
                    first = false;
                    out += '"';
                    out += k;  // keys are programmer-chosen, no escaping needed
                    out += "\":";
                    v.write(out);
                }
                out += '}';
                break;
            }
        }
    }
    std::string dump() const {
        std::string out;
        write(out);
        return out;
    }

private:
    enum class Kind { Raw, String, Array, Object };
    explicit Json(Kind k) : kind_(k) {}
    Kind kind_;
    std::string text_;
    std::vector<std::pair<std::string, Json>> members_;
    std::vector<Json> items_;
};

// --- domain-type serializers -------------------------------------------------

inline Json json_of(const Valuation& v) {
    if (v.kind == Valuation::Kind::Exact)
        return Json::str(v.infinite ? "inf" : to_string(v.exact));
    Json j = Json::object();
    if (v.kind == Valuation::Kind::LowerBound) {
        j.set("kind", Json::str("lower-bound"));
        j.set("bound", Json::str(v.infinite ? "inf" : to_string(v.exact)));
    } else {
        j.set("kind", Json::str("empirical"));
        j.set("estimate", Json::number(v.estimate));
        j.set("tolerance", Json::number(v.tolerance));
    }
    return j;
}

inline Json json_terms(const GaugeExpansion& g) {
    Json terms = Json::array();
    for (const auto& t : g.terms())
        terms.push(Json::object()
                       .set("c", Json::number(t.coeff))
                       .set("e", Json::str(to_string(t.exp))));
    return terms;
}

inline Json json_of(const Branch& b) {
    Json j = Json::object();
    j.set("terms", json_terms(b.poly()));
    if (b.order().is_finite()) j.set("order", Json::str(b.order().str()));
    if (!b.trig().empty()) {
        Json trig = Json::array();
        for (const auto& t : b.trig())
            trig.push(Json::object()
                          .set("kind", Json::str(t.kind == TrigKind::Sin ? "sin" : "cos"))
                          .set("multiplier", Json::integer(t.multiplier))
                          .set("rate", Json::str(to_string(t.rate)))
                          .set("amplitude", json_terms(t.amplitude)));
        j.set("trig", trig);
    }
    return j;
}

/// eval-result shape: plain exact numbers collapse to {"terms":[...]}; proper
/// interleavings list their parts; sampled nets dump lattice values.
inline Json json_of(const GeneralizedNumber& n) {
    if (n.tier() == Tier::Empirical) {
        Json samples = Json::array();
        for (double v : n.samples()) samples.push(Json::number(v));
        return Json::object().set("samples", samples);
    }
    if (n.parts().size() == 1 && n.parts()[0].idem.is_one()) return json_of(n.parts()[0].branch);
    Json parts = Json::array();
    for (const auto& p : n.parts()) {
        Json pj = Json::object();
        pj.set("idem", Json::str(p.idem.period()));
        Json bj = json_of(p.branch);
        pj.set("branch", std::move(bj));
        parts.push(std::move(pj));
    }
    return Json::object().set("parts", parts);
}

inline Json json_of(const SupportSet& s) {
    Json j = Json::object();
    Json pts = Json::array();
    for (double p : s.points) pts.push(Json::number(p));
    j.set("points", pts);
    Json ivs = Json::array();
    for (const auto& iv : s.intervals)
        ivs.push(Json::object().set("lo", Json::number(iv.lo)).set("hi", Json::number(iv.hi)));
    j.set("intervals", ivs);
    if (!s.vector_points.empty()) {
        Json vps = Json::array();
        for (const auto& vp : s.vector_points) {
            Json one = Json::array();
            for (double c : vp) one.push(Json::number(c));
            vps.push(std::move(one));
        }
        j.set("vector-points", vps);
    }
    j.set("empirical", Json::boolean(s.empirical));
    return j;
}

inline Json json_of(const Config& cfg) {
    return Json::object()
        .set("lattice-depth", Json::integer(cfg.lattice_depth))
        .set("window-fraction", Json::number(cfg.window_fraction))
        .set("mollifier-order", Json::integer(cfg.mollifier_order))
        .set("quadrature-tol", Json::number(cfg.quadrature_tol))
        .set("valuation-tol", Json::number(cfg.valuation_tol))
        .set("term-cap", Json::integer(cfg.term_cap))
        .set("order-window", Json::integer(floor_ll(cfg.order_window)));
}

// --- CSV sample dumps --------------------------------------------------------

struct CsvRow {
    int k = 0;
    double epsilon = 0.0;
    bool has_x = false;
    double x = 0.0;
    double value = 0.0;
};

inline void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
    os << "k,epsilon,x,value\n";
    for (const auto& r : rows) {
        os << r.k << ',' << fmt_double(r.epsilon) << ',';
        if (r.has_x) os << fmt_double(r.x);
        os << ',' << fmt_double(r.value) << '\n';
    }
}

}  // namespace gcalc
