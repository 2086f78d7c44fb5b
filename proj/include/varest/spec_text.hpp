#pragma once

// Canonical text form of estimator specs, as used on the command line:
//
//   usual | ratio | reg:b=0.25 | reg:opt | kc:1 | kcc:opt | kcc:alpha1=0.2[,tau=0.99]
//   gs:alpha=0,opt | gs:alpha=1,d1=0.9,d2=1e-7 | t:m=-1,w=1,c=2,d=1,opt | t:m=0,w=1,c=2,d=1,w1=1,w2=0
//
// The token `opt` asks for optimal weights; those are resolved against
// population parameters by resolve() in mse.hpp.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"
#include "numeric.hpp"
#include "population.hpp"

namespace varest {

struct SpecRequest {
    EstimatorSpec spec;
    bool optimal = false;          ///< fill weights (b, alpha1/tau, d1/d2, w1/w2) with their optimum
    bool tau_from_design = false;  ///< kcc without explicit tau: use tau(theta)

    bool operator==(const SpecRequest&) const = default;
};

inline std::string to_string(const EstimatorSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Usual>) return "usual";
            else if constexpr (std::is_same_v<S, IsakiRatio>) return "ratio";
            else if constexpr (std::is_same_v<S, Regression>) return "reg:b=" + shortest(s.b);
            else if constexpr (std::is_same_v<S, KadilarCingi>) return "kc:" + std::to_string(s.index());
            else if constexpr (std::is_same_v<S, KCCombined>)
                return "kcc:alpha1=" + shortest(s.alpha1) + ",tau=" + shortest(s.tau);
            else if constexpr (std::is_same_v<S, GuptaShabbirPR>)
                return "gs:alpha=" + shortest(s.alpha) + ",d1=" + shortest(s.d1) + ",d2=" + shortest(s.d2);
            else
                return "t:m=" + shortest(s.m) + ",w=" + shortest(s.w) + ",c=" + shortest(s.c) + ",d=" + shortest(s.d) +
                       ",w1=" + shortest(s.w1) + ",w2=" + shortest(s.w2);
        },
        spec);
}

inline std::string to_string(const SpecRequest& req) {
    if (!req.optimal) {
        if (req.tau_from_design)
            return "kcc:alpha1=" + shortest(std::get<KCCombined>(req.spec).alpha1);
        return to_string(req.spec);
    }
    return std::visit(
        [](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Regression>) return "reg:opt";
            else if constexpr (std::is_same_v<S, KCCombined>) return "kcc:opt";
            else if constexpr (std::is_same_v<S, GuptaShabbirPR>) return "gs:alpha=" + shortest(s.alpha) + ",opt";
            else if constexpr (std::is_same_v<S, ProposedT>)
                return "t:m=" + shortest(s.m) + ",w=" + shortest(s.w) + ",c=" + shortest(s.c) + ",d=" + shortest(s.d) +
                       ",opt";
            else return to_string(EstimatorSpec{s});
        },
        req.spec);
}

inline SpecRequest parse_spec(std::string_view text) {
    text = detail::trim(text);
    auto bad = [&](const std::string& why) -> Error {
        return Error(ErrorKind::InvalidSpec, "'" + std::string(text) + "': " + why);
    };
    const auto colon = text.find(':');
    const std::string family(detail::trim(text.substr(0, colon)));
    std::map<std::string, double, std::less<>> kv;
    std::vector<std::string> bare;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = detail::trim(rest.substr(0, comma));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            if (item.empty()) throw bad("empty parameter");
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) {
                bare.emplace_back(item);
                continue;
            }
            const auto value = detail::parse_double(item.substr(eq + 1));
            if (!value) throw bad("bad number in '" + std::string(item) + "'");
            const std::string key(detail::trim(item.substr(0, eq)));
            if (!kv.emplace(key, *value).second) throw bad("duplicate key '" + key + "'");
        }
    }

    bool optimal = false;
    for (const auto& token : bare) {
        if (token == "opt") optimal = true;
        else if (family == "kc" && kv.empty() && bare.size() == 1) {
            const auto i = detail::parse_double(token);
            if (!i || !is_integer(*i)) throw bad("kc index must be an integer");
            kv.emplace("i", *i);
        } else throw bad("unexpected token '" + token + "'");
    }

    auto take = [&](const char* key) -> std::optional<double> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        const double v = it->second;
        kv.erase(it);
        return v;
    };
    auto need = [&](const char* key) {
        auto v = take(key);
        if (!v) throw bad(std::string("missing '") + key + "'");
        return *v;
    };
    auto finish = [&](SpecRequest req) {
        if (!kv.empty()) throw bad("unknown key '" + kv.begin()->first + "'");
        validate(req.spec);
        return req;
    };
    auto no_opt = [&]() {
        if (optimal) throw bad("'opt' is not supported for this family");
    };

    if (family == "usual") {
        no_opt();
        return finish({Usual{}});
    }
    if (family == "ratio") {
        no_opt();
        return finish({IsakiRatio{}});
    }
    if (family == "reg") {
        if (optimal) {
            if (kv.contains("b")) throw bad("give either b or opt");
            return finish({Regression{}, true});
        }
        return finish({Regression{need("b")}});
    }
    if (family == "kc") {
        no_opt();
        const double i = need("i");
        if (!is_integer(i)) throw bad("kc index must be an integer");
        return finish({KadilarCingi(static_cast<int>(i))});
    }
    if (family == "kcc") {
        if (optimal) {
            if (kv.contains("alpha1")) throw bad("give either alpha1 or opt");
            return finish({KCCombined{}, true});
        }
        KCCombined k;
        k.alpha1 = need("alpha1");
        const auto tau = take("tau");
        if (tau) k.tau = *tau;
        return finish({k, false, !tau.has_value()});
    }
    if (family == "gs") {
        GuptaShabbirPR g;
        g.alpha = need("alpha");
        if (optimal) {
            if (kv.contains("d1") || kv.contains("d2")) throw bad("give either d1/d2 or opt");
            return finish({g, true});
        }
        if (auto d1 = take("d1")) g.d1 = *d1;
        if (auto d2 = take("d2")) g.d2 = *d2;
        return finish({g});
    }
    if (family == "t") {
        ProposedT t;
        t.m = need("m");
        t.w = need("w");
        t.c = need("c");
        t.d = need("d");
        if (optimal) {
            if (kv.contains("w1") || kv.contains("w2")) throw bad("give either w1/w2 or opt");
            return finish({t, true});
        }
        if (auto w1 = take("w1")) t.w1 = *w1;
        if (auto w2 = take("w2")) t.w2 = *w2;
        return finish({t});
    }
    throw bad("unknown estimator family '" + family + "'");
}

/// Splits a list on ';' or whitespace and parses each entry.
inline std::vector<SpecRequest> parse_spec_list(std::string_view list) {
    std::vector<SpecRequest> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= list.size(); ++i) {
        if (i == list.size() || list[i] == ';' || list[i] == ' ' || list[i] == '\t' || list[i] == '\n') {
            const auto item = detail::trim(list.substr(start, i - start));
            if (!item.empty()) out.push_back(parse_spec(item));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace varest
