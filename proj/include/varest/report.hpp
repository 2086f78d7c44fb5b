#pragma once

// Table renderers. CSV and markdown are line-oriented; JSON goes through
// nlohmann::json. Numbers print with 6 significant digits unless
// full precision (shortest round-trip) is requested.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exact.hpp"
#include "montecarlo.hpp"
#include "mse.hpp"
#include "numeric.hpp"
#include "spec_text.hpp"
#include "tuning.hpp"

namespace varest {

enum class OutputFormat { Markdown, Csv, Json };

inline OutputFormat parse_format(std::string_view text) {
    if (text == "md" || text == "markdown") return OutputFormat::Markdown;
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw Error(ErrorKind::InvalidSpec, "unknown output format '" + std::string(text) + "'");
}

struct NumberFormat {
    bool full_precision = false;
    std::string operator()(double v) const { return full_precision ? shortest(v) : significant(v, 6); }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline nlohmann::json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline std::string md_cell(std::string s) {
    for (std::size_t pos = 0; (pos = s.find('|', pos)) != std::string::npos; pos += 2) s.replace(pos, 1, "\\|");
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MseReport

inline void write_csv(std::ostream& os, const std::vector<MseReport>& rows, NumberFormat fmt = {}) {
    os << "estimator,mse,rel_eff,variant,breakdown\n";
    for (const auto& r : rows) {
        os << detail::csv_field(r.estimator) << ',';
        if (r.error) os << "error";
        else os << fmt(r.mse);
        os << ',' << (r.error ? std::string() : fmt(r.relative_efficiency)) << ',' << to_string(r.variant) << ','
           << (r.breakdown ? "true" : "false") << '\n';
    }
}

inline nlohmann::json to_json(const MseReport& r) {
    nlohmann::json j;
    j["estimator"] = r.estimator;
    j["label"] = r.label;
    j["mse"] = detail::json_number(r.mse);
    j["rel_eff"] = detail::json_number(r.relative_efficiency);
    j["variant"] = std::string(to_string(r.variant));
    j["breakdown"] = r.breakdown;
    if (r.weights) {
        nlohmann::json w;
        w[r.weights->first_name] = r.weights->first;
        if (r.weights->second) w[r.weights->second_name] = *r.weights->second;
        j["weights"] = w;
    }
    if (r.error) j["error"] = *r.error;
    return j;
}

inline void write_json(std::ostream& os, const std::vector<MseReport>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    os << arr.dump(2) << '\n';
}

/// Two-column "Estimators | MSE" table; flags and footnotes follow the table.
inline void write_markdown(std::ostream& os, const std::vector<MseReport>& rows, NumberFormat fmt = {},
                           const std::vector<std::pair<std::size_t, std::string>>& footnotes = {}) {
    os << "| Estimators | MSE |\n|---|---|\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::string cell = r.error ? "error" : fmt(r.mse);
        if (r.breakdown) cell += " (breakdown)";
        for (std::size_t k = 0; k < footnotes.size(); ++k)
            if (footnotes[k].first == i) cell += " [" + std::to_string(k + 1) + "]";
        os << "| " << detail::md_cell(r.label) << " | " << detail::md_cell(cell) << " |\n";
    }
    bool any_note = !footnotes.empty();
    for (const auto& r : rows) any_note = any_note || r.breakdown || r.error;
    if (!any_note) return;
    os << '\n';
    for (std::size_t k = 0; k < footnotes.size(); ++k) os << '[' << (k + 1) << "] " << footnotes[k].second << '\n';
    for (const auto& r : rows) {
        if (r.error) os << "- " << r.label << ": " << *r.error << '\n';
        else if (r.breakdown)
            os << "- " << r.label << ": first-order quadratic model has no positive minimum (breakdown)\n";
    }
}

// ---------------------------------------------------------------------------
// Simulation vs theory

inline void write_csv(std::ostream& os, const std::vector<TheoryCheck>& rows, NumberFormat fmt = {}) {
    os << "estimator,empirical_mse,mc_stderr,empirical_bias,theoretical_mse,ratio,replicates_used,rejected,"
          "approximation_warning\n";
    for (const auto& c : rows) {
        const auto& s = c.simulation;
        os << detail::csv_field(to_string(s.spec)) << ',' << fmt(s.empirical_mse) << ',' << fmt(s.mc_stderr) << ','
           << fmt(s.empirical_bias) << ',' << fmt(c.theoretical) << ',' << fmt(c.ratio) << ',' << s.replicates_used
           << ',' << s.rejected_samples << ',' << (c.small_sample ? "true" : "false") << '\n';
    }
}

inline void write_json(std::ostream& os, const std::vector<TheoryCheck>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : rows) {
        const auto& s = c.simulation;
        arr.push_back({{"estimator", to_string(s.spec)},
                       {"empirical_mse", detail::json_number(s.empirical_mse)},
                       {"mc_stderr", detail::json_number(s.mc_stderr)},
                       {"empirical_bias", detail::json_number(s.empirical_bias)},
                       {"theoretical_mse", detail::json_number(c.theoretical)},
                       {"ratio", detail::json_number(c.ratio)},
                       {"replicates_used", s.replicates_used},
                       {"rejected", s.rejected_samples},
                       {"approximation_warning", c.small_sample}});
    }
    os << arr.dump(2) << '\n';
}

inline void write_markdown(std::ostream& os, const std::vector<TheoryCheck>& rows, NumberFormat fmt = {}) {
    os << "| Estimator | Empirical MSE | MC s.e. | Bias | First-order MSE | Ratio | Used | Rejected |\n"
          "|---|---|---|---|---|---|---|---|\n";
    for (const auto& c : rows) {
        const auto& s = c.simulation;
        os << "| " << detail::md_cell(to_string(s.spec)) << " | " << fmt(s.empirical_mse) << " | " << fmt(s.mc_stderr)
           << " | " << fmt(s.empirical_bias) << " | " << fmt(c.theoretical) << " | " << fmt(c.ratio) << " | "
           << s.replicates_used << " | " << s.rejected_samples << " |\n";
    }
    if (!rows.empty() && rows.front().small_sample)
        os << "\nWarning: design is outside the first-order approximation regime (small n or large theta*beta*); "
              "ratios far from 1 are expected.\n";
}

// ---------------------------------------------------------------------------
// Exact enumeration

struct ExactRow {
    std::string estimator;
    std::optional<ExactResult> result;
    std::optional<std::string> error;
};

inline void write_csv(std::ostream& os, const std::vector<ExactRow>& rows, NumberFormat fmt = {}) {
    os << "estimator,exact_mse,mean_estimate,samples,rejected\n";
    for (const auto& r : rows) {
        os << detail::csv_field(r.estimator) << ',';
        if (r.result)
            os << fmt(r.result->mse) << ',' << fmt(r.result->mean_estimate) << ',' << r.result->samples << ','
               << r.result->rejected << '\n';
        else os << "error,,,\n";
    }
}

inline void write_json(std::ostream& os, const std::vector<ExactRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"estimator", r.estimator}};
        if (r.result) {
            j["exact_mse"] = detail::json_number(r.result->mse);
            j["mean_estimate"] = detail::json_number(r.result->mean_estimate);
            j["samples"] = r.result->samples;
            j["rejected"] = r.result->rejected;
        }
        if (r.error) j["error"] = *r.error;
        arr.push_back(std::move(j));
    }
    os << arr.dump(2) << '\n';
}

inline void write_markdown(std::ostream& os, const std::vector<ExactRow>& rows, NumberFormat fmt = {}) {
    os << "| Estimator | Exact MSE | Mean estimate | Samples | Rejected |\n|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        os << "| " << detail::md_cell(r.estimator) << " | ";
        if (r.result)
            os << fmt(r.result->mse) << " | " << fmt(r.result->mean_estimate) << " | " << r.result->samples << " | "
               << r.result->rejected << " |\n";
        else os << "error | | | |\n";
    }
    for (const auto& r : rows)
        if (r.error) os << "\n- " << r.estimator << ": " << *r.error << '\n';
}

// ---------------------------------------------------------------------------
// Tuning

inline void write_csv(std::ostream& os, const std::vector<TuningPoint>& rows, NumberFormat fmt = {}) {
    os << "m,w,c,d,w1,w2,weights,mse,rel_eff,variant,breakdown\n";
    for (const auto& p : rows) {
        os << fmt(p.spec.m) << ',' << fmt(p.spec.w) << ',' << fmt(p.spec.c) << ',' << fmt(p.spec.d) << ','
           << fmt(p.spec.w1) << ',' << fmt(p.spec.w2) << ',' << to_string(p.mode) << ','
           << fmt(p.report.mse) << ',' << fmt(p.report.relative_efficiency) << ',' << to_string(p.report.variant)
           << ',' << (p.report.breakdown ? "true" : "false") << '\n';
    }
}

inline void write_json(std::ostream& os, const std::vector<TuningPoint>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : rows) {
        auto j = to_json(p.report);
        j["m"] = p.spec.m;
        j["w"] = p.spec.w;
        j["c"] = p.spec.c;
        j["d"] = p.spec.d;
        j["weights_mode"] = std::string(to_string(p.mode));
        arr.push_back(std::move(j));
    }
    os << arr.dump(2) << '\n';
}

inline void write_markdown(std::ostream& os, const std::vector<TuningPoint>& rows, NumberFormat fmt = {}) {
    os << "| m | w | c | d | w1 | w2 | Weights | MSE | RE |\n|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& p : rows) {
        os << "| " << fmt(p.spec.m) << " | " << fmt(p.spec.w) << " | " << fmt(p.spec.c) << " | " << fmt(p.spec.d)
           << " | " << fmt(p.spec.w1) << " | " << fmt(p.spec.w2) << " | " << to_string(p.mode) << " | "
           << fmt(p.report.mse) << (p.report.breakdown ? " (breakdown)" : "") << " | "
           << fmt(p.report.relative_efficiency) << " |\n";
    }
}

// ---------------------------------------------------------------------------
// Population parameters

inline void write_params_csv(std::ostream& os, const PopulationParams& p, NumberFormat fmt = {}) {
    os << "key,value\n";
    const auto doc = params_to_json(p);
    for (const auto& [key, value] : doc.items()) {
        os << key << ',';
        if (value.is_null()) os << "nan";
        else if (value.is_number_unsigned()) os << value.get<std::uint64_t>();
        else os << fmt(value.get<double>());
        os << '\n';
    }
}

}  // namespace varest
