#pragma once

// Finite bivariate populations and the population-level constants that drive
// the first-order MSE theory.
//
// Two divisor conventions coexist on purpose:
//   * S_y^2, S_x^2 (and hence C_y, C_x) use divisor N-1;
//   * product moments mu_pq = (1/N) sum (y_i - Ybar)^p (x_i - Xbar)^q use divisor N,
//     and so do beta2 = mu_40 / mu_20^2 and lambda22 = mu_22 / (mu_20 mu_02).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "numeric.hpp"

namespace varest {

class BivariatePopulation {
public:
    /// Throws DegeneratePopulation when sizes differ, N < 2, or either variable is constant.
    BivariatePopulation(std::vector<double> y, std::vector<double> x) : y_(std::move(y)), x_(std::move(x)) {
        if (y_.size() != x_.size())
            throw Error(ErrorKind::DegeneratePopulation, "y and x have different lengths");
        if (y_.size() < 2)
            throw Error(ErrorKind::DegeneratePopulation, "population needs N >= 2 units, got " + std::to_string(y_.size()));
        auto constant = [](const std::vector<double>& v) {
            for (double value : v)
                if (value != v.front()) return false;
            return true;
        };
        if (constant(y_)) throw Error(ErrorKind::DegeneratePopulation, "study variable y has zero variance");
        if (constant(x_)) throw Error(ErrorKind::DegeneratePopulation, "auxiliary variable x has zero variance");
        for (std::size_t i = 0; i < y_.size(); ++i)
            if (!std::isfinite(y_[i]) || !std::isfinite(x_[i]))
                throw Error(ErrorKind::DegeneratePopulation, "non-finite value at unit " + std::to_string(i));
    }

    const std::vector<double>& y() const noexcept { return y_; }
    const std::vector<double>& x() const noexcept { return x_; }
    std::size_t size() const noexcept { return y_.size(); }

private:
    std::vector<double> y_;
    std::vector<double> x_;
};

struct PopulationParams {
    std::size_t N = 0;
    double Ybar = 0.0;
    double Xbar = 0.0;
    double Sy2 = 0.0;
    double Sx2 = 0.0;
    double Cy = 0.0;
    double Cx = 0.0;
    double rho_yx = 0.0;
    double Cyx = 0.0;
    double beta2y = 0.0;
    double beta2x = 0.0;
    double lambda22 = 0.0;
    double beta2y_star = 0.0;
    double beta2x_star = 0.0;
    double lambda22_star = 0.0;
    double rho_star = 0.0;  ///< NaN when either starred kurtosis is zero
    std::optional<std::size_t> n;  ///< design sample size, when a parameter file supplies one

    double Sy4() const noexcept { return Sy2 * Sy2; }
    double Sx4() const noexcept { return Sx2 * Sx2; }
};

/// Raw summary inputs as a parameter file provides them.
struct ParamInputs {
    std::size_t N = 0;
    double Sy2 = 0.0;
    double Sx2 = 0.0;
    double Cy = 0.0;
    double Cx = 0.0;
    double rho_yx = 0.0;
    std::optional<double> Cyx;
    double beta2y = 0.0;
    double beta2x = 0.0;
    double lambda22 = 0.0;
    std::optional<std::size_t> n;
};

namespace detail {

inline double ipow(double base, unsigned exponent) {
    double r = 1.0;
    for (unsigned i = 0; i < exponent; ++i) r *= base;
    return r;
}

inline double mean(const std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

inline void fill_starred(PopulationParams& p) {
    p.beta2y_star = p.beta2y - 1.0;
    p.beta2x_star = p.beta2x - 1.0;
    p.lambda22_star = p.lambda22 - 1.0;
    const double denom = p.beta2y_star * p.beta2x_star;
    p.rho_star = denom > 0.0 ? p.lambda22_star / std::sqrt(denom) : std::nan("");
}

// Cauchy-Schwarz and range checks shared by both construction routes.
inline void check_invariants(const PopulationParams& p, double slack) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvariantViolation, what); };
    if (p.N < 2) fail("N must be >= 2");
    if (!(p.Sy2 > 0.0) || !std::isfinite(p.Sy2)) fail("S_y^2 must be positive");
    if (!(p.Sx2 > 0.0) || !std::isfinite(p.Sx2)) fail("S_x^2 must be positive");
    if (!(p.beta2y >= 1.0 - slack)) fail("beta2_y = " + std::to_string(p.beta2y) + " < 1");
    if (!(p.beta2x >= 1.0 - slack)) fail("beta2_x = " + std::to_string(p.beta2x) + " < 1");
    if (!(p.lambda22 * p.lambda22 <= p.beta2y * p.beta2x * (1.0 + slack)))
        fail("lambda22^2 exceeds beta2_y * beta2_x");
    if (!(std::abs(p.rho_yx) <= 1.0 + slack)) fail("rho_yx outside [-1, 1]");
    if (p.n && (*p.n < 2 || *p.n > p.N)) fail("sample size n must satisfy 2 <= n <= N");
}

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

}  // namespace detail

/// Population central product moment mu_pq (divisor N), computed two-pass.
inline double central_moment(const BivariatePopulation& pop, unsigned p, unsigned q) {
    const double ybar = detail::mean(pop.y());
    const double xbar = detail::mean(pop.x());
    std::vector<double> terms(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        terms[i] = detail::ipow(pop.y()[i] - ybar, p) * detail::ipow(pop.x()[i] - xbar, q);
    return pairwise_sum(terms) / static_cast<double>(pop.size());
}

inline double theta(std::size_t n, std::size_t N) {
    if (n < 2 || n > N)
        throw Error(ErrorKind::InvalidDesign,
                    "sample size n = " + std::to_string(n) + " must satisfy 2 <= n <= N = " + std::to_string(N));
    return 1.0 / static_cast<double>(n) - 1.0 / static_cast<double>(N);
}

inline PopulationParams derive_params(const BivariatePopulation& pop) {
    const std::size_t N = pop.size();
    const double Nd = static_cast<double>(N);
    const double ybar = detail::mean(pop.y());
    const double xbar = detail::mean(pop.x());

    std::vector<double> d20(N), d02(N), d11(N), d40(N), d04(N), d22(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double dy = pop.y()[i] - ybar;
        const double dx = pop.x()[i] - xbar;
        d20[i] = dy * dy;
        d02[i] = dx * dx;
        d11[i] = dy * dx;
        d40[i] = d20[i] * d20[i];
        d04[i] = d02[i] * d02[i];
        d22[i] = d20[i] * d02[i];
    }
    const double mu20 = pairwise_sum(d20) / Nd;
    const double mu02 = pairwise_sum(d02) / Nd;
    const double mu11 = pairwise_sum(d11) / Nd;
    const double mu40 = pairwise_sum(d40) / Nd;
    const double mu04 = pairwise_sum(d04) / Nd;
    const double mu22 = pairwise_sum(d22) / Nd;
    if (!(mu20 > 0.0) || !(mu02 > 0.0))
        throw Error(ErrorKind::DegeneratePopulation, "zero variance in y or x");

    PopulationParams p;
    p.N = N;
    p.Ybar = ybar;
    p.Xbar = xbar;
    p.Sy2 = mu20 * Nd / (Nd - 1.0);
    p.Sx2 = mu02 * Nd / (Nd - 1.0);
    p.Cy = std::sqrt(p.Sy2) / ybar;
    p.Cx = std::sqrt(p.Sx2) / xbar;
    p.rho_yx = mu11 / std::sqrt(mu20 * mu02);
    p.Cyx = p.rho_yx * p.Cy * p.Cx;
    p.beta2y = mu40 / (mu20 * mu20);
    p.beta2x = mu04 / (mu02 * mu02);
    p.lambda22 = mu22 / (mu20 * mu02);
    detail::fill_starred(p);
    detail::check_invariants(p, 1e-12);
    return p;
}

/// Relative tolerance for C_yx against rho_yx*C_y*C_x when a file supplies
/// both; printed summaries are rounded to about three decimals.
inline constexpr double kSummaryCyxTolerance = 1e-2;

inline PopulationParams make_params(const ParamInputs& in, double cyx_tolerance = kSummaryCyxTolerance) {
    PopulationParams p;
    p.N = in.N;
    p.Sy2 = in.Sy2;
    p.Sx2 = in.Sx2;
    p.Cy = in.Cy;
    p.Cx = in.Cx;
    p.rho_yx = in.rho_yx;
    p.beta2y = in.beta2y;
    p.beta2x = in.beta2x;
    p.lambda22 = in.lambda22;
    p.n = in.n;
    const double implied_cyx = in.rho_yx * in.Cy * in.Cx;
    if (in.Cyx) {
        if (std::abs(*in.Cyx - implied_cyx) > cyx_tolerance * std::abs(*in.Cyx))
            throw Error(ErrorKind::InvariantViolation,
                        "C_yx = " + std::to_string(*in.Cyx) + " disagrees with rho_yx*C_y*C_x = " +
                            std::to_string(implied_cyx));
        p.Cyx = *in.Cyx;
    } else {
        p.Cyx = implied_cyx;
    }
    if (!(p.Cy > 0.0) || !(p.Cx > 0.0))
        throw Error(ErrorKind::InvariantViolation, "coefficients of variation must be positive");
    p.Ybar = std::sqrt(p.Sy2) / p.Cy;
    p.Xbar = std::sqrt(p.Sx2) / p.Cx;
    detail::fill_starred(p);
    detail::check_invariants(p, 0.0);
    return p;
}

inline BivariatePopulation parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<double> y, x;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (!have_header) {
            const auto header = detail::trim(view);
            const auto comma = header.find(',');
            if (comma == std::string_view::npos || detail::trim(header.substr(0, comma)) != "y" ||
                detail::trim(header.substr(comma + 1)) != "x")
                throw Error(ErrorKind::MalformedRow, "expected header 'y,x' on line 1", line_no);
            have_header = true;
            continue;
        }
        if (detail::trim(view).empty()) continue;
        const auto comma = view.find(',');
        if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos)
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": expected two fields", line_no);
        const auto yv = detail::parse_double(view.substr(0, comma));
        const auto xv = detail::parse_double(view.substr(comma + 1));
        if (!yv || !xv)
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": not a decimal number",
                        line_no);
        y.push_back(*yv);
        x.push_back(*xv);
    }
    if (!have_header) throw Error(ErrorKind::DegeneratePopulation, "empty file");
    return BivariatePopulation(std::move(y), std::move(x));
}

inline BivariatePopulation load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + path + "'");
    return parse_csv(in);
}

inline PopulationParams params_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::InvariantViolation, "parameter document must be a JSON object");
    auto number = [&](const char* key) -> std::optional<double> {
        auto it = doc.find(key);
        if (it == doc.end() || it->is_null()) return std::nullopt;
        if (!it->is_number()) throw Error(ErrorKind::InvariantViolation, std::string("key '") + key + "' is not a number");
        return it->get<double>();
    };
    auto required = [&](const char* key) {
        auto v = number(key);
        if (!v) throw Error(ErrorKind::MissingKey, key);
        return *v;
    };
    auto count = [&](const char* key) -> std::optional<std::size_t> {
        auto v = number(key);
        if (!v) return std::nullopt;
        if (!is_integer(*v) || *v < 0) throw Error(ErrorKind::InvariantViolation, std::string(key) + " must be a non-negative integer");
        return static_cast<std::size_t>(*v);
    };
    // Variance may come as a standard deviation, a variance, or both.
    auto variance = [&](const char* sd_key, const char* var_key) {
        const auto sd = number(sd_key);
        const auto var = number(var_key);
        if (!sd && !var) throw Error(ErrorKind::MissingKey, sd_key);
        if (sd && var && relative_difference(*sd * *sd, *var) > 1e-9)
            throw Error(ErrorKind::InvariantViolation, std::string(sd_key) + "^2 disagrees with " + var_key);
        return var ? *var : *sd * *sd;
    };

    ParamInputs in;
    const auto N = count("N");
    if (!N) throw Error(ErrorKind::MissingKey, "N");
    in.N = *N;
    in.Sy2 = variance("S_y", "S_y2");
    in.Sx2 = variance("S_x", "S_x2");
    in.Cy = required("C_y");
    in.Cx = required("C_x");
    in.rho_yx = required("rho_yx");
    in.beta2y = required("beta2_y");
    in.beta2x = required("beta2_x");
    in.lambda22 = required("lambda22");
    in.Cyx = number("C_yx");
    in.n = count("n");
    return make_params(in);
}

inline PopulationParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::InvariantViolation, std::string("invalid JSON: ") + e.what());
    }
    return params_from_json(doc);
}

/// JSON form accepted back by params_from_json.
inline nlohmann::json params_to_json(const PopulationParams& p) {
    nlohmann::json j;
    j["N"] = p.N;
    if (p.n) j["n"] = *p.n;
    j["S_y"] = std::sqrt(p.Sy2);
    j["S_x"] = std::sqrt(p.Sx2);
    j["S_y2"] = p.Sy2;
    j["S_x2"] = p.Sx2;
    j["Ybar"] = p.Ybar;
    j["Xbar"] = p.Xbar;
    j["C_y"] = p.Cy;
    j["C_x"] = p.Cx;
    j["rho_yx"] = p.rho_yx;
    j["C_yx"] = p.Cyx;
    j["beta2_y"] = p.beta2y;
    j["beta2_x"] = p.beta2x;
    j["lambda22"] = p.lambda22;
    j["beta2_y_star"] = p.beta2y_star;
    j["beta2_x_star"] = p.beta2x_star;
    j["lambda22_star"] = p.lambda22_star;
    j["rho_star"] = p.rho_star;
    return j;
}

}  // namespace varest
