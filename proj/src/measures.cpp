#include "measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <json.hpp>

#include "errors.hpp"
#include "math_util.hpp"

namespace nqdeg {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

template <typename State, typename Maximize>
MeasureReport degree_report(const State& s, const OptimizerConfig& cfg, Maximize&& maximize,
                            double pi_power) {
    MeasureReport report;
    MaxResult max;
    try {
        max = maximize(s, cfg);
        report.converged = max.converged;
    } catch (const ConvergenceError& e) {
        max = e.best();
        report.converged = false;
    }
    report.q_max = max.q_max;
    report.argmax = max.argmax;
    report.degree = clamp01(1.0 - pi_power * max.q_max);
    return report;
}

}  // namespace

MeasureReport nonclassical_degree(const SingleModeState& s, const OptimizerConfig& cfg) {
    MeasureReport report = degree_report(
        s, cfg, [](const SingleModeState& st, const OptimizerConfig& c) { return maximize_q(st, c); },
        kPi);
    try {
        report.mandel_q = mandel_q(s);
    } catch (const Error&) {
        report.mandel_q = std::nullopt;
    }
    return report;
}

MeasureReport nonclassical_degree2(const BipartiteState& s, const OptimizerConfig& cfg) {
    MeasureReport report = degree_report(
        s, cfg, [](const BipartiteState& st, const OptimizerConfig& c) { return maximize_q2(st, c); },
        kPi * kPi);
    report.entropy = entanglement_entropy(s);
    try {
        report.mandel_q = mandel_q(s);
    } catch (const Error&) {
        report.mandel_q = std::nullopt;
    }
    return report;
}

double compose_product_degree(double d1, double d2) {
    if (!(d1 >= 0.0 && d1 <= 1.0) || !(d2 >= 0.0 && d2 <= 1.0))
        throw Error(ErrorCode::domain, "degrees must lie in [0, 1]");
    return d1 + d2 - d1 * d2;
}

double entanglement_entropy(const BipartiteState& s) {
    const int rows = s.trunc_a() + 1, cols = s.trunc_b() + 1;
    Eigen::MatrixXcd m(rows, cols);
    for (int n = 0; n < rows; ++n)
        for (int mm = 0; mm < cols; ++mm) m(n, mm) = s.coeff(n, mm);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        const double lambda = svd.singularValues()(i);
        if (lambda < 1e-12) continue;  // 0 ln 0 := 0
        const double p = lambda * lambda;
        entropy -= p * std::log(p);
    }
    return std::max(0.0, entropy);
}

namespace {

double mandel_from_moments(double mean, double mean_sq) {
    if (mean <= 1e-12)
        throw Error(ErrorCode::undefined_statistic,
                    "Mandel q undefined: mean photon number is zero (vacuum-like state)");
    return mean_sq / mean - mean - 1.0;
}

}  // namespace

double mandel_q(const SingleModeState& s) {
    double mean = 0.0, mean_sq = 0.0;
    for (int n = 0; n <= s.truncation(); ++n) {
        const double w = std::norm(s.coeff(n));
        mean += n * w;
        mean_sq += static_cast<double>(n) * n * w;
    }
    return mandel_from_moments(mean, mean_sq);
}

double mandel_q(const BipartiteState& s) {
    double mean = 0.0, mean_sq = 0.0;
    for (int n = 0; n <= s.trunc_a(); ++n)
        for (int m = 0; m <= s.trunc_b(); ++m) {
            const double w = std::norm(s.coeff(n, m));
            const double total = static_cast<double>(n) + m;
            mean += total * w;
            mean_sq += total * total * w;
        }
    return mandel_from_moments(mean, mean_sq);
}

double closed_form_degree(ClosedFormFamily family, double param) {
    switch (family) {
        case ClosedFormFamily::fock_n:
        case ClosedFormFamily::fock_nn: {
            const double rounded = std::round(param);
            if (!(param >= 0.0) || std::abs(param - rounded) > 1e-9 ||
                rounded > SingleModeState::kMaxTruncation)
                throw Error(ErrorCode::domain, "fock family parameter must be an integer in [0, 256]");
            const int n = static_cast<int>(rounded);
            if (n == 0) return 0.0;
            const double log_peak = n * std::log(static_cast<double>(n)) - n - log_factorial(n);
            return family == ClosedFormFamily::fock_n ? 1.0 - std::exp(log_peak)
                                                      : 1.0 - std::exp(2.0 * log_peak);
        }
        case ClosedFormFamily::psi:
            if (!(param >= 0.0 && param <= 1.0))
                throw Error(ErrorCode::domain, "family weight xi must be in [0, 1]");
            return 1.0 - std::exp(-1.0);
        case ClosedFormFamily::phi: {
            const double xi = param;
            if (!(xi >= 0.0 && xi <= 1.0))
                throw Error(ErrorCode::domain, "family weight xi must be in [0, 1]");
            if (xi >= 0.5) return 1.0 - xi;
            return 1.0 - (1.0 - xi) * std::exp(-2.0 * (1.0 - std::sqrt(xi / (1.0 - xi))));
        }
    }
    throw Error(ErrorCode::domain, "unknown closed-form family");
}

std::string report_to_json(const MeasureReport& report) {
    nlohmann::ordered_json j;
    j["degree"] = report.degree;
    j["q_max"] = report.q_max;
    auto argmax = nlohmann::ordered_json::array();
    for (int k = 0; k < report.argmax.arity; ++k)
        argmax.push_back({report.argmax.amps[static_cast<std::size_t>(k)].real(),
                          report.argmax.amps[static_cast<std::size_t>(k)].imag()});
    j["argmax"] = std::move(argmax);
    j["entropy"] = report.entropy ? nlohmann::ordered_json(*report.entropy) : nlohmann::ordered_json(nullptr);
    j["mandel_q"] = report.mandel_q ? nlohmann::ordered_json(*report.mandel_q) : nlohmann::ordered_json(nullptr);
    j["converged"] = report.converged;
    j["closed_form_ref"] =
        report.closed_form_ref ? nlohmann::ordered_json(*report.closed_form_ref) : nlohmann::ordered_json(nullptr);
    return j.dump();
}

}  // namespace nqdeg
