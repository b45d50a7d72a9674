#include "states.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "math_util.hpp"

namespace nqdeg {

namespace {

bool all_finite(std::span<const Amplitude> v) {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

double norm_sq(std::span<const Amplitude> v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return s;
}

void scale(std::vector<Amplitude>& v, double factor) {
    for (auto& c : v) c *= factor;
}

}  // namespace

SingleModeState SingleModeState::from_coeffs(std::vector<Amplitude> coeffs, double norm_tol) {
    if (coeffs.empty()) throw Error(ErrorCode::domain, "state needs at least the |0> coefficient");
    if (static_cast<int>(coeffs.size()) - 1 > kMaxTruncation)
        throw Error(ErrorCode::bounds, "single-mode truncation exceeds " + std::to_string(kMaxTruncation));
    if (!all_finite(coeffs)) throw Error(ErrorCode::domain, "state coefficients must be finite");
    const double n2 = norm_sq(coeffs);
    if (std::abs(n2 - 1.0) > norm_tol)
        throw Error(ErrorCode::domain, "state norm deviates from 1 by " + std::to_string(std::abs(n2 - 1.0)));
    scale(coeffs, 1.0 / std::sqrt(n2));
    return SingleModeState(std::move(coeffs));
}

Amplitude SingleModeState::coeff(int n) const {
    if (n < 0 || n > truncation()) throw Error(ErrorCode::bounds, "Fock index out of range");
    return coeffs_[static_cast<std::size_t>(n)];
}

BipartiteState BipartiteState::from_coeffs(int trunc_a, int trunc_b, std::vector<Amplitude> coeffs,
                                           double norm_tol) {
    if (trunc_a < 0 || trunc_b < 0) throw Error(ErrorCode::domain, "negative truncation");
    if (trunc_a > kMaxTruncation || trunc_b > kMaxTruncation)
        throw Error(ErrorCode::bounds, "bipartite per-mode truncation exceeds " + std::to_string(kMaxTruncation));
    const std::size_t expect = static_cast<std::size_t>(trunc_a + 1) * static_cast<std::size_t>(trunc_b + 1);
    if (coeffs.size() != expect)
        throw Error(ErrorCode::domain, "coefficient matrix size does not match truncations");
    if (!all_finite(coeffs)) throw Error(ErrorCode::domain, "state coefficients must be finite");
    const double n2 = norm_sq(coeffs);
    if (std::abs(n2 - 1.0) > norm_tol)
        throw Error(ErrorCode::domain, "state norm deviates from 1 by " + std::to_string(std::abs(n2 - 1.0)));
    scale(coeffs, 1.0 / std::sqrt(n2));
    return BipartiteState(trunc_a, trunc_b, std::move(coeffs));
}

Amplitude BipartiteState::coeff(int n, int m) const {
    if (n < 0 || n > trunc_a_ || m < 0 || m > trunc_b_)
        throw Error(ErrorCode::bounds, "Fock index out of range");
    return coeffs_[static_cast<std::size_t>(n) * static_cast<std::size_t>(trunc_b_ + 1) +
                   static_cast<std::size_t>(m)];
}

SingleModeState make_fock(int n) {
    if (n < 0 || n > SingleModeState::kMaxTruncation)
        throw Error(ErrorCode::bounds,
                    "Fock index must be in [0, " + std::to_string(SingleModeState::kMaxTruncation) +
                        "], got " + std::to_string(n));
    std::vector<Amplitude> c(static_cast<std::size_t>(n) + 1, Amplitude{0.0, 0.0});
    c.back() = Amplitude{1.0, 0.0};
    return SingleModeState::from_coeffs(std::move(c));
}

namespace {

// Poisson tail weight sum_{n > N} e^{-|a|^2} |a|^{2n} / n!, in log space.
double coherent_tail_weight(double abs2, int trunc) {
    if (abs2 == 0.0) return 0.0;
    double kept = 0.0;
    for (int n = 0; n <= trunc; ++n)
        kept += std::exp(-abs2 + n * std::log(abs2) - log_factorial(n));
    return std::max(0.0, 1.0 - kept);
}

int minimal_coherent_truncation(double abs2) {
    for (int n = 0; n <= SingleModeState::kMaxTruncation; ++n)
        if (coherent_tail_weight(abs2, n) < 1e-12) return n;
    return SingleModeState::kMaxTruncation;
}

}  // namespace

SingleModeState make_coherent(Amplitude alpha, int truncation, double* discarded_tail) {
    const double abs_a = std::abs(alpha);
    if (!std::isfinite(abs_a)) throw Error(ErrorCode::domain, "coherent amplitude must be finite");
    if (abs_a > 8.0) throw Error(ErrorCode::domain, "coherent amplitude magnitude must be <= 8");
    const double abs2 = abs_a * abs_a;
    if (truncation < 0) truncation = static_cast<int>(std::ceil(abs2 + 6.0 * abs_a + 10.0));
    if (truncation > SingleModeState::kMaxTruncation)
        throw Error(ErrorCode::bounds, "coherent truncation exceeds " +
                                           std::to_string(SingleModeState::kMaxTruncation));

    const double tail = coherent_tail_weight(abs2, truncation);
    if (tail >= 1e-12)
        throw Error(ErrorCode::truncation,
                    "coherent tail weight " + std::to_string(tail) + " above 1e-12; requires truncation >= " +
                        std::to_string(minimal_coherent_truncation(abs2)));
    if (discarded_tail) *discarded_tail = tail;

    std::vector<Amplitude> c(static_cast<std::size_t>(truncation) + 1);
    Amplitude term = Amplitude{std::exp(-abs2 / 2.0), 0.0};
    for (int n = 0; n <= truncation; ++n) {
        c[static_cast<std::size_t>(n)] = term;
        term *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    return SingleModeState::from_coeffs(std::move(c), 1e-6);
}

namespace {

void check_xi(double xi) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw Error(ErrorCode::domain, "family weight xi must be in [0, 1]");
}

}  // namespace

BipartiteState make_psi_family(Sign sign, double xi) {
    check_xi(xi);
    const double s = sign == Sign::plus ? 1.0 : -1.0;
    std::vector<Amplitude> c(4, Amplitude{0.0, 0.0});
    c[1] = Amplitude{std::sqrt(xi), 0.0};          // |0,1>
    c[2] = Amplitude{s * std::sqrt(1.0 - xi), 0.0};  // |1,0>
    return BipartiteState::from_coeffs(1, 1, std::move(c));
}

BipartiteState make_phi_family(Sign sign, double xi) {
    check_xi(xi);
    const double s = sign == Sign::plus ? 1.0 : -1.0;
    std::vector<Amplitude> c(4, Amplitude{0.0, 0.0});
    c[0] = Amplitude{std::sqrt(xi), 0.0};          // |0,0>
    c[3] = Amplitude{s * std::sqrt(1.0 - xi), 0.0};  // |1,1>
    return BipartiteState::from_coeffs(1, 1, std::move(c));
}

BipartiteState make_product(const SingleModeState& a, const SingleModeState& b) {
    const int na = a.truncation(), nb = b.truncation();
    if (na > BipartiteState::kMaxTruncation || nb > BipartiteState::kMaxTruncation)
        throw Error(ErrorCode::bounds, "product state exceeds per-mode truncation cap " +
                                           std::to_string(BipartiteState::kMaxTruncation));
    std::vector<Amplitude> c(static_cast<std::size_t>(na + 1) * static_cast<std::size_t>(nb + 1));
    for (int n = 0; n <= na; ++n)
        for (int m = 0; m <= nb; ++m)
            c[static_cast<std::size_t>(n) * static_cast<std::size_t>(nb + 1) +
              static_cast<std::size_t>(m)] = a.coeff(n) * b.coeff(m);
    return BipartiteState::from_coeffs(na, nb, std::move(c));
}

namespace {

double parse_double(std::string_view text, std::size_t offset_in_spec) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("expected a number, got '" + std::string(text) + "'", offset_in_spec);
    return v;
}

long parse_int(std::string_view text, std::size_t offset_in_spec) {
    long v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("expected an integer, got '" + std::string(text) + "'", offset_in_spec);
    return v;
}

Sign parse_sign(std::string_view text, std::size_t offset_in_spec) {
    if (text == "+") return Sign::plus;
    if (text == "-") return Sign::minus;
    throw ParseError("expected '+' or '-', got '" + std::string(text) + "'", offset_in_spec);
}

}  // namespace

AnyState parse_state(std::string_view spec, int coherent_truncation) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw ParseError("state spec must look like kind:args", 0);
    const std::string_view kind = spec.substr(0, colon);
    const std::string_view rest = spec.substr(colon + 1);
    const std::size_t rest_off = colon + 1;

    if (kind == "fock") {
        const long n = parse_int(rest, rest_off);
        if (n < 0) throw Error(ErrorCode::domain, "fock: photon number must be >= 0");
        if (n > SingleModeState::kMaxTruncation)
            throw Error(ErrorCode::bounds, "fock: photon number exceeds " +
                                               std::to_string(SingleModeState::kMaxTruncation));
        return make_fock(static_cast<int>(n));
    }
    if (kind == "coh") {
        const std::size_t comma = rest.find(',');
        if (comma == std::string_view::npos)
            throw ParseError("coh: expects re,im", rest_off + rest.size());
        const double re = parse_double(rest.substr(0, comma), rest_off);
        const double im = parse_double(rest.substr(comma + 1), rest_off + comma + 1);
        return make_coherent(Amplitude{re, im}, coherent_truncation);
    }
    if (kind == "psi" || kind == "phi") {
        const std::size_t colon2 = rest.find(':');
        if (colon2 == std::string_view::npos)
            throw ParseError(std::string(kind) + ": expects sign:xi", rest_off + rest.size());
        const Sign sign = parse_sign(rest.substr(0, colon2), rest_off);
        const double xi = parse_double(rest.substr(colon2 + 1), rest_off + colon2 + 1);
        return kind == "psi" ? make_psi_family(sign, xi) : make_phi_family(sign, xi);
    }
    if (kind == "file") {
        std::ifstream in{std::string(rest)};
        if (!in) throw Error(ErrorCode::io, "cannot open state file '" + std::string(rest) + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return state_from_json(buf.str());
    }
    throw ParseError("unknown state kind '" + std::string(kind) + "'", 0);
}

namespace {

Amplitude json_pair(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorCode::parse, "coefficient entries must be [re, im] pairs");
    return Amplitude{j[0].get<double>(), j[1].get<double>()};
}

// Loader gate is looser (1e-6) than the constructor invariant (1e-9):
// files round-tripped through decimal text may carry more drift, and are
// renormalized exactly before construction.
std::vector<Amplitude> renormalize_loaded(std::vector<Amplitude> c) {
    const double n2 = norm_sq(c);
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-6)
        throw Error(ErrorCode::domain,
                    "state file norm deviates from 1 by more than 1e-6 (got " + std::to_string(n2) + ")");
    scale(c, 1.0 / std::sqrt(n2));
    return c;
}

}  // namespace

AnyState state_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, std::string("state file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j.contains("coeffs"))
        throw Error(ErrorCode::parse, "state file needs \"kind\" and \"coeffs\"");
    const std::string kind = j["kind"].get<std::string>();
    const nlohmann::json& coeffs = j["coeffs"];
    if (!coeffs.is_array() || coeffs.empty())
        throw Error(ErrorCode::parse, "\"coeffs\" must be a non-empty array");

    if (kind == "single") {
        std::vector<Amplitude> c;
        c.reserve(coeffs.size());
        for (const auto& e : coeffs) c.push_back(json_pair(e));
        return SingleModeState::from_coeffs(renormalize_loaded(std::move(c)));
    }
    if (kind == "bipartite") {
        const std::size_t rows = coeffs.size();
        if (!coeffs[0].is_array() || coeffs[0].empty())
            throw Error(ErrorCode::parse, "bipartite \"coeffs\" must be a matrix of [re, im] pairs");
        const std::size_t cols = coeffs[0].size();
        std::vector<Amplitude> c;
        c.reserve(rows * cols);
        for (const auto& row : coeffs) {
            if (!row.is_array() || row.size() != cols)
                throw Error(ErrorCode::parse, "bipartite coefficient rows must all have equal length");
            for (const auto& e : row) c.push_back(json_pair(e));
        }
        return BipartiteState::from_coeffs(static_cast<int>(rows) - 1, static_cast<int>(cols) - 1,
                                           renormalize_loaded(std::move(c)));
    }
    throw Error(ErrorCode::parse, "\"kind\" must be \"single\" or \"bipartite\"");
}

std::string state_to_json(const AnyState& s) {
    nlohmann::ordered_json j;
    if (const auto* single = std::get_if<SingleModeState>(&s)) {
        j["kind"] = "single";
        auto& arr = j["coeffs"] = nlohmann::ordered_json::array();
        for (const auto& c : single->coeffs()) arr.push_back({c.real(), c.imag()});
    } else {
        const auto& bi = std::get<BipartiteState>(s);
        j["kind"] = "bipartite";
        auto& arr = j["coeffs"] = nlohmann::ordered_json::array();
        for (int n = 0; n <= bi.trunc_a(); ++n) {
            auto row = nlohmann::ordered_json::array();
            for (int m = 0; m <= bi.trunc_b(); ++m) {
                const Amplitude c = bi.coeff(n, m);
                row.push_back({c.real(), c.imag()});
            }
            arr.push_back(std::move(row));
        }
    }
    return j.dump();
}

}  // namespace nqdeg
