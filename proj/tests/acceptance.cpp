// Acceptance suite: one line per criterion, exit 0 only if all pass.
// Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "errors.hpp"
#include "measures.hpp"
#include "optimize.hpp"
#include "phase_space.hpp"
#include "states.hpp"

using namespace nqdeg;

namespace {

constexpr double kOneMinusInvE = 0.63212055882855768;
constexpr double kOneMinusInvE2 = 0.86466471676338731;
constexpr double kLn2 = 0.69314718055994531;

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
};

std::vector<Amplitude> random_coeffs(std::mt19937_64& rng, int count) {
    auto u = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
    std::vector<Amplitude> c(static_cast<std::size_t>(count));
    double n2 = 0.0;
    for (auto& v : c) {
        v = {u(), u()};
        n2 += std::norm(v);
    }
    for (auto& v : c) v /= std::sqrt(n2);
    return c;
}

std::vector<double> xi_grid_21() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(std::min(1.0, i * 0.05));
    return grid;
}

double binary_entropy(double xi) {
    if (xi <= 0.0 || xi >= 1.0) return 0.0;
    return -(xi * std::log(xi) + (1.0 - xi) * std::log(1.0 - xi));
}

// ------------------------------------------------------------------ 1
bool criterion_fock_degrees(Check& c) {
    for (int n = 0; n <= 8; ++n) {
        const double expect = closed_form_degree(ClosedFormFamily::fock_n, n);
        const double got = nonclassical_degree(make_fock(n)).degree;
        c.expect(std::abs(got - expect) <= 1e-6,
                 "n=" + std::to_string(n) + " |delta|=" + std::to_string(std::abs(got - expect)));
    }
    c.expect(nonclassical_degree(make_fock(0)).degree <= 1e-9, "D(|0>) must be 0");
    c.expect(std::abs(nonclassical_degree(make_fock(1)).degree - 0.6321206) <= 1e-6,
             "D(|1>) must be 0.6321206");
    return c.ok;
}

// ------------------------------------------------------------------ 2
bool criterion_coherent_baseline(Check& c) {
    for (double mag : {0.3, 0.7, 1.5}) {
        const double d = nonclassical_degree(make_coherent({mag, 0.0}, 40)).degree;
        c.expect(d <= 1e-6, "|alpha|=" + std::to_string(mag) + " D=" + std::to_string(d));
    }
    return c.ok;
}

// ------------------------------------------------------------------ 3
bool criterion_psi_constant(Check& c) {
    for (double xi : xi_grid_21())
        for (Sign sign : {Sign::plus, Sign::minus}) {
            const double d = nonclassical_degree2(make_psi_family(sign, xi)).degree;
            c.expect(std::abs(d - kOneMinusInvE) <= 1e-6,
                     "xi=" + std::to_string(xi) + " D=" + std::to_string(d));
        }
    return c.ok;
}

// ------------------------------------------------------------------ 4
bool criterion_phi_piecewise(Check& c) {
    for (double xi : xi_grid_21())
        for (Sign sign : {Sign::plus, Sign::minus}) {
            const double expect = closed_form_degree(ClosedFormFamily::phi, xi);
            const double got = nonclassical_degree2(make_phi_family(sign, xi)).degree;
            c.expect(std::abs(got - expect) <= 1e-6,
                     "xi=" + std::to_string(xi) + " |delta|=" + std::to_string(std::abs(got - expect)));
        }
    c.expect(std::abs(closed_form_degree(ClosedFormFamily::phi, 0.0) - kOneMinusInvE2) <= 1e-8,
             "endpoint xi=0");
    c.expect(closed_form_degree(ClosedFormFamily::phi, 1.0) == 0.0, "endpoint xi=1");
    const double left = 1.0 - (1.0 - 0.5) * std::exp(-2.0 * (1.0 - std::sqrt(0.5 / (1.0 - 0.5))));
    const double right = 1.0 - 0.5;
    c.expect(std::abs(left - 0.5) <= 1e-12 && std::abs(right - 0.5) <= 1e-12,
             "branch continuity at xi=1/2");
    return c.ok;
}

// ------------------------------------------------------------------ 5
bool criterion_composition_law(Check& c) {
    std::mt19937_64 rng(20260810);
    for (int k = 0; k < 50; ++k) {
        const int ta = 1 + static_cast<int>(rng() % 6);  // truncation <= 6
        const int tb = 1 + static_cast<int>(rng() % 6);
        const auto a = SingleModeState::from_coeffs(random_coeffs(rng, ta + 1), 1e-6);
        const auto b = SingleModeState::from_coeffs(random_coeffs(rng, tb + 1), 1e-6);
        const double d1 = nonclassical_degree(a).degree;
        const double d2 = nonclassical_degree(b).degree;
        const double direct = nonclassical_degree2(make_product(a, b)).degree;
        const double composed = compose_product_degree(d1, d2);
        c.expect(std::abs(direct - composed) <= 1e-6,
                 "pair " + std::to_string(k) + " |delta|=" + std::to_string(std::abs(direct - composed)));
    }
    for (int n = 1; n <= 3; ++n) {
        const double got = nonclassical_degree2(make_product(make_fock(0), make_fock(n))).degree;
        const double expect = closed_form_degree(ClosedFormFamily::fock_n, n);
        c.expect(std::abs(got - expect) <= 1e-6, "D(|0," + std::to_string(n) + ">)");
    }
    for (int n = 1; n <= 3; ++n) {
        const double got = nonclassical_degree2(make_product(make_fock(n), make_fock(n))).degree;
        const double expect = closed_form_degree(ClosedFormFamily::fock_nn, n);
        c.expect(std::abs(got - expect) <= 1e-6, "D(|" + std::to_string(n) + "," + std::to_string(n) + ">)");
    }
    return c.ok;
}

// ------------------------------------------------------------------ 6
bool criterion_entropy(Check& c) {
    for (double xi : xi_grid_21()) {
        const double expect = binary_entropy(xi);
        for (Sign sign : {Sign::plus, Sign::minus}) {
            c.expect(std::abs(entanglement_entropy(make_psi_family(sign, xi)) - expect) <= 1e-12,
                     "psi xi=" + std::to_string(xi));
            c.expect(std::abs(entanglement_entropy(make_phi_family(sign, xi)) - expect) <= 1e-12,
                     "phi xi=" + std::to_string(xi));
        }
    }
    c.expect(std::abs(entanglement_entropy(make_psi_family(Sign::plus, 0.5)) - kLn2) <= 1e-12,
             "E(1/2) = ln 2");
    c.expect(entanglement_entropy(make_psi_family(Sign::plus, 0.0)) <= 1e-12, "E(0) = 0");
    c.expect(entanglement_entropy(make_psi_family(Sign::plus, 1.0)) <= 1e-12, "E(1) = 0");
    return c.ok;
}

// ------------------------------------------------------------------ 7
bool criterion_mandel(Check& c) {
    for (double xi : xi_grid_21())
        for (Sign sign : {Sign::plus, Sign::minus})
            c.expect(std::abs(mandel_q(make_psi_family(sign, xi)) - (-1.0)) <= 1e-12,
                     "psi xi=" + std::to_string(xi));

    // 2 xi - 1 on the open-interior grid; xi = 1 is the two-mode vacuum,
    // where the statistic is undefined by construction (<n> = 0).
    for (double xi : xi_grid_21()) {
        if (xi >= 1.0) continue;
        for (Sign sign : {Sign::plus, Sign::minus})
            c.expect(std::abs(mandel_q(make_phi_family(sign, xi)) - (2.0 * xi - 1.0)) <= 1e-12,
                     "phi xi=" + std::to_string(xi));
    }
    for (Sign sign : {Sign::plus, Sign::minus}) {
        bool raised = false;
        try {
            mandel_q(make_phi_family(sign, 1.0));
        } catch (const Error& e) {
            raised = e.code() == ErrorCode::undefined_statistic;
        }
        c.expect(raised, "phi(1) must raise the undefined-statistic error");
    }

    const int pairs[][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 3}, {0, 5}};
    for (const auto& nm : pairs) {
        const double q = mandel_q(make_product(make_fock(nm[0]), make_fock(nm[1])));
        c.expect(std::abs(q - (-1.0)) <= 1e-12,
                 "q(|" + std::to_string(nm[0]) + "," + std::to_string(nm[1]) + ">)");
    }
    bool raised = false;
    try {
        mandel_q(make_fock(0));
    } catch (const Error& e) {
        raised = e.code() == ErrorCode::undefined_statistic;
    }
    c.expect(raised, "vacuum must raise the undefined-statistic error");
    return c.ok;
}

// ------------------------------------------------------------------ 8
bool criterion_convolution_oracle(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    const double r2 = 1.0 / std::sqrt(2.0);
    const std::vector<SingleModeState> battery = {
        make_fock(0), make_fock(1), make_fock(2),
        SingleModeState::from_coeffs({{r2, 0}, {0, 0}, {r2, 0}}), make_coherent({1.0, 0.0}, 30)};
    const Amplitude points[] = {{0, 0}, {0.5, 0.5}, {1, 0}, {-0.7, 1.1}, {1, 1}};
    int idx = 0;
    for (const auto& s : battery) {
        for (const Amplitude p : points) {
            const double direct = husimi_q(PhasePoint::single(p), s);
            const double convolved = q_from_w(p, s);
            c.expect(std::abs(direct - convolved) <= 1e-4,
                     "state " + std::to_string(idx) + " |delta|=" +
                         std::to_string(std::abs(direct - convolved)));
        }
        ++idx;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(seconds < 60.0, "runtime " + std::to_string(seconds) + "s exceeds 60s");
    c.detail << (c.detail.tellp() > 0 ? "; " : "") << "runtime " << seconds << "s";
    return c.ok;
}

// ------------------------------------------------------------------ 9
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

bool run_cli(const std::string& args, std::string& output) {
    const std::string cmd = std::string(NQDEG_CLI_PATH) + " " + args + " 2>/dev/null";
    std::FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return false;
    char buf[4096];
    std::size_t got = 0;
    output.clear();
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
    const int status = pclose(pipe);
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) return csv;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) csv.header.push_back(cell);
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        while (std::getline(rs, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

bool criterion_decoupling(Check& c) {
    std::string output;
    if (!run_cli("sweep --jobs 2", output)) {
        c.expect(false, "sweep command failed");
        return false;
    }
    const Csv csv = parse_csv(output);
    c.expect(csv.rows.size() == 101, "expected 101 sweep rows");
    if (csv.rows.empty()) return false;

    for (const char* col : {"D_psi_plus", "D_psi_minus"}) {
        double lo = 2.0, hi = -1.0;
        for (const auto& row : csv.rows) {
            lo = std::min(lo, row[csv.col(col)]);
            hi = std::max(hi, row[csv.col(col)]);
        }
        c.expect(hi - lo < 1e-6, std::string(col) + " range " + std::to_string(hi - lo));
    }
    {
        double lo = 2.0, hi = -1.0;
        for (const auto& row : csv.rows) {
            lo = std::min(lo, row[csv.col("E")]);
            hi = std::max(hi, row[csv.col("E")]);
        }
        c.expect(std::abs((hi - lo) - kLn2) <= 1e-9, "range(E) = " + std::to_string(hi - lo));
    }
    for (const char* col : {"D_phi_plus", "D_phi_minus"}) {
        for (std::size_t i = 1; i < csv.rows.size(); ++i)
            c.expect(csv.rows[i][csv.col(col)] <= csv.rows[i - 1][csv.col(col)] + 1e-9,
                     std::string(col) + " not non-increasing at row " + std::to_string(i));
    }
    // E rises to xi = 1/2, then falls: not monotone overall
    const int e_col = csv.col("E");
    for (std::size_t i = 1; i < csv.rows.size(); ++i) {
        const double xi = csv.rows[i][0];
        if (xi <= 0.5)
            c.expect(csv.rows[i][e_col] >= csv.rows[i - 1][e_col] - 1e-12,
                     "E not rising at xi=" + std::to_string(xi));
        else
            c.expect(csv.rows[i][e_col] <= csv.rows[i - 1][e_col] + 1e-12,
                     "E not falling at xi=" + std::to_string(xi));
    }
    return c.ok;
}

// ------------------------------------------------------------------ 10
bool criterion_brute_force_agreement(Check& c) {
    for (int n = 0; n <= 8; ++n) {
        const auto s = make_fock(n);
        const double opt = maximize_q(s).q_max;
        const double brute = brute_force_max(s, std::sqrt(static_cast<double>(n)) + 3.0, 0.02).q_max;
        c.expect(std::abs(opt - brute) <= 1e-6, "fock n=" + std::to_string(n));
    }
    for (double xi : xi_grid_21())
        for (Sign sign : {Sign::plus, Sign::minus}) {
            {
                const auto s = make_psi_family(sign, xi);
                const double opt = maximize_q2(s).q_max;
                const double brute = brute_force_max(s, 4.0, 0.1).q_max;
                c.expect(std::abs(opt - brute) <= 1e-6, "psi xi=" + std::to_string(xi));
            }
            {
                const auto s = make_phi_family(sign, xi);
                const double opt = maximize_q2(s).q_max;
                const double brute = brute_force_max(s, 4.0, 0.1).q_max;
                c.expect(std::abs(opt - brute) <= 1e-6, "phi xi=" + std::to_string(xi));
            }
        }
    std::mt19937_64 rng(424242);
    for (int k = 0; k < 10; ++k) {
        const int ta = 1 + static_cast<int>(rng() % 4);  // bipartite truncation <= 4
        const int tb = 1 + static_cast<int>(rng() % 4);
        const auto s = BipartiteState::from_coeffs(
            ta, tb, random_coeffs(rng, (ta + 1) * (tb + 1)), 1e-6);
        const double opt = maximize_q2(s).q_max;
        const double half = std::sqrt(static_cast<double>(std::max(ta, tb))) + 3.0;
        const double brute = brute_force_max(s, half, 0.1).q_max;
        c.expect(std::abs(opt - brute) <= 1e-6,
                 "random " + std::to_string(k) + " |delta|=" + std::to_string(std::abs(opt - brute)));
    }
    return c.ok;
}

// ------------------------------------------------------------------ 11
bool criterion_distance_identities(Check& c) {
    std::mt19937_64 rng(777);
    for (int k = 0; k < 100; ++k) {
        const auto a = SingleModeState::from_coeffs(random_coeffs(rng, 2 + static_cast<int>(rng() % 6)), 1e-6);
        const auto b = SingleModeState::from_coeffs(random_coeffs(rng, 2 + static_cast<int>(rng() % 6)), 1e-6);
        const double f = fidelity(a, b);
        const double bu = distance_bu(a, b);
        const double hs = distance_hs(a, b);
        c.expect(bu <= hs + 1e-15, "d_BU > d_HS at pair " + std::to_string(k));
        c.expect(std::abs(0.5 * hs * hs + f - 1.0) <= 1e-12,
                 "identity off at pair " + std::to_string(k));
    }
    const auto s = SingleModeState::from_coeffs(random_coeffs(rng, 4), 1e-6);
    c.expect(distance_bu(s, s) == 0.0 && distance_hs(s, s) == 0.0, "distances at F=1");
    const double bu01 = distance_bu(make_fock(0), make_fock(1));
    const double hs01 = distance_hs(make_fock(0), make_fock(1));
    c.expect(std::abs(bu01 - std::sqrt(2.0)) <= 1e-15 && std::abs(hs01 - std::sqrt(2.0)) <= 1e-15,
             "distances at F=0");
    return c.ok;
}

struct Criterion {
    int id;
    const char* title;
    std::function<bool(Check&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    const std::vector<Criterion> criteria = {
        {1, "Fock degrees match 1 - n^n e^-n/n! within 1e-6", criterion_fock_degrees},
        {2, "truncated coherent states have degree <= 1e-6", criterion_coherent_baseline},
        {3, "psi family degree is 1 - 1/e for every weight (1e-6)", criterion_psi_constant},
        {4, "phi family degree matches the piecewise closed form (1e-6)", criterion_phi_piecewise},
        {5, "product degrees compose as D1 + D2 - D1*D2 (1e-6)", criterion_composition_law},
        {6, "family entropy is the binary entropy of the weight (1e-12)", criterion_entropy},
        {7, "Mandel q: psi = -1, phi = 2xi - 1, number products = -1 (1e-12)", criterion_mandel},
        {8, "Gaussian convolution of W reproduces Q within 1e-4", criterion_convolution_oracle},
        {9, "sweep CSV: flat D_psi, ln-2 entropy range, monotone D_phi", criterion_decoupling},
        {10, "optimizer agrees with the brute-force lattice within 1e-6", criterion_brute_force_agreement},
        {11, "distance identities over 100 random pure pairs (1e-12)", criterion_distance_identities},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        Check check;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criterion.fn(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  criterion %2d: %s  [%.1fs]%s%s\n", ok ? "PASS" : "FAIL", criterion.id,
                    criterion.title, seconds, check.detail.tellp() > 0 ? " -- " : "",
                    check.detail.str().c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
