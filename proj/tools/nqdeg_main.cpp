// nqdeg command-line front end: degree | sweep | oracle | qgrid.
// Talks to the library exclusively through the public C API.

#include <nqdeg.h>

#include <atomic>
#include <clocale>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

constexpr int kExitOracleFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConvergence = 3;

struct GlobalOptions {
    int trunc = -1;
    int grid_per_axis = 0;  // 0 = library default
    double radius_margin = -1.0;
    double simplex_tol = -1.0;
    int max_iters = -1;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out;
    bool json = false;
};

nqd_optimizer_config make_config(const GlobalOptions& opt) {
    nqd_optimizer_config cfg;
    nqd_optimizer_config_init(&cfg);
    if (opt.grid_per_axis > 0) cfg.grid_per_axis = opt.grid_per_axis;
    if (opt.radius_margin >= 0.0) cfg.radius_margin = opt.radius_margin;
    if (opt.simplex_tol > 0.0) cfg.simplex_tol = opt.simplex_tol;
    if (opt.max_iters >= 0) cfg.max_iters = opt.max_iters;
    cfg.seed = opt.seed;
    return cfg;
}

int exit_code_for(nqd_status status) {
    switch (status) {
        case NQD_OK: return 0;
        case NQD_ERR_CONVERGENCE: return kExitConvergence;
        default: return kExitUsage;
    }
}

[[noreturn]] void die(nqd_status status) {
    std::cerr << "error (" << nqd_status_name(status) << "): " << nqd_last_error() << "\n";
    std::exit(exit_code_for(status));
}

// RAII wrapper around the opaque handle.
struct StateHandle {
    nqd_state* ptr = nullptr;
    StateHandle() = default;
    explicit StateHandle(nqd_state* p) : ptr(p) {}
    StateHandle(StateHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
    StateHandle& operator=(StateHandle&& o) noexcept {
        if (this != &o) {
            nqd_state_free(ptr);
            ptr = o.ptr;
            o.ptr = nullptr;
        }
        return *this;
    }
    StateHandle(const StateHandle&) = delete;
    StateHandle& operator=(const StateHandle&) = delete;
    ~StateHandle() { nqd_state_free(ptr); }
};

StateHandle parse_or_die(const std::string& spec, int trunc) {
    nqd_state* s = nullptr;
    const nqd_status rc = nqd_state_parse(spec.c_str(), trunc, &s);
    if (rc != NQD_OK) die(rc);
    return StateHandle{s};
}

// Output stream selection: --out FILE or stdout.
class OutputSink {
public:
    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                std::cerr << "error (io): cannot open output file '" << path << "'\n";
                std::exit(kExitUsage);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// The CLI knows which family a spec names, so it can attach the matching
// closed-form reference to the report.
void attach_closed_form(const std::string& spec, nqd_measure_report* report) {
    std::string family;
    double param = 0.0;
    if (spec.rfind("fock:", 0) == 0) {
        family = "fock";
        param = std::atof(spec.c_str() + 5);
    } else if (spec.rfind("psi:", 0) == 0 || spec.rfind("phi:", 0) == 0) {
        family = spec.substr(0, 3);
        const std::size_t last = spec.rfind(':');
        param = std::atof(spec.c_str() + last + 1);
    } else if (spec.rfind("coh:", 0) == 0) {
        report->has_closed_form_ref = 1;
        report->closed_form_ref = 0.0;
        return;
    } else {
        return;
    }
    double ref = 0.0;
    if (nqd_closed_form_degree(family.c_str(), param, &ref) == NQD_OK) {
        report->has_closed_form_ref = 1;
        report->closed_form_ref = ref;
    }
}

int cmd_degree(const GlobalOptions& opt, const std::string& spec) {
    StateHandle state = parse_or_die(spec, opt.trunc);
    const nqd_optimizer_config cfg = make_config(opt);
    nqd_measure_report report;
    const nqd_status rc = nqd_degree(state.ptr, &cfg, &report);
    if (rc != NQD_OK && rc != NQD_ERR_CONVERGENCE) die(rc);
    if (rc == NQD_ERR_CONVERGENCE)
        std::cerr << "warning (convergence): " << nqd_last_error() << "\n";

    attach_closed_form(spec, &report);
    char* text = nullptr;
    const nqd_status jrc = nqd_report_to_json(&report, &text);
    if (jrc != NQD_OK) die(jrc);
    OutputSink sink(opt.out);
    sink.stream() << text << "\n";
    nqd_string_free(text);
    return rc == NQD_OK ? 0 : kExitConvergence;
}

// ----------------------------------------------------------------- sweep

struct SweepRow {
    double xi = 0.0;
    std::vector<double> values;
    bool converged = true;
};

struct SweepPlan {
    bool psi_plus, psi_minus, phi_plus, phi_minus;
    std::vector<std::string> columns;  // beyond leading xi
};

double degree_of(nqd_state* s, const nqd_optimizer_config& cfg, bool* converged) {
    nqd_measure_report report;
    const nqd_status rc = nqd_degree(s, &cfg, &report);
    if (rc != NQD_OK && rc != NQD_ERR_CONVERGENCE) die(rc);
    if (rc == NQD_ERR_CONVERGENCE) *converged = false;
    return report.degree;
}

SweepRow sweep_row(double xi, const SweepPlan& plan, const nqd_optimizer_config& cfg) {
    SweepRow row;
    row.xi = xi;
    StateHandle psi_p, psi_m, phi_p, phi_m;
    auto build = [&](char kind, char sign) {
        nqd_state* s = nullptr;
        const nqd_status rc = kind == 's' ? nqd_state_psi(sign, xi, &s) : nqd_state_phi(sign, xi, &s);
        if (rc != NQD_OK) die(rc);
        return StateHandle{s};
    };
    const bool need_psi = plan.psi_plus || plan.psi_minus;
    const bool need_phi = plan.phi_plus || plan.phi_minus;
    if (plan.psi_plus || need_psi) psi_p = build('s', '+');
    if (plan.psi_minus) psi_m = build('s', '-');
    if (plan.phi_plus || need_phi) phi_p = build('h', '+');
    if (plan.phi_minus) phi_m = build('h', '-');

    if (plan.psi_plus) row.values.push_back(degree_of(psi_p.ptr, cfg, &row.converged));
    if (plan.psi_minus) row.values.push_back(degree_of(psi_m.ptr, cfg, &row.converged));
    if (plan.phi_plus) row.values.push_back(degree_of(phi_p.ptr, cfg, &row.converged));
    if (plan.phi_minus) row.values.push_back(degree_of(phi_m.ptr, cfg, &row.converged));

    // Entropy and Mandel q are sign-independent within each family.
    nqd_state* entropy_state = need_psi ? psi_p.ptr : phi_p.ptr;
    double entropy = 0.0;
    nqd_status rc = nqd_entanglement_entropy(entropy_state, &entropy);
    if (rc != NQD_OK) die(rc);
    row.values.push_back(entropy);

    if (need_psi) {
        double q = std::nan("");
        rc = nqd_mandel_q(psi_p.ptr, &q);
        if (rc != NQD_OK && rc != NQD_ERR_UNDEFINED_STATISTIC) die(rc);
        row.values.push_back(q);
    }
    if (need_phi) {
        double q = std::nan("");
        rc = nqd_mandel_q(phi_p.ptr, &q);
        if (rc != NQD_OK && rc != NQD_ERR_UNDEFINED_STATISTIC) die(rc);
        row.values.push_back(q);
    }
    if (need_psi) {
        double ref = 0.0;
        if (nqd_closed_form_degree("psi", xi, &ref) != NQD_OK) die(NQD_ERR_DOMAIN);
        row.values.push_back(ref);
    }
    if (need_phi) {
        double ref = 0.0;
        if (nqd_closed_form_degree("phi", xi, &ref) != NQD_OK) die(NQD_ERR_DOMAIN);
        row.values.push_back(ref);
    }
    return row;
}

int cmd_sweep(const GlobalOptions& opt, const std::string& family, const std::string& sign,
              double xi_start, double xi_end, double xi_step) {
    if (!(xi_step > 0.0) || xi_start > xi_end || xi_start < 0.0 || xi_end > 1.0) {
        std::cerr << "error (config): need 0 <= xi-start <= xi-end <= 1 and xi-step > 0\n";
        return kExitUsage;
    }
    const bool psi = family == "psi" || family == "both";
    const bool phi = family == "phi" || family == "both";
    const bool plus = sign == "+" || sign == "both";
    const bool minus = sign == "-" || sign == "both";

    SweepPlan plan{psi && plus, psi && minus, phi && plus, phi && minus, {}};
    if (plan.psi_plus) plan.columns.push_back("D_psi_plus");
    if (plan.psi_minus) plan.columns.push_back("D_psi_minus");
    if (plan.phi_plus) plan.columns.push_back("D_phi_plus");
    if (plan.phi_minus) plan.columns.push_back("D_phi_minus");
    plan.columns.push_back("E");
    if (psi) plan.columns.push_back("q_psi");
    if (phi) plan.columns.push_back("q_phi");
    if (psi) plan.columns.push_back("D_psi_closed");
    if (phi) plan.columns.push_back("D_phi_closed");

    std::vector<double> xis;
    for (int i = 0;; ++i) {
        double xi = xi_start + i * xi_step;
        if (xi > xi_end + xi_step * 1e-9) break;
        xis.push_back(std::min(xi, 1.0));
    }

    const nqd_optimizer_config cfg = make_config(opt);
    std::vector<SweepRow> rows(xis.size());
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1 || xis.size() <= 1) {
        for (std::size_t i = 0; i < xis.size(); ++i) rows[i] = sweep_row(xis[i], plan, cfg);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= xis.size()) return;
                rows[i] = sweep_row(xis[i], plan, cfg);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), xis.size());
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    OutputSink sink(opt.out);
    std::ostream& out = sink.stream();
    out << "xi";
    for (const auto& c : plan.columns) out << "," << c;
    out << "\n";
    bool all_converged = true;
    for (const auto& row : rows) {
        out << format_g17(row.xi);
        for (double v : row.values) out << "," << format_g17(v);
        out << "\n";
        all_converged = all_converged && row.converged;
    }
    if (!all_converged) {
        std::cerr << "warning (convergence): at least one sweep row did not converge\n";
        return kExitConvergence;
    }
    return 0;
}

// ---------------------------------------------------------------- oracle

struct OracleCase {
    std::string group;
    std::string name;
    double computed;
    double reference;
    double tol;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::mt19937_64 engine_;
};

StateHandle random_single(Rng& rng, int trunc) {
    std::vector<double> re_im;
    double norm = 0.0;
    do {
        re_im.clear();
        norm = 0.0;
        for (int n = 0; n <= trunc; ++n) {
            const double re = rng.symmetric(), im = rng.symmetric();
            re_im.push_back(re);
            re_im.push_back(im);
            norm += re * re + im * im;
        }
    } while (norm < 1e-6);
    const double inv = 1.0 / std::sqrt(norm);
    for (double& v : re_im) v *= inv;
    nqd_state* s = nullptr;
    const nqd_status rc = nqd_state_single_from_coeffs(re_im.data(), trunc + 1, &s);
    if (rc != NQD_OK) die(rc);
    return StateHandle{s};
}

StateHandle random_bipartite(Rng& rng, int trunc_a, int trunc_b) {
    const int rows = trunc_a + 1, cols = trunc_b + 1;
    std::vector<double> re_im;
    double norm = 0.0;
    do {
        re_im.clear();
        norm = 0.0;
        for (int i = 0; i < rows * cols; ++i) {
            const double re = rng.symmetric(), im = rng.symmetric();
            re_im.push_back(re);
            re_im.push_back(im);
            norm += re * re + im * im;
        }
    } while (norm < 1e-6);
    const double inv = 1.0 / std::sqrt(norm);
    for (double& v : re_im) v *= inv;
    nqd_state* s = nullptr;
    const nqd_status rc = nqd_state_bipartite_from_coeffs(re_im.data(), rows, cols, &s);
    if (rc != NQD_OK) die(rc);
    return StateHandle{s};
}

double oracle_degree(nqd_state* s, const nqd_optimizer_config& cfg) {
    nqd_measure_report report;
    const nqd_status rc = nqd_degree(s, &cfg, &report);
    if (rc != NQD_OK) die(rc);
    return report.degree;
}

double oracle_closed(const char* family, double param) {
    double v = 0.0;
    const nqd_status rc = nqd_closed_form_degree(family, param, &v);
    if (rc != NQD_OK) die(rc);
    return v;
}

std::vector<OracleCase> build_oracle_battery(const GlobalOptions& opt, const std::string& only) {
    std::vector<OracleCase> cases;
    const nqd_optimizer_config cfg = make_config(opt);
    auto want = [&](const std::string& group) { return only.empty() || only == group; };
    auto add = [&](const std::string& group, const std::string& name, double computed,
                   double reference, double tol) {
        cases.push_back({group, name, computed, reference, tol});
    };

    if (want("fock")) {
        for (int n = 0; n <= 8; ++n) {
            nqd_state* s = nullptr;
            if (nqd_state_fock(n, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle h{s};
            add("fock", "D(|" + std::to_string(n) + ">)", oracle_degree(h.ptr, cfg),
                oracle_closed("fock", n), 1e-6);
        }
    }
    if (want("fock_nn")) {
        for (int n = 0; n <= 4; ++n) {
            nqd_state *a = nullptr, *p = nullptr;
            if (nqd_state_fock(n, &a) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle ha{a};
            if (nqd_state_product(ha.ptr, ha.ptr, &p) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle hp{p};
            add("fock_nn", "D(|" + std::to_string(n) + "," + std::to_string(n) + ">)",
                oracle_degree(hp.ptr, cfg), oracle_closed("fock_nn", n), 1e-6);
        }
    }
    if (want("coherent")) {
        for (double mag : {0.3, 0.7, 1.5}) {
            nqd_state* s = nullptr;
            if (nqd_state_coherent(mag, 0.0, 40, nullptr, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle h{s};
            std::ostringstream name;
            name << "D(|alpha=" << mag << ">)";
            add("coherent", name.str(), oracle_degree(h.ptr, cfg), 0.0, 1e-6);
        }
    }
    if (want("psi") || want("phi")) {
        for (int i = 0; i <= 10; ++i) {
            const double xi = std::min(1.0, i * 0.1);
            for (char sign : {'+', '-'}) {
                if (want("psi")) {
                    nqd_state* s = nullptr;
                    if (nqd_state_psi(sign, xi, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
                    StateHandle h{s};
                    std::ostringstream name;
                    name << "D(psi" << sign << "(" << xi << "))";
                    add("psi", name.str(), oracle_degree(h.ptr, cfg), oracle_closed("psi", xi), 1e-6);
                }
                if (want("phi")) {
                    nqd_state* s = nullptr;
                    if (nqd_state_phi(sign, xi, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
                    StateHandle h{s};
                    std::ostringstream name;
                    name << "D(phi" << sign << "(" << xi << "))";
                    add("phi", name.str(), oracle_degree(h.ptr, cfg), oracle_closed("phi", xi), 1e-6);
                }
            }
        }
    }
    if (want("entropy")) {
        for (int i = 0; i <= 10; ++i) {
            const double xi = std::min(1.0, i * 0.1);
            const double ref = (xi <= 0.0 || xi >= 1.0)
                                   ? 0.0
                                   : -(xi * std::log(xi) + (1.0 - xi) * std::log(1.0 - xi));
            for (char kind : {'s', 'h'}) {
                nqd_state* s = nullptr;
                const nqd_status rc =
                    kind == 's' ? nqd_state_psi('+', xi, &s) : nqd_state_phi('+', xi, &s);
                if (rc != NQD_OK) die(rc);
                StateHandle h{s};
                double entropy = 0.0;
                if (nqd_entanglement_entropy(h.ptr, &entropy) != NQD_OK) die(NQD_ERR_INTERNAL);
                std::ostringstream name;
                name << "E(" << (kind == 's' ? "psi" : "phi") << "+(" << xi << "))";
                add("entropy", name.str(), entropy, ref, 1e-12);
            }
        }
        Rng rng(opt.seed + 11);
        StateHandle a = random_single(rng, 3), b = random_single(rng, 2);
        nqd_state* prod = nullptr;
        if (nqd_state_product(a.ptr, b.ptr, &prod) != NQD_OK) die(NQD_ERR_INTERNAL);
        StateHandle hp{prod};
        double entropy = 0.0;
        if (nqd_entanglement_entropy(hp.ptr, &entropy) != NQD_OK) die(NQD_ERR_INTERNAL);
        add("entropy", "E(random product)", entropy, 0.0, 1e-12);
    }
    if (want("mandel")) {
        for (int i = 0; i <= 10; ++i) {
            const double xi = std::min(1.0, i * 0.1);
            for (char sign : {'+', '-'}) {
                nqd_state* s = nullptr;
                if (nqd_state_psi(sign, xi, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
                StateHandle h{s};
                double q = 0.0;
                if (nqd_mandel_q(h.ptr, &q) != NQD_OK) die(NQD_ERR_INTERNAL);
                std::ostringstream name;
                name << "q(psi" << sign << "(" << xi << "))";
                add("mandel", name.str(), q, -1.0, 1e-12);
            }
        }
        for (int i = 0; i <= 9; ++i) {  // xi = 1 is the vacuum: q undefined there
            const double xi = i * 0.1;
            for (char sign : {'+', '-'}) {
                nqd_state* s = nullptr;
                if (nqd_state_phi(sign, xi, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
                StateHandle h{s};
                double q = 0.0;
                if (nqd_mandel_q(h.ptr, &q) != NQD_OK) die(NQD_ERR_INTERNAL);
                std::ostringstream name;
                name << "q(phi" << sign << "(" << xi << "))";
                add("mandel", name.str(), q, 2.0 * xi - 1.0, 1e-12);
            }
        }
        const int pairs[5][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 3}, {0, 5}};
        for (const auto& nm : pairs) {
            nqd_state *a = nullptr, *b = nullptr, *p = nullptr;
            if (nqd_state_fock(nm[0], &a) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle ha{a};
            if (nqd_state_fock(nm[1], &b) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle hb{b};
            if (nqd_state_product(ha.ptr, hb.ptr, &p) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle hp{p};
            double q = 0.0;
            if (nqd_mandel_q(hp.ptr, &q) != NQD_OK) die(NQD_ERR_INTERNAL);
            add("mandel", "q(|" + std::to_string(nm[0]) + "," + std::to_string(nm[1]) + ">)", q,
                -1.0, 1e-12);
        }
    }
    if (want("product")) {
        Rng rng(opt.seed + 7);
        for (int k = 0; k < 5; ++k) {
            StateHandle a = random_single(rng, 2 + (k % 3));
            StateHandle b = random_single(rng, 2 + ((k + 1) % 3));
            nqd_state* prod = nullptr;
            if (nqd_state_product(a.ptr, b.ptr, &prod) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle hp{prod};
            const double d1 = oracle_degree(a.ptr, cfg);
            const double d2 = oracle_degree(b.ptr, cfg);
            double composed = 0.0;
            if (nqd_compose_product_degree(d1, d2, &composed) != NQD_OK) die(NQD_ERR_INTERNAL);
            add("product", "composition law #" + std::to_string(k), oracle_degree(hp.ptr, cfg),
                composed, 1e-6);
        }
        for (int n = 1; n <= 3; ++n) {
            nqd_state *a = nullptr, *b = nullptr, *p = nullptr;
            if (nqd_state_fock(0, &a) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle ha{a};
            if (nqd_state_fock(n, &b) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle hb{b};
            if (nqd_state_product(ha.ptr, hb.ptr, &p) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle hp{p};
            add("product", "D(|0," + std::to_string(n) + ">) = D(|" + std::to_string(n) + ">)",
                oracle_degree(hp.ptr, cfg), oracle_closed("fock", n), 1e-6);
        }
    }
    if (want("brute")) {
        auto brute = [&](nqd_state* s, double half_width, double step) {
            nqd_max_result r;
            if (nqd_brute_force_max(s, half_width, step, &r) != NQD_OK) die(NQD_ERR_INTERNAL);
            return r.q_max;
        };
        auto polished = [&](nqd_state* s) {
            nqd_max_result r;
            if (nqd_maximize_q(s, &cfg, &r) != NQD_OK) die(NQD_ERR_INTERNAL);
            return r.q_max;
        };
        for (int n : {1, 3}) {
            nqd_state* s = nullptr;
            if (nqd_state_fock(n, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle h{s};
            add("brute", "qmax(|" + std::to_string(n) + ">) optimizer vs lattice", polished(h.ptr),
                brute(h.ptr, std::sqrt(static_cast<double>(n)) + 3.0, 0.02), 1e-6);
        }
        {
            nqd_state* s = nullptr;
            if (nqd_state_psi('+', 0.3, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle h{s};
            add("brute", "qmax(psi+(0.3)) optimizer vs lattice", polished(h.ptr),
                brute(h.ptr, 4.0, 0.1), 1e-6);
        }
        {
            nqd_state* s = nullptr;
            if (nqd_state_phi('-', 0.7, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle h{s};
            add("brute", "qmax(phi-(0.7)) optimizer vs lattice", polished(h.ptr),
                brute(h.ptr, 4.0, 0.1), 1e-6);
        }
        {
            Rng rng(opt.seed + 23);
            StateHandle h = random_bipartite(rng, 2, 2);
            add("brute", "qmax(random bipartite) optimizer vs lattice", polished(h.ptr),
                brute(h.ptr, std::sqrt(2.0) + 3.0, 0.1), 1e-6);
        }
    }
    if (want("distance")) {
        nqd_state *zero = nullptr, *one = nullptr;
        if (nqd_state_fock(0, &zero) != NQD_OK) die(NQD_ERR_INTERNAL);
        StateHandle h0{zero};
        if (nqd_state_fock(1, &one) != NQD_OK) die(NQD_ERR_INTERNAL);
        StateHandle h1{one};
        double v = 0.0;
        if (nqd_distance_bu(h0.ptr, h0.ptr, &v) != NQD_OK) die(NQD_ERR_INTERNAL);
        add("distance", "d_BU(s,s)", v, 0.0, 1e-12);
        if (nqd_distance_hs(h0.ptr, h1.ptr, &v) != NQD_OK) die(NQD_ERR_INTERNAL);
        add("distance", "d_HS orthogonal", v, std::sqrt(2.0), 1e-12);
        // F = 1/4 pair: (|0> + sqrt(3)|1>)/2 against |0>
        const double re_im[4] = {0.5, 0.0, std::sqrt(3.0) / 2.0, 0.0};
        nqd_state* mix = nullptr;
        if (nqd_state_single_from_coeffs(re_im, 2, &mix) != NQD_OK) die(NQD_ERR_INTERNAL);
        StateHandle hm{mix};
        if (nqd_distance_bu(hm.ptr, h0.ptr, &v) != NQD_OK) die(NQD_ERR_INTERNAL);
        add("distance", "d_BU at F=1/4", v, 1.0, 1e-12);
        if (nqd_distance_hs(hm.ptr, h0.ptr, &v) != NQD_OK) die(NQD_ERR_INTERNAL);
        add("distance", "d_HS at F=1/4", v, std::sqrt(1.5), 1e-12);
        Rng rng(opt.seed + 31);
        StateHandle a = random_single(rng, 4), b = random_single(rng, 4);
        double fid = 0.0, hs = 0.0;
        if (nqd_fidelity(a.ptr, b.ptr, &fid) != NQD_OK) die(NQD_ERR_INTERNAL);
        if (nqd_distance_hs(a.ptr, b.ptr, &hs) != NQD_OK) die(NQD_ERR_INTERNAL);
        add("distance", "F + d_HS^2/2 on random pair", fid + 0.5 * hs * hs, 1.0, 1e-12);
    }
    if (want("conv")) {
        struct ConvCase {
            const char* name;
            int fock;
            double re, im;
        };
        const ConvCase conv_cases[] = {{"qfromw(|0>, 0)", 0, 0.0, 0.0},
                                       {"qfromw(|1>, 0.5+0.5i)", 1, 0.5, 0.5},
                                       {"qfromw(|2>, 1+1i)", 2, 1.0, 1.0}};
        for (const auto& c : conv_cases) {
            nqd_state* s = nullptr;
            if (nqd_state_fock(c.fock, &s) != NQD_OK) die(NQD_ERR_INTERNAL);
            StateHandle h{s};
            double direct = 0.0, convolved = 0.0;
            const double amps[2] = {c.re, c.im};
            if (nqd_husimi_q(h.ptr, amps, 1, &direct) != NQD_OK) die(NQD_ERR_INTERNAL);
            if (nqd_q_from_w(h.ptr, c.re, c.im, nullptr, &convolved) != NQD_OK) die(NQD_ERR_INTERNAL);
            add("conv", c.name, convolved, direct, 1e-4);
        }
    }
    return cases;
}

int cmd_oracle(const GlobalOptions& opt, const std::string& only, double perturb) {
    std::vector<OracleCase> cases = build_oracle_battery(opt, only);
    if (cases.empty()) {
        std::cerr << "error (config): unknown --only group '" << only << "'\n";
        return kExitUsage;
    }
    for (auto& c : cases) c.computed += perturb;

    OutputSink sink(opt.out);
    std::ostream& out = sink.stream();
    int failures = 0;
    if (opt.json) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& c : cases) {
            const double delta = std::abs(c.computed - c.reference);
            const bool pass = delta <= c.tol;
            failures += pass ? 0 : 1;
            nlohmann::ordered_json row;
            row["group"] = c.group;
            row["case"] = c.name;
            row["computed"] = c.computed;
            row["reference"] = c.reference;
            row["delta"] = delta;
            row["tol"] = c.tol;
            row["pass"] = pass;
            rows.push_back(std::move(row));
        }
        out << rows.dump() << "\n";
    } else {
        char line[256];
        std::snprintf(line, sizeof line, "%-9s %-36s %15s %15s %11s %9s %s\n", "GROUP", "CASE",
                      "COMPUTED", "REFERENCE", "|DELTA|", "TOL", "STATUS");
        out << line;
        for (const auto& c : cases) {
            const double delta = std::abs(c.computed - c.reference);
            const bool pass = delta <= c.tol;
            failures += pass ? 0 : 1;
            std::snprintf(line, sizeof line, "%-9s %-36s %15.9g %15.9g %11.3g %9.1g %s\n",
                          c.group.c_str(), c.name.c_str(), c.computed, c.reference, delta, c.tol,
                          pass ? "PASS" : "FAIL");
            out << line;
        }
        std::snprintf(line, sizeof line, "SUMMARY: %zu/%zu passed\n", cases.size() - failures,
                      cases.size());
        out << line;
    }
    return failures == 0 ? 0 : kExitOracleFailure;
}

// ----------------------------------------------------------------- qgrid

int cmd_qgrid(const GlobalOptions& opt, const std::string& spec, const std::string& func,
              double half_width, double step, const std::string& center) {
    StateHandle state = parse_or_die(spec, opt.trunc);
    nqd_grid_spec grid;
    nqd_grid_spec_init(&grid);
    grid.half_width = half_width;
    grid.step = step;
    if (!center.empty()) {
        const std::size_t comma = center.find(',');
        if (comma == std::string::npos) {
            std::cerr << "error (parse): --center expects re,im\n";
            return kExitUsage;
        }
        grid.center_re = std::atof(center.substr(0, comma).c_str());
        grid.center_im = std::atof(center.substr(comma + 1).c_str());
    }
    const nqd_status rc = nqd_dump_grid(state.ptr, func.c_str(), &grid, nullptr,
                                        opt.out.empty() ? nullptr : opt.out.c_str());
    if (rc != NQD_OK) die(rc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"nonclassical-degree toolkit for pure bosonic field states"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    GlobalOptions opt;
    app.add_option("--trunc", opt.trunc, "coherent-state truncation override for coh: specs");
    app.add_option("--grid-per-axis", opt.grid_per_axis, "multistart lattice points per axis (odd, >= 3)");
    app.add_option("--radius-margin", opt.radius_margin, "search radius margin beyond sqrt(truncation)");
    app.add_option("--simplex-tol", opt.simplex_tol, "Nelder-Mead simplex diameter tolerance");
    app.add_option("--max-iters", opt.max_iters, "Nelder-Mead iteration cap per start");
    app.add_option("--seed", opt.seed, "seed for randomized oracle cases");
    app.add_option("--jobs", opt.jobs, "concurrent sweep evaluations");
    app.add_option("--out", opt.out, "write output to a file instead of stdout");
    app.add_flag("--json", opt.json, "JSON output where supported");

    std::string degree_spec;
    CLI::App* degree = app.add_subcommand("degree", "nonclassical degree of one state");
    degree->set_help_flag("--help", "print help and exit");
    degree->fallthrough();
    degree->add_option("spec", degree_spec, "state spec (fock:N | coh:RE,IM | psi:{+|-}:XI | phi:{+|-}:XI | file:PATH)")
        ->required();

    std::string sweep_family = "both", sweep_sign = "both";
    double xi_start = 0.0, xi_end = 1.0, xi_step = 0.01;
    CLI::App* sweep = app.add_subcommand("sweep", "xi sweep of both state families (CSV)");
    sweep->set_help_flag("--help", "print help and exit");
    sweep->fallthrough();
    sweep->add_option("--family", sweep_family, "psi | phi | both")
        ->check(CLI::IsMember({"psi", "phi", "both"}));
    sweep->add_option("--sign", sweep_sign, "+ | - | both")->check(CLI::IsMember({"+", "-", "both"}));
    sweep->add_option("--xi-start", xi_start, "first xi value");
    sweep->add_option("--xi-end", xi_end, "last xi value");
    sweep->add_option("--xi-step", xi_step, "xi increment");

    std::string oracle_only;
    double oracle_perturb = 0.0;
    CLI::App* oracle = app.add_subcommand("oracle", "closed-form + brute-force validation battery");
    oracle->set_help_flag("--help", "print help and exit");
    oracle->fallthrough();
    oracle->add_option("--only", oracle_only,
                       "restrict to one group (fock, fock_nn, coherent, psi, phi, entropy, mandel, "
                       "product, brute, distance, conv)");
    oracle->add_option("--perturb", oracle_perturb, "offset added to computed values (harness self-check)")
        ->group("");

    std::string qgrid_spec, qgrid_func = "q", qgrid_center;
    double qgrid_half_width = 4.0, qgrid_step = 0.05;
    CLI::App* qgrid = app.add_subcommand("qgrid", "CSV dump of a phase-space surface");
    qgrid->set_help_flag("--help", "print help and exit");
    qgrid->fallthrough();
    qgrid->add_option("spec", qgrid_spec, "single-mode state spec")->required();
    qgrid->add_option("--func", qgrid_func, "q | w | qfromw")
        ->check(CLI::IsMember({"q", "w", "qfromw"}));
    qgrid->add_option("-L,--half-width", qgrid_half_width, "grid half width");
    qgrid->add_option("-h,--step", qgrid_step, "grid step");
    qgrid->add_option("--center", qgrid_center, "grid center as re,im");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (degree->parsed()) return cmd_degree(opt, degree_spec);
    if (sweep->parsed()) return cmd_sweep(opt, sweep_family, sweep_sign, xi_start, xi_end, xi_step);
    if (oracle->parsed()) return cmd_oracle(opt, oracle_only, oracle_perturb);
    if (qgrid->parsed()) return cmd_qgrid(opt, qgrid_spec, qgrid_func, qgrid_half_width, qgrid_step,
                                          qgrid_center);
    return kExitUsage;
}
