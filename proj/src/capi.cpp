#include "nqdeg.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "measures.hpp"
#include "optimize.hpp"
#include "phase_space.hpp"
#include "states.hpp"

struct nqd_state {
    nqdeg::AnyState value;
};

namespace {

thread_local std::string g_last_error;

nqd_status code_to_status(nqdeg::ErrorCode code) {
    using nqdeg::ErrorCode;
    switch (code) {
        case ErrorCode::domain: return NQD_ERR_DOMAIN;
        case ErrorCode::bounds: return NQD_ERR_BOUNDS;
        case ErrorCode::truncation: return NQD_ERR_TRUNCATION;
        case ErrorCode::parse: return NQD_ERR_PARSE;
        case ErrorCode::arity: return NQD_ERR_ARITY;
        case ErrorCode::config: return NQD_ERR_CONFIG;
        case ErrorCode::convergence: return NQD_ERR_CONVERGENCE;
        case ErrorCode::undefined_statistic: return NQD_ERR_UNDEFINED_STATISTIC;
        case ErrorCode::io: return NQD_ERR_IO;
    }
    return NQD_ERR_INTERNAL;
}

nqd_status fail(nqd_status status, const char* msg) {
    g_last_error = msg;
    return status;
}

/* Runs `fn`, translating core exceptions into status codes. */
template <typename Fn>
nqd_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return NQD_OK;
    } catch (const nqdeg::Error& e) {
        g_last_error = e.what();
        return code_to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return NQD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NQD_ERR_INTERNAL;
    }
}

nqd_status make_state(nqd_state** out, nqdeg::AnyState&& value) {
    *out = new nqd_state{std::move(value)};
    return NQD_OK;
}

nqdeg::OptimizerConfig to_core(const nqd_optimizer_config* cfg) {
    nqdeg::OptimizerConfig c;
    if (cfg) {
        c.radius_margin = cfg->radius_margin;
        c.grid_per_axis = cfg->grid_per_axis;
        c.simplex_tol = cfg->simplex_tol;
        c.max_iters = cfg->max_iters;
        c.seed = cfg->seed;
    }
    return c;
}

void fill_max_result(const nqdeg::MaxResult& r, nqd_max_result* out) {
    out->q_max = r.q_max;
    out->arity = r.argmax.arity;
    for (int k = 0; k < 2; ++k) {
        out->argmax[2 * k] = r.argmax.amps[static_cast<std::size_t>(k)].real();
        out->argmax[2 * k + 1] = r.argmax.amps[static_cast<std::size_t>(k)].imag();
    }
    out->starts_used = r.starts_used;
    out->converged = r.converged ? 1 : 0;
    out->spread = r.spread;
}

void fill_report(const nqdeg::MeasureReport& r, nqd_measure_report* out) {
    out->degree = r.degree;
    out->q_max = r.q_max;
    out->arity = r.argmax.arity;
    for (int k = 0; k < 2; ++k) {
        out->argmax[2 * k] = r.argmax.amps[static_cast<std::size_t>(k)].real();
        out->argmax[2 * k + 1] = r.argmax.amps[static_cast<std::size_t>(k)].imag();
    }
    out->has_entropy = r.entropy ? 1 : 0;
    out->entropy = r.entropy.value_or(0.0);
    out->has_mandel_q = r.mandel_q ? 1 : 0;
    out->mandel_q = r.mandel_q.value_or(0.0);
    out->converged = r.converged ? 1 : 0;
    out->has_closed_form_ref = r.closed_form_ref ? 1 : 0;
    out->closed_form_ref = r.closed_form_ref.value_or(0.0);
}

char* dup_string(const std::string& s) {
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return buf;
}

const nqdeg::SingleModeState* as_single(const nqd_state* s) {
    return std::get_if<nqdeg::SingleModeState>(&s->value);
}

const nqdeg::BipartiteState* as_bipartite(const nqd_state* s) {
    return std::get_if<nqdeg::BipartiteState>(&s->value);
}

const nqdeg::SingleModeState& require_single(const nqd_state* s) {
    if (const auto* single = as_single(s)) return *single;
    throw nqdeg::Error(nqdeg::ErrorCode::arity, "operation needs a single-mode state");
}

nqdeg::GridSpec to_core_grid(const nqd_grid_spec* grid) {
    nqdeg::GridSpec g;
    if (grid) {
        g.half_width = grid->half_width;
        g.step = grid->step;
        g.center = {grid->center_re, grid->center_im};
    }
    return g;
}

}  // namespace

extern "C" {

const char* nqd_version(void) { return NQDEG_VERSION; }

const char* nqd_status_name(nqd_status status) {
    switch (status) {
        case NQD_OK: return "ok";
        case NQD_ERR_DOMAIN: return "domain";
        case NQD_ERR_BOUNDS: return "bounds";
        case NQD_ERR_TRUNCATION: return "truncation";
        case NQD_ERR_PARSE: return "parse";
        case NQD_ERR_ARITY: return "arity";
        case NQD_ERR_CONFIG: return "config";
        case NQD_ERR_CONVERGENCE: return "convergence";
        case NQD_ERR_UNDEFINED_STATISTIC: return "undefined-statistic";
        case NQD_ERR_IO: return "io";
        case NQD_ERR_NULL_ARGUMENT: return "null-argument";
        case NQD_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* nqd_last_error(void) { return g_last_error.c_str(); }

nqd_status nqd_state_fock(int n, nqd_state** out) {
    if (!out) return fail(NQD_ERR_NULL_ARGUMENT, "out handle is null");
    return guarded([&] { make_state(out, nqdeg::make_fock(n)); });
}

nqd_status nqd_state_coherent(double alpha_re, double alpha_im, int truncation,
                              double* discarded_tail, nqd_state** out) {
    if (!out) return fail(NQD_ERR_NULL_ARGUMENT, "out handle is null");
    return guarded([&] {
        make_state(out, nqdeg::make_coherent({alpha_re, alpha_im}, truncation, discarded_tail));
    });
}

nqd_status nqd_state_psi(char sign, double xi, nqd_state** out) {
    if (!out) return fail(NQD_ERR_NULL_ARGUMENT, "out handle is null");
    if (sign != '+' && sign != '-') return fail(NQD_ERR_DOMAIN, "sign must be '+' or '-'");
    return guarded([&] {
        make_state(out, nqdeg::make_psi_family(sign == '+' ? nqdeg::Sign::plus : nqdeg::Sign::minus, xi));
    });
}

nqd_status nqd_state_phi(char sign, double xi, nqd_state** out) {
    if (!out) return fail(NQD_ERR_NULL_ARGUMENT, "out handle is null");
    if (sign != '+' && sign != '-') return fail(NQD_ERR_DOMAIN, "sign must be '+' or '-'");
    return guarded([&] {
        make_state(out, nqdeg::make_phi_family(sign == '+' ? nqdeg::Sign::plus : nqdeg::Sign::minus, xi));
    });
}

nqd_status nqd_state_product(const nqd_state* a, const nqd_state* b, nqd_state** out) {
    if (!a || !b || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] { make_state(out, nqdeg::make_product(require_single(a), require_single(b))); });
}

nqd_status nqd_state_single_from_coeffs(const double* re_im, int count, nqd_state** out) {
    if (!re_im || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    if (count <= 0) return fail(NQD_ERR_DOMAIN, "count must be positive");
    return guarded([&] {
        std::vector<nqdeg::Amplitude> c(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) c[static_cast<std::size_t>(i)] = {re_im[2 * i], re_im[2 * i + 1]};
        make_state(out, nqdeg::SingleModeState::from_coeffs(std::move(c), 1e-6));
    });
}

nqd_status nqd_state_bipartite_from_coeffs(const double* re_im, int rows, int cols, nqd_state** out) {
    if (!re_im || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    if (rows <= 0 || cols <= 0) return fail(NQD_ERR_DOMAIN, "rows and cols must be positive");
    return guarded([&] {
        std::vector<nqdeg::Amplitude> c(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = {re_im[2 * i], re_im[2 * i + 1]};
        make_state(out, nqdeg::BipartiteState::from_coeffs(rows - 1, cols - 1, std::move(c), 1e-6));
    });
}

nqd_status nqd_state_parse(const char* spec, int coherent_truncation, nqd_state** out) {
    if (!spec || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] { make_state(out, nqdeg::parse_state(spec, coherent_truncation)); });
}

nqd_status nqd_state_from_json(const char* text, nqd_state** out) {
    if (!text || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] { make_state(out, nqdeg::state_from_json(text)); });
}

nqd_status nqd_state_to_json(const nqd_state* s, char** out_text) {
    if (!s || !out_text) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] { *out_text = dup_string(nqdeg::state_to_json(s->value)); });
}

void nqd_string_free(char* text) { delete[] text; }

void nqd_state_free(nqd_state* s) { delete s; }

int nqd_state_arity(const nqd_state* s) {
    if (!s) return 0;
    return as_single(s) ? 1 : 2;
}

int nqd_state_truncation(const nqd_state* s, int mode) {
    if (!s || mode < 0 || mode > 1) return -1;
    if (const auto* single = as_single(s)) return mode == 0 ? single->truncation() : -1;
    const auto* bi = as_bipartite(s);
    return mode == 0 ? bi->trunc_a() : bi->trunc_b();
}

nqd_status nqd_state_coeff(const nqd_state* s, int n, int m, double* re, double* im) {
    if (!s || !re || !im) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const nqdeg::Amplitude c = as_single(s) ? as_single(s)->coeff(n) : as_bipartite(s)->coeff(n, m);
        *re = c.real();
        *im = c.imag();
    });
}

nqd_status nqd_coherent_overlap(const nqd_state* s, double beta_re, double beta_im,
                                double* out_re, double* out_im) {
    if (!s || !out_re || !out_im) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const nqdeg::Amplitude ov = nqdeg::coherent_overlap({beta_re, beta_im}, require_single(s));
        *out_re = ov.real();
        *out_im = ov.imag();
    });
}

nqd_status nqd_husimi_q(const nqd_state* s, const double* amps_re_im, int arity, double* out) {
    if (!s || !amps_re_im || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        if (arity == 1) {
            *out = nqdeg::husimi_q(nqdeg::PhasePoint::single({amps_re_im[0], amps_re_im[1]}),
                                   require_single(s));
        } else if (arity == 2) {
            const auto* bi = as_bipartite(s);
            if (!bi) throw nqdeg::Error(nqdeg::ErrorCode::arity, "state is single-mode, point is bipartite");
            *out = nqdeg::husimi_q2(nqdeg::PhasePoint::pair({amps_re_im[0], amps_re_im[1]},
                                                            {amps_re_im[2], amps_re_im[3]}),
                                    *bi);
        } else {
            throw nqdeg::Error(nqdeg::ErrorCode::arity, "arity must be 1 or 2");
        }
    });
}

nqd_status nqd_wigner(const nqd_state* s, double alpha_re, double alpha_im, double* out) {
    if (!s || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] { *out = nqdeg::wigner({alpha_re, alpha_im}, require_single(s)); });
}

void nqd_grid_spec_init(nqd_grid_spec* grid) {
    if (!grid) return;
    grid->half_width = 4.0;
    grid->step = 0.05;
    grid->center_re = 0.0;
    grid->center_im = 0.0;
}

nqd_status nqd_q_from_w(const nqd_state* s, double beta_re, double beta_im,
                        const nqd_grid_spec* grid, double* out) {
    if (!s || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const nqdeg::Amplitude beta{beta_re, beta_im};
        if (grid) {
            *out = nqdeg::q_from_w(beta, require_single(s), to_core_grid(grid));
        } else {
            *out = nqdeg::q_from_w(beta, require_single(s));
        }
    });
}

nqd_status nqd_fidelity(const nqd_state* a, const nqd_state* b, double* out) {
    if (!a || !b || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        if (as_single(a) && as_single(b)) {
            *out = nqdeg::fidelity(*as_single(a), *as_single(b));
        } else if (as_bipartite(a) && as_bipartite(b)) {
            *out = nqdeg::fidelity(*as_bipartite(a), *as_bipartite(b));
        } else {
            throw nqdeg::Error(nqdeg::ErrorCode::arity, "fidelity needs states of equal arity");
        }
    });
}

nqd_status nqd_distance_bu(const nqd_state* a, const nqd_state* b, double* out) {
    const nqd_status rc = nqd_fidelity(a, b, out);
    if (rc != NQD_OK) return rc;
    *out = std::sqrt(2.0 - 2.0 * std::sqrt(*out));
    return NQD_OK;
}

nqd_status nqd_distance_hs(const nqd_state* a, const nqd_state* b, double* out) {
    const nqd_status rc = nqd_fidelity(a, b, out);
    if (rc != NQD_OK) return rc;
    *out = std::sqrt(2.0 - 2.0 * *out);
    return NQD_OK;
}

void nqd_optimizer_config_init(nqd_optimizer_config* cfg) {
    if (!cfg) return;
    const nqdeg::OptimizerConfig defaults;
    cfg->radius_margin = defaults.radius_margin;
    cfg->grid_per_axis = defaults.grid_per_axis;
    cfg->simplex_tol = defaults.simplex_tol;
    cfg->max_iters = defaults.max_iters;
    cfg->seed = defaults.seed;
}

nqd_status nqd_maximize_q(const nqd_state* s, const nqd_optimizer_config* cfg, nqd_max_result* out) {
    if (!s || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    const nqdeg::OptimizerConfig core_cfg = to_core(cfg);
    try {
        const nqdeg::MaxResult r = as_single(s) ? nqdeg::maximize_q(*as_single(s), core_cfg)
                                                : nqdeg::maximize_q2(*as_bipartite(s), core_cfg);
        fill_max_result(r, out);
        g_last_error.clear();
        return NQD_OK;
    } catch (const nqdeg::ConvergenceError& e) {
        fill_max_result(e.best(), out);
        g_last_error = e.what();
        return NQD_ERR_CONVERGENCE;
    } catch (const nqdeg::Error& e) {
        g_last_error = e.what();
        return code_to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NQD_ERR_INTERNAL;
    }
}

nqd_status nqd_brute_force_max(const nqd_state* s, double half_width, double step,
                               nqd_max_result* out) {
    if (!s || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const nqdeg::MaxResult r = as_single(s)
                                       ? nqdeg::brute_force_max(*as_single(s), half_width, step)
                                       : nqdeg::brute_force_max(*as_bipartite(s), half_width, step);
        fill_max_result(r, out);
    });
}

nqd_status nqd_degree(const nqd_state* s, const nqd_optimizer_config* cfg, nqd_measure_report* out) {
    if (!s || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    const nqdeg::OptimizerConfig core_cfg = to_core(cfg);
    try {
        const nqdeg::MeasureReport r = as_single(s)
                                           ? nqdeg::nonclassical_degree(*as_single(s), core_cfg)
                                           : nqdeg::nonclassical_degree2(*as_bipartite(s), core_cfg);
        fill_report(r, out);
        if (!r.converged) {
            g_last_error = "optimizer did not converge; report carries the best point seen";
            return NQD_ERR_CONVERGENCE;
        }
        g_last_error.clear();
        return NQD_OK;
    } catch (const nqdeg::Error& e) {
        g_last_error = e.what();
        return code_to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NQD_ERR_INTERNAL;
    }
}

nqd_status nqd_report_to_json(const nqd_measure_report* report, char** out_text) {
    if (!report || !out_text) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        nqdeg::MeasureReport r;
        r.degree = report->degree;
        r.q_max = report->q_max;
        r.argmax = report->arity == 1
                       ? nqdeg::PhasePoint::single({report->argmax[0], report->argmax[1]})
                       : nqdeg::PhasePoint::pair({report->argmax[0], report->argmax[1]},
                                                 {report->argmax[2], report->argmax[3]});
        if (report->has_entropy) r.entropy = report->entropy;
        if (report->has_mandel_q) r.mandel_q = report->mandel_q;
        r.converged = report->converged != 0;
        if (report->has_closed_form_ref) r.closed_form_ref = report->closed_form_ref;
        *out_text = dup_string(nqdeg::report_to_json(r));
    });
}

nqd_status nqd_entanglement_entropy(const nqd_state* s, double* out) {
    if (!s || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const auto* bi = as_bipartite(s);
        if (!bi) throw nqdeg::Error(nqdeg::ErrorCode::arity, "entanglement entropy needs a bipartite state");
        *out = nqdeg::entanglement_entropy(*bi);
    });
}

nqd_status nqd_mandel_q(const nqd_state* s, double* out) {
    if (!s || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        *out = as_single(s) ? nqdeg::mandel_q(*as_single(s)) : nqdeg::mandel_q(*as_bipartite(s));
    });
}

nqd_status nqd_compose_product_degree(double d1, double d2, double* out) {
    if (!out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] { *out = nqdeg::compose_product_degree(d1, d2); });
}

nqd_status nqd_closed_form_degree(const char* family, double param, double* out) {
    if (!family || !out) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const std::string f = family;
        nqdeg::ClosedFormFamily fam;
        if (f == "fock") {
            fam = nqdeg::ClosedFormFamily::fock_n;
        } else if (f == "fock_nn") {
            fam = nqdeg::ClosedFormFamily::fock_nn;
        } else if (f == "psi") {
            fam = nqdeg::ClosedFormFamily::psi;
        } else if (f == "phi") {
            fam = nqdeg::ClosedFormFamily::phi;
        } else {
            throw nqdeg::Error(nqdeg::ErrorCode::domain, "family must be fock, fock_nn, psi or phi");
        }
        *out = nqdeg::closed_form_degree(fam, param);
    });
}

nqd_status nqd_dump_grid(const nqd_state* s, const char* surface, const nqd_grid_spec* grid,
                         const nqd_grid_spec* conv_grid, const char* path) {
    if (!s || !surface || !grid) return fail(NQD_ERR_NULL_ARGUMENT, "null argument");
    return guarded([&] {
        const std::string surf = surface;
        nqdeg::Surface which;
        if (surf == "q") {
            which = nqdeg::Surface::husimi;
        } else if (surf == "w") {
            which = nqdeg::Surface::wigner;
        } else if (surf == "qfromw") {
            which = nqdeg::Surface::husimi_from_wigner;
        } else {
            throw nqdeg::Error(nqdeg::ErrorCode::config, "surface must be q, w or qfromw");
        }
        const nqdeg::GridSpec g = to_core_grid(grid);
        nqdeg::GridSpec cg;
        const nqdeg::GridSpec* cgp = nullptr;
        if (conv_grid) {
            cg = to_core_grid(conv_grid);
            cgp = &cg;
        }
        if (path) {
            std::ofstream out(path);
            if (!out) throw nqdeg::Error(nqdeg::ErrorCode::io, std::string("cannot open '") + path + "'");
            nqdeg::dump_grid(out, require_single(s), which, g, cgp);
            if (!out.good()) throw nqdeg::Error(nqdeg::ErrorCode::io, "write failed");
        } else {
            nqdeg::dump_grid(std::cout, require_single(s), which, g, cgp);
            std::cout.flush();
        }
    });
}

}  // extern "C"
