#include "optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "math_util.hpp"

namespace nqdeg {

void OptimizerConfig::validate() const {
    if (grid_per_axis < 3 || grid_per_axis % 2 == 0)
        throw Error(ErrorCode::config, "grid_per_axis must be odd and >= 3");
    if (!(simplex_tol > 0.0)) throw Error(ErrorCode::config, "simplex_tol must be positive");
    if (max_iters < 0) throw Error(ErrorCode::config, "max_iters must be >= 0");
    if (!(radius_margin >= 0.0)) throw Error(ErrorCode::config, "radius_margin must be >= 0");
}

namespace {

constexpr double kInvPi = std::numbers::inv_pi;
constexpr double kTieTol = 1e-12;
constexpr int kMaxLatticePolish = 64;  // NM runs from the best lattice starts
constexpr double kLogFloor = 1e-300;   // objective is log(Q + floor)

struct Candidate {
    double q = -1.0;
    std::array<double, 4> x{0, 0, 0, 0};
    int dim = 2;
    bool converged = false;
};

double radius_sq(const Candidate& c) {
    double r = 0.0;
    for (int k = 0; k < c.dim; ++k) r += c.x[static_cast<std::size_t>(k)] * c.x[static_cast<std::size_t>(k)];
    return r;
}

double angle_of(double re, double im) {
    double a = std::atan2(im, re);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    return a;
}

// Total preference order for the global reduction: larger Q wins; maxima
// equal within 1e-12 go to the smaller radius, then the smaller phase
// angle per amplitude. Applied as a fold in a fixed scan order, which
// makes ring-degenerate argmaxes deterministic.
bool better(const Candidate& a, const Candidate& b) {
    if (b.q < 0.0) return true;
    if (a.q > b.q + kTieTol) return true;
    if (b.q > a.q + kTieTol) return false;
    const double ra = radius_sq(a), rb = radius_sq(b);
    if (ra != rb) return ra < rb;
    for (int k = 0; k + 1 < a.dim; k += 2) {
        const double aa = angle_of(a.x[static_cast<std::size_t>(k)], a.x[static_cast<std::size_t>(k + 1)]);
        const double ab = angle_of(b.x[static_cast<std::size_t>(k)], b.x[static_cast<std::size_t>(k + 1)]);
        if (aa != ab) return aa < ab;
    }
    return a.q > b.q;
}

// Nelder-Mead (Lagarias coefficients) minimizing -log(Q + floor).
// Returns the best Q-point visited over the whole run, which keeps
// q_max >= Q(start) even when the simplex wanders.
template <typename QFun>
Candidate nelder_mead(QFun&& qfun, const std::array<double, 4>& start, int dim, double tol,
                      int max_iters, double initial_step) {
    using Vec = std::array<double, 4>;
    struct Vertex {
        Vec x;
        double f;
    };

    Candidate best;
    best.dim = dim;
    auto eval = [&](const Vec& x) {
        const double q = qfun(x.data());
        if (q > best.q) {
            best.q = q;
            best.x = x;
        }
        return -std::log(q + kLogFloor);
    };

    const int n = dim;
    std::vector<Vertex> v(static_cast<std::size_t>(n) + 1);
    v[0] = {start, eval(start)};
    for (int i = 0; i < n; ++i) {
        Vec x = start;
        x[static_cast<std::size_t>(i)] += initial_step;
        v[static_cast<std::size_t>(i) + 1] = {x, eval(x)};
    }

    auto order = [&] {
        std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) {
            if (a.f != b.f) return a.f < b.f;
            return a.x < b.x;
        });
    };
    auto diameter = [&] {
        double d2 = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double d = v[i].x[static_cast<std::size_t>(k)] - v[j].x[static_cast<std::size_t>(k)];
                    s += d * d;
                }
                d2 = std::max(d2, s);
            }
        return std::sqrt(d2);
    };

    order();
    for (int iter = 0; iter < max_iters; ++iter) {
        if (diameter() < tol) {
            best.converged = true;
            return best;
        }
        Vec centroid{0, 0, 0, 0};
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                centroid[static_cast<std::size_t>(k)] += v[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(k)] / n;
        auto blend = [&](double coef) {
            Vec x{0, 0, 0, 0};
            for (int k = 0; k < n; ++k)
                x[static_cast<std::size_t>(k)] = centroid[static_cast<std::size_t>(k)] +
                                                 coef * (centroid[static_cast<std::size_t>(k)] -
                                                         v[static_cast<std::size_t>(n)].x[static_cast<std::size_t>(k)]);
            return x;
        };

        const Vec xr = blend(1.0);
        const double fr = eval(xr);
        if (fr < v[0].f) {
            const Vec xe = blend(2.0);
            const double fe = eval(xe);
            v[static_cast<std::size_t>(n)] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < v[static_cast<std::size_t>(n) - 1].f) {
            v[static_cast<std::size_t>(n)] = {xr, fr};
        } else {
            const bool outside = fr < v[static_cast<std::size_t>(n)].f;
            const Vec xc = blend(outside ? 0.5 : -0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : v[static_cast<std::size_t>(n)].f)) {
                v[static_cast<std::size_t>(n)] = {xc, fc};
            } else {
                for (std::size_t i = 1; i < v.size(); ++i) {
                    for (int k = 0; k < n; ++k)
                        v[i].x[static_cast<std::size_t>(k)] =
                            v[0].x[static_cast<std::size_t>(k)] +
                            0.5 * (v[i].x[static_cast<std::size_t>(k)] - v[0].x[static_cast<std::size_t>(k)]);
                    v[i].f = eval(v[i].x);
                }
            }
        }
        order();
    }
    best.converged = diameter() < tol;
    return best;
}

// One axis of the start lattice; integer-offset construction keeps the
// origin exact for odd counts.
std::vector<double> lattice_axis(double radius, int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    const double spacing = 2.0 * radius / (count - 1);
    const int half = (count - 1) / 2;
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = (i - half) * spacing;
    return v;
}

struct Start {
    double q;
    std::array<double, 4> x;
    std::size_t index;
};

template <typename QFun>
MaxResult run_multistart(QFun&& qfun, int dim, const std::vector<std::array<double, 4>>& lattice,
                         const std::vector<std::array<double, 4>>& structural,
                         const OptimizerConfig& cfg) {
    std::vector<Start> starts;
    starts.reserve(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i)
        starts.push_back({qfun(lattice[i].data()), lattice[i], i});

    // Polish the most promising lattice starts; every raw lattice value
    // still enters the final reduction below.
    const std::size_t n_polish = std::min<std::size_t>(kMaxLatticePolish, starts.size());
    std::partial_sort(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(n_polish), starts.end(),
                      [](const Start& a, const Start& b) {
                          if (a.q != b.q) return a.q > b.q;
                          return a.index < b.index;
                      });

    std::vector<Candidate> polished;
    polished.reserve(n_polish + structural.size());
    for (std::size_t i = 0; i < n_polish; ++i)
        polished.push_back(nelder_mead(qfun, starts[i].x, dim, cfg.simplex_tol, cfg.max_iters, 0.25));
    for (const auto& x : structural)
        polished.push_back(nelder_mead(qfun, x, dim, cfg.simplex_tol, cfg.max_iters, 0.25));

    Candidate winner;
    winner.dim = dim;
    for (const auto& c : polished)
        if (better(c, winner)) winner = c;
    for (const auto& s : starts) {
        Candidate raw{s.q, s.x, dim, false};
        if (better(raw, winner)) winner = raw;
    }
    // A raw lattice point can win the tie-break (smaller radius on a
    // degenerate ring); the value still counts as converged when a
    // converged local search reached it within the tie tolerance.
    for (const auto& c : polished)
        if (c.converged && c.q >= winner.q - kTieTol) {
            winner.converged = true;
            break;
        }

    std::vector<double> tops;
    tops.reserve(polished.size());
    for (const auto& c : polished) tops.push_back(c.q);
    std::sort(tops.begin(), tops.end(), std::greater<>());

    MaxResult result;
    result.q_max = winner.q;
    result.argmax = dim == 2 ? PhasePoint::single({winner.x[0], winner.x[1]})
                             : PhasePoint::pair({winner.x[0], winner.x[1]}, {winner.x[2], winner.x[3]});
    result.starts_used = static_cast<long>(polished.size());
    result.converged = winner.converged;
    result.spread = tops.empty() ? 0.0 : tops.front() - tops[std::min<std::size_t>(2, tops.size() - 1)];

    const bool any_converged = std::any_of(polished.begin(), polished.end(),
                                           [](const Candidate& c) { return c.converged; });
    if (!any_converged)
        throw ConvergenceError("no start converged within max_iters; best-so-far attached", result);
    return result;
}

// Phases tried at each occupied-level radius: local maxima of Fock
// superpositions cluster near |beta| = sqrt(n).
constexpr std::array<double, 2> kStructuralPhases = {0.0, std::numbers::pi / 4.0};

}  // namespace

MaxResult maximize_q(const SingleModeState& s, const OptimizerConfig& cfg) {
    cfg.validate();
    const double radius = std::sqrt(static_cast<double>(s.truncation())) + cfg.radius_margin;
    const auto axis = lattice_axis(radius, cfg.grid_per_axis);

    std::vector<std::array<double, 4>> lattice;
    lattice.reserve(axis.size() * axis.size());
    for (double re : axis)
        for (double im : axis) lattice.push_back({re, im, 0.0, 0.0});

    std::vector<std::array<double, 4>> structural;
    for (int n = 1; n <= s.truncation(); ++n) {
        if (std::norm(s.coeff(n)) == 0.0) continue;
        const double r = std::sqrt(static_cast<double>(n));
        for (double phase : kStructuralPhases)
            structural.push_back({r * std::cos(phase), r * std::sin(phase), 0.0, 0.0});
    }

    std::vector<Amplitude> scratch(static_cast<std::size_t>(s.truncation()) + 1);
    const auto c = s.coeffs();
    auto qfun = [&](const double* x) {
        detail::coherent_bra_row({x[0], x[1]}, s.truncation(), scratch.data());
        Amplitude acc{0.0, 0.0};
        for (int n = 0; n <= s.truncation(); ++n)
            acc += c[static_cast<std::size_t>(n)] * scratch[static_cast<std::size_t>(n)];
        return kInvPi * std::norm(acc);
    };
    return run_multistart(qfun, 2, lattice, structural, cfg);
}

namespace {

// Per-mode occupied levels by marginal weight, capped so structural start
// combinations stay bounded; returned in index order.
std::vector<int> top_marginal_levels(const std::vector<double>& weight, std::size_t cap) {
    std::vector<int> levels;
    for (int n = 0; n < static_cast<int>(weight.size()); ++n)
        if (weight[static_cast<std::size_t>(n)] > 0.0) levels.push_back(n);
    if (levels.size() > cap) {
        std::sort(levels.begin(), levels.end(), [&](int a, int b) {
            const double wa = weight[static_cast<std::size_t>(a)], wb = weight[static_cast<std::size_t>(b)];
            if (wa != wb) return wa > wb;
            return a < b;
        });
        levels.resize(cap);
        std::sort(levels.begin(), levels.end());
    }
    return levels;
}

}  // namespace

MaxResult maximize_q2(const BipartiteState& s, const OptimizerConfig& cfg) {
    cfg.validate();
    const int na = s.trunc_a(), nb = s.trunc_b();
    const double radius_a = std::sqrt(static_cast<double>(na)) + cfg.radius_margin;
    const double radius_b = std::sqrt(static_cast<double>(nb)) + cfg.radius_margin;
    const auto axis_a = lattice_axis(radius_a, cfg.grid_per_axis);
    const auto axis_b = lattice_axis(radius_b, cfg.grid_per_axis);

    std::vector<std::array<double, 4>> lattice;
    lattice.reserve(axis_a.size() * axis_a.size() * axis_b.size() * axis_b.size());
    for (double are : axis_a)
        for (double aim : axis_a)
            for (double bre : axis_b)
                for (double bim : axis_b) lattice.push_back({are, aim, bre, bim});

    std::vector<double> row_weight(static_cast<std::size_t>(na) + 1, 0.0);
    std::vector<double> col_weight(static_cast<std::size_t>(nb) + 1, 0.0);
    for (int n = 0; n <= na; ++n)
        for (int m = 0; m <= nb; ++m) {
            const double w = std::norm(s.coeff(n, m));
            row_weight[static_cast<std::size_t>(n)] += w;
            col_weight[static_cast<std::size_t>(m)] += w;
        }
    const auto levels_a = top_marginal_levels(row_weight, 8);
    const auto levels_b = top_marginal_levels(col_weight, 8);

    std::vector<std::array<double, 4>> structural;
    for (int n : levels_a)
        for (int m : levels_b) {
            const double ra = std::sqrt(static_cast<double>(n));
            const double rb = std::sqrt(static_cast<double>(m));
            const auto phases_a = n == 0 ? std::vector<double>{0.0}
                                         : std::vector<double>{kStructuralPhases[0], kStructuralPhases[1]};
            const auto phases_b = m == 0 ? std::vector<double>{0.0}
                                         : std::vector<double>{kStructuralPhases[0], kStructuralPhases[1]};
            for (double pa : phases_a)
                for (double pb : phases_b)
                    structural.push_back({ra * std::cos(pa), ra * std::sin(pa),
                                          rb * std::cos(pb), rb * std::sin(pb)});
        }

    std::vector<Amplitude> sa(static_cast<std::size_t>(na) + 1);
    std::vector<Amplitude> sb(static_cast<std::size_t>(nb) + 1);
    auto qfun = [&](const double* x) {
        return detail::husimi_q2_at({x[0], x[1]}, {x[2], x[3]}, s, sa.data(), sb.data());
    };
    return run_multistart(qfun, 4, lattice, structural, cfg);
}

namespace {

std::vector<double> brute_axis(double half_width, double step, int pts) {
    std::vector<double> v(static_cast<std::size_t>(pts));
    for (int i = 0; i < pts; ++i) v[static_cast<std::size_t>(i)] = -half_width + i * step;
    return v;
}

int brute_points_per_axis(double half_width, double step, int arity) {
    if (!(half_width > 0.0) || !(step > 0.0))
        throw Error(ErrorCode::config, "brute force half_width and step must be positive");
    const int pts = static_cast<int>(std::floor(2.0 * half_width / step + 1e-9)) + 1;
    const double evals = std::pow(static_cast<double>(pts), 2.0 * arity);
    if (evals > 1e9)
        throw Error(ErrorCode::config, "brute force budget exceeded (" + std::to_string(evals) +
                                           " evaluations > 1e9)");
    return pts;
}

void track_top3(std::array<double, 3>& top, double q) {
    if (q > top[0]) {
        top = {q, top[0], top[1]};
    } else if (q > top[1]) {
        top[2] = top[1];
        top[1] = q;
    } else if (q > top[2]) {
        top[2] = q;
    }
}

}  // namespace

MaxResult brute_force_max(const SingleModeState& s, double half_width, double step) {
    const int pts = brute_points_per_axis(half_width, step, 1);
    const auto axis = brute_axis(half_width, step, pts);

    std::vector<Amplitude> scratch(static_cast<std::size_t>(s.truncation()) + 1);
    const auto c = s.coeffs();
    auto qfun = [&](const double* x) {
        detail::coherent_bra_row({x[0], x[1]}, s.truncation(), scratch.data());
        Amplitude acc{0.0, 0.0};
        for (int n = 0; n <= s.truncation(); ++n)
            acc += c[static_cast<std::size_t>(n)] * scratch[static_cast<std::size_t>(n)];
        return kInvPi * std::norm(acc);
    };

    Candidate best;
    best.dim = 2;
    std::array<double, 3> top{-1.0, -1.0, -1.0};
    for (double re : axis)
        for (double im : axis) {
            const std::array<double, 4> x{re, im, 0.0, 0.0};
            Candidate cand{qfun(x.data()), x, 2, false};
            track_top3(top, cand.q);
            if (better(cand, best)) best = cand;
        }

    Candidate refined = nelder_mead(qfun, best.x, 2, 1e-10, 2000, std::max(step, 1e-4));
    const Candidate winner = better(refined, best) ? refined : best;

    MaxResult result;
    result.q_max = winner.q;
    result.argmax = PhasePoint::single({winner.x[0], winner.x[1]});
    result.starts_used = static_cast<long>(pts) * pts;
    result.converged = refined.converged;
    result.spread = top[0] - (top[2] >= 0.0 ? top[2] : (top[1] >= 0.0 ? top[1] : top[0]));
    return result;
}

MaxResult brute_force_max(const BipartiteState& s, double half_width, double step) {
    const int pts = brute_points_per_axis(half_width, step, 2);
    const auto axis = brute_axis(half_width, step, pts);
    const int na = s.trunc_a(), nb = s.trunc_b();
    const std::size_t plane = static_cast<std::size_t>(pts) * static_cast<std::size_t>(pts);

    // Factorized scan: contract mode-a bra rows against the coefficient
    // matrix once per alpha lattice point, then sweep beta points with a
    // short dot product.
    std::vector<Amplitude> wa(plane * static_cast<std::size_t>(nb + 1));
    std::vector<Amplitude> vb(plane * static_cast<std::size_t>(nb + 1));
    {
        std::vector<Amplitude> bra_a(static_cast<std::size_t>(na) + 1);
        const Amplitude* c = s.coeffs().data();
        std::size_t idx = 0;
        for (int i = 0; i < pts; ++i)
            for (int j = 0; j < pts; ++j, ++idx) {
                detail::coherent_bra_row({axis[static_cast<std::size_t>(i)], axis[static_cast<std::size_t>(j)]},
                                         na, bra_a.data());
                Amplitude* w = wa.data() + idx * static_cast<std::size_t>(nb + 1);
                for (int m = 0; m <= nb; ++m) {
                    Amplitude acc{0.0, 0.0};
                    for (int n = 0; n <= na; ++n) acc += bra_a[static_cast<std::size_t>(n)] * c[n * (nb + 1) + m];
                    w[m] = acc;
                }
            }
        idx = 0;
        for (int i = 0; i < pts; ++i)
            for (int j = 0; j < pts; ++j, ++idx)
                detail::coherent_bra_row({axis[static_cast<std::size_t>(i)], axis[static_cast<std::size_t>(j)]},
                                         nb, vb.data() + idx * static_cast<std::size_t>(nb + 1));
    }

    Candidate best;
    best.dim = 4;
    std::array<double, 3> top{-1.0, -1.0, -1.0};
    std::size_t ia = 0;
    for (int i = 0; i < pts; ++i)
        for (int j = 0; j < pts; ++j, ++ia) {
            const Amplitude* w = wa.data() + ia * static_cast<std::size_t>(nb + 1);
            std::size_t ib = 0;
            for (int k = 0; k < pts; ++k)
                for (int l = 0; l < pts; ++l, ++ib) {
                    const Amplitude* v = vb.data() + ib * static_cast<std::size_t>(nb + 1);
                    Amplitude acc{0.0, 0.0};
                    for (int m = 0; m <= nb; ++m) acc += w[m] * v[m];
                    const double q = kInvPi * kInvPi * std::norm(acc);
                    track_top3(top, q);
                    if (q + kTieTol >= best.q) {
                        Candidate cand{q,
                                       {axis[static_cast<std::size_t>(i)], axis[static_cast<std::size_t>(j)],
                                        axis[static_cast<std::size_t>(k)], axis[static_cast<std::size_t>(l)]},
                                       4,
                                       false};
                        if (better(cand, best)) best = cand;
                    }
                }
        }

    std::vector<Amplitude> sa(static_cast<std::size_t>(na) + 1);
    std::vector<Amplitude> sb(static_cast<std::size_t>(nb) + 1);
    auto qfun = [&](const double* x) {
        return detail::husimi_q2_at({x[0], x[1]}, {x[2], x[3]}, s, sa.data(), sb.data());
    };
    Candidate refined = nelder_mead(qfun, best.x, 4, 1e-10, 2000, std::max(step, 1e-4));
    const Candidate winner = better(refined, best) ? refined : best;

    MaxResult result;
    result.q_max = winner.q;
    result.argmax = PhasePoint::pair({winner.x[0], winner.x[1]}, {winner.x[2], winner.x[3]});
    result.starts_used = static_cast<long>(plane) * static_cast<long>(plane);
    result.converged = refined.converged;
    result.spread = top[0] - (top[2] >= 0.0 ? top[2] : (top[1] >= 0.0 ? top[1] : top[0]));
    return result;
}

}  // namespace nqdeg
