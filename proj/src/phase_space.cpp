#include "phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <vector>

#include "errors.hpp"
#include "math_util.hpp"

namespace nqdeg {

namespace {

constexpr double kInvPi = std::numbers::inv_pi;

// Above this |a|^2/2 the leading e^{-|a|^2/2} of the bra row underflows
// and magnitudes must be assembled per term in log space instead.
constexpr double kRecurrenceExponentLimit = 600.0;

void check_arity(const PhasePoint& p, int want) {
    if (p.arity != want)
        throw Error(ErrorCode::arity, "phase point arity " + std::to_string(p.arity) +
                                          " does not match state arity " + std::to_string(want));
}

}  // namespace

int GridSpec::points_per_axis() const {
    return static_cast<int>(std::floor(2.0 * half_width / step + 1e-9)) + 1;
}

void GridSpec::validate() const {
    if (!(half_width > 0.0) || !(step > 0.0))
        throw Error(ErrorCode::config, "grid half_width and step must be positive");
    if (!std::isfinite(center.real()) || !std::isfinite(center.imag()))
        throw Error(ErrorCode::config, "grid center must be finite");
    if (points_per_axis() > 2048)
        throw Error(ErrorCode::config, "grid exceeds 2048 points per axis");
}

namespace detail {

void coherent_bra_row(Amplitude a, int trunc, Amplitude* out) {
    const double half_abs2 = 0.5 * std::norm(a);
    const Amplitude ac = std::conj(a);
    if (half_abs2 <= kRecurrenceExponentLimit) {
        Amplitude u{std::exp(-half_abs2), 0.0};
        for (int n = 0; n <= trunc; ++n) {
            out[n] = u;
            u *= ac / std::sqrt(static_cast<double>(n + 1));
        }
        return;
    }
    // Far regime: |<a|n>| = exp(n ln|a| - lf(n)/2 - |a|^2/2), phase n*arg(conj a).
    const double ln_r = std::log(std::abs(a));
    const double phi = std::arg(ac);
    for (int n = 0; n <= trunc; ++n) {
        const double mag = std::exp(n * ln_r - 0.5 * log_factorial(n) - half_abs2);
        out[n] = Amplitude{mag * std::cos(n * phi), mag * std::sin(n * phi)};
    }
}

double husimi_q_at(Amplitude beta, const SingleModeState& s) {
    return kInvPi * std::norm(coherent_overlap(beta, s));
}

double husimi_q2_at(Amplitude alpha, Amplitude beta, const BipartiteState& s,
                    Amplitude* scratch_a, Amplitude* scratch_b) {
    const int na = s.trunc_a(), nb = s.trunc_b();
    coherent_bra_row(alpha, na, scratch_a);
    coherent_bra_row(beta, nb, scratch_b);
    const Amplitude* c = s.coeffs().data();
    Amplitude acc{0.0, 0.0};
    for (int n = 0; n <= na; ++n) {
        Amplitude row{0.0, 0.0};
        for (int m = 0; m <= nb; ++m) row += c[n * (nb + 1) + m] * scratch_b[m];
        acc += scratch_a[n] * row;
    }
    return kInvPi * kInvPi * std::norm(acc);
}

}  // namespace detail

Amplitude coherent_overlap(Amplitude beta, const SingleModeState& s) {
    const int trunc = s.truncation();
    std::vector<Amplitude> bra(static_cast<std::size_t>(trunc) + 1);
    detail::coherent_bra_row(beta, trunc, bra.data());
    Amplitude acc{0.0, 0.0};
    const auto coeffs = s.coeffs();
    for (int n = 0; n <= trunc; ++n) acc += coeffs[static_cast<std::size_t>(n)] * bra[static_cast<std::size_t>(n)];
    return acc;
}

double husimi_q(const PhasePoint& p, const SingleModeState& s) {
    check_arity(p, 1);
    return detail::husimi_q_at(p.amps[0], s);
}

double husimi_q2(const PhasePoint& p, const BipartiteState& s) {
    check_arity(p, 2);
    std::vector<Amplitude> sa(static_cast<std::size_t>(s.trunc_a()) + 1);
    std::vector<Amplitude> sb(static_cast<std::size_t>(s.trunc_b()) + 1);
    return detail::husimi_q2_at(p.amps[0], p.amps[1], s, sa.data(), sb.data());
}

// W(a) = (2/pi) sum_{m,n} c_m conj(c_n) <n|Pi(a)|m>,  Pi(a) = D(2a)(-1)^n.
// For n = m + d, d >= 0:
//   <n|Pi(a)|m> = (-1)^m sqrt(m!/n!) (2a)^d e^{-2|a|^2} L_m^(d)(4|a|^2),
// and the d < 0 half is the complex conjugate pair. The Laguerre values
// are carried in signed-log form and each term's magnitude is
// exponentiated only after the full exponent (including the Gaussian) is
// assembled, so truncation-256 states stay finite.
double wigner(Amplitude alpha, const SingleModeState& s) {
    const int trunc = s.truncation();
    const auto c = s.coeffs();
    const double abs2 = std::norm(alpha);
    const double x = 4.0 * abs2;
    const double gauss_log = -2.0 * abs2;
    const double ln_2r = abs2 > 0.0 ? std::log(2.0 * std::abs(alpha)) : 0.0;
    const double theta = abs2 > 0.0 ? std::arg(alpha) : 0.0;

    std::vector<bool> occupied(static_cast<std::size_t>(trunc) + 1);
    for (int n = 0; n <= trunc; ++n) occupied[static_cast<std::size_t>(n)] = std::norm(c[static_cast<std::size_t>(n)]) > 0.0;

    KahanSum total;
    const int d_max = abs2 > 0.0 ? trunc : 0;
    for (int d = 0; d <= d_max; ++d) {
        // Skip the whole diagonal if no coefficient pair touches it.
        bool any = false;
        for (int m = 0; m + d <= trunc; ++m)
            if (occupied[static_cast<std::size_t>(m)] && occupied[static_cast<std::size_t>(m + d)]) { any = true; break; }
        if (!any) continue;

        const double phase = static_cast<double>(d) * theta;
        const Amplitude dir{std::cos(phase), std::sin(phase)};
        LogSigned lag_prev = LogSigned::zero();
        LogSigned lag = LogSigned::from(1.0);  // L_0^(d) = 1
        for (int m = 0; m + d <= trunc; ++m) {
            if (m > 0) {
                // L_m = ((2(m-1)+d+1-x) L_{m-1} - (m-1+d) L_{m-2}) / m
                const LogSigned t1 = lag.times(2.0 * (m - 1) + d + 1.0 - x);
                const LogSigned t2 = lag_prev.times(-(static_cast<double>(m - 1) + d));
                lag_prev = lag;
                lag = t1.plus(t2).times(1.0 / static_cast<double>(m));
            }
            const int n = m + d;
            if (!occupied[static_cast<std::size_t>(m)] || !occupied[static_cast<std::size_t>(n)]) continue;
            if (lag.sign == 0) continue;
            const double log_mag = 0.5 * (log_factorial(m) - log_factorial(n)) + d * ln_2r +
                                   lag.logmag + gauss_log;
            const double mag = lag.sign * std::exp(log_mag);
            const double parity = (m % 2 == 0) ? 1.0 : -1.0;
            if (d == 0) {
                total.add(parity * mag * std::norm(c[static_cast<std::size_t>(m)]));
            } else {
                const Amplitude z = c[static_cast<std::size_t>(m)] * std::conj(c[static_cast<std::size_t>(n)]) * dir;
                total.add(2.0 * parity * mag * z.real());
            }
        }
    }
    return 2.0 * kInvPi * total.value();
}

namespace {

void validate_convolution_grid(Amplitude beta, const GridSpec& grid) {
    grid.validate();
    if (grid.step > 0.1)
        throw Error(ErrorCode::config, "convolution grid step must be <= 0.1 for a meaningful quadrature");
    const double offset = std::abs(grid.center - beta);
    if (grid.half_width - offset < 3.5)
        throw Error(ErrorCode::config,
                    "convolution grid must cover |a - b| <= 3.5 around the evaluation point");
}

}  // namespace

double q_from_w(Amplitude beta, const SingleModeState& s, const GridSpec& grid) {
    validate_convolution_grid(beta, grid);
    const int pts = grid.points_per_axis();
    const double x0 = grid.center.real() - grid.half_width;
    const double y0 = grid.center.imag() - grid.half_width;
    KahanSum acc;
    for (int i = 0; i < pts; ++i) {
        const double wx = (i == 0 || i == pts - 1) ? 0.5 : 1.0;
        const double re = x0 + i * grid.step;
        for (int j = 0; j < pts; ++j) {
            const double wy = (j == 0 || j == pts - 1) ? 0.5 : 1.0;
            const Amplitude a{re, y0 + j * grid.step};
            const double kernel = std::exp(-2.0 * std::norm(a - beta));
            acc.add(wx * wy * wigner(a, s) * kernel);
        }
    }
    return 2.0 * kInvPi * grid.step * grid.step * acc.value();
}

double q_from_w(Amplitude beta, const SingleModeState& s) {
    GridSpec grid;
    grid.center = beta;
    return q_from_w(beta, s, grid);
}

namespace {

template <typename State>
double fidelity_padded(const State& a, const State& b);

template <>
double fidelity_padded(const SingleModeState& a, const SingleModeState& b) {
    const int n_common = std::min(a.truncation(), b.truncation());
    Amplitude ov{0.0, 0.0};
    for (int n = 0; n <= n_common; ++n) ov += std::conj(a.coeff(n)) * b.coeff(n);
    return std::clamp(std::norm(ov), 0.0, 1.0);
}

template <>
double fidelity_padded(const BipartiteState& a, const BipartiteState& b) {
    const int na = std::min(a.trunc_a(), b.trunc_a());
    const int nb = std::min(a.trunc_b(), b.trunc_b());
    Amplitude ov{0.0, 0.0};
    for (int n = 0; n <= na; ++n)
        for (int m = 0; m <= nb; ++m) ov += std::conj(a.coeff(n, m)) * b.coeff(n, m);
    return std::clamp(std::norm(ov), 0.0, 1.0);
}

}  // namespace

double fidelity(const SingleModeState& a, const SingleModeState& b) { return fidelity_padded(a, b); }
double fidelity(const BipartiteState& a, const BipartiteState& b) { return fidelity_padded(a, b); }

double distance_bu(const SingleModeState& a, const SingleModeState& b) {
    return std::sqrt(2.0 - 2.0 * std::sqrt(fidelity(a, b)));
}
double distance_bu(const BipartiteState& a, const BipartiteState& b) {
    return std::sqrt(2.0 - 2.0 * std::sqrt(fidelity(a, b)));
}
double distance_hs(const SingleModeState& a, const SingleModeState& b) {
    return std::sqrt(2.0 - 2.0 * fidelity(a, b));
}
double distance_hs(const BipartiteState& a, const BipartiteState& b) {
    return std::sqrt(2.0 - 2.0 * fidelity(a, b));
}

void dump_grid(std::ostream& out, const SingleModeState& s, Surface surface, const GridSpec& grid,
               const GridSpec* conv_grid) {
    grid.validate();
    if (conv_grid) conv_grid->validate();
    const int pts = grid.points_per_axis();
    const double x0 = grid.center.real() - grid.half_width;
    const double y0 = grid.center.imag() - grid.half_width;
    out << "re,im,value\n";
    char line[128];
    for (int i = 0; i < pts; ++i) {
        for (int j = 0; j < pts; ++j) {
            const Amplitude p{x0 + i * grid.step, y0 + j * grid.step};
            double v = 0.0;
            switch (surface) {
                case Surface::husimi: v = detail::husimi_q_at(p, s); break;
                case Surface::wigner: v = wigner(p, s); break;
                case Surface::husimi_from_wigner: {
                    GridSpec cg = conv_grid ? *conv_grid : GridSpec{};
                    cg.center = p;
                    v = q_from_w(p, s, cg);
                    break;
                }
            }
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.real(), p.imag(), v);
            out << line;
        }
    }
}

}  // namespace nqdeg
