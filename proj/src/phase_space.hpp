#pragma once

#include <array>
#include <iosfwd>

#include "states.hpp"

namespace nqdeg {

/// One coherent amplitude (single mode) or two (bipartite).
struct PhasePoint {
    std::array<Amplitude, 2> amps{Amplitude{0, 0}, Amplitude{0, 0}};
    int arity = 1;

    static PhasePoint single(Amplitude beta) { return {{beta, Amplitude{0, 0}}, 1}; }
    static PhasePoint pair(Amplitude alpha, Amplitude beta) { return {{alpha, beta}, 2}; }
};

/// Square quadrature lattice: center +/- half_width per real axis, spacing
/// `step`. At most 2048 points per axis.
struct GridSpec {
    double half_width = 4.0;
    double step = 0.05;
    Amplitude center{0.0, 0.0};

    int points_per_axis() const;
    void validate() const;
};

/// <beta|psi> = e^{-|b|^2/2} sum_n c_n conj(b)^n / sqrt(n!).
Amplitude coherent_overlap(Amplitude beta, const SingleModeState& s);

/// Q(b) = |<b|psi>|^2 / pi, in [0, 1/pi].
double husimi_q(const PhasePoint& p, const SingleModeState& s);

/// Q(a, b) = |<a,b|psi>|^2 / pi^2, in [0, 1/pi^2]. Factorizes over
/// product states.
double husimi_q2(const PhasePoint& p, const BipartiteState& s);

/// Wigner function, normalized so that W of vacuum is (2/pi) e^{-2|a|^2}
/// and the phase-space integral is 1. Fock-basis double sum with
/// associated Laguerre polynomials run in signed-log form.
double wigner(Amplitude alpha, const SingleModeState& s);

/// Q recovered as the Gaussian convolution of W:
///   Q(b) = (2/pi) integral d^2a W(a) e^{-2|a-b|^2}
/// by trapezoidal quadrature over `grid`. The grid must cover the disc
/// |a - b| <= 3.5 and be no coarser than step 0.1; the default grid
/// (half width 4, step 0.05) keeps the mismatch with husimi_q below 1e-4.
double q_from_w(Amplitude beta, const SingleModeState& s, const GridSpec& grid);
double q_from_w(Amplitude beta, const SingleModeState& s);  // default grid centered at beta

/// |<a|b>|^2. States of unequal truncation are zero-padded.
double fidelity(const SingleModeState& a, const SingleModeState& b);
double fidelity(const BipartiteState& a, const BipartiteState& b);

/// Bures-Uhlmann sqrt(2 - 2 sqrt(F)) and Hilbert-Schmidt sqrt(2 - 2F).
double distance_bu(const SingleModeState& a, const SingleModeState& b);
double distance_bu(const BipartiteState& a, const BipartiteState& b);
double distance_hs(const SingleModeState& a, const SingleModeState& b);
double distance_hs(const BipartiteState& a, const BipartiteState& b);

enum class Surface { husimi, wigner, husimi_from_wigner };

/// CSV dump `re,im,value`, row-major over the grid, 17 significant digits.
/// For Surface::husimi_from_wigner each point runs the convolution with
/// `conv_grid` recentred on that point (default grid when null).
void dump_grid(std::ostream& out, const SingleModeState& s, Surface surface, const GridSpec& grid,
               const GridSpec* conv_grid = nullptr);

namespace detail {

/// Fills out[n] = <a|n> = e^{-|a|^2/2} conj(a)^n / sqrt(n!) for n = 0..trunc.
/// `out` must hold trunc+1 entries. Used by the hot evaluation paths; the
/// recurrence needs no per-term transcendentals.
void coherent_bra_row(Amplitude a, int trunc, Amplitude* out);

double husimi_q_at(Amplitude beta, const SingleModeState& s);
double husimi_q2_at(Amplitude alpha, Amplitude beta, const BipartiteState& s,
                    Amplitude* scratch_a, Amplitude* scratch_b);

}  // namespace detail

}  // namespace nqdeg
