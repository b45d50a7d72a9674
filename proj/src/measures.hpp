#pragma once

#include <optional>
#include <string>

#include "optimize.hpp"
#include "phase_space.hpp"
#include "states.hpp"

namespace nqdeg {

struct MeasureReport {
    double degree = 0.0;  // 1 - pi^arity * q_max, clamped to [0, 1]
    double q_max = 0.0;
    PhasePoint argmax;
    std::optional<double> entropy;  // bipartite only, nats
    std::optional<double> mandel_q;  // absent when <n> is zero (vacuum)
    bool converged = true;
    std::optional<double> closed_form_ref;  // filled by callers that know the family
};

/// Nonclassical degree D = 1 - pi * max_beta Q(beta). Zero for coherent
/// states up to truncation error. Optimizer failure is absorbed into the
/// report: best-so-far degree with converged = false.
MeasureReport nonclassical_degree(const SingleModeState& s, const OptimizerConfig& cfg = {});

/// Bipartite degree D = 1 - pi^2 * max_{alpha,beta} Q(alpha, beta).
MeasureReport nonclassical_degree2(const BipartiteState& s, const OptimizerConfig& cfg = {});

/// Product composition law D = D1 + D2 - D1 D2, on [0,1]^2.
double compose_product_degree(double d1, double d2);

/// Von Neumann entropy of either reduced state: -sum lambda^2 ln lambda^2
/// over the singular values of the coefficient matrix. Zero for products.
double entanglement_entropy(const BipartiteState& s);

/// Mandel factor q = <n^2>/<n> - <n> - 1; for two modes n is the total
/// photon number. Raises an undefined-statistic error when <n> <= 1e-12.
double mandel_q(const SingleModeState& s);
double mandel_q(const BipartiteState& s);

enum class ClosedFormFamily { fock_n, fock_nn, psi, phi };

/// Reference values used as the oracle for the optimizer path:
///   fock_n : 1 - n^n e^-n / n!
///   fock_nn: 1 - n^2n e^-2n / (n!)^2
///   psi    : 1 - e^-1 for every weight
///   phi    : 1 - (1-xi) exp[-2(1 - sqrt(xi/(1-xi)))] below xi = 1/2,
///            1 - xi above; continuous at the branch point.
double closed_form_degree(ClosedFormFamily family, double param);

/// Fixed key order: degree, q_max, argmax, entropy, mandel_q, converged,
/// closed_form_ref. Absent optionals serialize as null.
std::string report_to_json(const MeasureReport& report);

}  // namespace nqdeg
