#pragma once

#include <cstdint>

#include "errors.hpp"
#include "phase_space.hpp"
#include "states.hpp"

namespace nqdeg {

struct OptimizerConfig {
    double radius_margin = 3.0;  // search square: |amp| <= sqrt(trunc) + margin
    int grid_per_axis = 9;       // odd, >= 3, so the origin is always a start
    double simplex_tol = 1e-10;  // Nelder-Mead simplex diameter
    int max_iters = 2000;
    std::uint64_t seed = 0;  // reserved for stochastic restart strategies

    void validate() const;
};

struct MaxResult {
    double q_max = 0.0;
    PhasePoint argmax;
    long starts_used = 0;
    bool converged = false;
    double spread = 0.0;  // max - min of the top-3 local maxima found
};

/// Raised when no start converged; carries the best point seen anyway.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, MaxResult best)
        : Error(ErrorCode::convergence, msg), best_(best) {}
    const MaxResult& best() const noexcept { return best_; }

private:
    MaxResult best_;
};

/// Global maximum of Q(beta) over the complex plane: lattice + occupied-level
/// multistart, Nelder-Mead polish on log Q, deterministic tie-break (smallest
/// radius, then smallest phase) among maxima equal within 1e-12.
MaxResult maximize_q(const SingleModeState& s, const OptimizerConfig& cfg = {});

/// Same over (alpha, beta), i.e. 4 real dimensions.
MaxResult maximize_q2(const BipartiteState& s, const OptimizerConfig& cfg = {});

/// Exhaustive lattice scan over [-half_width, half_width] per real axis plus
/// one local refinement from the best lattice point. Budget capped at 1e9
/// evaluations. Validation oracle; not meant for production sizing.
MaxResult brute_force_max(const SingleModeState& s, double half_width, double step);
MaxResult brute_force_max(const BipartiteState& s, double half_width, double step);

}  // namespace nqdeg
