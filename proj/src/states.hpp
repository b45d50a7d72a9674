#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nqdeg {

using Amplitude = std::complex<double>;

/// Pure state of one bosonic mode in the Fock basis |0>..|N>.
/// Immutable after construction; the coefficient vector is normalized
/// exactly (sum |c_n|^2 == 1 up to rounding).
class SingleModeState {
public:
    static constexpr int kMaxTruncation = 256;

    /// Validates (finite entries, norm within `norm_tol` of 1, size cap)
    /// and renormalizes exactly.
    static SingleModeState from_coeffs(std::vector<Amplitude> coeffs, double norm_tol = 1e-9);

    int truncation() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const Amplitude> coeffs() const { return coeffs_; }
    Amplitude coeff(int n) const;

private:
    explicit SingleModeState(std::vector<Amplitude> coeffs) : coeffs_(std::move(coeffs)) {}
    std::vector<Amplitude> coeffs_;
};

/// Pure state of two bosonic modes; coefficient c(n, m) multiplies
/// |n>_a (x) |m>_b. Stored row-major, row = mode-a photon number.
class BipartiteState {
public:
    static constexpr int kMaxTruncation = 64;

    static BipartiteState from_coeffs(int trunc_a, int trunc_b, std::vector<Amplitude> coeffs,
                                      double norm_tol = 1e-9);

    int trunc_a() const { return trunc_a_; }
    int trunc_b() const { return trunc_b_; }
    std::span<const Amplitude> coeffs() const { return coeffs_; }
    Amplitude coeff(int n, int m) const;

private:
    BipartiteState(int na, int nb, std::vector<Amplitude> coeffs)
        : trunc_a_(na), trunc_b_(nb), coeffs_(std::move(coeffs)) {}
    int trunc_a_;
    int trunc_b_;
    std::vector<Amplitude> coeffs_;  // (trunc_a+1) x (trunc_b+1), row-major
};

using AnyState = std::variant<SingleModeState, BipartiteState>;

enum class Sign { plus, minus };

/// Number state |n>, n <= 256.
SingleModeState make_fock(int n);

/// Coherent state |alpha> truncated at `truncation` and renormalized.
/// truncation < 0 selects ceil(|a|^2 + 6|a| + 10) automatically. The
/// discarded tail weight must stay below 1e-12; an explicit truncation
/// that violates this raises a truncation error naming the required N.
/// If `discarded_tail` is non-null it receives the tail weight.
SingleModeState make_coherent(Amplitude alpha, int truncation = -1,
                              double* discarded_tail = nullptr);

/// sqrt(xi)|0,1> +/- sqrt(1-xi)|1,0>, 0 <= xi <= 1.
BipartiteState make_psi_family(Sign sign, double xi);

/// sqrt(xi)|0,0> +/- sqrt(1-xi)|1,1>, 0 <= xi <= 1.
BipartiteState make_phi_family(Sign sign, double xi);

/// Tensor product: c(n, m) = a_n * b_m.
BipartiteState make_product(const SingleModeState& a, const SingleModeState& b);

/// State mini-language: `fock:n` | `coh:re,im` | `psi:{+|-}:xi` |
/// `phi:{+|-}:xi` | `file:PATH`. `coherent_truncation` overrides the
/// automatic coherent truncation (ignored by the other forms).
AnyState parse_state(std::string_view spec, int coherent_truncation = -1);

/// JSON state file form:
///   {"kind":"single",    "coeffs":[[re,im],...]}
///   {"kind":"bipartite", "coeffs":[[[re,im],...],...]}   (row = mode a)
/// The loader renormalizes when the norm deviates by <= 1e-6 and rejects
/// otherwise.
AnyState state_from_json(std::string_view text);
std::string state_to_json(const AnyState& s);

}  // namespace nqdeg
