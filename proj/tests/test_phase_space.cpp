#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "math_util.hpp"
#include "phase_space.hpp"
#include "states.hpp"

using namespace nqdeg;

namespace {

constexpr double kInvPi = std::numbers::inv_pi;

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

SingleModeState random_state(std::mt19937_64& rng, int count) {
    return SingleModeState::from_coeffs(random_coeffs(rng, count), 1e-6);
}

}  // namespace

TEST_CASE("coherent overlap basics") {
    CHECK(coherent_overlap({0, 0}, make_fock(0)).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(coherent_overlap({0, 0}, make_fock(3))) == 0.0);
    CHECK(coherent_overlap({1, 0}, make_fock(1)).real() ==
          doctest::Approx(0.60653065971263342).epsilon(1e-14));
}

TEST_CASE("coherent overlap far regime matches the log-space assembly") {
    // (|0> + |3> + |7>)/sqrt(3); references evaluated at 50-digit precision.
    std::vector<Amplitude> c(8, {0.0, 0.0});
    c[0] = c[3] = c[7] = {1.0 / std::sqrt(3.0), 0.0};
    const auto s = SingleModeState::from_coeffs(std::move(c), 1e-6);

    const Amplitude mid = coherent_overlap({20.0, -5.0}, s);
    CHECK(mid.real() == doctest::Approx(-9.5207403807271759e-87).epsilon(1e-12));
    CHECK(mid.imag() == doctest::Approx(6.569515391811115e-86).epsilon(1e-12));

    const Amplitude far = coherent_overlap({36.0, 2.0}, s);
    CHECK(far.real() == doctest::Approx(3.04781525152723e-274).epsilon(1e-10));
    CHECK(far.imag() == doctest::Approx(-1.2474278698839883e-274).epsilon(1e-10));
}

TEST_CASE("husimi_q values and bounds") {
    const auto coh = make_coherent({0.9, -0.4}, 40);
    CHECK(husimi_q(PhasePoint::single({0.9, -0.4}), coh) == doctest::Approx(kInvPi).epsilon(1e-10));
    CHECK(husimi_q(PhasePoint::single({0, 0}), make_fock(1)) == 0.0);
    CHECK(husimi_q(PhasePoint::single({1, 0}), make_fock(1)) ==
          doctest::Approx(0.11709966304863832).epsilon(1e-14));

    CHECK_THROWS_AS(husimi_q(PhasePoint::pair({0, 0}, {0, 0}), make_fock(0)), Error);

    std::mt19937_64 rng(42);
    auto u = [&] { return 8.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 4.0; };
    for (int k = 0; k < 200; ++k) {
        const auto s = random_state(rng, 1 + static_cast<int>(rng() % 10));
        const double q = husimi_q(PhasePoint::single({u(), u()}), s);
        CHECK(q >= 0.0);
        CHECK(q <= kInvPi + 1e-15);
    }
}

TEST_CASE("husimi_q2 values, bounds and factorization") {
    for (double xi : {0.0, 0.3, 0.8}) {
        CHECK(husimi_q2(PhasePoint::pair({0, 0}, {0, 0}), make_phi_family(Sign::plus, xi)) ==
              doctest::Approx(xi * kInvPi * kInvPi).epsilon(1e-12));
        CHECK(husimi_q2(PhasePoint::pair({0, 0}, {0, 0}), make_psi_family(Sign::plus, xi)) == 0.0);
        CHECK(husimi_q2(PhasePoint::pair({0, 0}, {0, 0}), make_psi_family(Sign::minus, xi)) == 0.0);
    }

    // product state |0> (x) |1> at (0, 1)
    const auto prod01 = make_product(make_fock(0), make_fock(1));
    CHECK(husimi_q2(PhasePoint::pair({0, 0}, {1, 0}), prod01) ==
          doctest::Approx(kInvPi * kInvPi * std::exp(-1.0)).epsilon(1e-13));

    CHECK_THROWS_AS(husimi_q2(PhasePoint::single({0, 0}), prod01), Error);

    std::mt19937_64 rng(7);
    auto u = [&] { return 6.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 3.0; };
    for (int k = 0; k < 50; ++k) {
        const auto a = random_state(rng, 4);
        const auto b = random_state(rng, 5);
        const auto prod = make_product(a, b);
        const Amplitude alpha{u(), u()}, beta{u(), u()};
        const double q2 = husimi_q2(PhasePoint::pair(alpha, beta), prod);
        CHECK(q2 <= kInvPi * kInvPi + 1e-15);
        const double split = husimi_q(PhasePoint::single(alpha), a) *
                             husimi_q(PhasePoint::single(beta), b);
        CHECK(q2 == doctest::Approx(split).epsilon(1e-12));
    }
}

TEST_CASE("phase invariance of Q, W and fidelity") {
    std::mt19937_64 rng(99);
    const auto base = random_coeffs(rng, 6);
    const auto s = SingleModeState::from_coeffs(base, 1e-6);
    const double theta = 1.2345;
    auto rotated_coeffs = base;
    for (auto& v : rotated_coeffs) v *= Amplitude{std::cos(theta), std::sin(theta)};
    const auto rotated = SingleModeState::from_coeffs(std::move(rotated_coeffs), 1e-6);

    const Amplitude pts[] = {{0.0, 0.0}, {0.7, -0.2}, {-1.5, 2.2}};
    for (const Amplitude p : pts) {
        CHECK(husimi_q(PhasePoint::single(p), s) ==
              doctest::Approx(husimi_q(PhasePoint::single(p), rotated)).epsilon(1e-12));
        CHECK(wigner(p, s) == doctest::Approx(wigner(p, rotated)).epsilon(1e-12));
    }
    const auto probe = random_state(rng, 6);
    CHECK(fidelity(s, probe) == doctest::Approx(fidelity(rotated, probe)).epsilon(1e-12));
}

TEST_CASE("wigner reference values") {
    CHECK(wigner({0, 0}, make_fock(0)) == doctest::Approx(2.0 * kInvPi).epsilon(1e-14));
    CHECK(wigner({0.7, 0.3}, make_fock(0)) ==
          doctest::Approx(0.19957150111386662).epsilon(1e-13));
    CHECK(wigner({0, 0}, make_fock(1)) == doctest::Approx(-2.0 * kInvPi).epsilon(1e-14));
    // node ring of |1> at |a| = 1/2
    CHECK(wigner({0.3, 0.4}, make_fock(1)) == doctest::Approx(0.0).epsilon(1e-14));

    // references computed independently via the displaced-parity sum
    const double r2 = 1.0 / std::sqrt(2.0);
    const auto cat = SingleModeState::from_coeffs({{r2, 0}, {0, 0}, {r2, 0}});
    CHECK(wigner({0.25, -0.55}, cat) == doctest::Approx(-0.18589265830120101).epsilon(1e-12));

    const double r5 = 1.0 / std::sqrt(5.0);
    const auto mix = SingleModeState::from_coeffs({{r5, 0}, {0, 2.0 * r5}});
    CHECK(wigner({-0.2, 0.1}, mix) == doctest::Approx(-0.16129046950792233).epsilon(1e-12));

    const auto coh = make_coherent({1.0, 0.0}, 17);
    CHECK(wigner({0.8, 0.1}, coh) == doctest::Approx(0.57603739109972267).epsilon(1e-12));
}

TEST_CASE("wigner integrates to one") {
    const double r2 = 1.0 / std::sqrt(2.0);
    const SingleModeState battery[] = {
        make_fock(0), make_fock(1), make_fock(3),
        SingleModeState::from_coeffs({{r2, 0}, {0, 0}, {r2, 0}}), make_coherent({1.0, 0.0}, 17)};
    for (const auto& s : battery) {
        const double h = 0.05, half = 6.0;
        const int pts = static_cast<int>(std::floor(2.0 * half / h + 1e-9)) + 1;
        KahanSum acc;
        for (int i = 0; i < pts; ++i) {
            const double wx = (i == 0 || i == pts - 1) ? 0.5 : 1.0;
            for (int j = 0; j < pts; ++j) {
                const double wy = (j == 0 || j == pts - 1) ? 0.5 : 1.0;
                acc.add(wx * wy * wigner({-half + i * h, -half + j * h}, s));
            }
        }
        CHECK(h * h * acc.value() == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("q_from_w matches husimi_q") {
    const Amplitude points[] = {{0, 0}, {0.5, 0.5}, {1, 1}};
    const double r2 = 1.0 / std::sqrt(2.0);
    const SingleModeState battery[] = {make_fock(0), make_fock(1),
                                       SingleModeState::from_coeffs({{r2, 0}, {0, 0}, {r2, 0}})};
    for (const auto& s : battery)
        for (const Amplitude p : points)
            CHECK(std::abs(q_from_w(p, s) - husimi_q(PhasePoint::single(p), s)) < 1e-4);

    // spec spot value: |2> at 1+1i
    CHECK(std::abs(q_from_w({1, 1}, make_fock(2)) - 0.086157117207394519) < 1e-4);
}

TEST_CASE("q_from_w grid validation") {
    GridSpec too_small{3.0, 0.05, {0, 0}};
    CHECK_THROWS_AS(q_from_w({0, 0}, make_fock(0), too_small), Error);
    GridSpec too_coarse{4.0, 0.2, {0, 0}};
    CHECK_THROWS_AS(q_from_w({0, 0}, make_fock(0), too_coarse), Error);
    GridSpec miscentered{4.0, 0.05, {0, 0}};
    CHECK_THROWS_AS(q_from_w({2.0, 0}, make_fock(0), miscentered), Error);
    GridSpec oversize{60.0, 0.05, {0, 0}};
    CHECK_THROWS_AS(q_from_w({0, 0}, make_fock(0), oversize), Error);
}

TEST_CASE("fidelity and distances") {
    const auto zero = make_fock(0);
    const auto one = make_fock(1);
    CHECK(fidelity(zero, zero) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(zero, one) == 0.0);
    CHECK(fidelity(make_psi_family(Sign::plus, 0.5), make_product(make_fock(0), make_fock(1))) ==
          doctest::Approx(0.5).epsilon(1e-15));

    // zero padding across truncations
    const auto padded = SingleModeState::from_coeffs({{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
    CHECK(fidelity(zero, padded) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(distance_bu(zero, zero) == doctest::Approx(0.0));
    CHECK(distance_hs(zero, zero) == doctest::Approx(0.0));
    CHECK(distance_bu(zero, one) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(distance_hs(zero, one) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // F = 1/4: d_BU = 1, d_HS = sqrt(3/2)
    const auto mix = SingleModeState::from_coeffs({{0.5, 0.0}, {std::sqrt(3.0) / 2.0, 0.0}});
    CHECK(fidelity(mix, zero) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(distance_bu(mix, zero) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(distance_hs(mix, zero) == doctest::Approx(1.224744871391589).epsilon(1e-15));
}

TEST_CASE("distance identities over random pairs") {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 100; ++k) {
        const auto a = random_state(rng, 2 + static_cast<int>(rng() % 6));
        const auto b = random_state(rng, 2 + static_cast<int>(rng() % 6));
        const double f = fidelity(a, b);
        const double bu = distance_bu(a, b);
        const double hs = distance_hs(a, b);
        CHECK(bu <= hs + 1e-15);
        CHECK(0.5 * hs * hs + f == doctest::Approx(1.0).epsilon(1e-12));
        if (f > 1e-6 && f < 1.0 - 1e-6) CHECK(hs - bu > 0.0);
    }
}

TEST_CASE("grid dump format") {
    std::ostringstream out;
    dump_grid(out, make_fock(0), Surface::husimi, GridSpec{1.0, 0.5, {0, 0}});
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "re,im,value");
    int rows = 0;
    double first_value = -1.0;
    while (std::getline(in, line)) {
        if (rows == 0) {
            const auto second_comma = line.rfind(',');
            first_value = std::stod(line.substr(second_comma + 1));
        }
        ++rows;
    }
    CHECK(rows == 25);  // 5 x 5 lattice
    // corner (-1, -1): Q = exp(-2)/pi
    CHECK(first_value == doctest::Approx(std::exp(-2.0) * kInvPi).epsilon(1e-12));
}
