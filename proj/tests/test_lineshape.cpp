#include <doctest.h>

#include <random>

#include "loopchi/lineshape.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace loopchi;

namespace {

LineshapeKernel kernel_one_pair(BathMode mode, double lam, double big_lam, double kT) {
    SystemSpec sys = fixtures::two_level();
    BathSpec bath = fixtures::no_bath(2);
    bath.mode = mode;
    bath.kT = kT;
    bath.lambda(1, 1) = lam;
    bath.big_lambda(1, 1) = big_lam;
    return LineshapeKernel(sys, bath);
}

} // namespace

TEST_CASE("g vanishes at t = 0 in every mode") {
    for (auto mode : {BathMode::brownian, BathMode::fast, BathMode::slow}) {
        auto k = kernel_one_pair(mode, 0.7, 1.3, 2.0);
        CHECK(std::abs(k.g(1, 1, 0.0)) == 0.0);
    }
}

TEST_CASE("fast mode is Gamma |t|") {
    // Gamma = 2 * 0.25 * 2 / 1 = 1
    auto k = kernel_one_pair(BathMode::fast, 0.25, 1.0, 2.0);
    CHECK(k.g(1, 1, -2.0) == cplx(2.0, 0.0));
    CHECK(k.g(1, 1, 3.5) == cplx(3.5, 0.0));
}

TEST_CASE("brownian approaches the fast form deep in the motional-narrowing regime") {
    // Lambda^2 = 4 >= 100 * 2 lambda kT = 2, and Lambda/(2 kT) = 1e-3 keeps the
    // imaginary part negligible; at Lambda t = 200 the linear term dominates.
    const double lam = 1e-5, L = 2.0, kT = 1000.0, t = 100.0;
    auto kb = kernel_one_pair(BathMode::brownian, lam, L, kT);
    auto kf = kernel_one_pair(BathMode::fast, lam, L, kT);
    const cplx gb = kb.g(1, 1, t), gf = kf.g(1, 1, t);
    CHECK(std::abs(gb - gf) / std::abs(gf) < 0.01);
}

TEST_CASE("brownian matches its quadratic expansion at short times") {
    const double lam = 0.8, L = 1.0, kT = 3.0;
    auto kb = kernel_one_pair(BathMode::brownian, lam, L, kT);
    for (double t : {0.002, -0.005, 0.01}) {
        const cplx quad = cplx(lam * kT, -lam * L / 2.0) * t * std::abs(t) *
                          ((t >= 0) ? 1.0 : -1.0);
        // (2 lam kT / L^2 - i lam/L)(Lt)^2/2 with the odd imaginary continuation
        const cplx quad2 = cplx(lam * kT * t * t, -lam * L * t * std::abs(t) / 2.0);
        CHECK(std::abs(kb.g(1, 1, t) - quad2) / std::abs(quad2) < 0.01);
        (void)quad;
    }
}

TEST_CASE("brownian matches the slow form in the high-temperature static regime") {
    // Lambda |t| = 0.01 and kT t = 1e5, so the real quadratic part dwarfs the
    // imaginary mismatch between -i lam Lambda t^2/2 and -i lam |t|.
    const double lam = 1.0, L = 0.001, kT = 1e4, t = 10.0;
    auto kb = kernel_one_pair(BathMode::brownian, lam, L, kT);
    auto ks = kernel_one_pair(BathMode::slow, lam, L, kT);
    const cplx gb = kb.g(1, 1, t), gs = ks.g(1, 1, t);
    CHECK(std::abs(gb - gs) / std::abs(gs) < 0.01);
    CHECK(gs == cplx(lam * kT * t * t, -lam * t));
}

TEST_CASE("g obeys the reflection symmetry g_ij(t) = conj(g_ji(-t))") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unit(0.05, 3.0), corr(-1.0, 1.0),
        times(-20.0, 20.0);
    SystemSpec sys = fixtures::three_level();
    for (int trial = 0; trial < 1000; ++trial) {
        BathSpec bath = fixtures::no_bath(3);
        bath.mode = (trial % 3 == 0)   ? BathMode::brownian
                    : (trial % 3 == 1) ? BathMode::fast
                                       : BathMode::slow;
        bath.kT = unit(rng);
        for (int i = 0; i < 3; ++i) bath.lambda(i, i) = unit(rng);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < i; ++j) {
                bath.lambda(i, j) = bath.lambda(j, i) =
                    corr(rng) * std::sqrt(bath.lambda(i, i) * bath.lambda(j, j));
                bath.big_lambda(i, j) = bath.big_lambda(j, i) = unit(rng);
            }
        LineshapeKernel k(sys, bath);
        const double t = times(rng);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(k.g(i, j, t) - std::conj(k.g(j, i, -t))) < 1e-14);
    }
}

TEST_CASE("cumulant exponent trivial cases") {
    SystemSpec sys = fixtures::three_level();
    LineshapeKernel none(sys, fixtures::no_bath(3));
    CHECK(none.cumulant_exponent(1, 0, 2, 0, 0.4, 0.1, -0.3, 0.9) == cplx(0.0, 0.0));

    LineshapeKernel k(sys, fixtures::fast_bath_bd(0.5, 1.0, 0.3));
    CHECK(std::abs(k.cumulant_exponent(1, 0, 2, 0, 1.3, 1.3, 1.3, 1.3)) == 0.0);
}

TEST_CASE("two-level fast exponent matches the hand-expanded sum") {
    // Bath on the excited level only; for the (e, g, e, g) index pattern the
    // thirteen terms collapse to the six g_ee entries.
    SystemSpec sys = fixtures::two_level();
    BathSpec bath = fixtures::no_bath(2);
    bath.mode = BathMode::fast;
    bath.kT = 1.0;
    bath.lambda(1, 1) = 0.35;   // Gamma = 0.7
    LineshapeKernel k(sys, bath);
    const double G = 0.7;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> times(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double t4 = times(rng), t3 = times(rng), t2 = times(rng), t1 = times(rng);
        const double expected =
            -G * (std::abs(t4 - t3) + std::abs(t2 - t1) + std::abs(t4 - t1) -
                  std::abs(t4 - t2) - std::abs(t3 - t1) + std::abs(t3 - t2));
        const cplx f = k.cumulant_exponent(1, 0, 1, 0, t4, t3, t2, t1);
        CHECK(f.real() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(f.imag() == doctest::Approx(0.0));
    }
}

TEST_CASE("fast-limit exponent has nonpositive real part for valid couplings") {
    SystemSpec sys = fixtures::three_level();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> corr(-1.0, 1.0), times(-5.0, 5.0);
    std::uniform_int_distribution<int> level(0, 2);
    for (int trial = 0; trial < 300; ++trial) {
        LineshapeKernel k(sys, fixtures::fast_bath_bd(0.4, 1.0, corr(rng)));
        const cplx f = k.cumulant_exponent(level(rng), level(rng), level(rng), level(rng),
                                           times(rng), times(rng), times(rng), times(rng));
        CHECK(f.real() <= 1e-12);
    }
}

TEST_CASE("four-point function without dipoles vanishes") {
    SystemSpec sys = fixtures::two_level();
    sys.dipole.setZero();
    LineshapeKernel k(sys, fixtures::no_bath(2));
    CHECK(four_point_F(sys, k, 0.3, 0.2, 0.1, 0.0) == cplx(0.0, 0.0));
}

TEST_CASE("isolated four-point function equals the operator trace") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> times(-5.0, 5.0);
    for (auto sys : {fixtures::two_level(1.0), fixtures::three_level()}) {
        LineshapeKernel k(sys, fixtures::no_bath(sys.size()));
        for (int trial = 0; trial < 50; ++trial) {
            const double t4 = times(rng), t3 = times(rng), t2 = times(rng), t1 = times(rng);
            const cplx got = four_point_F(sys, k, t4, t3, t2, t1);
            const cplx want = oracles::four_point(sys, t4, t3, t2, t1);
            CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("argument reversal conjugates and negates F") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> times(-4.0, 4.0);
    SystemSpec sys = fixtures::three_level();

    SUBCASE("isolated, against the operator oracle") {
        LineshapeKernel k(sys, fixtures::no_bath(3));
        for (int trial = 0; trial < 30; ++trial) {
            const double t4 = times(rng), t3 = times(rng), t2 = times(rng), t1 = times(rng);
            const cplx fwd = oracles::four_point(sys, t4, t3, t2, t1);
            const cplx rev = four_point_F(sys, k, t1, t2, t3, t4);
            CHECK(std::abs(rev + std::conj(fwd)) < 1e-12 * std::max(1.0, std::abs(fwd)));
        }
    }
    SUBCASE("with a brownian bath") {
        LineshapeKernel k(sys, fixtures::brownian_bath_bd(0.2, 5.0, 2.5, 0.5));
        for (int trial = 0; trial < 30; ++trial) {
            const double t4 = times(rng), t3 = times(rng), t2 = times(rng), t1 = times(rng);
            const cplx fwd = four_point_F(sys, k, t4, t3, t2, t1);
            const cplx rev = four_point_F(sys, k, t1, t2, t3, t4);
            CHECK(std::abs(rev + std::conj(fwd)) < 1e-12 * std::max(1.0, std::abs(fwd)));
        }
    }
}
