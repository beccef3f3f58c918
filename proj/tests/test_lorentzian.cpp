#include <doctest.h>

#include <random>

#include "loopchi/lorentzian.hpp"
#include "support/fixtures.hpp"

using namespace loopchi;

TEST_CASE("green on resonance and under conjugation") {
    SystemSpec sys = fixtures::two_level(1.0);
    BathSpec bath = fixtures::no_bath(2);
    bath.mode = BathMode::fast;
    bath.kT = 1.0;
    bath.lambda(1, 1) = 0.25;   // Gamma_ee = 0.5
    auto greens = LorentzianGreens::make(sys, bath, 1e-6);

    const double gamma = 0.5 + 1e-6;
    const cplx on_res = greens.green(1.0, 1, 0, terms::PropKind::retarded);
    CHECK(std::abs(on_res - cplx(0.0, -1.0 / gamma)) < 1e-12);

    for (double w : {-2.0, 0.3, 4.5}) {
        const cplx r = greens.green(w, 1, 0, terms::PropKind::retarded);
        const cplx a = greens.green(w, 1, 0, terms::PropKind::advanced);
        CHECK(std::abs(a - std::conj(r)) < 1e-15);
    }

    // far off resonance the propagator is 1/detuning up to O(gamma/detuning^2)
    const double det = 200.0;
    const cplx far = greens.green(1.0 + det, 1, 0, terms::PropKind::retarded);
    CHECK(std::abs(far.real() - 1.0 / det) < 2.0 * gamma * gamma / (det * det * det));
    CHECK(std::abs(far.imag()) < 2.0 * gamma / (det * det));
}

TEST_CASE("zero dipoles give zero chi3") {
    SystemSpec sys = fixtures::two_level();
    sys.dipole.setZero();
    auto greens = LorentzianGreens::isolated(sys);
    CHECK(chi3_loop(sys, greens, 0.3, -0.4, 0.2) == cplx(0.0, 0.0));
    CHECK(chi3_timeordered(sys, greens, 0.3, -0.4, 0.2) == cplx(0.0, 0.0));
}

TEST_CASE("loop and time-ordered forms agree on the isolated system") {
    SystemSpec sys = fixtures::two_level(1.7);
    const double w1 = 0.31, w2 = -0.47, w3 = 0.22;   // off resonance by >= 1

    auto rel_diff = [&](double eta_reg) {
        auto greens = LorentzianGreens::isolated(sys, eta_reg);
        const cplx a = chi3_loop(sys, greens, w1, w2, w3);
        const cplx b = chi3_timeordered(sys, greens, w1, w2, w3);
        return std::abs(a - b) / std::abs(b);
    };

    CHECK(rel_diff(1e-6) < 1e-4);

    // the discrepancy scales linearly with the regularization width
    const double c_measured = rel_diff(1e-4) / 1e-4;
    for (double eta : {1e-6, 1e-5, 1e-4})
        CHECK(rel_diff(eta) <= 10.0 * c_measured * eta);
}

TEST_CASE("both evaluators are symmetric under input interchange") {
    SystemSpec sys = fixtures::three_level();
    auto greens = LorentzianGreens::make(sys, fixtures::fast_bath_bd(0.1, 0.5, 0.5), 1e-6);
    const double w1 = 1.3, w2 = -0.9, w3 = 0.4;
    const cplx l = chi3_loop(sys, greens, w1, w2, w3);
    const cplx t = chi3_timeordered(sys, greens, w1, w2, w3);
    for (auto [a, b, c] : {std::array<double, 3>{w2, w1, w3}, {w3, w2, w1}, {w2, w3, w1}}) {
        CHECK(std::abs(chi3_loop(sys, greens, a, b, c) - l) < 1e-13 * std::abs(l));
        CHECK(std::abs(chi3_timeordered(sys, greens, a, b, c) - t) < 1e-13 * std::abs(t));
    }
}

TEST_CASE("real dipoles give conjugate response at negated frequencies") {
    SystemSpec sys = fixtures::three_level();
    auto greens = LorentzianGreens::make(sys, fixtures::fast_bath_bd(0.1, 0.5, 0.4), 1e-6);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> freq(-2.5, 2.5);
    for (int trial = 0; trial < 20; ++trial) {
        const double w1 = freq(rng), w2 = freq(rng), w3 = freq(rng);
        const cplx lp = chi3_loop(sys, greens, w1, w2, w3);
        const cplx lm = chi3_loop(sys, greens, -w1, -w2, -w3);
        CHECK(std::abs(lm - std::conj(lp)) < 1e-12 * std::abs(lp));
        const cplx tp = chi3_timeordered(sys, greens, w1, w2, w3);
        const cplx tm = chi3_timeordered(sys, greens, -w1, -w2, -w3);
        CHECK(std::abs(tm - std::conj(tp)) < 1e-12 * std::abs(tp));
    }
}

TEST_CASE("factorized loop form misses the two-photon feature") {
    // At the bd two-photon point the time-ordered form carries the resonant
    // bracket while the naive loop factorization has no bd coherence at all;
    // the loop result is entirely independent of the cross correlation.
    SystemSpec sys = fixtures::three_level(2.3, 1.5);
    const double w_bd = 0.8, center = 1.9, w3 = 0.05;
    const double w1 = center + 0.5 * w_bd, w2 = center - 0.5 * w_bd;

    auto g05 = LorentzianGreens::make(sys, fixtures::fast_bath_bd(0.1, 0.5, 0.5), 1e-6);
    auto g00 = LorentzianGreens::make(sys, fixtures::fast_bath_bd(0.1, 0.5, 0.0), 1e-6);

    const cplx loop05 = chi3_loop(sys, g05, w1, -w2, w3);
    const cplx loop00 = chi3_loop(sys, g00, w1, -w2, w3);
    CHECK(std::abs(loop05 - loop00) < 1e-12 * std::abs(loop00));

    const cplx to05 = chi3_timeordered(sys, g05, w1, -w2, w3);
    CHECK(std::abs(loop05 - to05) / std::abs(to05) > 0.2);
}

TEST_CASE("closed resonance form equals the two-diagram sum") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> freq(0.5, 3.0), rate(0.02, 0.5), corr(-0.95, 0.95),
        in(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double w_ba = freq(rng), w_da = freq(rng);
        const double g_bb = rate(rng), g_dd = rate(rng), eta = corr(rng);
        const double w1 = in(rng), w2 = in(rng), ws = in(rng);
        const cplx a =
            resonance_closed_form(1.0, 1.0, w_ba, w_da, g_bb, g_dd, eta, w1, w2, ws);
        const cplx b =
            resonance_two_diagrams(1.0, 1.0, w_ba, w_da, g_bb, g_dd, eta, w1, w2, ws);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("closed resonance form limiting cases") {
    const double w_ba = 2.3, w_da = 1.5, w_bd = 0.8;
    const double w3 = 0.05, center = 1.9;
    auto at_delta = [&](double delta, double eta, double g) {
        const double w1 = center + 0.5 * delta, w2 = center - 0.5 * delta;
        return resonance_closed_form(1.0, 1.0, w_ba, w_da, g, g, eta, w1, w2, w1 - w2 + w3);
    };
    auto prefactor_only = [&](double delta, double g) {
        const double w1 = center + 0.5 * delta, w2 = center - 0.5 * delta;
        const double ws = w1 - w2 + w3;
        return cplx(1.0, 0.0) / cplx(-ws - w_ba, g) / cplx(w1 - w_ba, g) /
               cplx(-w2 + w_da, g);
    };

    // eta = 0: no two-photon factor at all
    for (double delta : {0.5, 0.8, 1.1})
        CHECK(std::abs(at_delta(delta, 0.0, 0.1) - prefactor_only(delta, 0.1)) < 1e-15);

    // eta = 0.5, Gamma_bb = Gamma_dd = 1: bracket width (1+1)(1-0.5) = 1 and
    // peak bracket value 1 + eta/(1-eta) = 2
    const cplx peak = at_delta(w_bd, 0.5, 1.0) / prefactor_only(w_bd, 1.0);
    CHECK(std::abs(peak - cplx(2.0, 0.0)) < 1e-12);
    const cplx off = at_delta(w_bd + 1.0, 0.5, 1.0) / prefactor_only(w_bd + 1.0, 1.0);
    CHECK(std::abs(off - (1.0 + cplx(0.0, 1.0) / cplx(1.0, 1.0))) < 1e-12);

    // eta = 1: the bracket denominator loses its width entirely
    const double tiny = 1e-9;
    const cplx blowup = at_delta(w_bd + tiny, 1.0, 0.1) / prefactor_only(w_bd + tiny, 0.1);
    CHECK(std::abs(blowup) > 1e7);
}

TEST_CASE("off-resonant symmetric form matches the real-propagator loop") {
    SystemSpec sys = fixtures::two_level(1.7);
    auto greens = LorentzianGreens::isolated(sys, 1e-9);
    const double w1 = 0.31, w2 = -0.47, w3 = 0.22;

    const auto sym = chi3_offresonant_symmetric(sys, greens, w1, w2, w3);
    CHECK(sym.approximation_valid);
    const cplx loop = chi3_loop(sys, greens, w1, w2, w3);
    CHECK(std::abs(sym.value.real() - loop.real()) <= 1e-10 * std::abs(loop.real()));
    CHECK(sym.value.imag() == 0.0);
    CHECK(std::abs(loop.imag()) < 1e-6 * std::abs(loop.real()));

    // exact symmetry under input interchange, including repeated frequencies
    const auto swapped = chi3_offresonant_symmetric(sys, greens, w3, w1, w2);
    CHECK(swapped.value == sym.value);
    const auto equal_pair = chi3_offresonant_symmetric(sys, greens, 0.3, 0.3, 0.2);
    const auto equal_swap = chi3_offresonant_symmetric(sys, greens, 0.2, 0.3, 0.3);
    CHECK(equal_pair.value == equal_swap.value);
}

TEST_CASE("off-resonant form flags near-resonant inputs") {
    SystemSpec sys = fixtures::two_level(1.0);
    BathSpec bath = fixtures::no_bath(2);
    bath.mode = BathMode::fast;
    bath.kT = 1.0;
    bath.lambda(1, 1) = 0.05;   // Gamma = 0.1
    auto greens = LorentzianGreens::make(sys, bath, 1e-6);
    const auto near = chi3_offresonant_symmetric(sys, greens, 1.5, -0.2, 0.1);
    CHECK_FALSE(near.approximation_valid);
    const auto far = chi3_offresonant_symmetric(sys, greens, 3.0, -7.2, 2.1);
    CHECK(far.approximation_valid);
}
