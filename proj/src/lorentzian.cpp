#include "loopchi/lorentzian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace loopchi {

namespace {

constexpr double kPrefactorNorm = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);

const std::vector<terms::ExpansionTerm>& cached_loop_terms() {
    static const auto t = terms::loop_terms(3);
    return t;
}

const std::vector<terms::ExpansionTerm>& cached_timeordered_terms() {
    static const auto t = terms::timeordered_terms(3);
    return t;
}

std::array<std::array<double, 3>, 6> input_permutations(double w1, double w2, double w3) {
    return {{{w1, w2, w3},
             {w1, w3, w2},
             {w2, w1, w3},
             {w2, w3, w1},
             {w3, w1, w2},
             {w3, w2, w1}}};
}

} // namespace

cplx chi3_loop(const SystemSpec& sys, const LorentzianGreens& greens, double w1, double w2,
               double w3) {
    const int n = sys.size();
    const auto& base = cached_loop_terms();
    cplx total{0.0, 0.0};
    for (const auto& ws : input_permutations(w1, w2, w3)) {
        const std::vector<double> inputs{ws[0], ws[1], ws[2]};
        for (const auto& term : base) {
            // The rendered sign tracks the time-domain decomposition; in the
            // frequency domain each advanced propagator contributes an extra
            // factor -1 from the i-prefactors of the propagators, so all four
            // chain products enter with the same sign.
            const double coeff =
                term.sign * ((term.advanced_count() % 2 == 0) ? 1.0 : -1.0);
            std::array<double, 3> arg{};
            for (int j = 0; j < 3; ++j) arg[j] = term.chain[j].freq.value(inputs);
            for (int a = 0; a < n; ++a) {
                if (sys.populations[a] == 0.0) continue;
                for (int b = 0; b < n; ++b) {
                    const cplx vba = sys.dipole(b, a);
                    if (vba == 0.0) continue;
                    const cplx gba = greens.green(arg[0], b, a, term.chain[0].kind);
                    for (int c = 0; c < n; ++c) {
                        const cplx vcb = sys.dipole(c, b);
                        if (vcb == 0.0) continue;
                        const cplx gca = greens.green(arg[1], c, a, term.chain[1].kind);
                        for (int d = 0; d < n; ++d) {
                            const cplx dip = sys.dipole(a, d) * sys.dipole(d, c) * vcb * vba;
                            if (dip == 0.0) continue;
                            const cplx gda = greens.green(arg[2], d, a, term.chain[2].kind);
                            total += coeff * sys.populations[a] * dip * gda * gca * gba;
                        }
                    }
                }
            }
        }
    }
    return -kPrefactorNorm * total;
}

cplx chi3_timeordered(const SystemSpec& sys, const LorentzianGreens& greens, double w1,
                      double w2, double w3) {
    const int n = sys.size();
    const auto& base = cached_timeordered_terms();
    cplx total{0.0, 0.0};
    for (const auto& ws : input_permutations(w1, w2, w3)) {
        const std::array<double, 3> cum{ws[0], ws[0] + ws[1], ws[0] + ws[1] + ws[2]};
        for (const auto& term : base) {
            for (int a = 0; a < n; ++a) {
                if (sys.populations[a] == 0.0) continue;
                // Walk the (ket, bra) coherence through the three tagged
                // interactions; the detection vertex closes the trace.
                struct State {
                    int ket, bra;
                    cplx amp;
                };
                std::vector<State> states{{a, a, cplx(1.0, 0.0)}};
                std::vector<State> next;
                for (int step = 0; step < 3; ++step) {
                    next.clear();
                    const bool left = term.tags[step] == terms::Tag::L;
                    for (const auto& st : states) {
                        for (int m = 0; m < n; ++m) {
                            const cplx v = left ? sys.dipole(m, st.ket) : sys.dipole(st.bra, m);
                            if (v == 0.0) continue;
                            const int ket = left ? m : st.ket;
                            const int bra = left ? st.bra : m;
                            const cplx g =
                                greens.green(cum[step], ket, bra, terms::PropKind::retarded);
                            next.push_back({ket, bra, st.amp * v * g});
                        }
                    }
                    states.swap(next);
                }
                for (const auto& st : states)
                    total += double(term.sign) * sys.populations[a] * st.amp *
                             sys.dipole(st.bra, st.ket);
            }
        }
    }
    return -kPrefactorNorm * total;
}

cplx resonance_two_diagrams(cplx v_ab, cplx v_ad, double w_ba, double w_da, double g_bb,
                            double g_dd, double eta, double w1, double w2, double ws) {
    const double g_bd = (g_bb + g_dd) * (1.0 - eta);
    const double w_bd = w_ba - w_da;
    const double dip = std::norm(v_ab) * std::norm(v_ad);
    const cplx common = dip / cplx(-ws - w_ba, g_bb) / cplx(w1 - w2 - w_bd, g_bd);
    return common * (1.0 / cplx(w1 - w_ba, g_bb) + 1.0 / cplx(-w2 + w_da, g_dd));
}

cplx resonance_closed_form(cplx v_ab, cplx v_ad, double w_ba, double w_da, double g_bb,
                           double g_dd, double eta, double w1, double w2, double ws) {
    const double w_bd = w_ba - w_da;
    const double wsum = g_bb + g_dd;
    const double dip = std::norm(v_ab) * std::norm(v_ad);
    const cplx pre = dip / cplx(-ws - w_ba, g_bb) / cplx(w1 - w_ba, g_bb) / cplx(-w2 + w_da, g_dd);
    const cplx bracket = 1.0 + eta * cplx(0.0, wsum) / cplx(w1 - w2 - w_bd, wsum * (1.0 - eta));
    return pre * bracket;
}

OffResonantChi3 chi3_offresonant_symmetric(const SystemSpec& sys,
                                           const LorentzianGreens& greens, double w1, double w2,
                                           double w3) {
    const int n = sys.size();
    const double ws = w1 + w2 + w3;
    const std::array<double, 4> values{w1, w2, w3, -ws};
    std::array<int, 4> idx{0, 1, 2, 3};   // permute indices so equal inputs still give 24 terms

    const double width_scale = greens.width.size() > 0
                                   ? greens.width.maxCoeff() + greens.eta_reg
                                   : greens.eta_reg;
    OffResonantChi3 out;
    out.min_detuning = std::numeric_limits<double>::infinity();

    cplx total{0.0, 0.0};
    do {
        const std::array<double, 3> cum{values[idx[0]], values[idx[0]] + values[idx[1]],
                                        values[idx[0]] + values[idx[1]] + values[idx[2]]};
        for (int a = 0; a < n; ++a) {
            if (sys.populations[a] == 0.0) continue;
            for (int b = 0; b < n; ++b) {
                const cplx vba = sys.dipole(b, a);
                if (vba == 0.0) continue;
                for (int c = 0; c < n; ++c) {
                    const cplx vcb = sys.dipole(c, b);
                    if (vcb == 0.0) continue;
                    for (int d = 0; d < n; ++d) {
                        const cplx dip = sys.dipole(a, d) * sys.dipole(d, c) * vcb * vba;
                        if (dip == 0.0) continue;
                        const std::array<double, 3> det{cum[0] - sys.transition(b, a),
                                                        cum[1] - sys.transition(c, a),
                                                        cum[2] - sys.transition(d, a)};
                        double prod = 1.0;
                        for (double x : det) {
                            out.min_detuning = std::min(out.min_detuning, std::abs(x));
                            prod *= x;
                        }
                        total += sys.populations[a] * dip / prod;
                    }
                }
            }
        }
    } while (std::next_permutation(idx.begin(), idx.end()));

    out.approximation_valid = out.min_detuning > 10.0 * width_scale;
    out.value = -kPrefactorNorm * total;
    return out;
}

} // namespace loopchi
