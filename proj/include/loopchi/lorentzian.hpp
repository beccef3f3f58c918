// lorentzian.hpp — chi^(3) in the eigenstate basis, fast-fluctuation limit.
//
// Bath averages of propagator products are factorized into single Lorentzians
// whose widths come from coherence_dephasing. The loop-form factorization is
// deliberately naive: it carries only (nu, a) coherences and therefore cannot
// resolve two-photon features between excited levels.

#pragma once

#include <Eigen/Dense>

#include <complex>

#include "loopchi/model.hpp"
#include "loopchi/terms.hpp"

namespace loopchi {

struct LorentzianGreens {
    const SystemSpec* system{nullptr};
    Eigen::MatrixXd width;       // coherence dephasing rates
    double eta_reg{1e-6};

    static LorentzianGreens make(const SystemSpec& sys, const BathSpec& bath,
                                 double eta_reg = 1e-6) {
        LorentzianGreens g;
        g.system = &sys;
        g.width = dephasing_matrix(bath);
        g.eta_reg = eta_reg;
        return g;
    }

    static LorentzianGreens isolated(const SystemSpec& sys, double eta_reg = 1e-6) {
        LorentzianGreens g;
        g.system = &sys;
        g.width = Eigen::MatrixXd::Zero(sys.size(), sys.size());
        g.eta_reg = eta_reg;
        return g;
    }

    // Retarded: 1/(w - w_ij + i(Gamma_ij + eta_reg)); advanced flips the sign
    // of the imaginary part.
    cplx green(double w, int i, int j, terms::PropKind kind) const {
        const double gamma = width(i, j) + eta_reg;
        const double im = (kind == terms::PropKind::retarded) ? gamma : -gamma;
        return 1.0 / cplx(w - system->transition(i, j), im);
    }
};

// Loop-form chi^(3): -1/(2pi)^2 sum over permutations, base terms and level
// quadruples of P(a) V_ad V_dc V_cb V_ba times a product of Lorentzians with
// indices (ba), (ca), (da) at the terms' cumulative frequency arguments.
cplx chi3_loop(const SystemSpec& sys, const LorentzianGreens& greens, double w1, double w2,
               double w3);

// Fully-time-ordered chi^(3): left/right vertex sequences from
// timeordered_terms drive the (ket, bra) coherence through three retarded
// Lorentzians at w1, w1+w2, w1+w2+w3.
cplx chi3_timeordered(const SystemSpec& sys, const LorentzianGreens& greens, double w1,
                      double w2, double w3);

// Closed-form two-photon resonance of the three-level model (ground state a,
// excited b and d, V_bd = 0), for the signature chi3(-ws; w3, -w2, w1). The
// arguments w1, w2 are the physical (positive) field frequencies.
cplx resonance_closed_form(cplx v_ab, cplx v_ad, double w_ba, double w_da, double g_bb,
                           double g_dd, double eta, double w1, double w2, double ws);

// Same quantity as the sum of the two separate diagrams, before the algebraic
// combination of the bracket. Used to cross-check the combined form.
cplx resonance_two_diagrams(cplx v_ab, cplx v_ad, double w_ba, double w_da, double g_bb,
                            double g_dd, double eta, double w1, double w2, double ws);

struct OffResonantChi3 {
    cplx value{0.0, 0.0};
    bool approximation_valid{true};
    double min_detuning{0.0};
};

// Off-resonant symmetric form: a single product of real principal-value
// propagators summed over all 4! assignments of (w1, w2, w3, -ws). The result
// is flagged invalid when any propagator argument comes within 10x the
// largest width of a transition.
OffResonantChi3 chi3_offresonant_symmetric(const SystemSpec& sys, const LorentzianGreens& greens,
                                           double w1, double w2, double w3);

} // namespace loopchi
