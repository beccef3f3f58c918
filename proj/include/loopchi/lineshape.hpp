// lineshape.hpp — line-broadening functions, the cumulant exponent and the
// four-point dipole correlation function.
//
// g_{ij}(t) is defined for t >= 0 by the bath mode and extended to t < 0 via
// g_{ij}(t) = conj(g_{ji}(-t)). With a symmetric coupling matrix this makes
// Re g even and Im g odd in t.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

#include "loopchi/model.hpp"

namespace loopchi {

// One entry of the 13-term cumulant exponent: sign * g_{pair}(tau_j - tau_k),
// with pair indices into (d, c, b) = (0, 1, 2) and slot indices into
// (tau4, tau3, tau2, tau1) = (0, 1, 2, 3).
struct CumulantEntry {
    int8_t row, col;     // level-pair selector within (d, c, b)
    int8_t j, k;         // time slots of the difference
    int8_t sign;
};

inline constexpr std::array<CumulantEntry, 13> kCumulantEntries{{
    {0, 0, 0, 1, -1},   // -g_dd(t43)
    {1, 1, 1, 2, -1},   // -g_cc(t32)
    {2, 2, 2, 3, -1},   // -g_bb(t21)
    {0, 1, 0, 2, -1},   // -g_dc(t42)
    {0, 1, 0, 1, +1},   // +g_dc(t43)
    {0, 1, 1, 2, +1},   // +g_dc(t32)
    {0, 2, 0, 3, -1},   // -g_db(t41)
    {0, 2, 0, 2, +1},   // +g_db(t42)
    {0, 2, 1, 3, +1},   // +g_db(t31)
    {0, 2, 1, 2, -1},   // -g_db(t32)
    {1, 2, 1, 3, -1},   // -g_cb(t31)
    {1, 2, 1, 2, +1},   // +g_cb(t32)
    {1, 2, 2, 3, +1},   // +g_cb(t21)
}};

class LineshapeKernel {
public:
    LineshapeKernel(const SystemSpec& system, const BathSpec& bath)
        : mode_(bath.mode), n_(system.size()), lambda_(bath.lambda) {
        bath.validate(n_);
        re_coef_ = Eigen::MatrixXd::Zero(n_, n_);
        im_coef_ = Eigen::MatrixXd::Zero(n_, n_);
        rate_ = Eigen::MatrixXd::Zero(n_, n_);
        lam_kt_ = bath.kT * bath.lambda;
        big_lambda_ = bath.big_lambda;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                if (bath.lambda(i, j) == 0.0) continue;
                const double L = bath.big_lambda(i, j);
                re_coef_(i, j) = 2.0 * bath.lambda(i, j) * bath.kT / (L * L);
                im_coef_(i, j) = bath.lambda(i, j) / L;
                rate_(i, j) = 2.0 * bath.lambda(i, j) * bath.kT / L;
            }
    }

    BathMode mode() const { return mode_; }
    int size() const { return n_; }

    // True when at least one level is coupled, so Re f decays at long times.
    bool damped() const { return lambda_.cwiseAbs().maxCoeff() > 0.0; }

    bool coupled(int i, int j) const { return lambda_(i, j) != 0.0; }

    // Line-broadening function g_{ij}(t) for any real t.
    cplx g(int i, int j, double t) const {
        if (lambda_(i, j) == 0.0) return {0.0, 0.0};
        const double at = std::abs(t);
        const double sg = (t >= 0.0) ? 1.0 : -1.0;
        switch (mode_) {
            case BathMode::fast:
                return {rate_(i, j) * at, 0.0};
            case BathMode::slow:
                return {lam_kt_(i, j) * t * t, -lambda_(i, j) * t};
            case BathMode::brownian: {
                const double L = big_lambda_(i, j);
                const double v = std::expm1(-L * at) + L * at;   // e^{-L|t|} + L|t| - 1
                return {re_coef_(i, j) * v, -im_coef_(i, j) * v * sg};
            }
        }
        return {0.0, 0.0};
    }

    // The 13-term exponent f_{dcba}(tau4, tau3, tau2, tau1).
    cplx cumulant_exponent(int d, int c, int b, int /*a*/, double t4, double t3, double t2,
                           double t1) const {
        const std::array<int, 3> lv{d, c, b};
        const std::array<double, 4> ts{t4, t3, t2, t1};
        cplx f{0.0, 0.0};
        for (const auto& e : kCumulantEntries)
            f += double(e.sign) * g(lv[e.row], lv[e.col], ts[e.j] - ts[e.k]);
        return f;
    }

private:
    BathMode mode_;
    int n_;
    Eigen::MatrixXd lambda_, big_lambda_;
    Eigen::MatrixXd re_coef_;    // 2 lambda kT / Lambda^2
    Eigen::MatrixXd im_coef_;    // lambda / Lambda
    Eigen::MatrixXd rate_;       // 2 lambda kT / Lambda
    Eigen::MatrixXd lam_kt_;     // lambda kT
};

// Four-point dipole correlation function
//   F(t4,t3,t2,t1) = i^3 sum_{dcba} P(a) V_ad V_dc V_cb V_ba
//                    exp[-i(w_da t43 + w_ca t32 + w_ba t21) + f_dcba]
// with transition frequencies taken relative to the initial state a.
inline cplx four_point_F(const SystemSpec& sys, const LineshapeKernel& kernel, double t4,
                         double t3, double t2, double t1) {
    const int n = sys.size();
    cplx acc{0.0, 0.0};
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
                    const double phase = sys.transition(d, a) * (t4 - t3) +
                                         sys.transition(c, a) * (t3 - t2) +
                                         sys.transition(b, a) * (t2 - t1);
                    const cplx f = kernel.cumulant_exponent(d, c, b, a, t4, t3, t2, t1);
                    acc += sys.populations[a] * dip *
                           std::exp(cplx(f.real(), f.imag() - phase));
                }
            }
        }
    }
    return cplx(0.0, -1.0) * acc;   // i^3 = -i
}

} // namespace loopchi
