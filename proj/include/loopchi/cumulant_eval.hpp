// cumulant_eval.hpp — exact chi^(3) by triple time integration of either
// expansion with the cumulant four-point function, plus time-domain response
// utilities.
//
// A uniform artificial damping exp(-eta * span) with span = max(tau) - min(tau)
// regularizes undamped directions (isolated systems, population periods). The
// span is a symmetric function of the four interaction times, so both
// expansions integrate the same damped correlation function and remain exact
// rearrangements of each other at finite eta.

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "loopchi/lineshape.hpp"
#include "loopchi/model.hpp"
#include "loopchi/terms.hpp"

namespace loopchi {

struct Chi3Result {
    cplx value{0.0, 0.0};
    double error_estimate{0.0};   // relative change under grid refinement
    bool converged{false};
    double t_max{0.0};
    int points_per_axis{0};
};

// Triple time integral of the selected expansion over [0, t_max]^3 on a
// composite Gauss-Legendre grid, Richardson-checked against a refined grid.
// Throws NonConvergentError when the damping envelope cannot reach the
// truncation floor at any feasible t_max.
Chi3Result chi3_integral(const SystemSpec& sys, const LineshapeKernel& kernel,
                         terms::Expansion expansion, double w1, double w2, double w3,
                         const QuadratureConfig& quad, int threads = 1);

// Third-order response: the four time-ordered correlation terms plus their
// complex conjugates. Zero whenever any interval is negative.
double response_S3(const SystemSpec& sys, const LineshapeKernel& kernel, double t3, double t2,
                   double t1);

struct TransformConfig {
    double half_bandwidth{6.0};   // frequency grid covers [-W, W] per axis
    int points_per_axis{512};
    double taper_fraction{0.3};   // cosine-tapered edge fraction of the window
};

// Requires half_bandwidth >= 4 * max(|w_ij| + width_ij) over dipole-coupled
// pairs; throws NonConvergentError naming the offending transition.
void check_transform_bandwidth(const SystemSpec& sys, const Eigen::MatrixXd& widths,
                               double eta_reg, double half_bandwidth);

// Three-fold transform of a chi^(3) sampler to S^(3)(t3, t2, t1) samples.
// Output is laid out with t1 outermost: index = (i1 * n2 + i2) * n3 + i3.
std::vector<double> s3_from_chi3(const std::function<cplx(double, double, double)>& chi3,
                                 const TransformConfig& cfg, const std::vector<double>& t1,
                                 const std::vector<double>& t2, const std::vector<double>& t3,
                                 int threads = 1);

} // namespace loopchi
