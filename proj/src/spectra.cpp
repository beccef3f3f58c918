#include "loopchi/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loopchi/lorentzian.hpp"
#include "loopchi/parallel.hpp"

namespace loopchi {

SpectrumGrid scan2d(const Chi3Fn& chi3, const std::string& evaluator_id, AxisSpec axis1,
                    AxisSpec axis2, double w3, int threads) {
    axis1.validate();
    axis2.validate();
    SpectrumGrid grid;
    grid.axis1 = axis1;
    grid.axis2 = axis2;
    grid.w3 = w3;
    grid.evaluator_id = evaluator_id;
    grid.values.resize(axis1.count, axis2.count);

    std::vector<std::vector<std::pair<int, int>>> failures(axis1.count);
    parallel_chunks(threads, size_t(axis1.count), [&](size_t i) {
        const double w1 = axis1.at(static_cast<int>(i));
        for (int j = 0; j < axis2.count; ++j) {
            try {
                grid.values(i, j) = chi3(w1, axis2.at(j), w3);
            } catch (const std::exception&) {
                grid.values(i, j) = cplx(std::numeric_limits<double>::quiet_NaN(),
                                         std::numeric_limits<double>::quiet_NaN());
                failures[i].push_back({static_cast<int>(i), j});
            }
        }
    });
    for (const auto& f : failures)
        grid.failed_cells.insert(grid.failed_cells.end(), f.begin(), f.end());
    return grid;
}

namespace {

struct LinearPair {
    cplx amplitude, baseline;
    double residual2;
};

// Least-squares (A, B) for fixed (x0, gamma).
LinearPair solve_linear(const std::vector<double>& x, const std::vector<cplx>& y, double x0,
                        double gamma) {
    const size_t n = x.size();
    // Normal equations for the design [m, 1] with m = 1/(x - x0 + i gamma).
    cplx mm{0.0, 0.0}, m1{0.0, 0.0}, my{0.0, 0.0}, y1{0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
        const cplx m = 1.0 / cplx(x[i] - x0, gamma);
        mm += std::norm(m);
        m1 += std::conj(m);
        my += std::conj(m) * y[i];
        y1 += y[i];
    }
    const cplx nn{double(n), 0.0};
    const cplx det = mm * nn - m1 * std::conj(m1);
    LinearPair out{};
    if (std::abs(det) < 1e-300) {
        out.amplitude = 0.0;
        out.baseline = y1 / double(n);
    } else {
        out.amplitude = (my * nn - m1 * y1) / det;
        out.baseline = (mm * y1 - std::conj(m1) * my) / det;
    }
    double r2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const cplx m = 1.0 / cplx(x[i] - x0, gamma);
        r2 += std::norm(y[i] - out.amplitude * m - out.baseline);
    }
    out.residual2 = r2;
    return out;
}

} // namespace

PeakFit fit_lorentzian_peak(const std::vector<double>& x, const std::vector<cplx>& y) {
    PeakFit fit;
    const size_t n = x.size();
    if (n < 15 || y.size() != n) {
        fit.status = PeakFit::Status::no_peak;
        return fit;
    }
    const double range = x.back() - x.front();
    double ymax = 0.0;
    for (const auto& v : y) ymax = std::max(ymax, std::abs(v));
    if (ymax == 0.0) {
        fit.status = PeakFit::Status::no_peak;
        return fit;
    }

    // Grid search initialization.
    double best_r = std::numeric_limits<double>::infinity();
    double x0 = 0.0, gamma = range / 8.0;
    for (int i = 0; i < 48; ++i) {
        const double cx = x.front() + range * (i + 0.5) / 48.0;
        for (int k = 0; k < 40; ++k) {
            const double g = range / 400.0 * std::pow(400.0, k / 39.0);
            const auto lin = solve_linear(x, y, cx, g);
            if (lin.residual2 < best_r) {
                best_r = lin.residual2;
                x0 = cx;
                gamma = g;
            }
        }
    }

    // Damped Gauss-Newton on (x0, gamma) with (A, B) projected out each step.
    double damping = 1e-3;
    LinearPair lin = solve_linear(x, y, x0, gamma);
    int it = 0;
    bool converged = false;
    for (; it < 200; ++it) {
        // Jacobian of the residual wrt (x0, gamma) at fixed (A, B).
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (size_t i = 0; i < n; ++i) {
            const cplx den = cplx(x[i] - x0, gamma);
            const cplx m = 1.0 / den;
            const cplx r = y[i] - lin.amplitude * m - lin.baseline;
            const cplx dm_dx0 = lin.amplitude * m * m;          // d(A m)/d x0
            const cplx dm_dg = cplx(0.0, -1.0) * lin.amplitude * m * m;
            // residual derivative is minus the model derivative
            jtj00 += std::norm(dm_dx0);
            jtj11 += std::norm(dm_dg);
            jtj01 += (std::conj(dm_dx0) * dm_dg).real();
            jtr0 += (std::conj(dm_dx0) * r).real();
            jtr1 += (std::conj(dm_dg) * r).real();
        }
        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            const double a00 = jtj00 * (1.0 + damping), a11 = jtj11 * (1.0 + damping);
            const double det = a00 * a11 - jtj01 * jtj01;
            if (std::abs(det) < 1e-300) break;
            const double dx0 = (jtr0 * a11 - jtj01 * jtr1) / det;
            const double dg = (a00 * jtr1 - jtj01 * jtr0) / det;
            const double nx0 = x0 + dx0;
            double ng = gamma + dg;
            if (ng <= 0.0) ng = gamma * 0.5;
            const auto cand = solve_linear(x, y, nx0, ng);
            if (cand.residual2 <= lin.residual2 * (1.0 + 1e-15)) {
                const double scale = std::abs(x0) + gamma + range;
                const double step = (std::abs(nx0 - x0) + std::abs(ng - gamma)) / scale;
                x0 = nx0;
                gamma = ng;
                lin = cand;
                damping = std::max(damping * 0.3, 1e-12);
                stepped = true;
                if (step < 1e-10) converged = true;
            } else {
                damping *= 8.0;
            }
        }
        if (converged || !stepped) break;
    }

    fit.center = x0;
    fit.width = gamma;
    fit.amplitude = lin.amplitude;
    fit.baseline = lin.baseline;
    fit.residual = std::sqrt(lin.residual2);
    fit.iterations = it + 1;
    if (!converged && it >= 200) {
        fit.status = PeakFit::Status::not_converged;
        return fit;
    }
    const double contrast = std::abs(fit.amplitude) /
                            (gamma * std::max(std::abs(fit.baseline), 1e-3 * ymax));
    fit.status = (contrast < 0.05) ? PeakFit::Status::no_peak : PeakFit::Status::ok;
    return fit;
}

ThreeLevelRoles identify_three_level(const SystemSpec& sys) {
    if (sys.size() != 3) throw ConfigError("resonance study expects a three-level system");
    int a = 0;
    for (int i = 1; i < 3; ++i)
        if (sys.populations[i] > sys.populations[a]) a = i;
    std::vector<int> excited;
    for (int i = 0; i < 3; ++i)
        if (i != a) excited.push_back(i);
    const int b = excited[0], d = excited[1];
    if (sys.dipole(b, a) == 0.0 || sys.dipole(d, a) == 0.0)
        throw ConfigError("resonance study expects both excited levels dipole-coupled to "
                          "the ground state");
    if (sys.dipole(b, d) != 0.0)
        throw ConfigError("resonance study expects no dipole coupling between the excited "
                          "levels");
    return {a, b, d};
}

StudyGeometry default_geometry(const SystemSpec& sys, const BathSpec& bath) {
    const auto roles = identify_three_level(sys);
    const Eigen::MatrixXd gamma = fast_rates(bath);
    const double w_ba = sys.transition(roles.b, roles.a);
    const double w_da = sys.transition(roles.d, roles.a);
    const double w_bd = w_ba - w_da;
    const double scale = gamma(roles.b, roles.b) + gamma(roles.d, roles.d);
    StudyGeometry geo;
    geo.pump_center = 0.5 * (w_ba + w_da);
    geo.w3 = 0.05 * std::abs(w_bd);
    geo.delta_min = w_bd - 1.5 * scale;
    geo.delta_max = w_bd + 1.5 * scale;
    geo.points = 161;
    return geo;
}

ResonanceStudy resonance_width_study(const SystemSpec& sys, const BathSpec& base,
                                     const std::vector<double>& etas, const StudyGeometry& geo,
                                     double eta_reg, int threads) {
    const auto roles = identify_three_level(sys);
    const double w_ba = sys.transition(roles.b, roles.a);
    const double w_da = sys.transition(roles.d, roles.a);
    const Eigen::MatrixXd gamma0 = fast_rates(base);
    const double g_bb = gamma0(roles.b, roles.b);
    const double g_dd = gamma0(roles.d, roles.d);

    ResonanceStudy study;
    study.width_scale = g_bb + g_dd;
    study.w_bd = w_ba - w_da;

    std::vector<double> deltas(geo.points);
    for (int i = 0; i < geo.points; ++i)
        deltas[i] = geo.delta_min +
                    (geo.delta_max - geo.delta_min) * double(i) / double(geo.points - 1);
    const double spacing = (geo.delta_max - geo.delta_min) / double(geo.points - 1);

    auto bath_for = [&](double eta) {
        BathSpec b = base;
        const double cross = eta * std::sqrt(b.lambda(roles.b, roles.b) *
                                             b.lambda(roles.d, roles.d));
        b.lambda(roles.b, roles.d) = cross;
        b.lambda(roles.d, roles.b) = cross;
        return b;
    };

    auto slice_for = [&](double eta) {
        const BathSpec b = bath_for(eta);
        const LorentzianGreens greens = LorentzianGreens::make(sys, b, eta_reg);
        std::vector<cplx> vals(geo.points);
        parallel_chunks(threads, size_t(geo.points), [&](size_t i) {
            const double w1 = geo.pump_center + 0.5 * deltas[i];
            const double w2 = geo.pump_center - 0.5 * deltas[i];
            vals[i] = chi3_timeordered(sys, greens, w1, -w2, geo.w3);
        });
        return vals;
    };

    const std::vector<cplx> reference = slice_for(0.0);

    // Single-photon prefactor of the resonant channel, divided out so the fit
    // sees the two-photon bracket alone.
    std::vector<cplx> prefactor(geo.points);
    double ref_scale = 0.0;
    for (int i = 0; i < geo.points; ++i) {
        const double w1 = geo.pump_center + 0.5 * deltas[i];
        const double w2 = geo.pump_center - 0.5 * deltas[i];
        const double ws = w1 - w2 + geo.w3;
        prefactor[i] = cplx(1.0, 0.0) / cplx(-ws - w_ba, g_bb) / cplx(w1 - w_ba, g_bb) /
                       cplx(-w2 + w_da, g_dd);
        ref_scale = std::max(ref_scale, std::abs(reference[i] / prefactor[i]));
    }

    for (double eta : etas) {
        StudyRow row;
        row.eta = eta;
        const std::vector<cplx> vals = slice_for(eta);
        std::vector<cplx> y(geo.points);
        double ymax = 0.0;
        for (int i = 0; i < geo.points; ++i) {
            y[i] = (vals[i] - reference[i]) / prefactor[i];
            ymax = std::max(ymax, std::abs(y[i]));
        }
        if (ymax < 1e-10 * std::max(ref_scale, 1e-300)) {
            row.fit.status = PeakFit::Status::no_peak;
        } else {
            row.fit = fit_lorentzian_peak(deltas, y);
            if (row.fit.status != PeakFit::Status::no_peak && row.fit.width < spacing)
                row.fit.status = PeakFit::Status::unresolved;
        }
        row.status = to_string(row.fit.status);
        study.rows.push_back(row);
    }

    // Regression of fitted width against (1 - eta) over the clean rows.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int m = 0;
    for (const auto& row : study.rows) {
        if (row.fit.status != PeakFit::Status::ok) continue;
        const double xv = 1.0 - row.eta, yv = row.fit.width;
        sx += xv;
        sy += yv;
        sxx += xv * xv;
        sxy += xv * yv;
        syy += yv * yv;
        ++m;
    }
    if (m >= 2) {
        const double det = m * sxx - sx * sx;
        if (std::abs(det) > 1e-300) {
            study.slope = (m * sxy - sx * sy) / det;
            study.intercept = (sy - study.slope * sx) / m;
            const double ss_tot = syy - sy * sy / m;
            double ss_res = 0.0;
            for (const auto& row : study.rows) {
                if (row.fit.status != PeakFit::Status::ok) continue;
                const double pred = study.slope * (1.0 - row.eta) + study.intercept;
                ss_res += (row.fit.width - pred) * (row.fit.width - pred);
            }
            study.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
        }
    }
    return study;
}

} // namespace loopchi
