// spectra.hpp — frequency-map scans, complex Lorentzian peak fitting and the
// correlation-induced-resonance study.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "loopchi/model.hpp"

namespace loopchi {

using Chi3Fn = std::function<cplx(double, double, double)>;

struct AxisSpec {
    double min{0.0}, max{1.0};
    int count{1};

    double at(int i) const {
        if (count <= 1) return min;
        return min + (max - min) * double(i) / double(count - 1);
    }
    std::vector<double> values() const {
        std::vector<double> v(count);
        for (int i = 0; i < count; ++i) v[i] = at(i);
        return v;
    }
    void validate() const {
        if (count < 1) throw ConfigError("axis count must be >= 1");
        if (count > 1 && max <= min) throw ConfigError("axis max must exceed min");
    }
};

struct SpectrumGrid {
    AxisSpec axis1, axis2;    // omega_1 rows, omega_2 columns
    double w3{0.0};
    Eigen::MatrixXcd values;
    std::string evaluator_id;
    std::uint64_t model_hash{0};
    std::string timestamp;
    std::vector<std::pair<int, int>> failed_cells;
};

// values(i, j) = chi3(axis1[i], axis2[j], w3). Rows are computed in parallel;
// failed cells are recorded (value NaN) instead of aborting the scan.
SpectrumGrid scan2d(const Chi3Fn& chi3, const std::string& evaluator_id, AxisSpec axis1,
                    AxisSpec axis2, double w3, int threads = 1);

struct PeakFit {
    enum class Status { ok, no_peak, not_converged, unresolved };
    Status status{Status::ok};
    double center{0.0};
    double width{0.0};          // HWHM of the fitted complex Lorentzian
    cplx amplitude{0.0, 0.0};
    cplx baseline{0.0, 0.0};
    double residual{0.0};
    int iterations{0};
};

inline std::string to_string(PeakFit::Status s) {
    switch (s) {
        case PeakFit::Status::ok: return "ok";
        case PeakFit::Status::no_peak: return "no_peak";
        case PeakFit::Status::not_converged: return "not_converged";
        case PeakFit::Status::unresolved: return "unresolved";
    }
    return "?";
}

// Least-squares fit of A/(x - x0 + i*gamma) + B to complex samples:
// grid-search initialization of (x0, gamma) with the linear pair (A, B)
// projected out, then damped Gauss-Newton refinement to relative step 1e-10
// or 200 iterations.
PeakFit fit_lorentzian_peak(const std::vector<double>& x, const std::vector<cplx>& y);

struct StudyGeometry {
    double pump_center{0.0};   // (w1 + w2)/2 of the scanned pair
    double w3{0.0};
    double delta_min{0.0}, delta_max{0.0};
    int points{161};
};

struct StudyRow {
    double eta{0.0};
    PeakFit fit;
    std::string status;
};

struct ResonanceStudy {
    std::vector<StudyRow> rows;
    double slope{0.0};        // width vs (1 - eta)
    double intercept{0.0};
    double r2{0.0};
    double width_scale{0.0};  // Gamma_bb + Gamma_dd of the model family
    double w_bd{0.0};
};

// Roles of the three-level topology: ground state and the two dipole-coupled
// excited levels. Throws when the topology does not match.
struct ThreeLevelRoles {
    int a, b, d;
};
ThreeLevelRoles identify_three_level(const SystemSpec& sys);

// Sensible slice geometry for the model: pump centered between the two
// excited transitions, window of +-3 width scales around w_bd.
StudyGeometry default_geometry(const SystemSpec& sys, const BathSpec& bath);

// For each eta: rebuild the bath with lambda_bd = eta * sqrt(lambda_bb
// lambda_dd), scan chi3(w1, -w2, w3) with the time-ordered Lorentzian
// evaluator along delta = w1 - w2, subtract the eta = 0 reference, divide out
// the single-photon prefactor and fit. The eta-independent pathways cancel in
// the difference, which isolates the two-photon bracket.
ResonanceStudy resonance_width_study(const SystemSpec& sys, const BathSpec& base,
                                     const std::vector<double>& etas, const StudyGeometry& geo,
                                     double eta_reg = 1e-6, int threads = 1);

} // namespace loopchi
