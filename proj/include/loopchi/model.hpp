// model.hpp — multilevel system, bath parameters and derived dephasing rates.
//
// Units: hbar = 1. Energies, rates and temperatures all share one angular
// frequency unit. Only transition frequencies eps_i - eps_j enter any
// evaluation, so an overall shift of the level energies is unobservable.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "loopchi/errors.hpp"

namespace loopchi {

using cplx = std::complex<double>;

struct Level {
    std::string label;
    double energy{0.0};
};

struct SystemSpec {
    std::vector<Level> levels;
    Eigen::MatrixXcd dipole;        // Hermitian
    Eigen::VectorXd populations;    // nonnegative, sums to 1

    int size() const { return static_cast<int>(levels.size()); }

    int index_of(const std::string& label) const {
        for (int i = 0; i < size(); ++i)
            if (levels[i].label == label) return i;
        return -1;
    }

    // omega_{ij} = eps_i - eps_j
    double transition(int i, int j) const { return levels[i].energy - levels[j].energy; }

    void validate() const {
        const int n = size();
        if (n == 0) throw ConfigError("system has no levels");
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (levels[i].label == levels[j].label)
                    throw ConfigError("duplicate level label '" + levels[i].label + "'");
        if (dipole.rows() != n || dipole.cols() != n)
            throw ConfigError("dipole matrix dimension does not match level count");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(dipole(i, j) - std::conj(dipole(j, i))) > 1e-12)
                    throw ConfigError("dipole not Hermitian at (" + levels[i].label + "," +
                                      levels[j].label + ")");
        if (populations.size() != n)
            throw ConfigError("populations list length does not match level count");
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            if (populations[i] < 0.0)
                throw ConfigError("population of '" + levels[i].label + "' is negative");
            sum += populations[i];
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ConfigError("populations sum != 1 (got " + std::to_string(sum) + ")");
    }
};

enum class BathMode { brownian, fast, slow };

inline std::string to_string(BathMode m) {
    switch (m) {
        case BathMode::brownian: return "brownian";
        case BathMode::fast: return "fast";
        case BathMode::slow: return "slow";
    }
    return "?";
}

struct BathSpec {
    BathMode mode{BathMode::fast};
    double kT{0.0};
    Eigen::MatrixXd lambda;       // coupling strengths, symmetric
    Eigen::MatrixXd big_lambda;   // inverse bath timescales, symmetric

    bool has_coupling() const { return lambda.size() > 0 && lambda.cwiseAbs().maxCoeff() > 0.0; }

    // eta_{ij} = lambda_{ij} / sqrt(lambda_ii lambda_jj); zero if a diagonal vanishes.
    double correlation(int i, int j) const {
        const double lii = lambda(i, i), ljj = lambda(j, j);
        if (lii <= 0.0 || ljj <= 0.0) return 0.0;
        return lambda(i, j) / std::sqrt(lii * ljj);
    }

    void validate(int n) const {
        if (kT < 0.0) throw ConfigError("kT must be nonnegative");
        if (lambda.rows() != n || lambda.cols() != n || big_lambda.rows() != n ||
            big_lambda.cols() != n)
            throw ConfigError("bath matrices do not match level count");
        for (int i = 0; i < n; ++i) {
            if (lambda(i, i) < 0.0) throw ConfigError("diagonal lambda must be nonnegative");
            for (int j = 0; j < n; ++j) {
                if (std::abs(lambda(i, j) - lambda(j, i)) > 1e-12)
                    throw ConfigError("lambda matrix not symmetric");
                if (lambda(i, j) != 0.0 && big_lambda(i, j) <= 0.0)
                    throw ConfigError("big_lambda must be positive wherever lambda is nonzero");
                if (i != j) {
                    const double bound = std::sqrt(lambda(i, i) * lambda(j, j));
                    if (std::abs(lambda(i, j)) > bound + 1e-12)
                        throw ConfigError("correlation coefficient > 1 for pair (" +
                                          std::to_string(i) + "," + std::to_string(j) + ")");
                }
            }
        }
    }
};

struct FieldSignature {
    std::vector<double> inputs;   // omega_1 ... omega_n, signed

    int order() const { return static_cast<int>(inputs.size()); }
    double signal() const {
        double s = 0.0;
        for (double w : inputs) s += w;
        return s;
    }
};

// Motional-narrowing rates Gamma_{ij} = 2 lambda_{ij} kT / Lambda_{ij}, zero where
// lambda vanishes.
inline Eigen::MatrixXd fast_rates(const BathSpec& bath) {
    const auto n = bath.lambda.rows();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (bath.lambda(i, j) == 0.0) continue;
            if (bath.big_lambda(i, j) == 0.0)
                throw ConfigError("division by zero: big_lambda = 0 with lambda != 0");
            g(i, j) = 2.0 * bath.lambda(i, j) * bath.kT / bath.big_lambda(i, j);
        }
    return g;
}

// Dephasing rate of the (i,j) coherence in the fast limit:
//   Gamma_ii + Gamma_jj - 2 * eta_ij (Gamma_ii + Gamma_jj)/2 = (Gamma_ii+Gamma_jj)(1-eta_ij).
// A level's fluctuations are fully correlated with themselves, so populations
// (i == j) carry no pure dephasing.
inline double coherence_dephasing(const Eigen::MatrixXd& gamma, const BathSpec& bath, int i,
                                  int j) {
    const double sum = gamma(i, i) + gamma(j, j);
    const double eta = (i == j) ? 1.0 : bath.correlation(i, j);
    return sum * (1.0 - eta);
}

// Full matrix of coherence dephasing rates.
inline Eigen::MatrixXd dephasing_matrix(const BathSpec& bath) {
    const Eigen::MatrixXd gamma = fast_rates(bath);
    const auto n = gamma.rows();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = coherence_dephasing(gamma, bath, static_cast<int>(i), static_cast<int>(j));
    return out;
}

struct QuadratureConfig {
    double t_max{0.0};            // 0 = choose automatically from the damping envelope
    int points_per_axis{64};      // rounded up to a whole number of panels
    int refinement_factor{2};
    double rel_tol{1e-4};
    double damping_floor{1e-8};   // truncation criterion eps_cut
    double eta_damping{0.05};     // uniform artificial damping rate (0 disables)

    void validate() const {
        if (t_max < 0.0) throw ConfigError("t_max must be positive (or 0 for automatic)");
        if (points_per_axis < 16) throw ConfigError("points_per_axis must be >= 16");
        if (refinement_factor < 2) throw ConfigError("refinement_factor must be >= 2");
        if (rel_tol <= 0.0) throw ConfigError("rel_tol must be positive");
        if (damping_floor <= 0.0) throw ConfigError("damping_floor must be positive");
        if (eta_damping < 0.0) throw ConfigError("eta_damping must be nonnegative");
    }
};

struct ModelConfig {
    SystemSpec system;
    BathSpec bath;
    QuadratureConfig quad;
    double eta_reg{1e-6};
};

// Parses the documented config text. Unknown sections or keys are errors,
// reported with their line number.
ModelConfig load_config(const std::string& text);

inline std::pair<SystemSpec, BathSpec> load_model(const std::string& text) {
    ModelConfig c = load_config(text);
    return {std::move(c.system), std::move(c.bath)};
}

} // namespace loopchi
