// fixtures.hpp — shared model builders for the test suites.

#pragma once

#include <string>

#include "loopchi/model.hpp"

namespace fixtures {

// Isolated two-level system, transition frequency w_eg.
inline loopchi::SystemSpec two_level(double w_eg = 1.7, double mu = 1.0) {
    loopchi::SystemSpec sys;
    sys.levels = {{"g", 0.0}, {"e", w_eg}};
    sys.dipole = Eigen::MatrixXcd::Zero(2, 2);
    sys.dipole(0, 1) = mu;
    sys.dipole(1, 0) = mu;
    sys.populations = Eigen::VectorXd::Zero(2);
    sys.populations[0] = 1.0;
    return sys;
}

// Ground state plus two dipole-coupled excited levels, V_bd = 0.
inline loopchi::SystemSpec three_level(double e_b = 2.3, double e_d = 1.5) {
    loopchi::SystemSpec sys;
    sys.levels = {{"a", 0.0}, {"b", e_b}, {"d", e_d}};
    sys.dipole = Eigen::MatrixXcd::Zero(3, 3);
    sys.dipole(0, 1) = sys.dipole(1, 0) = 1.0;
    sys.dipole(0, 2) = sys.dipole(2, 0) = 1.0;
    sys.populations = Eigen::VectorXd::Zero(3);
    sys.populations[0] = 1.0;
    return sys;
}

inline loopchi::BathSpec no_bath(int n) {
    loopchi::BathSpec bath;
    bath.mode = loopchi::BathMode::fast;
    bath.kT = 0.0;
    bath.lambda = Eigen::MatrixXd::Zero(n, n);
    bath.big_lambda = Eigen::MatrixXd::Ones(n, n);
    return bath;
}

// Fast bath on levels b and d with Gamma_bb = Gamma_dd = 2*lam*kT/Lam and
// cross coupling eta * lam.
inline loopchi::BathSpec fast_bath_bd(double lam, double kT, double eta) {
    loopchi::BathSpec bath;
    bath.mode = loopchi::BathMode::fast;
    bath.kT = kT;
    bath.lambda = Eigen::MatrixXd::Zero(3, 3);
    bath.big_lambda = Eigen::MatrixXd::Ones(3, 3);
    bath.lambda(1, 1) = bath.lambda(2, 2) = lam;
    bath.lambda(1, 2) = bath.lambda(2, 1) = eta * lam;
    return bath;
}

// Brownian bath on levels b and d.
inline loopchi::BathSpec brownian_bath_bd(double lam, double big_lam, double kT, double eta) {
    loopchi::BathSpec bath;
    bath.mode = loopchi::BathMode::brownian;
    bath.kT = kT;
    bath.lambda = Eigen::MatrixXd::Zero(3, 3);
    bath.big_lambda = Eigen::MatrixXd::Constant(3, 3, big_lam);
    bath.lambda(1, 1) = bath.lambda(2, 2) = lam;
    bath.lambda(1, 2) = bath.lambda(2, 1) = eta * lam;
    return bath;
}

inline const char* kThreeLevelConfig = R"(
# three-level model: ground state a, excited b and d
[system]
a = 0.0
b = 2.3
d = 1.5
dipole = (a, b, 1, 0), (a, d, 1, 0)
populations = 1, 0, 0

[bath]
mode = fast
kT = 0.5
lambda = (b, b, 0.1), (d, d, 0.1), (b, d, 0.05)
big_lambda = (b, b, 1), (d, d, 1), (b, d, 1)
)";

} // namespace fixtures
