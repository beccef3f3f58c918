// quadrature.hpp — composite Gauss-Legendre axes for the triple time
// integrals. Equal-width panels, eight nodes per panel.

#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace loopchi {

inline constexpr int kPanelNodes = 8;

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 4> kGl8X{0.1834346424956498, 0.5255324099163290,
                                             0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGl8W{0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};

struct QuadratureAxis {
    std::vector<double> x, w;

    int size() const { return static_cast<int>(x.size()); }
};

// Composite rule on [0, t_max] with at least `points` nodes, rounded up to a
// whole number of panels.
inline QuadratureAxis make_axis(double t_max, int points) {
    const int panels = (points + kPanelNodes - 1) / kPanelNodes;
    QuadratureAxis axis;
    axis.x.reserve(panels * kPanelNodes);
    axis.w.reserve(panels * kPanelNodes);
    const double h = t_max / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int k = kGl8X.size() - 1; k >= 0; --k) {
            axis.x.push_back(mid - 0.5 * h * kGl8X[k]);
            axis.w.push_back(0.5 * h * kGl8W[k]);
        }
        for (std::size_t k = 0; k < kGl8X.size(); ++k) {
            axis.x.push_back(mid + 0.5 * h * kGl8X[k]);
            axis.w.push_back(0.5 * h * kGl8W[k]);
        }
    }
    return axis;
}

} // namespace loopchi
