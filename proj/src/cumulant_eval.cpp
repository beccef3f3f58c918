#include "loopchi/cumulant_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "loopchi/parallel.hpp"
#include "loopchi/quadrature.hpp"

namespace loopchi {

namespace {

constexpr double kPrefactorNorm = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
constexpr cplx kMinusI{0.0, -1.0};

using Coeffs = std::array<std::array<int8_t, 3>, 4>;   // [slot tau4..tau1][axis]

// Interaction-time patterns of the loop expansion, one per placement of the
// signal vertex. Slot order is (tau4, tau3, tau2, tau1).
constexpr std::array<Coeffs, 4> kLoopPatterns{{
    {{{1, 1, 1}, {1, 1, 0}, {1, 0, 0}, {0, 0, 0}}},
    {{{1, 1, -1}, {1, 1, 0}, {1, 0, 0}, {0, 0, 0}}},
    {{{1, -1, -1}, {1, -1, 0}, {1, 0, 0}, {0, 0, 0}}},
    {{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}}},
}};

// Time-ordered correlation patterns; the conjugate partners are obtained by
// reversing the slot order and flipping the sign (F* reversal symmetry).
constexpr std::array<Coeffs, 4> kTimeOrderedPatterns{{
    {{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {0, 0, 0}}},
    {{{0, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 0}}},
    {{{0, 0, 0}, {1, 0, 0}, {1, 1, 1}, {1, 1, 0}}},
    {{{1, 1, 1}, {1, 1, 0}, {1, 0, 0}, {0, 0, 0}}},
}};

Coeffs reversed(const Coeffs& c) {
    return Coeffs{c[3], c[2], c[1], c[0]};
}

struct Pattern {
    int sign{+1};
    Coeffs c{};
    // Per-axis field phase rate for each input permutation (filled per call).
    std::array<std::array<double, 3>, 6> field_rate{};
    // Some patterns are slot reversals of an earlier one (up to a time shift
    // and possibly an axis swap): F(derived @ x) = -conj(F(partner @ swap x)).
    // Those are folded into the partner's sweep instead of being integrated
    // on their own.
    int derived_from{-1};
    bool axis_swap{false};
};

struct Quadruple {
    int d, c, b, a;
    cplx dip;       // P(a) V_ad V_dc V_cb V_ba
};

std::vector<Quadruple> active_quadruples(const SystemSpec& sys) {
    std::vector<Quadruple> out;
    const int n = sys.size();
    for (int a = 0; a < n; ++a) {
        if (sys.populations[a] == 0.0) continue;
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const cplx dip = sys.dipole(a, d) * sys.dipole(d, c) * sys.dipole(c, b) *
                                     sys.dipole(b, a);
                    if (dip == 0.0) continue;
                    out.push_back({d, c, b, a, sys.populations[a] * dip});
                }
    }
    return out;
}

std::array<std::array<double, 3>, 6> input_permutations(double w1, double w2, double w3) {
    return {{{w1, w2, w3},
             {w1, w3, w2},
             {w2, w1, w3},
             {w2, w3, w1},
             {w3, w1, w2},
             {w3, w2, w1}}};
}

std::vector<Pattern> build_patterns(terms::Expansion expansion, double w1, double w2,
                                    double w3) {
    std::vector<Pattern> out;
    const auto perms = input_permutations(w1, w2, w3);
    if (expansion == terms::Expansion::loop) {
        const auto base = terms::loop_terms(3);
        for (int k = 0; k < 4; ++k) {
            Pattern p;
            p.sign = base[k].sign;
            p.c = kLoopPatterns[k];
            for (int ip = 0; ip < 6; ++ip) {
                const std::vector<double> in{perms[ip][0], perms[ip][1], perms[ip][2]};
                for (int ax = 0; ax < 3; ++ax) {
                    const auto& prop = base[k].chain[ax];
                    const double arg = prop.freq.value(in);
                    // retarded intervals transform with exp(+i arg s),
                    // advanced ones with exp(-i arg s)
                    p.field_rate[ip][ax] =
                        (prop.kind == terms::PropKind::retarded) ? arg : -arg;
                }
            }
            out.push_back(p);
        }
        // reversing the interaction order maps the last placement onto the
        // first and the third onto the second, with s1 and s3 exchanged
        out[3].derived_from = 0;
        out[3].axis_swap = true;
        out[2].derived_from = 1;
        out[2].axis_swap = true;
    } else {
        for (int k = 0; k < 8; ++k) {
            Pattern p;
            p.sign = (k < 4) ? +1 : -1;
            p.c = (k < 4) ? kTimeOrderedPatterns[k] : reversed(kTimeOrderedPatterns[k - 4]);
            if (k >= 4) p.derived_from = k - 4;
            for (int ip = 0; ip < 6; ++ip) {
                p.field_rate[ip][0] = perms[ip][0];
                p.field_rate[ip][1] = perms[ip][0] + perms[ip][1];
                p.field_rate[ip][2] = perms[ip][0] + perms[ip][1] + perms[ip][2];
            }
            out.push_back(p);
        }
    }
    return out;
}

// f-entry resolved against a pattern: which axes the g argument spans.
struct ResolvedEntry {
    int pair_i, pair_j;
    double sign;
    std::array<int8_t, 3> d;   // per-axis coefficient of the time difference
    int active_axes;
};

std::vector<ResolvedEntry> resolve_entries(const Pattern& p, const Quadruple& q,
                                           const LineshapeKernel& kernel) {
    const std::array<int, 3> roles{q.d, q.c, q.b};
    std::vector<ResolvedEntry> out;
    for (const auto& e : kCumulantEntries) {
        ResolvedEntry r;
        r.pair_i = roles[e.row];
        r.pair_j = roles[e.col];
        r.sign = e.sign;
        r.active_axes = 0;
        bool any = false;
        for (int ax = 0; ax < 3; ++ax) {
            r.d[ax] = static_cast<int8_t>(p.c[e.j][ax] - p.c[e.k][ax]);
            if (r.d[ax] != 0) {
                ++r.active_axes;
                any = true;
            }
        }
        if (!any) continue;                                   // g(0) = 0
        if (!kernel.coupled(r.pair_i, r.pair_j)) continue;
        out.push_back(r);
    }
    return out;
}

double span_of(const Coeffs& c, double x1, double x2, double x3) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (int slot = 0; slot < 4; ++slot) {
        const double t = c[slot][0] * x1 + c[slot][1] * x2 + c[slot][2] * x3;
        if (first) {
            lo = hi = t;
            first = false;
        } else {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    return hi - lo;
}

// Largest value of Re f - eta*span over the nonzero corners of [0, T]^3,
// i.e. the log of the damping envelope at the truncation boundary.
double envelope_exponent(const std::vector<Pattern>& patterns,
                         const std::vector<Quadruple>& quads, const LineshapeKernel& kernel,
                         double eta, double T) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : patterns)
        for (const auto& q : quads) {
            const auto entries = resolve_entries(p, q, kernel);
            for (int corner = 1; corner < 8; ++corner) {
                const double x1 = (corner & 1) ? T : 0.0;
                const double x2 = (corner & 2) ? T : 0.0;
                const double x3 = (corner & 4) ? T : 0.0;
                double re_f = 0.0;
                for (const auto& e : entries) {
                    const double arg = e.d[0] * x1 + e.d[1] * x2 + e.d[2] * x3;
                    re_f += e.sign * kernel.g(e.pair_i, e.pair_j, arg).real();
                }
                worst = std::max(worst, re_f - eta * span_of(p.c, x1, x2, x3));
            }
        }
    return worst;
}

// One full grid evaluation at a fixed resolution. Deterministic: per-chunk
// partial sums are combined in chunk order.
cplx evaluate_grid(const SystemSpec& sys, const LineshapeKernel& kernel,
                   const std::vector<Pattern>& patterns, const std::vector<Quadruple>& quads,
                   double eta, double t_max, int points, int threads) {
    const QuadratureAxis axis = make_axis(t_max, points);
    const int n = axis.size();

    // Field phase vectors per (pattern, perm, axis); shared by all quadruples.
    std::vector<std::array<std::array<std::vector<cplx>, 3>, 6>> field(patterns.size());
    for (size_t ip = 0; ip < patterns.size(); ++ip)
        for (int perm = 0; perm < 6; ++perm)
            for (int ax = 0; ax < 3; ++ax) {
                auto& v = field[ip][perm][ax];
                v.resize(n);
                const double rate = patterns[ip].field_rate[perm][ax];
                for (int i = 0; i < n; ++i) v[i] = std::polar(1.0, rate * axis.x[i]);
            }

    cplx total{0.0, 0.0};
    for (size_t ip = 0; ip < patterns.size(); ++ip) {
        const Pattern& pat = patterns[ip];
        if (pat.derived_from >= 0) continue;   // folded into its partner's sweep

        int drv = -1;
        for (size_t j = 0; j < patterns.size(); ++j)
            if (patterns[j].derived_from == static_cast<int>(ip)) drv = static_cast<int>(j);
        const bool swap = (drv >= 0) && patterns[drv].axis_swap;

        for (const auto& q : quads) {
            const auto entries = resolve_entries(pat, q, kernel);

            // Per-axis coherence phase rates from the state frequencies.
            const double wda = sys.transition(q.d, q.a);
            const double wca = sys.transition(q.c, q.a);
            const double wba = sys.transition(q.b, q.a);
            std::array<double, 3> srate{};
            for (int ax = 0; ax < 3; ++ax)
                srate[ax] = wda * (pat.c[0][ax] - pat.c[1][ax]) +
                            wca * (pat.c[1][ax] - pat.c[2][ax]) +
                            wba * (pat.c[2][ax] - pat.c[3][ax]);

            // Split the exponent by how many axes each g argument spans.
            std::array<std::vector<cplx>, 3> g1;
            for (auto& v : g1) v.assign(n, cplx{0.0, 0.0});
            std::vector<ResolvedEntry> two_axis, three_axis;
            for (const auto& e : entries) {
                if (e.active_axes == 1) {
                    for (int ax = 0; ax < 3; ++ax)
                        if (e.d[ax] != 0)
                            for (int i = 0; i < n; ++i)
                                g1[ax][i] +=
                                    e.sign * kernel.g(e.pair_i, e.pair_j, e.d[ax] * axis.x[i]);
                } else if (e.active_axes == 2) {
                    two_axis.push_back(e);
                } else {
                    three_axis.push_back(e);
                }
            }

            // Weights, one-axis g factors and coherence phases per axis.
            std::array<std::vector<cplx>, 3> u;
            for (int ax = 0; ax < 3; ++ax) {
                u[ax].resize(n);
                for (int i = 0; i < n; ++i) {
                    const cplx ex = g1[ax][i] - cplx(0.0, srate[ax] * axis.x[i]);
                    u[ax][i] = axis.w[i] * std::exp(ex);
                }
            }

            // Pairwise tables for the two-axis g arguments.
            std::array<std::vector<cplx>, 3> pair_tab;   // keyed (0,1), (1,2), (0,2)
            std::array<bool, 3> pair_used{false, false, false};
            auto pair_key = [](int a, int b) { return (a == 0 && b == 1) ? 0 : (a == 1 ? 1 : 2); };
            for (const auto& e : two_axis) {
                int a1 = -1, a2 = -1;
                for (int ax = 0; ax < 3; ++ax)
                    if (e.d[ax] != 0) (a1 < 0 ? a1 : a2) = ax;
                const int key = pair_key(a1, a2);
                if (!pair_used[key]) {
                    pair_tab[key].assign(size_t(n) * n, cplx{0.0, 0.0});
                    pair_used[key] = true;
                }
                auto& tab = pair_tab[key];
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        tab[size_t(i) * n + j] += e.sign * kernel.g(e.pair_i, e.pair_j,
                                                                    e.d[a1] * axis.x[i] +
                                                                        e.d[a2] * axis.x[j]);
            }

            const cplx coeff_fwd = double(pat.sign) * kMinusI * q.dip;
            // F(derived @ x) = -conj(F(this @ swap x)); with the derived sign
            // folded in, the conjugate stream carries +i and conj(dip).
            const cplx coeff_drv = (drv >= 0) ? cplx(0.0, 1.0) *
                                                    double(-patterns[drv].sign) *
                                                    std::conj(q.dip)
                                              : cplx{0.0, 0.0};
            const auto& fld = field[ip];

            std::vector<std::array<cplx, 12>> slots(static_cast<std::size_t>(n));
            parallel_chunks(threads, size_t(n), [&](size_t i3) {
                std::array<cplx, 12> acc{};
                const double x3 = axis.x[i3];
                std::array<cplx, 6> f3, d3;
                for (int perm = 0; perm < 6; ++perm) {
                    f3[perm] = fld[perm][2][i3];
                    if (drv >= 0)
                        d3[perm] = field[drv][perm][swap ? 0 : 2][i3];
                }
                for (int i2 = 0; i2 < n; ++i2) {
                    const double x2 = axis.x[i2];
                    cplx base23 = u[1][i2] * u[2][i3];
                    if (pair_used[1]) base23 *= std::exp(pair_tab[1][size_t(i2) * n + i3]);
                    std::array<cplx, 6> f23, d23;
                    for (int perm = 0; perm < 6; ++perm) {
                        f23[perm] = f3[perm] * fld[perm][1][i2];
                        if (drv >= 0) d23[perm] = d3[perm] * field[drv][perm][1][i2];
                    }
                    for (int i1 = 0; i1 < n; ++i1) {
                        const double x1 = axis.x[i1];
                        cplx ex{0.0, 0.0};
                        if (pair_used[0]) ex += pair_tab[0][size_t(i1) * n + i2];
                        if (pair_used[2]) ex += pair_tab[2][size_t(i1) * n + i3];
                        for (const auto& e : three_axis)
                            ex += e.sign *
                                  kernel.g(e.pair_i, e.pair_j,
                                           e.d[0] * x1 + e.d[1] * x2 + e.d[2] * x3);
                        ex -= eta * span_of(pat.c, x1, x2, x3);
                        const cplx node = std::exp(ex) * u[0][i1] * base23;
                        for (int perm = 0; perm < 6; ++perm)
                            acc[perm] += node * fld[perm][0][i1] * f23[perm];
                        if (drv >= 0) {
                            const cplx conj_node = std::conj(node);
                            for (int perm = 0; perm < 6; ++perm)
                                acc[6 + perm] += conj_node *
                                                 field[drv][perm][swap ? 2 : 0][i1] *
                                                 d23[perm];
                        }
                    }
                }
                slots[i3] = acc;
            });

            std::array<cplx, 12> sums{};
            for (const auto& s : slots)
                for (int k = 0; k < 12; ++k) sums[k] += s[k];
            for (int perm = 0; perm < 6; ++perm) {
                total += coeff_fwd * sums[perm];
                if (drv >= 0) total += coeff_drv * sums[6 + perm];
            }
        }
    }
    return kPrefactorNorm * total;
}

} // namespace

Chi3Result chi3_integral(const SystemSpec& sys, const LineshapeKernel& kernel,
                         terms::Expansion expansion, double w1, double w2, double w3,
                         const QuadratureConfig& quad, int threads) {
    quad.validate();
    const auto patterns = build_patterns(expansion, w1, w2, w3);
    const auto quads = active_quadruples(sys);

    Chi3Result out;
    if (quads.empty()) {
        out.converged = true;
        out.t_max = quad.t_max > 0.0 ? quad.t_max : 0.0;
        out.points_per_axis = quad.points_per_axis;
        return out;
    }

    const double eta = quad.eta_damping;
    const double floor_log = std::log(quad.damping_floor);
    double t_max = quad.t_max;
    if (t_max > 0.0) {
        if (envelope_exponent(patterns, quads, kernel, eta, t_max) > floor_log)
            throw NonConvergentError(
                "non-convergent: damping envelope exceeds the truncation floor at t_max = " +
                std::to_string(t_max) + "; increase t_max or eta_damping");
    } else {
        t_max = 1.0;
        bool ok = false;
        for (int k = 0; k < 40; ++k) {
            if (envelope_exponent(patterns, quads, kernel, eta, t_max) <= floor_log) {
                ok = true;
                break;
            }
            t_max *= 2.0;
        }
        if (!ok)
            throw NonConvergentError(
                "non-convergent: no t_max reaches the truncation floor; the integrand is "
                "undamped (set eta_damping > 0)");
        // shrink back toward the smallest sufficient T
        double lo = t_max / 2.0, hi = t_max;
        for (int k = 0; k < 24; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (envelope_exponent(patterns, quads, kernel, eta, mid) <= floor_log) hi = mid;
            else lo = mid;
        }
        t_max = hi;
    }

    const cplx coarse =
        evaluate_grid(sys, kernel, patterns, quads, eta, t_max, quad.points_per_axis, threads);
    const cplx fine = evaluate_grid(sys, kernel, patterns, quads, eta, t_max,
                                    quad.points_per_axis * quad.refinement_factor, threads);

    out.value = fine;
    const double scale = std::max(std::abs(fine), 1e-300);
    out.error_estimate = std::abs(fine - coarse) / scale;
    out.converged = out.error_estimate < quad.rel_tol;
    out.t_max = t_max;
    out.points_per_axis = quad.points_per_axis * quad.refinement_factor;
    return out;
}

double response_S3(const SystemSpec& sys, const LineshapeKernel& kernel, double t3, double t2,
                   double t1) {
    if (t1 < 0.0 || t2 < 0.0 || t3 < 0.0) return 0.0;
    const double T = t1 + t2 + t3;
    const cplx sum = four_point_F(sys, kernel, t1, t1 + t2, T, 0.0) +
                     four_point_F(sys, kernel, 0.0, t1 + t2, T, t1) +
                     four_point_F(sys, kernel, 0.0, t1, T, t1 + t2) +
                     four_point_F(sys, kernel, T, t1 + t2, t1, 0.0);
    return 2.0 * sum.real();
}

void check_transform_bandwidth(const SystemSpec& sys, const Eigen::MatrixXd& widths,
                               double eta_reg, double half_bandwidth) {
    const int n = sys.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (sys.dipole(i, j) == 0.0) continue;
            const double need = 4.0 * (std::abs(sys.transition(i, j)) + widths(i, j) + eta_reg);
            if (half_bandwidth < need)
                throw NonConvergentError(
                    "transform bandwidth " + std::to_string(half_bandwidth) +
                    " is below 4x the resonance scale " + std::to_string(need / 4.0) +
                    " of transition (" + sys.levels[i].label + "," + sys.levels[j].label + ")");
        }
}

std::vector<double> s3_from_chi3(const std::function<cplx(double, double, double)>& chi3,
                                 const TransformConfig& cfg, const std::vector<double>& t1,
                                 const std::vector<double>& t2, const std::vector<double>& t3,
                                 int threads) {
    const int N = cfg.points_per_axis;
    const double W = cfg.half_bandwidth;
    const double dw = 2.0 * W / N;
    std::vector<double> omega(N), win(N);
    const double flat = W * (1.0 - cfg.taper_fraction);
    for (int i = 0; i < N; ++i) {
        omega[i] = -W + (i + 0.5) * dw;
        const double a = std::abs(omega[i]);
        win[i] = (a <= flat) ? 1.0
                             : 0.5 * (1.0 + std::cos(std::numbers::pi * (a - flat) /
                                                     (W - flat)));
    }

    const int n1 = static_cast<int>(t1.size());
    const int n2 = static_cast<int>(t2.size());
    const int n3 = static_cast<int>(t3.size());

    // Stage 1: contract the w3 axis for every t3 sample.
    std::vector<std::vector<cplx>> stage1(n3, std::vector<cplx>(size_t(N) * N));
    parallel_chunks(threads, size_t(N), [&](size_t i1) {
        std::vector<cplx> row(N);
        for (int i2 = 0; i2 < N; ++i2) {
            for (int i3 = 0; i3 < N; ++i3)
                row[i3] = win[i3] * chi3(omega[i1], omega[i2], omega[i3]);
            for (int k3 = 0; k3 < n3; ++k3) {
                cplx acc{0.0, 0.0};
                for (int i3 = 0; i3 < N; ++i3)
                    acc += row[i3] * std::polar(1.0, -omega[i3] * t3[k3]);
                stage1[k3][i1 * size_t(N) + i2] = acc;
            }
        }
    });

    // Stage 2: contract w2 for every (t2, t3); stage 3: contract w1.
    std::vector<double> out(size_t(n1) * n2 * n3);
    const double norm = dw * dw * dw / (2.0 * std::numbers::pi);
    for (int k3 = 0; k3 < n3; ++k3) {
        for (int k2 = 0; k2 < n2; ++k2) {
            std::vector<cplx> col(N, cplx{0.0, 0.0});
            const double tt = t2[k2] + t3[k3];
            for (int i1 = 0; i1 < N; ++i1) {
                cplx acc{0.0, 0.0};
                const cplx* base = stage1[k3].data() + i1 * size_t(N);
                for (int i2 = 0; i2 < N; ++i2)
                    acc += win[i2] * base[i2] * std::polar(1.0, -omega[i2] * tt);
                col[i1] = acc;
            }
            for (int k1 = 0; k1 < n1; ++k1) {
                const double ts = t1[k1] + t2[k2] + t3[k3];
                cplx acc{0.0, 0.0};
                for (int i1 = 0; i1 < N; ++i1)
                    acc += win[i1] * col[i1] * std::polar(1.0, -omega[i1] * ts);
                out[(size_t(k1) * n2 + k2) * n3 + k3] = (norm * acc).real();
            }
        }
    }
    return out;
}

} // namespace loopchi
