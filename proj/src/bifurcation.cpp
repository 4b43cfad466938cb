#include "rollmono/bifurcation.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/roots.hpp>
#include <cstdint>
#include <limits>
#include <thread>

#include "rollmono/errors.hpp"
#include "rollmono/smooth_model.hpp"
#include "rollmono/torus.hpp"

namespace rollmono {

namespace {

constexpr int kScanSamples = 400;
constexpr double kScanEdge = 1e-4;
constexpr double kMergeDistance = 1e-7;

double rough_slope(const RollingSystem& sys, double g3, double j1, double j2, double step) {
    const auto e = [&](double x) { return section_energy(sys, x, j1, j2); };
    return (e(g3 - 2 * step) - 8 * e(g3 - step) + 8 * e(g3 + step) - e(g3 + 2 * step)) /
           (12 * step);
}

unsigned worker_count(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

double section_energy_slope(const RollingSystem& sys, double gamma3, double j1, double j2) {
    if (sys.model() == Model::Smooth)
        return reduced_energy_slope_smooth(gamma3, j2, j1, sys.params());
    return rough_slope(sys, gamma3, j1, j2, kSlopeStep);
}

std::vector<PrecessionPoint> precession_points(const RollingSystem& sys, double j1, double j2) {
    const double lo = -1.0 + kScanEdge;
    const double hi = 1.0 - kScanEdge;
    const auto f = [&](double g3) { return section_energy_slope(sys, g3, j1, j2); };

    std::vector<double> xs(kScanSamples);
    std::vector<double> fs(kScanSamples);
    for (int i = 0; i < kScanSamples; ++i) {
        xs[i] = lo + (hi - lo) * i / (kScanSamples - 1);
        fs[i] = f(xs[i]);
    }
    std::vector<double> roots;
    for (int i = 0; i + 1 < kScanSamples; ++i) {
        if (fs[i] == 0.0) {
            roots.push_back(xs[i]);
            continue;
        }
        if ((fs[i] < 0.0) == (fs[i + 1] < 0.0) || fs[i + 1] == 0.0) continue;
        std::uintmax_t iters = 200;
        const auto br = boost::math::tools::toms748_solve(
            f, xs[i], xs[i + 1], fs[i], fs[i + 1],
            boost::math::tools::eps_tolerance<double>(52), iters);
        roots.push_back(std::abs(f(br.first)) <= std::abs(f(br.second)) ? br.first : br.second);
    }
    if (fs.back() == 0.0) roots.push_back(xs.back());

    std::vector<PrecessionPoint> out;
    for (double g3 : roots) {
        if (!out.empty() && std::abs(out.back().gamma3 - g3) < kMergeDistance) continue;
        const double h = sys.model() == Model::Smooth
                             ? reduced_energy_smooth(g3, 0.0, j2, j1, sys.params())
                             : section_energy(sys, g3, j1, j2);
        double residual = std::abs(f(g3));
        // Richardson check: the halved-step slope must vanish as well.
        if (sys.model() == Model::Rough)
            residual = std::max(residual,
                                std::abs(rough_slope(sys, g3, j1, j2, 0.5 * kSlopeStep)));
        out.push_back({g3, h, residual});
    }
    return out;
}

VerticalCurvePoint vertical_rotation(const RollingSystem& sys, Pole pole, double spin) {
    const BodyParams& p = sys.params();
    const double sign = pole == Pole::Upper ? 1.0 : -1.0;
    if (sys.model() == Model::Smooth) {
        // Closed form: h = m g b3 + p_phi^2 / (2 I3), p_psi = +-p_phi.
        return {spin, sign * spin, spin, p.m * p.g * p.b3 + spin * spin / (2.0 * p.I3)};
    }
    const BodyState s{{0.0, 0.0, spin}, {0.0, 0.0, sign}};
    const RoughIntegrals c = integrals_rough(s, p, 1e-12);
    return {spin, c.c1, c.c2, energy_rough(s, p)};
}

std::array<std::vector<VerticalCurvePoint>, 2> vertical_curves(const RollingSystem& sys,
                                                               double spin_lo, double spin_hi,
                                                               int n) {
    if (n < 2) throw ConfigError("vertical curves need at least two samples");
    std::array<std::vector<VerticalCurvePoint>, 2> out;
    for (int i = 0; i < n; ++i) {
        const double spin = spin_lo + (spin_hi - spin_lo) * i / (n - 1);
        out[0].push_back(vertical_rotation(sys, Pole::Upper, spin));
        out[1].push_back(vertical_rotation(sys, Pole::Lower, spin));
    }
    return out;
}

void GridSpec::validate() const {
    if (j1_n < 2 || j2_n < 2) throw ConfigError("grid resolution must be at least 2 per axis");
    if (spin_n < 2) throw ConfigError("spin resolution must be at least 2");
    if (!(j1_hi > j1_lo) || !(j2_hi > j2_lo) || !(spin_hi > spin_lo))
        throw ConfigError("grid ranges must be increasing");
}

BifurcationDiagram build_diagram(const RollingSystem& sys, const GridSpec& grid,
                                 unsigned threads) {
    grid.validate();
    BifurcationDiagram d;
    d.model = sys.model();
    std::vector<std::vector<SurfaceSample>> rows(grid.j1_n);
    std::atomic<int> next{0};
    const auto work = [&] {
        for (int i = next++; i < grid.j1_n; i = next++) {
            const double j1 = grid.j1_lo + (grid.j1_hi - grid.j1_lo) * i / (grid.j1_n - 1);
            for (int j = 0; j < grid.j2_n; ++j) {
                const double j2 = grid.j2_lo + (grid.j2_hi - grid.j2_lo) * j / (grid.j2_n - 1);
                for (const auto& pp : precession_points(sys, j1, j2))
                    rows[i].push_back({j1, j2, pp.gamma3, pp.h, pp.residual});
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::min<unsigned>(worker_count(threads), grid.j1_n);
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    }
    for (auto& r : rows) d.surface.insert(d.surface.end(), r.begin(), r.end());
    d.singular_curves = vertical_curves(sys, grid.spin_lo, grid.spin_hi, grid.spin_n);
    return d;
}

std::array<double, 2> thread_direction(const RollingSystem& sys, Pole pole) {
    const VerticalCurvePoint unit = vertical_rotation(sys, pole, 1.0);
    return {unit.j1, unit.j2};
}

std::array<double, 2> thread_in_plane(const RollingSystem& sys, Pole pole, FixedAxis axis,
                                      double plane_value) {
    const auto dir = thread_direction(sys, pole);
    const double fixed_component = axis == FixedAxis::J1Fixed ? dir[0] : dir[1];
    const double varying_component = axis == FixedAxis::J1Fixed ? dir[1] : dir[0];
    const double spin = plane_value / fixed_component;
    const BodyParams& p = sys.params();
    return {spin * varying_component, p.m * p.g * p.b3 + spin * spin / (2.0 * p.I3)};
}

DiagramSlice slice_diagram(const RollingSystem& sys, FixedAxis axis, double plane_value,
                           double varying_lo, double varying_hi, int n) {
    if (n < 2) throw ConfigError("slice needs at least two samples");
    DiagramSlice s;
    s.axis = axis;
    s.plane_value = plane_value;
    for (int i = 0; i < n; ++i) {
        const double v = varying_lo + (varying_hi - varying_lo) * i / (n - 1);
        const double j1 = axis == FixedAxis::J1Fixed ? plane_value : v;
        const double j2 = axis == FixedAxis::J1Fixed ? v : plane_value;
        std::vector<double> hs;
        for (const auto& pp : precession_points(sys, j1, j2)) hs.push_back(pp.h);
        std::sort(hs.begin(), hs.end());
        s.varying.push_back(v);
        s.surface_h.push_back(std::move(hs));
    }
    s.singular_points[0] = thread_in_plane(sys, Pole::Upper, axis, plane_value);
    s.singular_points[1] = thread_in_plane(sys, Pole::Lower, axis, plane_value);
    return s;
}

double thread_surface_gap(const RollingSystem& sys, Pole pole, double spin) {
    const auto dir = thread_direction(sys, pole);
    const BodyParams& p = sys.params();
    const double h_thread = p.m * p.g * p.b3 + spin * spin / (2.0 * p.I3);
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& pp : precession_points(sys, dir[0] * spin, dir[1] * spin))
        gap = std::min(gap, std::abs(pp.h - h_thread));
    return gap;
}

}  // namespace rollmono
