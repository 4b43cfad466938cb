#include "rollmono/torus.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cstdint>
#include <optional>

#include "rollmono/errors.hpp"
#include "rollmono/smooth_model.hpp"

namespace rollmono {

BodyState momentum_on_section(const RollingSystem& sys, double gamma3, double phi, double j1,
                              double j2) {
    if (!(gamma3 > -1.0 && gamma3 < 1.0))
        throw SingularSystem("section point requires gamma3 in (-1, 1)");
    const BodyParams& p = sys.params();
    const Vec3 gamma = gamma_from_angles(std::acos(gamma3), phi);
    // (gamma x omega)_3 = (-gamma2, gamma1, 0) . omega
    const Vec3 lever{-gamma[1], gamma[0], 0.0};

    Mat3 rows;
    Vec3 rhs;
    if (sys.model() == Model::Smooth) {
        const Vec3 r3 = smooth_mobility(gamma, p) * lever;
        rows.m = {{{gamma[0], gamma[1], gamma[2]}, {0.0, 0.0, 1.0}, {r3[0], r3[1], r3[2]}}};
        rhs = {j1, j2, 0.0};
    } else {
        const Mat3 w = rolling_inertia(gamma, p);
        Vec3 w_inv_e3;
        Vec3 w_inv_lever;
        solve(w, {0.0, 0.0, 1.0}, w_inv_e3, 0.0);
        solve(w, lever, w_inv_lever, 0.0);
        const double ratio = (p.b3 * p.b3) / (p.b1 * p.b1);
        const double rho = measure_density(gamma, p);
        const Vec3 k2_row = w_inv_e3 / rho;
        rows.m = {{{gamma[0], gamma[1], ratio * gamma[2]},
                   {k2_row[0], k2_row[1], k2_row[2]},
                   {w_inv_lever[0], w_inv_lever[1], w_inv_lever[2]}}};
        const auto k = sys.fundamental(gamma3) * std::array<double, 2>{j1, j2};
        rhs = {k[0], k[1], 0.0};
    }
    BodyState out;
    out.gamma = gamma;
    if (!solve(rows, rhs, out.M, 1e-12))
        throw SingularSystem("section momentum system is rank deficient at gamma3 = " +
                             std::to_string(gamma3));
    return out;
}

double section_energy(const RollingSystem& sys, double gamma3, double j1, double j2) {
    return sys.energy(momentum_on_section(sys, gamma3, 0.0, j1, j2));
}

std::vector<double> turning_points(const RollingSystem& sys, const IntegralPoint& point) {
    constexpr int n = TorusScan::kSamples;
    const double lo = -1.0 + TorusScan::kEdge;
    const double hi = 1.0 - TorusScan::kEdge;
    const auto f = [&](double g3) { return section_energy(sys, g3, point.j1, point.j2) - point.h; };

    std::vector<double> xs(n);
    std::vector<double> fs(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = lo + (hi - lo) * i / (n - 1);
        fs[i] = f(xs[i]);
    }
    std::vector<double> roots;
    for (int i = 0; i + 1 < n; ++i) {
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

    // A shallow well can sit entirely between two samples.
    const auto bracketed = [&](double a, double b, double fa, double fb) {
        std::uintmax_t iters = 200;
        const auto br = boost::math::tools::toms748_solve(
            f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
        return std::abs(f(br.first)) <= std::abs(f(br.second)) ? br.first : br.second;
    };
    for (int i = 1; i + 1 < n; ++i) {
        if (!(fs[i] > 0.0 && fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1])) continue;
        std::uintmax_t iters = 200;
        const auto [xm, fm] =
            boost::math::tools::brent_find_minima(f, xs[i - 1], xs[i + 1], 52, iters);
        if (!(fm < 0.0)) continue;
        roots.push_back(bracketed(xs[i - 1], xm, fs[i - 1], fm));
        roots.push_back(bracketed(xm, xs[i + 1], fm, fs[i + 1]));
    }
    std::sort(roots.begin(), roots.end());

    // Turning points closer to a pole than the scan margin: the centrifugal
    // barrier makes the energy blow up at the pole unless the torus passes
    // through it, so walk towards the pole until the sign flips.
    const auto edge_root = [&](double inner, double f_inner, double pole) -> std::optional<double> {
        double offset = TorusScan::kEdge;
        for (int k = 0; k < 14; ++k) {
            offset *= 0.1;
            const double outer = pole - (pole > 0 ? offset : -offset);
            const double f_outer = f(outer);
            if (f_outer > 0.0) {
                std::uintmax_t iters = 200;
                const double a = std::min(inner, outer);
                const double b = std::max(inner, outer);
                const auto br = boost::math::tools::toms748_solve(
                    f, a, b, a == inner ? f_inner : f_outer, a == inner ? f_outer : f_inner,
                    boost::math::tools::eps_tolerance<double>(52), iters);
                return std::abs(f(br.first)) <= std::abs(f(br.second)) ? br.first : br.second;
            }
            inner = outer;
            f_inner = f_outer;
        }
        return std::nullopt;
    };
    if (fs.front() < 0.0) {
        if (auto r = edge_root(xs.front(), fs.front(), -1.0)) roots.insert(roots.begin(), *r);
        else throw RootNotBracketed("torus reaches the lower pole; no turning point below");
    }
    if (fs.back() < 0.0) {
        if (auto r = edge_root(xs.back(), fs.back(), 1.0)) roots.push_back(*r);
        else throw RootNotBracketed("torus reaches the upper pole; no turning point above");
    }
    if (roots.empty()) {
        if (*std::min_element(fs.begin(), fs.end()) > 0.0)
            throw NoRoot("energy below the effective potential for these integrals");
        throw RootNotBracketed("no turning point bracketed by the gamma3 scan");
    }
    return roots;
}

BodyState state_on_torus(const RollingSystem& sys, const IntegralPoint& point,
                         TurningBranch branch, double phi) {
    const auto roots = turning_points(sys, point);
    const double g3 = branch == TurningBranch::LowerTurning ? roots.front() : roots.back();
    return momentum_on_section(sys, g3, phi, point.j1, point.j2);
}

}  // namespace rollmono
