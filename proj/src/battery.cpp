#include "rollmono/battery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rollmono/errors.hpp"
#include "rollmono/rough_model.hpp"
#include "rollmono/smooth_model.hpp"

namespace rollmono {

namespace {

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

const char* axis_name(Model model, FixedAxis axis) {
    if (model == Model::Smooth) return axis == FixedAxis::J1Fixed ? "p_psi" : "p_phi";
    return axis == FixedAxis::J1Fixed ? "c1" : "c2";
}

const char* enclose_name(Enclose e) {
    switch (e) {
        case Enclose::Upper: return "upper";
        case Enclose::Lower: return "lower";
        case Enclose::Both: return "both";
    }
    return "?";
}

MonodromyConfig monodromy_config(const BatteryOptions& opt, double phi0 = 0.0) {
    MonodromyConfig cfg;
    cfg.integrator = opt.integrator;
    cfg.phi0 = phi0;
    cfg.threads = opt.threads;
    return cfg;
}

LoopCase run_case(const RollingSystem& sys, FixedAxis axis, double plane_value, Enclose enclose,
                  double radius, const BatteryOptions& opt, double phi0 = 0.0) {
    const Loop loop = thread_loop(sys, axis, plane_value, enclose, radius, opt.n_samples);
    const MonodromyResult r = monodromy_index(sys, loop, monodromy_config(opt, phi0));
    LoopCase c;
    c.model = sys.model();
    c.axis = axis;
    c.plane_value = plane_value;
    c.enclose = enclose;
    c.k = r.k;
    c.closure_defect = r.closure_defect;
    c.samples = r.samples.size();
    if (enclose == Enclose::Both) c.expected_abs_k = axis == FixedAxis::J1Fixed ? 2 : 0;
    else c.expected_abs_k = 1;
    return c;
}

// Runs `body`, converting library errors into a failed result.
template <class Body>
CriterionResult timed(int id, std::string title, Body&& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::ostringstream detail;
        r.passed = body(detail);
        r.detail = detail.str();
    } catch (const Error& e) {
        r.passed = false;
        r.detail = std::string(e.kind()) + ": " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

constexpr double kClosureLimit = 0.05;

// Criterion-1 style pattern check of one model's table.
bool table_pattern_ok(const std::vector<LoopCase>& t, std::ostream& out) {
    bool ok = true;
    for (const auto& c : t) {
        const bool good = std::abs(c.k) == c.expected_abs_k && c.closure_defect <= kClosureLimit;
        ok = ok && good;
        out << describe(c) << (good ? "" : " [bad]") << "; ";
    }
    // Upper, Lower, Both per plane.
    ok = ok && t[0].k + t[1].k == t[2].k && t[3].k + t[4].k == t[5].k;
    ok = ok && t[3].k * t[4].k < 0;
    return ok;
}

}  // namespace

std::string describe(const LoopCase& c) {
    std::ostringstream s;
    s << to_string(c.model) << ' ' << axis_name(c.model, c.axis) << '=' << c.plane_value << ' '
      << enclose_name(c.enclose) << ": k=" << c.k << " (|k| expected " << c.expected_abs_k
      << "), closure " << fmt("%.1e", c.closure_defect);
    return s.str();
}

std::vector<LoopCase> loop_table(Model model, double plane_value, const BatteryOptions& opt) {
    const RollingSystem sys(model, opt.params);
    std::vector<LoopCase> out;
    for (FixedAxis axis : {FixedAxis::J1Fixed, FixedAxis::J2Fixed})
        for (Enclose e : {Enclose::Upper, Enclose::Lower, Enclose::Both})
            out.push_back(run_case(sys, axis, plane_value, e, opt.radius, opt));
    return out;
}

BodyState random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Vec3 g{normal(rng), normal(rng), normal(rng)};
    g = g / norm(g);
    const Vec3 M{uniform(rng), uniform(rng), uniform(rng)};
    return {M, g};
}

double weighted_divergence_rough(const BodyState& s, const BodyParams& p, double step) {
    const auto weighted = [&](const BodyState& x) {
        const StateRate f = field_rough(x, p);
        const double rho = measure_density(x.gamma, p);
        return std::array<double, 6>{rho * f.M[0],     rho * f.M[1],     rho * f.M[2],
                                     rho * f.gamma[0], rho * f.gamma[1], rho * f.gamma[2]};
    };
    double div = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
        BodyState plus = s;
        BodyState minus = s;
        Vec3& vp = i < 3 ? plus.M : plus.gamma;
        Vec3& vm = i < 3 ? minus.M : minus.gamma;
        vp[i % 3] += step;
        vm[i % 3] -= step;
        div += (weighted(plus)[i] - weighted(minus)[i]) / (2.0 * step);
    }
    return div;
}

double integrator_order_ratio(const BodyParams& p) {
    const RollingSystem sys(Model::Smooth, p);
    const FieldFn field = sys.field_fn();
    const BodyState s0{{0.3, -0.2, 0.5}, gamma_from_angles(1.0, 0.4)};
    constexpr double kSpan = 4.0;

    IntegratorConfig ref_cfg;
    ref_cfg.rel_tol = ref_cfg.abs_tol = 1e-13;
    ref_cfg.renorm = false;
    ref_cfg.max_step = 0.05;
    const BodyState ref = integrate(field, s0, 0.0, kSpan, ref_cfg, 0.0).back().state;

    const auto error_with = [&](int steps) {
        FlowPoint x{s0, 0.0};
        const double dt = kSpan / steps;
        for (int i = 0; i < steps; ++i) x = fixed_step(field, x, dt);
        return std::max(norm(x.state.M - ref.M), norm(x.state.gamma - ref.gamma));
    };
    // Coarse steps keep the error far above the reference accuracy.
    const double coarse = error_with(8);
    const double fine = error_with(16);
    return coarse / fine;
}

CriterionResult check_monodromy_smooth(const BatteryOptions& opt) {
    return timed(1, "monodromy table, smooth plane", [&](std::ostream& out) {
        return table_pattern_ok(loop_table(Model::Smooth, opt.plane_value, opt), out);
    });
}

CriterionResult check_monodromy_rough(const BatteryOptions& opt) {
    return timed(2, "monodromy table, rough plane", [&](std::ostream& out) {
        const auto rough = loop_table(Model::Rough, opt.plane_value, opt);
        const auto smooth = loop_table(Model::Smooth, opt.plane_value, opt);
        bool ok = table_pattern_ok(rough, out);
        for (std::size_t i = 0; i < rough.size(); ++i)
            ok = ok && std::abs(rough[i].k) == std::abs(smooth[i].k);
        out << "matches smooth |k|: " << (ok ? "yes" : "no");
        return ok;
    });
}

CriterionResult check_double_pinched(const BatteryOptions& opt) {
    return timed(3, "double-pinched torus loops at plane value 0", [&](std::ostream& out) {
        bool ok = true;
        for (Model model : {Model::Smooth, Model::Rough}) {
            const RollingSystem sys(model, opt.params);
            for (FixedAxis axis : {FixedAxis::J1Fixed, FixedAxis::J2Fixed}) {
                const LoopCase c = run_case(sys, axis, 0.0, Enclose::Both, opt.radius, opt);
                const bool good =
                    std::abs(c.k) == c.expected_abs_k && c.closure_defect <= kClosureLimit;
                ok = ok && good;
                out << describe(c) << "; ";
            }
        }
        return ok;
    });
}

CriterionResult check_conservation(const BatteryOptions& opt) {
    return timed(4, "conservation over t in [0, 100]", [&](std::ostream& out) {
        constexpr int kStates = 20;
        constexpr double kSpan = 100.0;
        IntegratorConfig cfg = opt.integrator;
        cfg.rel_tol = cfg.abs_tol = 1e-10;
        cfg.output_dt = 1.0;

        std::mt19937_64 rng(opt.seed);
        const RollingSystem smooth(Model::Smooth, opt.params);
        double dh = 0.0, df1 = 0.0, df3 = 0.0;
        for (int i = 0; i < kStates; ++i) {
            const BodyState s0 = random_state(rng);
            const double h0 = energy_smooth(s0, opt.params);
            const SmoothIntegrals f0 = integrals_smooth(s0);
            for (const auto& x : integrate(smooth.field_fn(), s0, 0.0, kSpan, cfg)) {
                const SmoothIntegrals f = integrals_smooth(x.state);
                dh = std::max(dh, std::abs(energy_smooth(x.state, opt.params) - h0) /
                                      (std::abs(h0) + 1.0));
                df1 = std::max(df1, std::abs(f.p_psi - f0.p_psi) / (std::abs(f0.p_psi) + 1.0));
                df3 = std::max(df3, std::abs(f.p_phi - f0.p_phi) / (std::abs(f0.p_phi) + 1.0));
            }
        }

        const RollingSystem rough(Model::Rough, opt.params);
        double rh = 0.0, dc = 0.0;
        for (int i = 0; i < kStates; ++i) {
            const BodyState s0 = random_state(rng);
            const double h0 = energy_rough(s0, opt.params);
            const RoughIntegrals c0 = integrals_rough(s0, opt.params);
            for (const auto& x : integrate(rough.field_fn(), s0, 0.0, kSpan, cfg)) {
                const RoughIntegrals c = integrals_rough(x.state, opt.params);
                rh = std::max(rh, std::abs(energy_rough(x.state, opt.params) - h0) /
                                      (std::abs(h0) + 1.0));
                dc = std::max({dc, std::abs(c.c1 - c0.c1), std::abs(c.c2 - c0.c2)});
            }
        }
        out << "smooth drift H " << fmt("%.2e", dh) << ", F1 " << fmt("%.2e", df1) << ", F3 "
            << fmt("%.2e", df3) << "; rough drift H " << fmt("%.2e", rh) << ", C "
            << fmt("%.2e", dc);
        return dh <= 1e-8 && df1 <= 1e-8 && df3 <= 1e-8 && rh <= 1e-8 && dc <= 1e-6;
    });
}

CriterionResult check_liouville(const BatteryOptions& opt) {
    return timed(5, "det G = 1 and G(0) = Id", [&](std::ostream& out) {
        constexpr int kNodes = 200;
        constexpr double kEdge = 0.999;
        double worst = 0.0;
        for (int i = 0; i < kNodes; ++i) {
            const double g3 = -kEdge + 2.0 * kEdge * i / (kNodes - 1);
            worst = std::max(worst, std::abs(fundamental_matrix(g3, opt.params).entries.det() - 1.0));
        }
        const Mat2 g0 = fundamental_matrix(0.0, opt.params).entries;
        const bool identity = g0(0, 0) == 1.0 && g0(0, 1) == 0.0 && g0(1, 0) == 0.0 &&
                              g0(1, 1) == 1.0;
        out << "max |det G - 1| = " << fmt("%.2e", worst) << " over " << kNodes
            << " nodes; G(0) " << (identity ? "is" : "is not") << " the identity";
        return worst <= 1e-8 && identity;
    });
}

CriterionResult check_vertical_curves(const BatteryOptions& opt) {
    return timed(6, "vertical-rotation curves", [&](std::ostream& out) {
        const BodyParams& p = opt.params;
        const RollingSystem smooth(Model::Smooth, p);
        const RollingSystem rough(Model::Rough, p);
        const auto curves = vertical_curves(smooth, -3.0, 3.0, 121);
        double worst = 0.0;
        double rate = 0.0;
        for (int c = 0; c < 2; ++c) {
            const double g3 = c == 0 ? 1.0 : -1.0;
            for (const auto& v : curves[c]) {
                const BodyState s{{0.0, 0.0, v.spin}, {0.0, 0.0, g3}};
                const SmoothIntegrals f = integrals_smooth(s);
                worst = std::max({worst, std::abs(energy_smooth(s, p) - v.h),
                                  std::abs(f.p_psi - v.j1), std::abs(f.p_phi - v.j2)});
                const StateRate r = field_smooth(s, p);
                rate = std::max({rate, norm(r.M), norm(r.gamma)});
            }
        }
        const double h_static = p.m * p.g * p.b3;
        double zero_spin = 0.0;
        for (const RollingSystem* sys : {&smooth, &rough})
            for (Pole pole : {Pole::Upper, Pole::Lower}) {
                const VerticalCurvePoint v = vertical_rotation(*sys, pole, 0.0);
                zero_spin = std::max({zero_spin, std::abs(v.h - h_static), std::abs(v.j1),
                                      std::abs(v.j2)});
            }
        out << "closed form vs direct " << fmt("%.2e", worst) << ", equilibrium rate "
            << fmt("%.2e", rate) << ", zero-spin defect " << fmt("%.2e", zero_spin);
        return worst <= 1e-12 && rate <= 1e-12 && zero_spin <= 1e-12;
    });
}

CriterionResult check_bifurcation_surface(const BatteryOptions& opt) {
    return timed(7, "bifurcation surface residuals and slices", [&](std::ostream& out) {
        bool ok = true;
        for (Model model : {Model::Smooth, Model::Rough}) {
            const RollingSystem sys(model, opt.params);
            const BifurcationDiagram d = build_diagram(sys, GridSpec{}, opt.threads);
            double worst = 0.0;
            for (const auto& s : d.surface) worst = std::max(worst, s.residual);
            ok = ok && worst <= 1e-9 && !d.surface.empty();
            out << to_string(model) << ": " << d.surface.size() << " samples, max residual "
                << fmt("%.1e", worst);

            for (FixedAxis axis : {FixedAxis::J1Fixed, FixedAxis::J2Fixed}) {
                const DiagramSlice sl = slice_diagram(sys, axis, opt.plane_value, -1.5, 1.5, 301);
                double bottom = std::numeric_limits<double>::infinity();
                for (const auto& hs : sl.surface_h)
                    if (!hs.empty()) bottom = std::min(bottom, hs.front());
                int isolated = 0;
                for (const auto& pt : sl.singular_points) {
                    const double j1 = axis == FixedAxis::J1Fixed ? opt.plane_value : pt[0];
                    const double j2 = axis == FixedAxis::J1Fixed ? pt[0] : opt.plane_value;
                    double gap = std::numeric_limits<double>::infinity();
                    bool below = false;
                    for (const auto& pp : precession_points(sys, j1, j2)) {
                        gap = std::min(gap, std::abs(pp.h - pt[1]));
                        below = below || pp.h < pt[1];
                    }
                    if (pt[1] > bottom && gap > 1e-6 && below) ++isolated;
                }
                const bool distinct =
                    std::abs(sl.singular_points[0][0] - sl.singular_points[1][0]) > 1e-6;
                ok = ok && isolated == 2 && distinct;
                out << ", " << axis_name(model, axis) << " slice: " << isolated
                    << " isolated points above bottom h=" << fmt("%.4f", bottom);
            }
            out << "; ";
        }
        return ok;
    });
}

CriterionResult check_measure(const BatteryOptions& opt) {
    return timed(8, "invariant measure of the rough model", [&](std::ostream& out) {
        std::mt19937_64 rng(opt.seed + 1);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i)
            worst = std::max(worst,
                             std::abs(weighted_divergence_rough(random_state(rng), opt.params, 1e-5)));
        out << "max |div(rho f)| = " << fmt("%.2e", worst) << " at 50 states";
        return worst <= 1e-4;
    });
}

CriterionResult check_invariants(const BatteryOptions& opt) {
    return timed(9, "radius, base point, SO(2) and order invariants", [&](std::ostream& out) {
        bool ok = true;
        int loops = 0, mismatches = 0;
        for (Model model : {Model::Smooth, Model::Rough}) {
            const RollingSystem sys(model, opt.params);
            for (FixedAxis axis : {FixedAxis::J1Fixed, FixedAxis::J2Fixed})
                for (Enclose e : {Enclose::Upper, Enclose::Lower, Enclose::Both}) {
                    const int k0 = run_case(sys, axis, opt.plane_value, e, 0.05, opt).k;
                    for (double r0 : {0.02, 0.1}) {
                        ++loops;
                        if (run_case(sys, axis, opt.plane_value, e, r0, opt).k != k0) ++mismatches;
                    }
                    ++loops;
                    if (run_case(sys, axis, opt.plane_value, e, 0.05, opt, 1.0).k != k0)
                        ++mismatches;
                }
        }
        ok = ok && mismatches == 0;
        out << mismatches << " of " << loops << " radius/base-point variants changed k";

        std::mt19937_64 rng(opt.seed + 2);
        std::uniform_real_distribution<double> angle(-3.0, 3.0);
        const BodyParams& p = opt.params;
        double eq = 0.0;
        for (int i = 0; i < 20; ++i) {
            const BodyState s = random_state(rng);
            const double a = angle(rng);
            const BodyState t = rotate_state(s, a);
            const SmoothIntegrals fs = integrals_smooth(s), ft = integrals_smooth(t);
            const RoughIntegrals cs = integrals_rough(s, p), ct = integrals_rough(t, p);
            const KVariables ks = k_variables(s, p), kt = k_variables(t, p);
            eq = std::max({eq, std::abs(energy_smooth(s, p) - energy_smooth(t, p)),
                           std::abs(energy_rough(s, p) - energy_rough(t, p)),
                           std::abs(fs.p_psi - ft.p_psi), std::abs(fs.p_phi - ft.p_phi),
                           std::abs(cs.c1 - ct.c1), std::abs(cs.c2 - ct.c2),
                           std::abs(ks.K1 - kt.K1), std::abs(ks.K2 - kt.K2)});
            for (auto field : {field_smooth, field_rough}) {
                const StateRate fr = field(t, p);
                const StateRate f = field(s, p);
                eq = std::max({eq, norm(fr.M - rotate_about_axis(f.M, a)),
                               norm(fr.gamma - rotate_about_axis(f.gamma, a))});
            }
        }
        ok = ok && eq <= 1e-12;
        out << "; SO(2) defect " << fmt("%.2e", eq);

        const double ratio = integrator_order_ratio(p);
        ok = ok && ratio >= 8.0;
        out << "; step-halving error ratio " << fmt("%.1f", ratio);
        return ok;
    });
}

const std::vector<CriterionFn>& battery() {
    static const std::vector<CriterionFn> all{
        check_monodromy_smooth,    check_monodromy_rough, check_double_pinched,
        check_conservation,        check_liouville,       check_vertical_curves,
        check_bifurcation_surface, check_measure,         check_invariants};
    return all;
}

std::vector<CriterionResult> run_battery(const BatteryOptions& opt) {
    std::vector<CriterionResult> out;
    for (const auto& c : battery()) out.push_back(c(opt));
    return out;
}

}  // namespace rollmono
