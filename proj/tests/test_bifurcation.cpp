#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rollmono/bifurcation.hpp"
#include "rollmono/errors.hpp"
#include "rollmono/rough_model.hpp"
#include "rollmono/smooth_model.hpp"
#include "rollmono/torus.hpp"

using namespace rollmono;

namespace {

const BodyParams kParams{};

std::vector<double> energies(const std::vector<PrecessionPoint>& pts) {
    std::vector<double> h;
    for (const auto& p : pts) h.push_back(p.h);
    std::sort(h.begin(), h.end());
    return h;
}

}  // namespace

TEST(PrecessionPoints, RestingBodyHasEquatorialMinimum) {
    const RollingSystem sys(Model::Smooth, kParams);
    const auto pts = precession_points(sys, 0.0, 0.0);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0].gamma3, 0.0, 1e-12);
    EXPECT_NEAR(pts[0].h, 1.0, 1e-14);
    // Brute-force minimum of the potential over a fine grid.
    double best = 2.0, best_g3 = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double g3 = -0.999 + 1.998 * i / 20000.0;
        const double h = reduced_energy_smooth(g3, 0.0, 0.0, 0.0, kParams);
        if (h < best) best = h, best_g3 = g3;
    }
    EXPECT_NEAR(best_g3, pts[0].gamma3, 1e-4);
    EXPECT_NEAR(best, pts[0].h, 1e-12);
}

TEST(PrecessionPoints, ResidualsAndEnergies) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        for (auto [j1, j2] : {std::pair{0.157, 0.1}, {0.5, -0.3}, {-1.0, 0.8}, {0.0, 1.2}}) {
            const auto pts = precession_points(sys, j1, j2);
            ASSERT_FALSE(pts.empty());
            for (const auto& p : pts) {
                EXPECT_LE(p.residual, 1e-9);
                EXPECT_NEAR(p.h, section_energy(sys, p.gamma3, j1, j2), 1e-12);
                // Independent slope by a plain central difference of the section energy.
                const double d = 1e-5;
                const double fd = (section_energy(sys, p.gamma3 + d, j1, j2) -
                                   section_energy(sys, p.gamma3 - d, j1, j2)) /
                                  (2 * d);
                EXPECT_NEAR(fd, 0.0, 1e-7);
            }
            for (std::size_t i = 1; i < pts.size(); ++i)
                EXPECT_GT(pts[i].gamma3, pts[i - 1].gamma3);
        }
    }
}

TEST(PrecessionPoints, ReflectionSymmetry) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        for (auto [j1, j2] : {std::pair{0.3, 0.2}, {-0.7, 0.4}}) {
            const auto a = energies(precession_points(sys, j1, j2));
            const auto b = energies(precession_points(sys, -j1, -j2));
            ASSERT_EQ(a.size(), b.size());
            for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
            // Flipping j1 alone mirrors gamma3 and keeps the energies.
            const auto pa = precession_points(sys, j1, j2);
            const auto pc = precession_points(sys, -j1, j2);
            ASSERT_EQ(pa.size(), pc.size());
            for (std::size_t i = 0; i < pa.size(); ++i) {
                EXPECT_NEAR(pa[i].gamma3, -pc[pc.size() - 1 - i].gamma3, 1e-9);
                EXPECT_NEAR(pa[i].h, pc[pc.size() - 1 - i].h, 1e-9);
            }
        }
    }
}

TEST(VerticalCurves, SmoothClosedForm) {
    const RollingSystem sys(Model::Smooth, kParams);
    const VerticalCurvePoint v = vertical_rotation(sys, Pole::Upper, 0.157);
    EXPECT_NEAR(v.h, 2.0 + 0.157 * 0.157 / 3.0, 1e-15);
    EXPECT_NEAR(v.h, 2.008216333, 1e-9);
    EXPECT_DOUBLE_EQ(v.j1, 0.157);
    EXPECT_DOUBLE_EQ(vertical_rotation(sys, Pole::Lower, 0.157).j1, -0.157);
    const VerticalCurvePoint z = vertical_rotation(sys, Pole::Lower, 0.0);
    EXPECT_EQ(z.h, 2.0);
    EXPECT_EQ(z.j1, 0.0);
    EXPECT_EQ(z.j2, 0.0);
}

TEST(VerticalCurves, SmoothMatchesDirectEvaluation) {
    const RollingSystem sys(Model::Smooth, kParams);
    const auto curves = vertical_curves(sys, -3.0, 3.0, 61);
    for (int c = 0; c < 2; ++c)
        for (const auto& v : curves[c]) {
            const BodyState s{{0, 0, v.spin}, {0, 0, c == 0 ? 1.0 : -1.0}};
            EXPECT_NEAR(energy_smooth(s, kParams), v.h, 1e-12);
            EXPECT_NEAR(integrals_smooth(s).p_psi, v.j1, 1e-12);
            EXPECT_NEAR(integrals_smooth(s).p_phi, v.j2, 1e-12);
        }
    EXPECT_THROW(vertical_curves(sys, 0.0, 1.0, 1), ConfigError);
}

TEST(VerticalCurves, RoughZeroSpinAndLinearity) {
    const RollingSystem sys(Model::Rough, kParams);
    const VerticalCurvePoint z = vertical_rotation(sys, Pole::Upper, 0.0);
    EXPECT_EQ(z.j1, 0.0);
    EXPECT_EQ(z.j2, 0.0);
    EXPECT_NEAR(z.h, 2.0, 1e-15);
    for (Pole pole : {Pole::Upper, Pole::Lower}) {
        const auto dir = thread_direction(sys, pole);
        for (double spin : {-1.3, 0.4, 2.2}) {
            const VerticalCurvePoint v = vertical_rotation(sys, pole, spin);
            EXPECT_NEAR(v.j1, spin * dir[0], 1e-12);
            EXPECT_NEAR(v.j2, spin * dir[1], 1e-12);
            EXPECT_NEAR(v.h, 2.0 + spin * spin / 3.0, 1e-14);
        }
    }
}

TEST(VerticalCurves, ThreadsInPlaneMatchCurves) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        for (Pole pole : {Pole::Upper, Pole::Lower}) {
            const auto pt = thread_in_plane(sys, pole, FixedAxis::J2Fixed, 0.157);
            const auto dir = thread_direction(sys, pole);
            const double spin = 0.157 / dir[1];
            const VerticalCurvePoint v = vertical_rotation(sys, pole, spin);
            EXPECT_NEAR(pt[0], v.j1, 1e-12);
            EXPECT_NEAR(pt[1], v.h, 1e-12);
        }
    }
}

TEST(Threads, AboveBucketBottomForSmallSpin) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        for (Pole pole : {Pole::Upper, Pole::Lower})
            for (double spin = -0.5; spin <= 0.5; spin += 0.05) {
                const VerticalCurvePoint v = vertical_rotation(sys, pole, spin);
                const auto pts = precession_points(sys, v.j1, v.j2);
                ASSERT_FALSE(pts.empty());
                double lowest = std::numeric_limits<double>::infinity();
                for (const auto& p : pts) lowest = std::min(lowest, p.h);
                EXPECT_GT(v.h, lowest);
            }
    }
}

TEST(Threads, ApproachSurfaceAtLargeSpin) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        double previous = std::numeric_limits<double>::infinity();
        bool reached = false;
        for (double spin = 0.25; spin <= 5.0; spin += 0.25) {
            const double gap = thread_surface_gap(sys, Pole::Upper, spin);
            if (!std::isfinite(gap)) {
                reached = true;
                break;
            }
            EXPECT_LT(gap, previous) << spin;
            previous = gap;
        }
        EXPECT_TRUE(reached);
        EXPECT_LT(previous, 0.02);
    }
}

TEST(Diagram, GridValidation) {
    GridSpec g;
    g.j1_n = 1;
    EXPECT_THROW(g.validate(), ConfigError);
    g = GridSpec{};
    g.spin_hi = g.spin_lo;
    EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Diagram, SmallGridIsDeterministic) {
    GridSpec g;
    g.j1_n = g.j2_n = 7;
    g.spin_n = 5;
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        const BifurcationDiagram a = build_diagram(sys, g, 1);
        const BifurcationDiagram b = build_diagram(sys, g, 4);
        ASSERT_EQ(a.surface.size(), b.surface.size());
        ASSERT_GE(a.surface.size(), 49u);
        for (std::size_t i = 0; i < a.surface.size(); ++i) {
            EXPECT_EQ(a.surface[i].h, b.surface[i].h);
            EXPECT_LE(a.surface[i].residual, 1e-9);
        }
        // The curves cross at zero spin, h = m g b3.
        EXPECT_EQ(a.singular_curves[0][2].spin, 0.0);
        EXPECT_NEAR(a.singular_curves[0][2].h, 2.0, 1e-15);
        EXPECT_NEAR(a.singular_curves[1][2].h, 2.0, 1e-15);
    }
}

TEST(Diagram, SliceHasTwoIsolatedPoints) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        for (FixedAxis axis : {FixedAxis::J1Fixed, FixedAxis::J2Fixed}) {
            const DiagramSlice s = slice_diagram(sys, axis, 0.157, -1.0, 1.0, 81);
            ASSERT_EQ(s.varying.size(), 81u);
            double bottom = std::numeric_limits<double>::infinity();
            for (const auto& hs : s.surface_h) {
                ASSERT_FALSE(hs.empty());
                bottom = std::min(bottom, hs.front());
            }
            EXPECT_GT(s.singular_points[0][1], bottom);
            EXPECT_GT(s.singular_points[1][1], bottom);
            EXPECT_GT(std::abs(s.singular_points[0][0] - s.singular_points[1][0]), 0.2);
        }
    }
    EXPECT_THROW(slice_diagram(RollingSystem(Model::Smooth, kParams), FixedAxis::J1Fixed, 0.0, 0.0,
                               1.0, 1),
                 ConfigError);
}
