#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rollmono/errors.hpp"
#include "rollmono/monodromy.hpp"

using namespace rollmono;

namespace {

const BodyParams kParams{};
constexpr double kPi = std::numbers::pi;

MonodromyConfig serial() {
    MonodromyConfig c;
    c.threads = 1;
    return c;
}

}  // namespace

TEST(Loop, ParametrisationPoints) {
    const Loop l = make_loop(Model::Smooth, FixedAxis::J1Fixed, {0.157, 0.2, 2.0}, 0.05, 128);
    const IntegralPoint a = l.at(0.0);
    EXPECT_DOUBLE_EQ(a.j1, 0.2);
    EXPECT_DOUBLE_EQ(a.j2, 0.157);
    EXPECT_DOUBLE_EQ(a.h, 2.05);
    const IntegralPoint b = l.at(kPi / 2);
    EXPECT_NEAR(b.j2, 0.207, 1e-15);
    EXPECT_NEAR(b.h, 2.0, 1e-15);
    const IntegralPoint c = l.at(1.0), d = l.at(1.0 + 2 * kPi);
    EXPECT_NEAR(c.j2, d.j2, 1e-15);
    EXPECT_NEAR(c.h, d.h, 1e-15);

    const Loop m = make_loop(Model::Rough, FixedAxis::J2Fixed, {0.1, 0.3, 2.0}, 0.05, 64);
    EXPECT_DOUBLE_EQ(m.at(0.0).j2, 0.3);
    EXPECT_NEAR(m.at(kPi / 2).j1, 0.15, 1e-15);
}

TEST(Loop, HalfStepSampling) {
    const Loop l = make_loop(Model::Smooth, FixedAxis::J1Fixed, {0, 0, 2}, 0.05, 64);
    EXPECT_NEAR(l.sample_alpha(0), kPi / 64, 1e-15);
    EXPECT_NEAR(l.sample_alpha(64) - l.sample_alpha(0), 2 * kPi, 1e-14);
}

TEST(Loop, Validation) {
    EXPECT_THROW(make_loop(Model::Smooth, FixedAxis::J1Fixed, {0, 0, 2}, 0.0, 128), ConfigError);
    EXPECT_THROW(make_loop(Model::Smooth, FixedAxis::J1Fixed, {0, 0, 2}, 0.05, 32), ConfigError);
}

TEST(Loop, ThreadCentres) {
    const RollingSystem sys(Model::Smooth, kParams);
    const Loop up = thread_loop(sys, FixedAxis::J1Fixed, 0.157, Enclose::Upper);
    EXPECT_NEAR(up.center.varying, 0.157, 1e-15);
    EXPECT_NEAR(up.center.h, 2.0 + 0.157 * 0.157 / 3.0, 1e-15);
    const Loop lo = thread_loop(sys, FixedAxis::J1Fixed, 0.157, Enclose::Lower);
    EXPECT_NEAR(lo.center.varying, -0.157, 1e-15);
    const Loop both = thread_loop(sys, FixedAxis::J1Fixed, 0.157, Enclose::Both, 0.05);
    EXPECT_NEAR(both.center.varying, 0.0, 1e-15);
    EXPECT_NEAR(both.radius, 0.157 + 0.05, 1e-15);
}

TEST(RotationIncrement, IndependentOfBasePhi) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        const IntegralPoint pt{model, 0.157, 0.18, 2.03};
        const double ref = rotation_increment(
            sys, state_on_torus(sys, pt, TurningBranch::LowerTurning, 0.0), IntegratorConfig{});
        for (double phi : {0.7, -2.0, 3.0}) {
            const double d = rotation_increment(
                sys, state_on_torus(sys, pt, TurningBranch::LowerTurning, phi), IntegratorConfig{});
            EXPECT_NEAR(d, ref, 1e-8);
        }
    }
}

TEST(RotationIncrement, ContinuousAlongLoop) {
    const RollingSystem sys(Model::Smooth, kParams);
    const Loop loop = thread_loop(sys, FixedAxis::J1Fixed, 0.157, Enclose::Upper);
    const auto at = [&](double alpha) {
        return rotation_increment(
            sys, state_on_torus(sys, loop.at(alpha), TurningBranch::LowerTurning, 0.0),
            IntegratorConfig{});
    };
    for (double alpha : {0.3, 1.9, 4.4}) {
        const double step = 2 * kPi / 128;
        const double a = at(alpha), b = at(alpha + step), mid = at(alpha + step / 2);
        const double interp = 0.5 * (a + b);
        EXPECT_LT(std::abs(std::remainder(mid - interp, 2 * kPi)), 1e-3) << alpha;
    }
}

// Close to the precession surface the motion is a slightly perturbed regular
// precession, so the mean phi rate over one return approaches its phi rate.
TEST(RotationIncrement, ApproachesPrecessionRate) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        const double j1 = 0.3, j2 = 0.1;
        const auto pts = precession_points(sys, j1, j2);
        ASSERT_FALSE(pts.empty());
        const PrecessionPoint low = *std::min_element(
            pts.begin(), pts.end(), [](auto& a, auto& b) { return a.h < b.h; });
        const BodyState prec = momentum_on_section(sys, low.gamma3, 0.0, j1, j2);
        const double rate = phi_rate(prec.gamma, sys.field(prec).gamma);

        double previous_error = 1.0;
        for (double dh : {1e-4, 1e-6}) {
            const BodyState s =
                state_on_torus(sys, {model, j1, j2, low.h + dh}, TurningBranch::LowerTurning, 0.0);
            const ReturnSample r = poincare_return(sys, s, IntegratorConfig{});
            const double err = std::abs(r.delta_phi / r.return_time - rate);
            EXPECT_LT(err, previous_error);
            previous_error = err;
        }
        EXPECT_LT(previous_error, 1e-3 * (1.0 + std::abs(rate)));
    }
}

TEST(MonodromyIndex, SingleAndDoubleLoops) {
    for (Model model : {Model::Smooth, Model::Rough}) {
        const RollingSystem sys(model, kParams);
        const auto k = [&](FixedAxis axis, Enclose e) {
            const MonodromyResult r =
                monodromy_index(sys, thread_loop(sys, axis, 0.157, e), MonodromyConfig{});
            EXPECT_LE(r.closure_defect, 0.05);
            return r.k;
        };
        const int u1 = k(FixedAxis::J1Fixed, Enclose::Upper);
        const int l1 = k(FixedAxis::J1Fixed, Enclose::Lower);
        const int b1 = k(FixedAxis::J1Fixed, Enclose::Both);
        EXPECT_EQ(std::abs(u1), 1);
        EXPECT_EQ(std::abs(l1), 1);
        EXPECT_EQ(b1, u1 + l1);
        EXPECT_EQ(std::abs(b1), 2);
        const int u2 = k(FixedAxis::J2Fixed, Enclose::Upper);
        const int l2 = k(FixedAxis::J2Fixed, Enclose::Lower);
        EXPECT_EQ(u2 * l2, -1);
        EXPECT_EQ(k(FixedAxis::J2Fixed, Enclose::Both), 0);
    }
}

TEST(MonodromyIndex, SampleInvariants) {
    const RollingSystem sys(Model::Rough, kParams);
    const Loop loop = thread_loop(sys, FixedAxis::J2Fixed, 0.157, Enclose::Lower, 0.05, 64);
    const MonodromyResult r = monodromy_index(sys, loop, MonodromyConfig{});
    ASSERT_GE(r.samples.size(), 65u);
    EXPECT_NEAR(r.samples.back().alpha - r.samples.front().alpha, 2 * kPi, 1e-12);
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
        EXPECT_GT(r.samples[i].alpha, r.samples[i - 1].alpha);
        EXPECT_LT(std::abs(r.samples[i].delta_phi - r.samples[i - 1].delta_phi), kPi / 2);
    }
    EXPECT_NEAR(r.samples.back().delta_phi - r.samples.front().delta_phi, 2 * kPi * r.k,
                r.closure_defect + 1e-12);
}

TEST(MonodromyIndex, RadiusAndBasePointIndependence) {
    const RollingSystem sys(Model::Smooth, kParams);
    const int k0 = monodromy_index(sys, thread_loop(sys, FixedAxis::J2Fixed, 0.157, Enclose::Upper),
                                   MonodromyConfig{})
                       .k;
    for (double r0 : {0.02, 0.1})
        EXPECT_EQ(monodromy_index(sys, thread_loop(sys, FixedAxis::J2Fixed, 0.157, Enclose::Upper, r0),
                                  MonodromyConfig{})
                      .k,
                  k0);
    MonodromyConfig shifted;
    shifted.phi0 = 1.0;
    EXPECT_EQ(monodromy_index(sys, thread_loop(sys, FixedAxis::J2Fixed, 0.157, Enclose::Upper),
                              shifted)
                  .k,
              k0);
}

TEST(MonodromyIndex, ThreadCountDoesNotChangeResult) {
    const RollingSystem sys(Model::Smooth, kParams);
    const Loop loop = thread_loop(sys, FixedAxis::J1Fixed, 0.0, Enclose::Both, 0.05, 64);
    MonodromyConfig many;
    many.threads = 4;
    const MonodromyResult a = monodromy_index(sys, loop, serial());
    const MonodromyResult b = monodromy_index(sys, loop, many);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        EXPECT_EQ(a.samples[i].delta_phi, b.samples[i].delta_phi);
    EXPECT_EQ(a.k, b.k);
}

TEST(MonodromyIndex, LoopBelowPotentialFails) {
    const RollingSystem sys(Model::Smooth, kParams);
    const Loop loop = make_loop(Model::Smooth, FixedAxis::J1Fixed, {0.0, 0.0, 0.5}, 0.05, 64);
    EXPECT_THROW(monodromy_index(sys, loop, serial()), LoopHitsSingularity);
}

TEST(MonodromyIndex, ModelMismatchIsConfigError) {
    const RollingSystem sys(Model::Smooth, kParams);
    const Loop loop = make_loop(Model::Rough, FixedAxis::J1Fixed, {0.0, 0.0, 2.0}, 0.05, 64);
    EXPECT_THROW(monodromy_index(sys, loop, serial()), ConfigError);
}
