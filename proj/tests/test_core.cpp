#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rollmono/core.hpp"
#include "rollmono/errors.hpp"

using namespace rollmono;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(EulerPhi, AxisAlignedCases) {
    EXPECT_NEAR(euler_phi({0.0, 1.0, 0.0}), 0.0, 1e-15);
    EXPECT_NEAR(euler_phi({1.0, 0.0, 0.0}), kPi / 2, 1e-15);
    EXPECT_NEAR(euler_phi({0.0, -1.0, 0.0}), kPi, 1e-15);
}

TEST(EulerPhi, ThrowsOnAxis) {
    EXPECT_THROW(euler_phi({0.0, 0.0, 1.0}), VerticalStateError);
    EXPECT_THROW(euler_phi({1e-11, 0.0, -1.0}), VerticalStateError);
    EXPECT_NO_THROW(euler_phi({1e-9, 0.0, 1.0}));
}

TEST(EulerPhi, RoundTripOverChart) {
    for (int i = 0; i <= 40; ++i) {
        const double theta = 0.01 + (kPi - 0.02) * i / 40.0;
        for (int j = 0; j < 64; ++j) {
            const double phi = kPi - 2.0 * kPi * j / 64.0;
            const Vec3 g = gamma_from_angles(theta, phi);
            EXPECT_NEAR(norm(g), 1.0, 1e-15);
            EXPECT_NEAR(euler_phi(g), phi, 1e-12) << theta << ' ' << phi;
        }
    }
}

TEST(GammaFromAngles, Examples) {
    const Vec3 g = gamma_from_angles(kPi / 2, 0.0);
    EXPECT_NEAR(g[0], 0.0, 1e-16);
    EXPECT_NEAR(g[1], 1.0, 1e-16);
    EXPECT_NEAR(g[2], 0.0, 1e-16);
    const Vec3 h = gamma_from_angles(0.3, 1.1);
    EXPECT_DOUBLE_EQ(h[2], std::cos(0.3));
    EXPECT_NEAR(h[0], std::sin(0.3) * std::sin(1.1), 1e-16);
}

TEST(Solve, MatchesKnownSolution) {
    Mat3 a;
    a.m = {{{2.0, 1.0, 0.0}, {1.0, 3.0, 1.0}, {0.0, 1.0, 4.0}}};
    const Vec3 x_true{1.0, -2.0, 0.5};
    Vec3 x;
    ASSERT_TRUE(solve(a, a * x_true, x));
    EXPECT_LT(norm(x - x_true), 1e-14);
    EXPECT_NEAR(determinant(a), 18.0, 1e-13);
}

TEST(Solve, DetectsSingular) {
    Mat3 a;
    a.m = {{{1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}, {0.0, 1.0, 1.0}}};
    Vec3 x;
    EXPECT_FALSE(solve(a, {1.0, 2.0, 3.0}, x));
}

TEST(SymmetryAngle, RecoversRotation) {
    const BodyState s{{0.3, -0.7, 0.2}, gamma_from_angles(1.2, 0.4)};
    for (double a : {-3.0, -1.0, 0.0, 0.5, 2.9}) {
        // rotate_state turns (x, y) counterclockwise, which lowers phi.
        EXPECT_NEAR(symmetry_angle(s, rotate_state(s, a)), -a, 1e-14);
        EXPECT_NEAR(std::remainder(euler_phi(rotate_state(s, a).gamma) - (0.4 - a), 2 * kPi), 0.0,
                    1e-14);
    }
}

TEST(SymmetryAngle, DefinedAtPoleThroughMomentum) {
    const BodyState s{{0.4, 0.1, 0.2}, {0.0, 0.0, 1.0}};
    EXPECT_NEAR(symmetry_angle(s, rotate_state(s, 1.3)), -1.3, 1e-14);
}

TEST(WrapTwoPi, Range) {
    EXPECT_NEAR(wrap_two_pi(-0.5), 2 * kPi - 0.5, 1e-15);
    EXPECT_NEAR(wrap_two_pi(7.0), 7.0 - 2 * kPi, 1e-15);
    EXPECT_EQ(wrap_two_pi(0.0), 0.0);
}

TEST(BodyParams, Validation) {
    EXPECT_NO_THROW(BodyParams{}.validate());
    BodyParams p;
    p.b3 = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = BodyParams{};
    p.g = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}
