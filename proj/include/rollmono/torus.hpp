// Points of an invariant torus with prescribed integral values, placed on
// the turning-point section d(gamma3)/dt = 0.
#pragma once

#include <vector>

#include "rollmono/model.hpp"

namespace rollmono {

/// A point (j1, j2, h) of integral space. Smooth: (p_psi, p_phi, h);
/// rough: (c1, c2, h).
struct IntegralPoint {
    Model model = Model::Smooth;
    double j1 = 0.0;
    double j2 = 0.0;
    double h = 0.0;
};

enum class TurningBranch { LowerTurning, UpperTurning };

/// State with gamma = gamma_from_angles(acos gamma3, phi) whose momentum
/// satisfies d(gamma3)/dt = 0 and matches the linear integrals (j1, j2).
/// Throws SingularSystem when the linear system degenerates.
BodyState momentum_on_section(const RollingSystem& sys, double gamma3, double phi, double j1,
                              double j2);

/// Energy of momentum_on_section(gamma3, 0, j1, j2): the effective potential
/// of the nutation motion.
double section_energy(const RollingSystem& sys, double gamma3, double j1, double j2);

struct TorusScan {
    static constexpr int kSamples = 400;
    static constexpr double kEdge = 1e-4;
};

/// All gamma3 with section_energy = h, ascending.
/// Throws NoRoot when h lies below the effective potential on the scan and
/// RootNotBracketed when h is reachable but no sign change was found.
std::vector<double> turning_points(const RollingSystem& sys, const IntegralPoint& point);

/// State on the torus of `point` at the lower (or upper) turning point of
/// gamma3, rotated to self-rotation angle `phi`.
BodyState state_on_torus(const RollingSystem& sys, const IntegralPoint& point,
                         TurningBranch branch, double phi);

}  // namespace rollmono
