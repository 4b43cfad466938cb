// Ellipsoid of revolution sliding on a smooth (frictionless) plane.
// Lie-Poisson system on e(3) with Casimirs (M, gamma), gamma^2 and the
// Lagrange integral M3.
#pragma once

#include "rollmono/core.hpp"

namespace rollmono {

/// Vector r from the contact point to the centre of mass together with its
/// Jacobian dr/dgamma. Valid for any non-zero gamma (r is homogeneous of
/// degree zero in gamma).
struct ContactGeometry {
    Vec3 r;
    Mat3 dr_dgamma;
};

ContactGeometry contact_geometry(const Vec3& gamma, const BodyParams& p);

inline Vec3 contact_vector(const Vec3& gamma, const BodyParams& p) {
    return contact_geometry(gamma, p).r;
}

/// A = (I + m a (x) a)^-1 with a = gamma x r, via the rank-one update formula.
Mat3 smooth_mobility(const Vec3& gamma, const BodyParams& p);

struct SmoothGradient {
    Vec3 dH_dM;      // equals the angular velocity A M
    Vec3 dH_dgamma;  // ambient gradient in R^3
};

SmoothGradient energy_gradient_smooth(const BodyState& s, const BodyParams& p);

double energy_smooth(const BodyState& s, const BodyParams& p);

StateRate field_smooth(const BodyState& s, const BodyParams& p);

struct SmoothIntegrals {
    double p_phi = 0.0;  // M3
    double p_psi = 0.0;  // (M, gamma)
};

SmoothIntegrals integrals_smooth(const BodyState& s);

/// Energy in the chart (gamma3, gamma3_dot, phi, p_phi, p_psi).
double reduced_energy_smooth(double gamma3, double gamma3_dot, double p_phi,
                             double p_psi, const BodyParams& p);

/// d/dgamma3 of reduced_energy_smooth at gamma3_dot = 0. Its zeros are the
/// regular precessions.
double reduced_energy_slope_smooth(double gamma3, double p_phi, double p_psi,
                                   const BodyParams& p);

}  // namespace rollmono
