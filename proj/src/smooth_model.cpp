#include "rollmono/smooth_model.hpp"

namespace rollmono {

ContactGeometry contact_geometry(const Vec3& gamma, const BodyParams& p) {
    const Vec3 bdiag = p.shape_diag();
    const Vec3 bg{bdiag[0] * gamma[0], bdiag[1] * gamma[1], bdiag[2] * gamma[2]};
    const double s2 = dot(gamma, bg);
    const double s = std::sqrt(s2);
    ContactGeometry out;
    out.r = -bg / s;
    // d/dgamma (-B gamma / s) = -B / s + (B gamma)(B gamma)^T / s^3
    out.dr_dgamma = Mat3::outer(bg, bg) * (1.0 / (s2 * s)) -
                    Mat3::diag(bdiag[0], bdiag[1], bdiag[2]) * (1.0 / s);
    return out;
}

Mat3 smooth_mobility(const Vec3& gamma, const BodyParams& p) {
    const Vec3 a = cross(gamma, contact_vector(gamma, p));
    const Vec3 inv{1.0 / p.I1, 1.0 / p.I1, 1.0 / p.I3};
    const Vec3 u{inv[0] * a[0], inv[1] * a[1], inv[2] * a[2]};
    const double denom = 1.0 + p.m * dot(a, u);
    return Mat3::diag(inv[0], inv[1], inv[2]) - Mat3::outer(u, u) * (p.m / denom);
}

SmoothGradient energy_gradient_smooth(const BodyState& s, const BodyParams& p) {
    const ContactGeometry geo = contact_geometry(s.gamma, p);
    const Vec3 a = cross(s.gamma, geo.r);
    const Vec3 omega = smooth_mobility(s.gamma, p) * s.M;
    // Kinetic part: -1/2 omega^T d(A^-1) omega = -m (a, omega) d(a, omega).
    // (a, omega) = (r, omega x gamma), so its gamma-gradient at fixed omega is
    // r x omega + (dr/dgamma)^T (omega x gamma).
    const Vec3 d_a_omega = cross(geo.r, omega) + transpose(geo.dr_dgamma) * cross(omega, s.gamma);
    const Vec3 dH_dgamma = d_a_omega * (-p.m * dot(a, omega)) - geo.r * (p.m * p.g);
    return {omega, dH_dgamma};
}

double energy_smooth(const BodyState& s, const BodyParams& p) {
    const Vec3 r = contact_vector(s.gamma, p);
    const Vec3 omega = smooth_mobility(s.gamma, p) * s.M;
    return 0.5 * dot(s.M, omega) - p.m * p.g * dot(r, s.gamma);
}

StateRate field_smooth(const BodyState& s, const BodyParams& p) {
    const SmoothGradient grad = energy_gradient_smooth(s, p);
    return {cross(s.M, grad.dH_dM) + cross(s.gamma, grad.dH_dgamma),
            cross(s.gamma, grad.dH_dM)};
}

SmoothIntegrals integrals_smooth(const BodyState& s) {
    return {s.M[2], dot(s.M, s.gamma)};
}

double reduced_energy_smooth(double gamma3, double gamma3_dot, double p_phi,
                             double p_psi, const BodyParams& p) {
    const double b1s = p.b1 * p.b1;
    const double b3s = p.b3 * p.b3;
    const double g2 = gamma3 * gamma3;
    const double height2 = b1s - (b1s - b3s) * g2;
    // Height of the centre of mass is sqrt(height2); its rate squared gives
    // m (b1^2 - b3^2)^2 gamma3^2 / height2.
    const double kinetic_coeff =
        p.m * (b1s - b3s) * (b1s - b3s) * g2 / height2 + p.I1 / (1.0 - g2);
    const double lever = p_psi - p_phi * gamma3;
    return 0.5 * kinetic_coeff * gamma3_dot * gamma3_dot +
           lever * lever / (2.0 * p.I1 * (1.0 - g2)) + p_phi * p_phi / (2.0 * p.I3) +
           p.m * p.g * std::sqrt(height2);
}

double reduced_energy_slope_smooth(double gamma3, double p_phi, double p_psi,
                                   const BodyParams& p) {
    const double b1s = p.b1 * p.b1;
    const double b3s = p.b3 * p.b3;
    const double g2 = gamma3 * gamma3;
    const double one_minus = 1.0 - g2;
    return (p_psi - p_phi * gamma3) * (p_psi * gamma3 - p_phi) /
               (p.I1 * one_minus * one_minus) +
           p.m * p.g * (b3s - b1s) * gamma3 / std::sqrt(b1s - (b1s - b3s) * g2);
}

}  // namespace rollmono
