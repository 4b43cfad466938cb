// Ellipsoid of revolution rolling without slipping on a rough plane.
//
// The system is nonholonomic. It keeps the energy, an invariant measure and
// two integrals linear in M whose coefficients come from the fundamental
// matrix G(gamma3) of a 2x2 linear system in the rotation-invariant
// variables (K1, K2).
#pragma once

#include <array>
#include <vector>

#include "rollmono/core.hpp"

namespace rollmono {

struct Mat2 {
    std::array<std::array<double, 2>, 2> m{};

    static constexpr Mat2 identity() {
        Mat2 r;
        r.m[0][0] = r.m[1][1] = 1.0;
        return r;
    }
    constexpr double operator()(std::size_t i, std::size_t j) const { return m[i][j]; }
    constexpr double& operator()(std::size_t i, std::size_t j) { return m[i][j]; }
    constexpr double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    constexpr std::array<double, 2> operator*(const std::array<double, 2>& x) const {
        return {m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]};
    }
    /// Solves this * x = k.
    std::array<double, 2> solve(const std::array<double, 2>& k) const;
};

/// Operator mapping omega to M about the contact point:
/// I + m (|r|^2 Id - r (x) r).
Mat3 rolling_inertia(const Vec3& gamma, const BodyParams& p);

Vec3 omega_from_momentum(const BodyState& s, const BodyParams& p);

StateRate field_rough(const BodyState& s, const BodyParams& p);

double energy_rough(const BodyState& s, const BodyParams& p);

/// Density of the invariant measure, 1 / sqrt(I1 I3 + m (r, I r)).
double measure_density(const Vec3& gamma, const BodyParams& p);

/// The same density written as a function of gamma3 alone.
double measure_density_gamma3(double gamma3, const BodyParams& p);

struct KVariables {
    double K1 = 0.0;
    double K2 = 0.0;
};

/// K1 = M1 g1 + M2 g2 + (b3^2 / b1^2) M3 g3, K2 = omega3 / rho.
KVariables k_variables(const BodyState& s, const BodyParams& p);

/// K2 through its explicit expression in M and gamma.
double k2_closed_form(const BodyState& s, const BodyParams& p);

/// Coefficient matrix of dK/dgamma3 = A(gamma3) K; traceless.
Mat2 k_system_matrix(double gamma3, const BodyParams& p);

struct FundamentalMatrix {
    double gamma3 = 0.0;
    Mat2 entries = Mat2::identity();
};

/// Solves dG/dgamma3 = A(gamma3) G from G(0) = Id to `gamma3_target`.
/// Throws ToleranceNotMet when the adaptive solve cannot meet `tol`.
FundamentalMatrix fundamental_matrix(double gamma3_target, const BodyParams& p,
                                     double tol = 1e-12);

struct RoughIntegrals {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// C = G(gamma3)^-1 K by a direct solve for G.
RoughIntegrals integrals_rough(const BodyState& s, const BodyParams& p, double tol = 1e-12);

/// Piecewise cubic Hermite table of G over [-1 + margin, 1 - margin] using
/// the exact derivative A G at the nodes. Immutable after construction.
class FundamentalMatrixTable {
public:
    static constexpr std::size_t kDefaultNodes = 512;
    static constexpr double kDefaultMargin = 1e-6;

    explicit FundamentalMatrixTable(const BodyParams& p,
                                    std::size_t nodes = kDefaultNodes,
                                    double margin = kDefaultMargin, double tol = 1e-12);

    /// Interpolated G; falls back to a direct solve outside the table range.
    Mat2 operator()(double gamma3) const;

    const BodyParams& params() const { return params_; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    std::size_t size() const { return values_.size(); }

private:
    BodyParams params_;
    double lo_;
    double hi_;
    double step_;
    double tol_;
    std::vector<Mat2> values_;
    std::vector<Mat2> slopes_;
};

RoughIntegrals integrals_rough(const BodyState& s, const FundamentalMatrixTable& table);

}  // namespace rollmono
