// Shared value types for the rolling ellipsoid models: small fixed-size
// vector algebra, body parameters, phase points on M^5 and the Euler chart.
#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace rollmono {

struct Vec3 {
    std::array<double, 3> v{0.0, 0.0, 0.0};

    constexpr Vec3() = default;
    constexpr Vec3(double x, double y, double z) : v{x, y, z} {}

    constexpr double& operator[](std::size_t i) { return v[i]; }
    constexpr double operator[](std::size_t i) const { return v[i]; }

    constexpr Vec3& operator+=(const Vec3& o) {
        for (std::size_t i = 0; i < 3; ++i) v[i] += o.v[i];
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        for (std::size_t i = 0; i < 3; ++i) v[i] -= o.v[i];
        return *this;
    }
    constexpr Vec3& operator*=(double s) {
        for (auto& x : v) x *= s;
        return *this;
    }
    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
    friend constexpr Vec3 operator-(Vec3 a) { return a *= -1.0; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static constexpr Mat3 diag(double a, double b, double c) {
        Mat3 r;
        r.m[0][0] = a;
        r.m[1][1] = b;
        r.m[2][2] = c;
        return r;
    }
    static constexpr Mat3 identity() { return diag(1.0, 1.0, 1.0); }
    static constexpr Mat3 outer(const Vec3& a, const Vec3& b) {
        Mat3 r;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) r.m[i][j] = a[i] * b[j];
        return r;
    }

    constexpr double& operator()(std::size_t i, std::size_t j) { return m[i][j]; }
    constexpr double operator()(std::size_t i, std::size_t j) const { return m[i][j]; }

    constexpr Vec3 row(std::size_t i) const { return {m[i][0], m[i][1], m[i][2]}; }

    constexpr Mat3& operator+=(const Mat3& o) {
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    constexpr Mat3& operator*=(double s) {
        for (auto& r : m)
            for (auto& x : r) x *= s;
        return *this;
    }
    friend constexpr Mat3 operator+(Mat3 a, const Mat3& b) { return a += b; }
    friend constexpr Mat3 operator-(Mat3 a, const Mat3& b) { return a += (Mat3(b) *= -1.0); }
    friend constexpr Mat3 operator*(Mat3 a, double s) { return a *= s; }
    friend constexpr Mat3 operator*(double s, Mat3 a) { return a *= s; }

    friend constexpr Vec3 operator*(const Mat3& a, const Vec3& x) {
        return {dot(a.row(0), x), dot(a.row(1), x), dot(a.row(2), x)};
    }
    friend constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = 0; k < 3; ++k) r.m[i][j] += a.m[i][k] * b.m[k][j];
        return r;
    }
};

constexpr Mat3 transpose(const Mat3& a) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
    return r;
}

double determinant(const Mat3& a);

/// Solves a x = b by Gaussian elimination with partial pivoting.
/// Returns false when the pivot falls below `singular_tol` times the
/// largest row norm.
bool solve(const Mat3& a, const Vec3& b, Vec3& x, double singular_tol = 1e-13);

/// Rotation about the body symmetry axis e3 by `angle`, acting on the first
/// two components.
inline Vec3 rotate_about_axis(const Vec3& a, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * a[0] - s * a[1], s * a[0] + c * a[1], a[2]};
}

/// Axisymmetric ellipsoid: I = diag(I1, I1, I3), semi-axes (b1, b1, b3).
struct BodyParams {
    double I1 = 1.0;
    double I3 = 1.5;
    double b1 = 1.0;
    double b3 = 2.0;
    double m = 1.0;
    double g = 1.0;

    /// Throws ConfigError unless every field is strictly positive.
    void validate() const;

    Mat3 inertia() const { return Mat3::diag(I1, I1, I3); }
    Vec3 inertia_diag() const { return {I1, I1, I3}; }
    Vec3 shape_diag() const { return {b1 * b1, b1 * b1, b3 * b3}; }
};

/// A phase point on M^5: angular momentum about the contact point and the
/// unit normal of the plane, both in body axes.
struct BodyState {
    Vec3 M;
    Vec3 gamma{0.0, 0.0, 1.0};
};

/// Time derivative of a BodyState.
struct StateRate {
    Vec3 M;
    Vec3 gamma;
};

/// SO(2) action generated by the symmetry field: rotates (M1, M2) and
/// (gamma1, gamma2) together.
inline BodyState rotate_state(const BodyState& s, double angle) {
    return {rotate_about_axis(s.M, angle), rotate_about_axis(s.gamma, angle)};
}

/// Shift in phi of the symmetry rotation carrying `from` to `to`, in (-pi, pi].
/// Least-squares fit over the horizontal parts of both gamma and M, so it
/// stays well defined on the poles gamma = (0, 0, +-1) as long as M is not
/// vertical there.
double symmetry_angle(const BodyState& from, const BodyState& to);

struct TrajectorySample {
    double t = 0.0;
    BodyState state;
    double phi_unwrapped = 0.0;
};

using Trajectory = std::vector<TrajectorySample>;

/// Self-rotation angle phi = atan2(gamma1, gamma2) of the chart
/// gamma = (sin theta sin phi, sin theta cos phi, cos theta).
/// Throws VerticalStateError on the symmetry axis.
double euler_phi(const Vec3& gamma);

Vec3 gamma_from_angles(double theta, double phi);

/// Rate of the self-rotation angle along a motion; singular on the axis.
inline double phi_rate(const Vec3& gamma, const Vec3& gamma_dot) {
    const double rho2 = gamma[0] * gamma[0] + gamma[1] * gamma[1];
    return (gamma_dot[0] * gamma[1] - gamma[0] * gamma_dot[1]) / rho2;
}

/// Wraps an angle to [0, 2 pi).
double wrap_two_pi(double angle);

}  // namespace rollmono
