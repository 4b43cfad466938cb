#include "rollmono/core.hpp"

#include <numbers>
#include <utility>

#include "rollmono/errors.hpp"

namespace rollmono {

double determinant(const Mat3& a) {
    return dot(a.row(0), cross(a.row(1), a.row(2)));
}

bool solve(const Mat3& a, const Vec3& b, Vec3& x, double singular_tol) {
    std::array<std::array<double, 4>, 3> aug{};
    double scale = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) aug[i][j] = a(i, j);
        aug[i][3] = b[i];
        scale = std::max(scale, norm(a.row(i)));
    }
    if (scale == 0.0) return false;
    for (std::size_t col = 0; col < 3; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < 3; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
        if (std::abs(aug[piv][col]) <= singular_tol * scale) return false;
        std::swap(aug[piv], aug[col]);
        for (std::size_t r = col + 1; r < 3; ++r) {
            const double f = aug[r][col] / aug[col][col];
            for (std::size_t c = col; c < 4; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    for (std::size_t ii = 3; ii-- > 0;) {
        double s = aug[ii][3];
        for (std::size_t c = ii + 1; c < 3; ++c) s -= aug[ii][c] * x[c];
        x[ii] = s / aug[ii][ii];
    }
    return true;
}

void BodyParams::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"I1", I1}, {"I3", I3}, {"b1", b1}, {"b3", b3}, {"m", m}, {"g", g}};
    for (const auto& [name, value] : fields) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw ConfigError(std::string("body parameter ") + name +
                              " must be strictly positive");
    }
}

double euler_phi(const Vec3& gamma) {
    if (gamma[0] * gamma[0] + gamma[1] * gamma[1] < 1e-20)
        throw VerticalStateError("self-rotation angle undefined on the symmetry axis");
    return std::atan2(gamma[0], gamma[1]);
}

Vec3 gamma_from_angles(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::sin(phi), st * std::cos(phi), std::cos(theta)};
}

double symmetry_angle(const BodyState& from, const BodyState& to) {
    double c = 0.0;
    double sn = 0.0;
    for (const auto& [a, b] : {std::pair{from.gamma, to.gamma}, std::pair{from.M, to.M}}) {
        c += a[0] * b[0] + a[1] * b[1];
        sn += a[1] * b[0] - a[0] * b[1];
    }
    return std::atan2(sn, c);
}

double wrap_two_pi(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(angle, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

}  // namespace rollmono
