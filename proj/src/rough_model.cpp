#include "rollmono/rough_model.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>

#include "rollmono/errors.hpp"
#include "rollmono/smooth_model.hpp"

namespace rollmono {

namespace odeint = boost::numeric::odeint;

std::array<double, 2> Mat2::solve(const std::array<double, 2>& k) const {
    const double d = det();
    if (d == 0.0 || !std::isfinite(d)) throw SingularSystem("singular 2x2 matrix");
    return {(m[1][1] * k[0] - m[0][1] * k[1]) / d, (m[0][0] * k[1] - m[1][0] * k[0]) / d};
}

Mat3 rolling_inertia(const Vec3& gamma, const BodyParams& p) {
    const Vec3 r = contact_vector(gamma, p);
    return p.inertia() + (Mat3::identity() * dot(r, r) - Mat3::outer(r, r)) * p.m;
}

Vec3 omega_from_momentum(const BodyState& s, const BodyParams& p) {
    Vec3 omega;
    // Symmetric positive definite for positive parameters.
    solve(rolling_inertia(s.gamma, p), s.M, omega, 0.0);
    return omega;
}

StateRate field_rough(const BodyState& s, const BodyParams& p) {
    const ContactGeometry geo = contact_geometry(s.gamma, p);
    Vec3 omega;
    solve(p.inertia() + (Mat3::identity() * dot(geo.r, geo.r) - Mat3::outer(geo.r, geo.r)) * p.m,
          s.M, omega, 0.0);
    const Vec3 gamma_dot = cross(s.gamma, omega);
    const Vec3 r_dot = geo.dr_dgamma * gamma_dot;
    const Vec3 M_dot = cross(s.M, omega) + cross(r_dot, cross(omega, geo.r)) * p.m +
                       cross(geo.r, s.gamma) * (p.m * p.g);
    return {M_dot, gamma_dot};
}

double energy_rough(const BodyState& s, const BodyParams& p) {
    const Vec3 r = contact_vector(s.gamma, p);
    return 0.5 * dot(s.M, omega_from_momentum(s, p)) - p.m * p.g * dot(r, s.gamma);
}

double measure_density(const Vec3& gamma, const BodyParams& p) {
    const Vec3 r = contact_vector(gamma, p);
    const Vec3 in = p.inertia_diag();
    const double rIr = in[0] * r[0] * r[0] + in[1] * r[1] * r[1] + in[2] * r[2] * r[2];
    return 1.0 / std::sqrt(p.I1 * p.I3 + p.m * rIr);
}

double measure_density_gamma3(double gamma3, const BodyParams& p) {
    const double b1s = p.b1 * p.b1;
    const double b3s = p.b3 * p.b3;
    const double g2 = gamma3 * gamma3;
    const double height2 = b1s * (1.0 - g2) + b3s * g2;
    const double rIr = (p.I1 * b1s * b1s * (1.0 - g2) + p.I3 * b3s * b3s * g2) / height2;
    return 1.0 / std::sqrt(p.I1 * p.I3 + p.m * rIr);
}

namespace {

double k1_of(const BodyState& s, const BodyParams& p) {
    const double ratio = (p.b3 * p.b3) / (p.b1 * p.b1);
    return s.M[0] * s.gamma[0] + s.M[1] * s.gamma[1] + ratio * s.M[2] * s.gamma[2];
}

}  // namespace

KVariables k_variables(const BodyState& s, const BodyParams& p) {
    return {k1_of(s, p), omega_from_momentum(s, p)[2] / measure_density(s.gamma, p)};
}

double k2_closed_form(const BodyState& s, const BodyParams& p) {
    const double b1s = p.b1 * p.b1;
    const double b3s = p.b3 * p.b3;
    const double g3 = s.gamma[2];
    const double coupling = p.m * b1s * b3s * g3 / (b1s + (b3s - b1s) * g3 * g3);
    return measure_density(s.gamma, p) * (coupling * k1_of(s, p) + p.I1 * s.M[2]);
}

Mat2 k_system_matrix(double gamma3, const BodyParams& p) {
    const double b1s = p.b1 * p.b1;
    const double b3s = p.b3 * p.b3;
    const double rho = measure_density_gamma3(gamma3, p);
    const double g2 = gamma3 * gamma3;
    const double den = b1s + (b3s - b1s) * g2;
    Mat2 a;
    a(0, 1) = rho * p.I3 * (b3s - b1s) / b1s;
    a(1, 0) = p.m * rho * b1s * b1s * (b3s - b1s) * (1.0 - g2) / (den * den);
    return a;
}

namespace {

using GState = std::array<double, 4>;

struct GSystem {
    const BodyParams& p;
    void operator()(const GState& g, GState& dg, double s) const {
        const Mat2 a = k_system_matrix(s, p);
        // row-major (g0 g1; g2 g3)
        dg[0] = a(0, 1) * g[2];
        dg[1] = a(0, 1) * g[3];
        dg[2] = a(1, 0) * g[0];
        dg[3] = a(1, 0) * g[1];
    }
};

Mat2 to_mat(const GState& g) {
    Mat2 r;
    r(0, 0) = g[0];
    r(0, 1) = g[1];
    r(1, 0) = g[2];
    r(1, 1) = g[3];
    return r;
}

Mat2 slope_at(double s, const Mat2& g, const BodyParams& p) {
    const Mat2 a = k_system_matrix(s, p);
    Mat2 d;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) d(i, j) = a(i, 0) * g(0, j) + a(i, 1) * g(1, j);
    return d;
}

// Integrates from 0 through each of `targets` (monotone, same sign) and
// returns G at every target.
std::vector<Mat2> integrate_g(const std::vector<double>& targets, const BodyParams& p,
                              double tol) {
    if (!(tol > 0.0) || tol > 1e-2) throw ToleranceNotMet("tolerance outside (0, 1e-2]");
    std::vector<Mat2> out;
    out.reserve(targets.size());
    GState g{1.0, 0.0, 0.0, 1.0};
    double s = 0.0;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<GState>>(tol, tol);
    try {
        for (double target : targets) {
            double dt = (target > s ? 1.0 : -1.0) * std::min(1e-3, std::abs(target - s));
            std::size_t steps = 0;
            while (s != target) {
                if (++steps > 200000) throw ToleranceNotMet("fundamental matrix: step budget exhausted");
                if ((target - s) / dt < 1.0) dt = target - s;
                if (stepper.try_step(GSystem{p}, g, s, dt) == odeint::fail &&
                    std::abs(dt) < 1e-15)
                    throw ToleranceNotMet("fundamental matrix: step size underflow");
                if (std::abs(target - s) < 1e-15 * std::max(1.0, std::abs(target))) s = target;
            }
            out.push_back(to_mat(g));
        }
    } catch (const odeint::step_adjustment_error& e) {
        throw ToleranceNotMet(std::string("fundamental matrix: ") + e.what());
    }
    return out;
}

}  // namespace

FundamentalMatrix fundamental_matrix(double gamma3_target, const BodyParams& p, double tol) {
    if (!(gamma3_target > -1.0 && gamma3_target < 1.0))
        throw ToleranceNotMet("fundamental matrix requested outside (-1, 1)");
    return {gamma3_target, integrate_g({gamma3_target}, p, tol).front()};
}

RoughIntegrals integrals_rough(const BodyState& s, const BodyParams& p, double tol) {
    const KVariables k = k_variables(s, p);
    const double g3 = std::clamp(s.gamma[2], -1.0 + 1e-9, 1.0 - 1e-9);
    const auto c = fundamental_matrix(g3, p, tol).entries.solve({k.K1, k.K2});
    return {c[0], c[1]};
}

FundamentalMatrixTable::FundamentalMatrixTable(const BodyParams& p, std::size_t nodes,
                                               double margin, double tol)
    : params_(p), lo_(-1.0 + margin), hi_(1.0 - margin), tol_(tol) {
    if (nodes < 4) throw ConfigError("fundamental matrix table needs at least 4 nodes");
    step_ = (hi_ - lo_) / static_cast<double>(nodes - 1);
    std::vector<double> abscissae(nodes);
    for (std::size_t i = 0; i < nodes; ++i) abscissae[i] = lo_ + step_ * static_cast<double>(i);
    abscissae.back() = hi_;

    // Sweep outward from zero in both directions.
    std::vector<double> up;
    std::vector<double> down;
    for (double s : abscissae) (s >= 0.0 ? up : down).push_back(s);
    std::reverse(down.begin(), down.end());
    const auto g_up = integrate_g(up, p, tol);
    const auto g_down = integrate_g(down, p, tol);

    values_.resize(nodes);
    slopes_.resize(nodes);
    const std::size_t n_down = down.size();
    for (std::size_t i = 0; i < n_down; ++i) values_[n_down - 1 - i] = g_down[i];
    for (std::size_t i = 0; i < up.size(); ++i) values_[n_down + i] = g_up[i];
    for (std::size_t i = 0; i < nodes; ++i) slopes_[i] = slope_at(abscissae[i], values_[i], p);
}

Mat2 FundamentalMatrixTable::operator()(double gamma3) const {
    if (gamma3 < lo_ || gamma3 > hi_) {
        const double g3 = std::clamp(gamma3, -1.0 + 1e-9, 1.0 - 1e-9);
        return fundamental_matrix(g3, params_, tol_).entries;
    }
    const double u = (gamma3 - lo_) / step_;
    const auto i = std::min(static_cast<std::size_t>(u), values_.size() - 2);
    const double t = u - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    Mat2 r;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            r(a, b) = h00 * values_[i](a, b) + h10 * step_ * slopes_[i](a, b) +
                      h01 * values_[i + 1](a, b) + h11 * step_ * slopes_[i + 1](a, b);
    return r;
}

RoughIntegrals integrals_rough(const BodyState& s, const FundamentalMatrixTable& table) {
    const KVariables k = k_variables(s, table.params());
    const auto c = table(s.gamma[2]).solve({k.K1, k.K2});
    return {c[0], c[1]};
}

}  // namespace rollmono
