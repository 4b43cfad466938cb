#include "rollmono/odeflow.hpp"

#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <limits>
#include <optional>

#include "rollmono/errors.hpp"

namespace rollmono {

namespace odeint = boost::numeric::odeint;

namespace {

using Packed = std::array<double, 7>;

Packed pack(const BodyState& s, double phi) {
    return {s.M[0], s.M[1], s.M[2], s.gamma[0], s.gamma[1], s.gamma[2], phi};
}

BodyState unpack(const Packed& x) {
    return {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}};
}

struct PackedSystem {
    const FieldFn* field;
    void operator()(const Packed& x, Packed& dx, double /*t*/) const {
        const BodyState s = unpack(x);
        const StateRate f = (*field)(s);
        for (std::size_t i = 0; i < 3; ++i) {
            dx[i] = f.M[i];
            dx[3 + i] = f.gamma[i];
        }
        dx[6] = phi_rate(s.gamma, f.gamma);
    }
};

void renormalize(Packed& x) {
    const double n = std::sqrt(x[3] * x[3] + x[4] * x[4] + x[5] * x[5]);
    x[3] /= n;
    x[4] /= n;
    x[5] /= n;
}

bool finite(const Packed& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

using Stepper = odeint::runge_kutta_fehlberg78<Packed>;

// Error per unit step: the local error of a step of length dt < 1 must stay
// below dt (abs_tol + rel_tol |x|), so the accumulated error over a time span
// T is bounded by roughly T times the tolerance.
class UnitStepChecker {
public:
    using value_type = double;
    using algebra_type = odeint::array_algebra;
    using operations_type = odeint::default_operations;

    UnitStepChecker(double abs_tol, double rel_tol) : inner_(abs_tol, rel_tol, 1.0, 0.0) {}

    template <class State, class Deriv, class Err, class Time>
    double error(algebra_type& algebra, const State& x, const Deriv& dxdt, Err& err,
                 Time dt) const {
        const double e = inner_.error(algebra, x, dxdt, err, dt);
        return e / std::min(1.0, std::abs(static_cast<double>(dt)));
    }

private:
    odeint::default_error_checker<double, algebra_type, operations_type> inner_;
};

// Adaptive driver shared by integrate and next_section_crossing. `on_step`
// receives (t_prev, x_prev, t, x) after each accepted, renormalised step
// and returns false to stop.
template <class OnStep>
void drive(const FieldFn& field, Packed x, double t, double t_end, const IntegratorConfig& cfg,
           OnStep&& on_step) {
    odeint::controlled_runge_kutta<Stepper, UnitStepChecker> stepper(
        UnitStepChecker(cfg.abs_tol, cfg.rel_tol));
    PackedSystem sys{&field};
    const double span = t_end - t;
    double dt = std::min({cfg.max_step, 1e-2, span});
    std::size_t steps = 0;
    while (t < t_end) {
        if (++steps > cfg.max_steps)
            throw ToleranceNotMet("step budget exhausted before reaching the end time");
        dt = std::min({dt, cfg.max_step, t_end - t});
        const double min_dt = 1e-13 * std::max(1.0, std::abs(t));
        const Packed x_prev = x;
        const double t_prev = t;
        const auto res = stepper.try_step(sys, x, t, dt);
        if (res == odeint::fail) {
            if (dt < min_dt)
                throw StepSizeUnderflow("step size underflow near t = " + std::to_string(t));
            continue;
        }
        if (!finite(x))
            throw StepSizeUnderflow("non-finite state near t = " + std::to_string(t_prev) +
                                    " (trajectory on the symmetry axis?)");
        if (cfg.renorm) renormalize(x);
        if (!on_step(t_prev, x_prev, t, x)) return;
    }
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2 && abs_tol > 0.0 && abs_tol <= 1e-2))
        throw ConfigError("integrator tolerances must lie in (0, 1e-2]");
    if (!(max_step > 0.0)) throw ConfigError("max_step must be positive");
    if (!(max_time > 0.0)) throw ConfigError("max_time must be positive");
    if (output_dt < 0.0) throw ConfigError("output_dt must be non-negative");
}

double initial_phi(const Vec3& gamma) {
    if (gamma[0] * gamma[0] + gamma[1] * gamma[1] < 1e-20) return 0.0;
    return euler_phi(gamma);
}

FlowPoint fixed_step(const FieldFn& field, const FlowPoint& from, double dt) {
    Stepper stepper;
    Packed x = pack(from.state, from.phi);
    stepper.do_step(PackedSystem{&field}, x, 0.0, dt);
    return {unpack(x), x[6]};
}

Trajectory integrate(const FieldFn& field, const BodyState& state0, double t_begin,
                     double t_end, const IntegratorConfig& cfg, double phi0) {
    cfg.validate();
    Trajectory out;
    out.push_back({t_begin, state0, phi0});
    if (!(t_end > t_begin)) return out;

    if (cfg.output_dt <= 0.0) {
        drive(field, pack(state0, phi0), t_begin, t_end, cfg,
              [&](double, const Packed&, double t, const Packed& x) {
                  out.push_back({t, unpack(x), x[6]});
                  return true;
              });
        return out;
    }

    // Uniform output: integrate grid interval by grid interval so every
    // sample is an accepted-step endpoint.
    Packed x = pack(state0, phi0);
    double t = t_begin;
    for (std::size_t k = 1; t < t_end; ++k) {
        const double next = std::min(t_begin + cfg.output_dt * static_cast<double>(k), t_end);
        drive(field, x, t, next, cfg, [&](double, const Packed&, double tn, const Packed& xn) {
            x = xn;
            t = tn;
            return true;
        });
        t = next;
        out.push_back({t, unpack(x), x[6]});
    }
    return out;
}

SectionFn gamma3_rate_section(FieldFn field) {
    return [field = std::move(field)](const BodyState& s) { return field(s).gamma[2]; };
}

SectionEvent next_section_crossing(const FieldFn& field, const BodyState& state0,
                                   const SectionFn& section, int direction,
                                   const IntegratorConfig& cfg, double t0, double phi0) {
    cfg.validate();
    if (direction != 1 && direction != -1)
        throw ConfigError("section direction must be +1 or -1");
    const double guard_time = t0 + kSectionGuard;
    const auto sdir = [&](const BodyState& s) { return direction * section(s); };

    std::optional<SectionEvent> event;
    drive(field, pack(state0, phi0), t0, t0 + cfg.max_time, cfg,
          [&](double t_prev, const Packed& x_prev, double t, const Packed& x) {
              if (t <= guard_time) return true;
              const FlowPoint base{unpack(x_prev), x_prev[6]};
              double left = t_prev;
              double s_left = sdir(base.state);
              if (left < guard_time) {
                  left = guard_time;
                  s_left = sdir(fixed_step(field, base, left - t_prev).state);
              }
              const double s_right = sdir(unpack(x));
              if (!(s_left < 0.0 && s_right >= 0.0)) return true;

              const auto eval = [&](double tau) {
                  FlowPoint p = fixed_step(field, base, tau - t_prev);
                  if (cfg.renorm) p.state.gamma = p.state.gamma / norm(p.state.gamma);
                  return p;
              };
              double root = t;
              if (s_right != 0.0) {
                  std::uintmax_t iters = 200;
                  const auto bracket = boost::math::tools::toms748_solve(
                      [&](double tau) { return sdir(eval(tau).state); }, left, t, s_left,
                      s_right, boost::math::tools::eps_tolerance<double>(52), iters);
                  const FlowPoint a = eval(bracket.first);
                  const FlowPoint b = eval(bracket.second);
                  root = std::abs(section(a.state)) <= std::abs(section(b.state))
                             ? bracket.first
                             : bracket.second;
              }
              const FlowPoint hit = eval(root);
              event = SectionEvent{root, hit.state, hit.phi};
              return false;
          });
    if (!event)
        throw NoCrossingFound("no section crossing within the time horizon " +
                              std::to_string(cfg.max_time));
    return *event;
}

}  // namespace rollmono
