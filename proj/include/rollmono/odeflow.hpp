// Adaptive integration of a rolling-body vector field on M^5 with unit-sphere
// renormalisation, continuous tracking of the self-rotation angle and
// location of Poincare section crossings.
#pragma once

#include <cstddef>
#include <functional>

#include "rollmono/core.hpp"

namespace rollmono {

using FieldFn = std::function<StateRate(const BodyState&)>;
using SectionFn = std::function<double(const BodyState&)>;

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.5;
    bool renorm = true;
    /// Horizon for section searches, measured from the start time.
    double max_time = 1000.0;
    std::size_t max_steps = 5'000'000;
    /// When positive, trajectories are sampled on this uniform grid instead
    /// of at every accepted step.
    double output_dt = 0.0;

    /// Throws ConfigError for tolerances outside (0, 1e-2] or non-positive steps.
    void validate() const;
};

struct SectionEvent {
    double t = 0.0;
    BodyState state;
    double phi_unwrapped = 0.0;
};

/// Initial value of the tracked angle: euler_phi(gamma), or 0 on the axis.
double initial_phi(const Vec3& gamma);

/// Integrates from t_begin to t_end. The first sample is the initial state
/// with phi_unwrapped = phi0.
/// Throws StepSizeUnderflow or ToleranceNotMet.
Trajectory integrate(const FieldFn& field, const BodyState& state0, double t_begin,
                     double t_end, const IntegratorConfig& cfg, double phi0);

inline Trajectory integrate(const FieldFn& field, const BodyState& state0, double t_begin,
                            double t_end, const IntegratorConfig& cfg) {
    return integrate(field, state0, t_begin, t_end, cfg, initial_phi(state0.gamma));
}

/// Time guard excluding the departure point from crossing detection.
inline constexpr double kSectionGuard = 1e-8;

/// First crossing after t0 + kSectionGuard where `section` vanishes while
/// moving in `direction` (+1: increasing, -1: decreasing).
/// Throws NoCrossingFound when cfg.max_time elapses first.
SectionEvent next_section_crossing(const FieldFn& field, const BodyState& state0,
                                   const SectionFn& section, int direction,
                                   const IntegratorConfig& cfg, double t0 = 0.0,
                                   double phi0 = 0.0);

/// One explicit 7(8) Runge-Kutta step of fixed length, with phi carried
/// along. Used for dense evaluation inside accepted steps and for the
/// order test.
struct FlowPoint {
    BodyState state;
    double phi = 0.0;
};
FlowPoint fixed_step(const FieldFn& field, const FlowPoint& from, double dt);

/// The section used by the monodromy construction: s = d(gamma3)/dt.
SectionFn gamma3_rate_section(FieldFn field);

}  // namespace rollmono
