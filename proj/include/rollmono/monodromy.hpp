// Monodromy around the focus threads, read off the Poincare map of the
// turning-point section.
//
// Each loop in integral space sweeps a family of invariant tori. On every
// torus the section {d(gamma3)/dt = 0, gamma3 minimal} is a circle of the
// symmetry field, parametrised by the self-rotation angle phi. The loop
// angle alpha and phi are coordinates on the resulting transversal torus.
// The image of the cycle {phi = 0} under one return winds k times in phi as
// alpha runs over [0, 2 pi); k is the off-diagonal entry of the monodromy
// matrix.
#pragma once

#include <vector>

#include "rollmono/bifurcation.hpp"
#include "rollmono/odeflow.hpp"
#include "rollmono/torus.hpp"

namespace rollmono {

struct LoopCenter {
    double varying = 0.0;
    double fixed = 0.0;
    double h = 0.0;
};

/// Circle in a plane {j_fixed = const}:
/// varying = varying0 + r sin(alpha), h = h0 + r cos(alpha).
struct Loop {
    Model model = Model::Smooth;
    FixedAxis fixed_axis = FixedAxis::J1Fixed;
    LoopCenter center;
    double radius = 0.05;
    int n_samples = 128;

    IntegralPoint at(double alpha) const;
    /// Sample abscissae sit at half-step offsets, 2 pi (i + 1/2) / n, so that
    /// no sample lands on the loop's intersections with the planes
    /// j1 = +-j2 exactly (tori through the poles gamma3 = +-1).
    double sample_alpha(int i) const;
};

/// Throws ConfigError for radius <= 0 or n_samples < 64.
Loop make_loop(Model model, FixedAxis fixed_axis, const LoopCenter& center, double radius,
               int n_samples);

enum class Enclose { Upper, Lower, Both };

/// Loop in the plane {j_fixed = plane_value} around the chosen thread(s).
/// Single-thread loops are centred on the thread with the given radius;
/// a Both loop is centred between the threads with radius equal to half
/// their separation plus `radius`.
Loop thread_loop(const RollingSystem& sys, FixedAxis fixed_axis, double plane_value,
                 Enclose enclose, double radius = 0.05, int n_samples = 128);

struct MonodromyConfig {
    IntegratorConfig integrator;
    TurningBranch branch = TurningBranch::LowerTurning;
    /// Self-rotation angle of the base cycle nu.
    double phi0 = 0.0;
    /// Budget of extra samples inserted where consecutive increments differ
    /// by pi/2 or more.
    int max_refinements = 256;
    /// Worker threads for the sample sweep (0 = hardware concurrency).
    unsigned threads = 0;
};

struct ReturnSample {
    double alpha = 0.0;
    /// Continuous (unwrapped across alpha) phi-displacement of one return.
    double delta_phi = 0.0;
    double return_time = 0.0;
    BodyState start;
    BodyState image;
};

/// phi-displacement of the Poincare return from a state on the section.
/// Propagates NoCrossingFound.
double rotation_increment(const RollingSystem& sys, const BodyState& state_on_section,
                          const IntegratorConfig& cfg);

/// Same, with the crossing time and the image state.
ReturnSample poincare_return(const RollingSystem& sys, const BodyState& state_on_section,
                             const IntegratorConfig& cfg);

struct MonodromyResult {
    Loop loop;
    /// Ordered by alpha over [alpha_0, alpha_0 + 2 pi]; the last entry is
    /// the first torus again, integrated independently.
    std::vector<ReturnSample> samples;
    int k = 0;
    double closure_defect = 0.0;
};

/// Throws LoopHitsSingularity when a torus on the loop cannot be built and
/// WindingAmbiguous when refinement cannot bring all gaps below pi/2.
MonodromyResult monodromy_index(const RollingSystem& sys, const Loop& loop,
                                const MonodromyConfig& cfg);

}  // namespace rollmono
