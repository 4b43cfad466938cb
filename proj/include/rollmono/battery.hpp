// Reproduction battery: the monodromy table, conservation, Liouville,
// vertical-rotation, bifurcation-surface, measure and invariance checks.
// Shared by the acceptance test binary and `rollmono reproduce`.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rollmono/monodromy.hpp"

namespace rollmono {

struct BatteryOptions {
    BodyParams params;
    IntegratorConfig integrator;
    /// Plane value of the loop table.
    double plane_value = 0.157;
    double radius = 0.05;
    int n_samples = 128;
    unsigned threads = 0;
    std::uint64_t seed = 20240917;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// One loop of the monodromy table.
struct LoopCase {
    Model model = Model::Smooth;
    FixedAxis axis = FixedAxis::J1Fixed;
    double plane_value = 0.0;
    Enclose enclose = Enclose::Upper;
    int k = 0;
    double closure_defect = 0.0;
    std::size_t samples = 0;
    /// Expected |k| for this case.
    int expected_abs_k = 0;
};

std::string describe(const LoopCase& c);

/// The six loops (Upper, Lower, Both in each plane) of one model.
std::vector<LoopCase> loop_table(Model model, double plane_value, const BatteryOptions& opt);

/// Bounded random phase point: gamma uniform on the sphere, M uniform in
/// [-1, 1]^3.
BodyState random_state(std::mt19937_64& rng);

/// Ambient central-difference divergence of rho * field_rough in R^6 with
/// the given step. The field is tangent to every sphere |gamma| = const,
/// so at |gamma| = 1 this equals the divergence on M^5 with respect to
/// d^3M times the area element of the sphere.
double weighted_divergence_rough(const BodyState& s, const BodyParams& p, double step);

/// Largest endpoint error ratio err(dt) / err(dt/2) over fixed 7(8) steps
/// against a tol 1e-13 reference, on a fixed smooth-model trajectory.
double integrator_order_ratio(const BodyParams& p);

using CriterionFn = std::function<CriterionResult(const BatteryOptions&)>;

CriterionResult check_monodromy_smooth(const BatteryOptions& opt);
CriterionResult check_monodromy_rough(const BatteryOptions& opt);
CriterionResult check_double_pinched(const BatteryOptions& opt);
CriterionResult check_conservation(const BatteryOptions& opt);
CriterionResult check_liouville(const BatteryOptions& opt);
CriterionResult check_vertical_curves(const BatteryOptions& opt);
CriterionResult check_bifurcation_surface(const BatteryOptions& opt);
CriterionResult check_measure(const BatteryOptions& opt);
CriterionResult check_invariants(const BatteryOptions& opt);

/// Criteria 1..9 in order.
const std::vector<CriterionFn>& battery();

std::vector<CriterionResult> run_battery(const BatteryOptions& opt);

}  // namespace rollmono
