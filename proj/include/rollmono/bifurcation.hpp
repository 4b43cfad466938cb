// Bifurcation diagrams in integral space: the surface of regular
// precessions and the two curves of vertical rotations.
#pragma once

#include <array>
#include <vector>

#include "rollmono/model.hpp"

namespace rollmono {

struct PrecessionPoint {
    double gamma3 = 0.0;
    double h = 0.0;
    /// |d(section energy)/d gamma3| at the returned root; for the rough
    /// model the larger of the step and half-step difference quotients.
    double residual = 0.0;
};

/// d/dgamma3 of the section energy at fixed (j1, j2). Smooth: analytic.
/// Rough: five-point central difference with step 1e-5.
double section_energy_slope(const RollingSystem& sys, double gamma3, double j1, double j2);

inline constexpr double kSlopeStep = 1e-5;

/// Regular precessions with integral values (j1, j2), ascending in gamma3.
std::vector<PrecessionPoint> precession_points(const RollingSystem& sys, double j1, double j2);

/// Vertical rotation with gamma = (0, 0, +1) (Upper) or (0, 0, -1) (Lower).
enum class Pole { Upper, Lower };

struct VerticalCurvePoint {
    double spin = 0.0;  // M3
    double j1 = 0.0;
    double j2 = 0.0;
    double h = 0.0;
};

/// Integral values of the vertical rotation M = (0, 0, spin) at `pole`.
/// The rough model evaluates G at gamma3 = +-(1 - 1e-9) by a direct solve.
VerticalCurvePoint vertical_rotation(const RollingSystem& sys, Pole pole, double spin);

/// Both singular curves sampled at n spins uniformly over [spin_lo, spin_hi].
/// Index 0: Upper pole, index 1: Lower pole.
std::array<std::vector<VerticalCurvePoint>, 2> vertical_curves(const RollingSystem& sys,
                                                               double spin_lo, double spin_hi,
                                                               int n);

struct GridSpec {
    double j1_lo = -1.5;
    double j1_hi = 1.5;
    int j1_n = 31;
    double j2_lo = -1.5;
    double j2_hi = 1.5;
    int j2_n = 31;
    double spin_lo = -3.0;
    double spin_hi = 3.0;
    int spin_n = 121;

    void validate() const;
};

struct SurfaceSample {
    double j1 = 0.0;
    double j2 = 0.0;
    double gamma3 = 0.0;
    double h = 0.0;
    double residual = 0.0;
};

struct BifurcationDiagram {
    Model model = Model::Smooth;
    std::vector<SurfaceSample> surface;
    std::array<std::vector<VerticalCurvePoint>, 2> singular_curves;
};

/// Surface samples over the grid plus both singular curves. Grid rows are
/// evaluated in parallel on `threads` workers (0 = hardware concurrency).
BifurcationDiagram build_diagram(const RollingSystem& sys, const GridSpec& grid,
                                 unsigned threads = 0);

/// Which linear integral a plane (or a loop) holds constant.
enum class FixedAxis { J1Fixed, J2Fixed };

/// Intersection of the diagram with the plane {j_fixed = value}; points are
/// (varying integral, h).
struct DiagramSlice {
    FixedAxis axis = FixedAxis::J1Fixed;
    double plane_value = 0.0;
    /// One entry per varying-coordinate sample; each holds the surface
    /// energies there, ascending.
    std::vector<double> varying;
    std::vector<std::vector<double>> surface_h;
    /// Where the two singular curves pierce the plane (Upper, Lower).
    std::array<std::array<double, 2>, 2> singular_points{};
};

DiagramSlice slice_diagram(const RollingSystem& sys, FixedAxis axis, double plane_value,
                           double varying_lo, double varying_hi, int n);

/// Per-unit-spin direction (j1, j2) of a singular curve; integral values are
/// linear in the spin along each curve.
std::array<double, 2> thread_direction(const RollingSystem& sys, Pole pole);

/// Point where the singular curve of `pole` pierces the plane
/// {j_fixed = plane_value}, as (varying integral, h).
std::array<double, 2> thread_in_plane(const RollingSystem& sys, Pole pole, FixedAxis axis,
                                      double plane_value);

/// Smallest |h_thread - h_surface| over the regular precessions sharing the
/// thread's (j1, j2) at the given spin; +inf when there are none.
double thread_surface_gap(const RollingSystem& sys, Pole pole, double spin);

}  // namespace rollmono
