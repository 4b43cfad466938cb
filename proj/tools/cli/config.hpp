// Run configuration for the rollmono command line tool.
//
// The file format is INI: `key = value` lines grouped under [section]
// headers, `;` or `#` comments (inline ones after whitespace). Every key is optional; unknown sections or
// keys are rejected so that typos do not silently fall back to defaults.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rollmono/bifurcation.hpp"
#include "rollmono/monodromy.hpp"

namespace rollmono::cli {

struct SimulateSpec {
    double t_end = 50.0;
    double output_dt = 0.01;
    double theta = 1.0;
    double phi = 0.4;
    Vec3 M{0.3, -0.2, 0.5};
};

struct IntegralsSpec {
    double t_end = 100.0;
    int states = 20;
    double output_dt = 1.0;
};

struct GMatrixSpec {
    double gamma3_lo = -0.99;
    double gamma3_hi = 0.99;
    int n = 199;
};

/// A plane {j1 = value} or {j2 = value}, named after the model's integrals.
struct PlaneSpec {
    FixedAxis axis = FixedAxis::J1Fixed;
    double value = 0.157;
};

struct LoopSpec {
    /// Unresolved plane, see parse_plane.
    std::string plane = "j1=0.157";
    Enclose enclose = Enclose::Both;
    double radius = 0.05;
    int n_samples = 128;
    double phi0 = 0.0;
    TurningBranch branch = TurningBranch::LowerTurning;
};

struct SliceSpec {
    double plane_value = 0.157;
    double varying_lo = -1.5;
    double varying_hi = 1.5;
    int n = 301;
};

struct RunConfig {
    Model model = Model::Smooth;
    BodyParams params;
    IntegratorConfig integrator;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 20240917;
    unsigned threads = 0;

    SimulateSpec simulate;
    IntegralsSpec integrals;
    GMatrixSpec gmatrix;
    LoopSpec loop;
    GridSpec grid;
    SliceSpec slice;

    /// Throws ConfigError on any out-of-range value.
    void validate() const;
};

/// Parses INI text on top of `base`. `origin` names the source in messages.
RunConfig parse_config(const std::string& text, RunConfig base = {},
                       const std::string& origin = "<config>");

/// Reads and parses a file; missing or unreadable files are ConfigErrors.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// "p_psi=0.157", "c2=-0.1", "j1=0". Smooth names are p_psi/p_phi, rough
/// names c1/c2; j1/j2 work for both.
PlaneSpec parse_plane(const std::string& text, Model model);
std::string plane_name(FixedAxis axis, Model model);

Enclose parse_enclose(const std::string& text);
std::string to_string(Enclose e);

/// Non-negative integer thread count; empty means "unset".
std::optional<unsigned> parse_threads(const std::string& text);

/// Reads ROLLMONO_THREADS.
std::optional<unsigned> threads_from_env();

}  // namespace rollmono::cli
