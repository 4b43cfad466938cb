#include "cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "rollmono/errors.hpp"

namespace rollmono::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": expected a number, got '" + raw + "'");
    return v;
}

long long to_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": expected an integer, got '" + raw + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

// `key = value   ; note`: a ; or # after whitespace starts a comment.
std::string strip_comment(const std::string& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if ((v[i] == ';' || v[i] == '#') && (v[i - 1] == ' ' || v[i - 1] == '\t'))
            return v.substr(0, i);
    return v;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

template <class F>
Setter number(F field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) {
        field(c) = to_double(k, v);
    };
}

template <class F>
Setter integer(F field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) {
        const long long n = to_int(k, v);
        if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
            throw ConfigError(k + ": out of range");
        field(c) = static_cast<int>(n);
    };
}

const Schema& schema() {
    static const Schema s = [] {
        Schema m;
        auto& body = m["body"];
        body["I1"] = number([](RunConfig& c) -> double& { return c.params.I1; });
        body["I3"] = number([](RunConfig& c) -> double& { return c.params.I3; });
        body["b1"] = number([](RunConfig& c) -> double& { return c.params.b1; });
        body["b3"] = number([](RunConfig& c) -> double& { return c.params.b3; });
        body["m"] = number([](RunConfig& c) -> double& { return c.params.m; });
        body["g"] = number([](RunConfig& c) -> double& { return c.params.g; });

        auto& integ = m["integrator"];
        integ["rel_tol"] = number([](RunConfig& c) -> double& { return c.integrator.rel_tol; });
        integ["abs_tol"] = number([](RunConfig& c) -> double& { return c.integrator.abs_tol; });
        integ["max_step"] = number([](RunConfig& c) -> double& { return c.integrator.max_step; });
        integ["max_time"] = number([](RunConfig& c) -> double& { return c.integrator.max_time; });
        integ["renorm"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.integrator.renorm = to_bool(k, v);
        };
        integ["max_steps"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const long long n = to_int(k, v);
            if (n <= 0) throw ConfigError(k + ": must be positive");
            c.integrator.max_steps = static_cast<std::size_t>(n);
        };

        auto& run = m["run"];
        run["model"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.model = parse_model(trim(v));
        };
        run["out"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.out_dir = trim(v);
        };
        run["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const std::string s = trim(v);
            std::uint64_t seed = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
            if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
                throw ConfigError(k + ": expected an unsigned integer, got '" + v + "'");
            c.seed = seed;
        };
        run["threads"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const auto t = parse_threads(v);
            if (!t) throw ConfigError(k + ": empty value");
            c.threads = *t;
        };

        auto& sim = m["simulate"];
        sim["t_end"] = number([](RunConfig& c) -> double& { return c.simulate.t_end; });
        sim["output_dt"] = number([](RunConfig& c) -> double& { return c.simulate.output_dt; });
        sim["theta"] = number([](RunConfig& c) -> double& { return c.simulate.theta; });
        sim["phi"] = number([](RunConfig& c) -> double& { return c.simulate.phi; });
        sim["M1"] = number([](RunConfig& c) -> double& { return c.simulate.M[0]; });
        sim["M2"] = number([](RunConfig& c) -> double& { return c.simulate.M[1]; });
        sim["M3"] = number([](RunConfig& c) -> double& { return c.simulate.M[2]; });

        auto& ints = m["integrals"];
        ints["t_end"] = number([](RunConfig& c) -> double& { return c.integrals.t_end; });
        ints["output_dt"] = number([](RunConfig& c) -> double& { return c.integrals.output_dt; });
        ints["states"] = integer([](RunConfig& c) -> int& { return c.integrals.states; });

        auto& gm = m["gmatrix"];
        gm["gamma3_lo"] = number([](RunConfig& c) -> double& { return c.gmatrix.gamma3_lo; });
        gm["gamma3_hi"] = number([](RunConfig& c) -> double& { return c.gmatrix.gamma3_hi; });
        gm["n"] = integer([](RunConfig& c) -> int& { return c.gmatrix.n; });

        auto& loop = m["loop"];
        // Resolved against the model only when a loop is built, since
        // --model may override the file.
        loop["plane"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.loop.plane = trim(v);
        };
        loop["enclose"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.loop.enclose = parse_enclose(trim(v));
        };
        loop["radius"] = number([](RunConfig& c) -> double& { return c.loop.radius; });
        loop["samples"] = integer([](RunConfig& c) -> int& { return c.loop.n_samples; });
        loop["phi0"] = number([](RunConfig& c) -> double& { return c.loop.phi0; });
        loop["branch"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const std::string s = trim(v);
            if (s == "lower") c.loop.branch = TurningBranch::LowerTurning;
            else if (s == "upper") c.loop.branch = TurningBranch::UpperTurning;
            else throw ConfigError(k + ": expected lower or upper, got '" + v + "'");
        };

        auto& grid = m["grid"];
        grid["j1_lo"] = number([](RunConfig& c) -> double& { return c.grid.j1_lo; });
        grid["j1_hi"] = number([](RunConfig& c) -> double& { return c.grid.j1_hi; });
        grid["j1_n"] = integer([](RunConfig& c) -> int& { return c.grid.j1_n; });
        grid["j2_lo"] = number([](RunConfig& c) -> double& { return c.grid.j2_lo; });
        grid["j2_hi"] = number([](RunConfig& c) -> double& { return c.grid.j2_hi; });
        grid["j2_n"] = integer([](RunConfig& c) -> int& { return c.grid.j2_n; });
        grid["spin_lo"] = number([](RunConfig& c) -> double& { return c.grid.spin_lo; });
        grid["spin_hi"] = number([](RunConfig& c) -> double& { return c.grid.spin_hi; });
        grid["spin_n"] = integer([](RunConfig& c) -> int& { return c.grid.spin_n; });
        grid["slice_plane"] = number([](RunConfig& c) -> double& { return c.slice.plane_value; });
        grid["slice_lo"] = number([](RunConfig& c) -> double& { return c.slice.varying_lo; });
        grid["slice_hi"] = number([](RunConfig& c) -> double& { return c.slice.varying_hi; });
        grid["slice_n"] = integer([](RunConfig& c) -> int& { return c.slice.n; });
        return m;
    }();
    return s;
}

}  // namespace

void RunConfig::validate() const {
    params.validate();
    integrator.validate();
    grid.validate();
    if (!(simulate.t_end > 0.0)) throw ConfigError("simulate.t_end must be positive");
    if (!(simulate.output_dt > 0.0)) throw ConfigError("simulate.output_dt must be positive");
    if (!(integrals.t_end > 0.0)) throw ConfigError("integrals.t_end must be positive");
    if (!(integrals.output_dt > 0.0)) throw ConfigError("integrals.output_dt must be positive");
    if (integrals.states < 1) throw ConfigError("integrals.states must be at least 1");
    if (!(gmatrix.gamma3_lo > -1.0 && gmatrix.gamma3_hi < 1.0 &&
          gmatrix.gamma3_lo <= gmatrix.gamma3_hi))
        throw ConfigError("gmatrix range must satisfy -1 < gamma3_lo <= gamma3_hi < 1");
    if (gmatrix.n < 1) throw ConfigError("gmatrix.n must be at least 1");
    if (gmatrix.n == 1 && gmatrix.gamma3_lo != gmatrix.gamma3_hi)
        throw ConfigError("gmatrix.n = 1 needs gamma3_lo = gamma3_hi");
    parse_plane(loop.plane, model);
    if (!(loop.radius > 0.0)) throw ConfigError("loop.radius must be positive");
    if (loop.n_samples < 64) throw ConfigError("loop.samples must be at least 64");
    if (slice.n < 2 || !(slice.varying_lo < slice.varying_hi))
        throw ConfigError("grid slice needs slice_n >= 2 and slice_lo < slice_hi");
}

RunConfig parse_config(const std::string& text, RunConfig base, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(origin + ": key '" + section + "' outside any section");
        const auto sec = schema().find(section);
        if (sec == schema().end()) throw ConfigError(origin + ": unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            const auto entry = sec->second.find(key);
            if (entry == sec->second.end())
                throw ConfigError(origin + ": unknown key '" + key + "' in [" + section + "]");
            entry->second(base, section + "." + key, strip_comment(value.data()));
        }
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), std::move(base), path.string());
}

PlaneSpec parse_plane(const std::string& text, Model model) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("plane must look like name=value, got '" + text + "'");
    const std::string name = trim(text.substr(0, eq));
    PlaneSpec p;
    p.value = to_double("plane", text.substr(eq + 1));
    if (!std::isfinite(p.value)) throw ConfigError("plane value must be finite");
    const bool smooth = model == Model::Smooth;
    if (name == "j1" || name == (smooth ? "p_psi" : "c1")) p.axis = FixedAxis::J1Fixed;
    else if (name == "j2" || name == (smooth ? "p_phi" : "c2")) p.axis = FixedAxis::J2Fixed;
    else
        throw ConfigError("plane '" + name + "' is not an integral of the " +
                          std::string(to_string(model)) + " model");
    return p;
}

std::string plane_name(FixedAxis axis, Model model) {
    if (model == Model::Smooth) return axis == FixedAxis::J1Fixed ? "p_psi" : "p_phi";
    return axis == FixedAxis::J1Fixed ? "c1" : "c2";
}

Enclose parse_enclose(const std::string& text) {
    if (text == "upper") return Enclose::Upper;
    if (text == "lower") return Enclose::Lower;
    if (text == "both") return Enclose::Both;
    throw ConfigError("enclose must be upper, lower or both, got '" + text + "'");
}

std::string to_string(Enclose e) {
    switch (e) {
        case Enclose::Upper: return "upper";
        case Enclose::Lower: return "lower";
        case Enclose::Both: return "both";
    }
    return "?";
}

std::optional<unsigned> parse_threads(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) return std::nullopt;
    const long long n = to_int("threads", s);
    if (n < 0 || n > 4096) throw ConfigError("threads must be in [0, 4096], got '" + text + "'");
    return static_cast<unsigned>(n);
}

std::optional<unsigned> threads_from_env() {
    const char* v = std::getenv("ROLLMONO_THREADS");
    if (!v) return std::nullopt;
    return parse_threads(v);
}

}  // namespace rollmono::cli
