#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "rollmono/battery.hpp"
#include "rollmono/errors.hpp"
#include "rollmono/rough_model.hpp"
#include "rollmono/smooth_model.hpp"

namespace rollmono::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::filesystem::path output_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
    return cfg.out_dir;
}

std::string j_name(Model model, int which) {
    if (model == Model::Smooth) return which == 1 ? "p_psi" : "p_phi";
    return which == 1 ? "c1" : "c2";
}

// The rough integrals through a direct solve for G, independent of the table
// used inside the flow.
LinearIntegrals exact_integrals(const RollingSystem& sys, const BodyState& s) {
    if (sys.model() == Model::Smooth) return sys.linear_integrals(s);
    const RoughIntegrals c = integrals_rough(s, sys.params());
    return {c.c1, c.c2};
}

Json files_json(const std::vector<std::filesystem::path>& files) {
    Json a = Json::array();
    for (const auto& f : files) a.push_back(f.string());
    return a;
}

std::string branch_name(TurningBranch b) {
    return b == TurningBranch::LowerTurning ? "lower" : "upper";
}

}  // namespace

std::string projection_axis(Model model, FixedAxis axis) {
    if (axis == FixedAxis::J1Fixed) return "M3";
    return model == Model::Smooth ? "p_psi" : "c1";
}

double projection_value(const RollingSystem& sys, FixedAxis axis, const BodyState& s) {
    if (axis == FixedAxis::J1Fixed) return s.M[2];
    return exact_integrals(sys, s).j1;
}

Json cmd_simulate(const RunConfig& cfg) {
    const auto dir = output_dir(cfg);
    const RollingSystem sys(cfg.model, cfg.params);
    const BodyState s0{cfg.simulate.M, gamma_from_angles(cfg.simulate.theta, cfg.simulate.phi)};
    IntegratorConfig ic = cfg.integrator;
    ic.output_dt = cfg.simulate.output_dt;
    const Trajectory tr = integrate(sys.field_fn(), s0, 0.0, cfg.simulate.t_end, ic);

    const std::string stem = "trajectory_" + std::string(to_string(cfg.model));
    const auto csv_path = dir / (stem + ".csv");
    CsvWriter csv(csv_path, {"t (time)", "M1 (momentum)", "M2 (momentum)", "M3 (momentum)",
                             "gamma1 (1)", "gamma2 (1)", "gamma3 (1)", "phi (rad)", "h (energy)",
                             j_name(cfg.model, 1) + " (momentum)",
                             j_name(cfg.model, 2) + " (momentum)"});
    const double h0 = sys.energy(s0);
    const LinearIntegrals j0 = exact_integrals(sys, s0);
    double dh = 0.0, dj = 0.0;
    Series g3{"gamma3", {}, Series::Style::Line, palette(0)};
    for (const auto& x : tr) {
        const double h = sys.energy(x.state);
        const LinearIntegrals j = exact_integrals(sys, x.state);
        dh = std::max(dh, std::abs(h - h0));
        dj = std::max({dj, std::abs(j.j1 - j0.j1), std::abs(j.j2 - j0.j2)});
        const auto& M = x.state.M;
        const auto& g = x.state.gamma;
        csv.row({x.t, M[0], M[1], M[2], g[0], g[1], g[2], x.phi_unwrapped, h, j.j1, j.j2});
        g3.points.push_back({x.t, g[2]});
    }
    csv.close();

    const auto svg_path = dir / (stem + "_gamma3.svg");
    Plot plot;
    plot.title = "gamma3(t), " + std::string(to_string(cfg.model)) + " plane";
    plot.x_label = "t";
    plot.y_label = "gamma3";
    plot.series.push_back(std::move(g3));
    emit_svg(svg_path, plot);

    Json r;
    r["command"] = "simulate";
    r["model"] = to_string(cfg.model);
    r["samples"] = tr.size();
    r["t_end"] = cfg.simulate.t_end;
    r["energy_drift"] = dh;
    r["integral_drift"] = dj;
    r["files"] = files_json({csv_path, svg_path});
    return r;
}

Json cmd_integrals(const RunConfig& cfg) {
    const auto dir = output_dir(cfg);
    const RollingSystem sys(cfg.model, cfg.params);
    IntegratorConfig ic = cfg.integrator;
    ic.output_dt = cfg.integrals.output_dt;
    std::mt19937_64 rng(cfg.seed);

    Json states = Json::array();
    double max_h = 0.0, max_j1 = 0.0, max_j2 = 0.0;
    for (int i = 0; i < cfg.integrals.states; ++i) {
        const BodyState s0 = random_state(rng);
        const double h0 = sys.energy(s0);
        const LinearIntegrals j0 = exact_integrals(sys, s0);
        double dh = 0.0, d1 = 0.0, d2 = 0.0;
        for (const auto& x : integrate(sys.field_fn(), s0, 0.0, cfg.integrals.t_end, ic)) {
            const LinearIntegrals j = exact_integrals(sys, x.state);
            dh = std::max(dh, std::abs(sys.energy(x.state) - h0));
            d1 = std::max(d1, std::abs(j.j1 - j0.j1));
            d2 = std::max(d2, std::abs(j.j2 - j0.j2));
        }
        max_h = std::max(max_h, dh);
        max_j1 = std::max(max_j1, d1);
        max_j2 = std::max(max_j2, d2);
        Json s;
        s["index"] = i;
        s["h"] = h0;
        s[j_name(cfg.model, 1)] = j0.j1;
        s[j_name(cfg.model, 2)] = j0.j2;
        s["drift_h"] = dh;
        s["drift_" + j_name(cfg.model, 1)] = d1;
        s["drift_" + j_name(cfg.model, 2)] = d2;
        states.push_back(std::move(s));
    }

    Json r;
    r["command"] = "integrals";
    r["model"] = to_string(cfg.model);
    r["seed"] = cfg.seed;
    r["t_end"] = cfg.integrals.t_end;
    r["output_dt"] = cfg.integrals.output_dt;
    r["max_drift_h"] = max_h;
    r["max_drift_" + j_name(cfg.model, 1)] = max_j1;
    r["max_drift_" + j_name(cfg.model, 2)] = max_j2;
    r["states"] = std::move(states);
    const auto path = dir / ("integrals_" + std::string(to_string(cfg.model)) + ".json");
    write_json(path, r);

    Json summary = r;
    summary.erase("states");
    summary["files"] = files_json({path});
    return summary;
}

Json cmd_gmatrix(const RunConfig& cfg, std::optional<double> gamma3) {
    const auto dir = output_dir(cfg);
    std::vector<double> nodes;
    if (gamma3) {
        if (!(*gamma3 > -1.0 && *gamma3 < 1.0)) throw ConfigError("--gamma3 must lie in (-1, 1)");
        nodes.push_back(*gamma3);
    } else {
        const auto& g = cfg.gmatrix;
        for (int i = 0; i < g.n; ++i)
            nodes.push_back(g.n == 1 ? g.gamma3_lo
                                     : g.gamma3_lo + (g.gamma3_hi - g.gamma3_lo) * i / (g.n - 1));
    }

    const auto path = dir / "gmatrix.csv";
    CsvWriter csv(path, {"gamma3 (1)", "G11 (1)", "G12 (1)", "G21 (1)", "G22 (1)",
                         "det_defect (1)"});
    double worst = 0.0;
    Json rows = Json::array();
    for (double g3 : nodes) {
        const Mat2 G = fundamental_matrix(g3, cfg.params).entries;
        const double defect = std::abs(G.det() - 1.0);
        worst = std::max(worst, defect);
        csv.row({g3, G(0, 0), G(0, 1), G(1, 0), G(1, 1), defect});
        if (gamma3)
            rows.push_back({{"gamma3", g3},
                            {"G", {{G(0, 0), G(0, 1)}, {G(1, 0), G(1, 1)}}},
                            {"det_defect", defect}});
    }
    csv.close();

    Json r;
    r["command"] = "gmatrix";
    r["nodes"] = nodes.size();
    r["max_det_defect"] = worst;
    if (gamma3) r["rows"] = std::move(rows);
    const auto report = dir / "gmatrix.json";
    r["files"] = files_json({path, report});
    write_json(report, r);
    return r;
}

Json cmd_bifurcate(const RunConfig& cfg) {
    const auto dir = output_dir(cfg);
    const RollingSystem sys(cfg.model, cfg.params);
    const std::string model = std::string(to_string(cfg.model));
    const std::string n1 = j_name(cfg.model, 1), n2 = j_name(cfg.model, 2);
    const BifurcationDiagram d = build_diagram(sys, cfg.grid, cfg.threads);
    std::vector<std::filesystem::path> files;

    const auto surface_path = dir / ("surface_" + model + ".csv");
    {
        CsvWriter csv(surface_path, {n1 + " (momentum)", n2 + " (momentum)", "gamma3 (1)",
                                     "h (energy)", "residual (energy)"});
        for (const auto& s : d.surface) csv.row({s.j1, s.j2, s.gamma3, s.h, s.residual});
        csv.close();
    }
    files.push_back(surface_path);

    const auto curves_path = dir / ("curves_" + model + ".csv");
    {
        CsvWriter csv(curves_path, {"pole", "M3 (momentum)", n1 + " (momentum)",
                                    n2 + " (momentum)", "h (energy)"});
        for (int c = 0; c < 2; ++c)
            for (const auto& v : d.singular_curves[c])
                csv.row({std::string(c == 0 ? "upper" : "lower"), v.spin, v.j1, v.j2, v.h});
        csv.close();
    }
    files.push_back(curves_path);

    Json slices = Json::array();
    for (FixedAxis axis : {FixedAxis::J1Fixed, FixedAxis::J2Fixed}) {
        const std::string fixed = plane_name(axis, cfg.model);
        const std::string varying = axis == FixedAxis::J1Fixed ? n2 : n1;
        const auto& sl = cfg.slice;
        const DiagramSlice s =
            slice_diagram(sys, axis, sl.plane_value, sl.varying_lo, sl.varying_hi, sl.n);
        const std::string stem = "slice_" + model + "_" + fixed;

        const auto csv_path = dir / (stem + ".csv");
        CsvWriter csv(csv_path, {varying + " (momentum)", "branch", "h (energy)"});
        std::size_t branches = 0;
        for (std::size_t i = 0; i < s.varying.size(); ++i) {
            branches = std::max(branches, s.surface_h[i].size());
            for (std::size_t b = 0; b < s.surface_h[i].size(); ++b)
                csv.row({s.varying[i], static_cast<long long>(b), s.surface_h[i][b]});
        }
        csv.close();

        Plot plot;
        plot.title = model + " plane, slice " + fixed + " = " + format_number(sl.plane_value);
        plot.x_label = varying;
        plot.y_label = "h";
        for (std::size_t b = 0; b < branches; ++b) {
            Series line{b == 0 ? "regular precessions" : "", {}, Series::Style::Line, palette(0)};
            for (std::size_t i = 0; i < s.varying.size(); ++i)
                line.points.push_back({s.varying[i], b < s.surface_h[i].size()
                                                         ? s.surface_h[i][b]
                                                         : std::nan("")});
            plot.series.push_back(std::move(line));
        }
        plot.series.push_back({"vertical rotations",
                               {{s.singular_points[0][0], s.singular_points[0][1]},
                                {s.singular_points[1][0], s.singular_points[1][1]}},
                               Series::Style::Markers,
                               palette(1)});
        const auto svg_path = dir / (stem + ".svg");
        emit_svg(svg_path, plot);
        files.push_back(csv_path);
        files.push_back(svg_path);

        Json j;
        j["plane"] = fixed;
        j["value"] = sl.plane_value;
        j["threads"] = {{{varying, s.singular_points[0][0]}, {"h", s.singular_points[0][1]}},
                        {{varying, s.singular_points[1][0]}, {"h", s.singular_points[1][1]}}};
        slices.push_back(std::move(j));
    }

    double worst = 0.0;
    for (const auto& s : d.surface) worst = std::max(worst, s.residual);
    Json r;
    r["command"] = "bifurcate";
    r["model"] = model;
    r["surface_samples"] = d.surface.size();
    r["max_residual"] = worst;
    r["slices"] = std::move(slices);
    r["files"] = files_json(files);
    return r;
}

Json cmd_monodromy(const RunConfig& cfg) {
    const auto dir = output_dir(cfg);
    const RollingSystem sys(cfg.model, cfg.params);
    const std::string model = std::string(to_string(cfg.model));
    const PlaneSpec plane = parse_plane(cfg.loop.plane, cfg.model);
    const Loop loop = thread_loop(sys, plane.axis, plane.value, cfg.loop.enclose, cfg.loop.radius,
                                  cfg.loop.n_samples);
    MonodromyConfig mc;
    mc.integrator = cfg.integrator;
    mc.branch = cfg.loop.branch;
    mc.phi0 = cfg.loop.phi0;
    mc.threads = cfg.threads;
    const MonodromyResult res = monodromy_index(sys, loop, mc);

    const std::string fixed = plane_name(plane.axis, cfg.model);
    const std::string varying = plane_name(
        plane.axis == FixedAxis::J1Fixed ? FixedAxis::J2Fixed : FixedAxis::J1Fixed, cfg.model);
    const std::string stem =
        "monodromy_" + model + "_" + fixed + "_" + to_string(cfg.loop.enclose);
    const std::string third = projection_axis(cfg.model, plane.axis);

    Json doc;
    doc["command"] = "monodromy";
    doc["model"] = model;
    Json lj;
    lj["plane"] = fixed;
    lj["plane_value"] = plane.value;
    lj["enclose"] = to_string(cfg.loop.enclose);
    lj["center"] = {{varying, loop.center.varying}, {"h", loop.center.h}};
    lj["radius"] = loop.radius;
    lj["n_samples"] = loop.n_samples;
    lj["phi0"] = cfg.loop.phi0;
    lj["branch"] = branch_name(cfg.loop.branch);
    doc["loop"] = std::move(lj);
    doc["k"] = res.k;
    doc["closure_defect"] = res.closure_defect;

    const auto image_csv = dir / (stem + "_image.csv");
    const auto cloud_csv = dir / (stem + "_projection.csv");
    CsvWriter image(image_csv, {"alpha (rad)", "delta_phi (rad)", "phi_image (rad)",
                                "return_time (time)"});
    CsvWriter cloud(cloud_csv, {"alpha (rad)", "gamma1 (1)", "gamma2 (1)", third + " (momentum)"});
    Json samples = Json::array();
    Series curve{"image of phi = phi0", {}, Series::Style::Line, palette(0), std::numbers::pi};
    Series xy{"", {}, Series::Style::Line, palette(0)};
    Series xz{"", {}, Series::Style::Line, palette(0)};
    for (const auto& s : res.samples) {
        const double wrapped = wrap_two_pi(cfg.loop.phi0 + s.delta_phi);
        const double z = projection_value(sys, plane.axis, s.image);
        image.row({s.alpha, s.delta_phi, wrapped, s.return_time});
        cloud.row({s.alpha, s.image.gamma[0], s.image.gamma[1], z});
        samples.push_back({{"alpha", s.alpha},
                           {"delta_phi", s.delta_phi},
                           {"return_time", s.return_time}});
        curve.points.push_back({s.alpha, wrapped});
        xy.points.push_back({s.image.gamma[0], s.image.gamma[1]});
        xz.points.push_back({s.image.gamma[0], z});
    }
    image.close();
    cloud.close();
    doc["samples"] = std::move(samples);

    const double a0 = res.samples.front().alpha;
    Plot torus;
    torus.title = model + ", " + fixed + " = " + format_number(plane.value) + ", " +
                  to_string(cfg.loop.enclose) + ": k = " + std::to_string(res.k);
    torus.x_label = "alpha";
    torus.y_label = "phi";
    torus.x_range = {a0, a0 + kTwoPi};
    torus.y_range = {-0.1, kTwoPi + 0.1};
    torus.series.push_back({"phi = phi0",
                            {{a0, wrap_two_pi(cfg.loop.phi0)}, {a0 + kTwoPi, wrap_two_pi(cfg.loop.phi0)}},
                            Series::Style::Line,
                            palette(7)});
    torus.series.push_back(std::move(curve));
    const auto torus_svg = dir / (stem + "_torus.svg");
    emit_svg(torus_svg, torus);

    Plot pxy;
    pxy.title = model + ", image curve projected on (gamma1, gamma2)";
    pxy.x_label = "gamma1";
    pxy.y_label = "gamma2";
    pxy.series.push_back(std::move(xy));
    const auto xy_svg = dir / (stem + "_gamma1_gamma2.svg");
    emit_svg(xy_svg, pxy);

    Plot pxz;
    pxz.title = model + ", image curve projected on (gamma1, " + third + ")";
    pxz.x_label = "gamma1";
    pxz.y_label = third;
    pxz.series.push_back(std::move(xz));
    const auto xz_svg = dir / (stem + "_gamma1_" + third + ".svg");
    emit_svg(xz_svg, pxz);

    const auto json_path = dir / (stem + ".json");
    write_json(json_path, doc);

    Json r = doc;
    r.erase("samples");
    r["samples"] = res.samples.size();
    r["files"] = files_json({json_path, image_csv, cloud_csv, torus_svg, xy_svg, xz_svg});
    return r;
}

bool cmd_reproduce(const RunConfig& cfg, std::ostream& out) {
    const auto dir = output_dir(cfg);
    BatteryOptions opt;
    opt.params = cfg.params;
    opt.integrator = cfg.integrator;
    opt.threads = cfg.threads;
    opt.seed = cfg.seed;
    opt.radius = cfg.loop.radius;
    opt.n_samples = cfg.loop.n_samples;

    char line[256];
    out << "monodromy table, loops of radius " << format_number(opt.radius) << " with "
        << opt.n_samples << " samples\n";
    std::snprintf(line, sizeof line, "%-7s %-14s %-6s %4s %10s %14s  %s\n", "model", "plane",
                  "loop", "k", "expected", "closure", "status");
    out << line;
    Json table = Json::array();
    for (Model m : {Model::Smooth, Model::Rough})
        for (const LoopCase& c : loop_table(m, opt.plane_value, opt)) {
            const std::string plane =
                plane_name(c.axis, c.model) + "=" + format_number(c.plane_value);
            const bool ok = std::abs(c.k) == c.expected_abs_k && c.closure_defect <= 0.05;
            std::snprintf(line, sizeof line, "%-7s %-14s %-6s %4d %10s %14.3e  %s\n",
                          std::string(to_string(c.model)).c_str(), plane.c_str(),
                          to_string(c.enclose).c_str(), c.k,
                          ("|k|=" + std::to_string(c.expected_abs_k)).c_str(), c.closure_defect,
                          ok ? "ok" : "MISMATCH");
            out << line;
            table.push_back({{"model", to_string(c.model)},
                             {"plane", plane},
                             {"enclose", to_string(c.enclose)},
                             {"k", c.k},
                             {"expected_abs_k", c.expected_abs_k},
                             {"closure_defect", c.closure_defect},
                             {"samples", c.samples}});
        }
    out << '\n';

    bool all = true;
    Json criteria = Json::array();
    for (const auto& check : battery()) {
        const CriterionResult r = check(opt);
        all = all && r.passed;
        out << "criterion " << r.id << ' ' << (r.passed ? "PASS" : "FAIL") << ": " << r.title
            << " -- " << r.detail << '\n';
        out.flush();
        criteria.push_back(
            {{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
    }
    Json doc;
    doc["command"] = "reproduce";
    doc["seed"] = cfg.seed;
    doc["table"] = std::move(table);
    doc["criteria"] = std::move(criteria);
    doc["all_passed"] = all;
    write_json(dir / "reproduce.json", doc);
    return all;
}

namespace {

Json error_json(const std::string& kind, const std::string& message, int code) {
    return {{"error", kind}, {"message", message}, {"exit_code", code}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rolling ellipsoid of revolution: integrals, bifurcation diagrams and monodromy",
                 "rollmono"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, model_name, out_dir;
    app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--model", model_name, "smooth or rough (overrides [run] model)")
        ->check(CLI::IsMember({"smooth", "rough"}));
    app.add_option("--out", out_dir, "output directory (overrides [run] out)");

    auto* simulate = app.add_subcommand("simulate", "integrate one trajectory to CSV");
    auto* integrals = app.add_subcommand("integrals", "conservation drift over random states");
    auto* gmatrix = app.add_subcommand("gmatrix", "fundamental matrix G(gamma3) table");
    std::optional<double> gamma3;
    gmatrix->add_option("--gamma3", gamma3, "single node instead of the configured grid");
    auto* bifurcate = app.add_subcommand("bifurcate", "bifurcation diagram and slices");
    auto* monodromy = app.add_subcommand("monodromy", "monodromy index of one loop");
    std::string plane, enclose;
    std::optional<double> radius;
    std::optional<int> samples;
    monodromy->add_option("--plane", plane, "fixed integral, e.g. p_psi=0.157, p_phi=0.157, c1=0");
    monodromy->add_option("--enclose", enclose, "upper, lower or both")
        ->check(CLI::IsMember({"upper", "lower", "both"}));
    monodromy->add_option("--radius", radius, "loop radius");
    monodromy->add_option("--samples", samples, "samples on the loop (at least 64)");
    auto* reproduce = app.add_subcommand("reproduce", "loop table and acceptance battery");

    int code = 0;
    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::ParseError& e) {
            throw ConfigError(e.what());
        }

        RunConfig cfg;
        if (auto t = threads_from_env()) cfg.threads = *t;
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        if (!model_name.empty()) cfg.model = parse_model(model_name);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!plane.empty()) cfg.loop.plane = plane;
        if (!enclose.empty()) cfg.loop.enclose = parse_enclose(enclose);
        if (radius) cfg.loop.radius = *radius;
        if (samples) cfg.loop.n_samples = *samples;
        cfg.validate();

        Json summary;
        if (simulate->parsed()) summary = cmd_simulate(cfg);
        else if (integrals->parsed()) summary = cmd_integrals(cfg);
        else if (gmatrix->parsed()) summary = cmd_gmatrix(cfg, gamma3);
        else if (bifurcate->parsed()) summary = cmd_bifurcate(cfg);
        else if (monodromy->parsed()) summary = cmd_monodromy(cfg);
        else if (reproduce->parsed()) return cmd_reproduce(cfg, out) ? 0 : 3;
        out << summary.dump(2) << '\n';
        return 0;
    } catch (const ConfigError& e) {
        code = 1;
        err << error_json(e.kind(), e.what(), code).dump() << '\n';
    } catch (const IoError& e) {
        code = 1;
        err << error_json(e.kind(), e.what(), code).dump() << '\n';
    } catch (const Error& e) {
        code = 2;
        err << error_json(e.kind(), e.what(), code).dump() << '\n';
    } catch (const std::exception& e) {
        code = 2;
        err << error_json("InternalError", e.what(), code).dump() << '\n';
    }
    return code;
}

}  // namespace rollmono::cli
