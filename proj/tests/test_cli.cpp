#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "rollmono/errors.hpp"

using namespace rollmono;
using namespace rollmono::cli;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rollmono_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "rollmono");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Invocation r;
    r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

Plot sample_plot() {
    Plot p;
    p.title = "sample <plot> & co";
    p.x_label = "alpha";
    p.y_label = "phi";
    Series wave{"wave", {}, Series::Style::Line, palette(0), kPi};
    for (int i = 0; i <= 40; ++i) {
        const double a = 2 * kPi * i / 40;
        wave.points.push_back({a, std::fmod(3.0 * a, 2 * kPi)});
    }
    p.series.push_back(wave);
    p.series.push_back({"marks", {{1.0, 1.0}, {2.0, 4.0}}, Series::Style::Markers, palette(1)});
    return p;
}

}  // namespace

TEST(Format, SeventeenDigits) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(format_number(-1e-20), "-9.9999999999999995e-21");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(std::strtod(format_number(1.0 / 3.0).c_str(), nullptr), 1.0 / 3.0);
}

TEST(Format, CsvQuoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, HeaderAndRows) {
    const fs::path dir = scratch("csv");
    {
        CsvWriter w(dir / "t.csv", {"t (time)", "name"});
        w.row({0.5, std::string("x,y")});
        w.row({1e-3, 7LL});
        EXPECT_THROW(w.row({1.0}), IoError);
        w.close();
    }
    EXPECT_EQ(slurp(dir / "t.csv"), "t (time),name\r\n0.5,\"x,y\"\r\n0.001,7\r\n");
    EXPECT_THROW(CsvWriter(dir / "missing" / "t.csv", {"a"}), IoError);
}

TEST(Svg, SplitsAtWrapJumps) {
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({double(i), std::fmod(0.5 * i, 2 * kPi)});
    const auto runs = split_at_jumps(pts, kPi);
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_EQ(runs[0].size() + runs[1].size(), pts.size());
    for (const auto& run : runs)
        for (std::size_t i = 1; i < run.size(); ++i) EXPECT_LE(std::abs(run[i].y - run[i - 1].y), kPi);
    pts.push_back({20.0, std::nan("")});
    pts.push_back({21.0, 0.1});
    EXPECT_EQ(split_at_jumps(pts, kPi).size(), 3u);
}

TEST(Svg, Deterministic) {
    const std::string a = render_svg(sample_plot());
    EXPECT_EQ(a, render_svg(sample_plot()));
    EXPECT_NE(a.find("<svg"), std::string::npos);
    EXPECT_NE(a.find("sample &lt;plot&gt; &amp; co"), std::string::npos);
    // Three wraps of 3 alpha over [0, 2 pi] give three polylines.
    std::size_t lines = 0;
    for (auto pos = a.find("<polyline"); pos != std::string::npos; pos = a.find("<polyline", pos + 1))
        ++lines;
    EXPECT_EQ(lines, 3u);
}

TEST(Svg, MatchesGoldenFile) {
    const fs::path golden = fs::path(ROLLMONO_TEST_DATA) / "golden_plot.svg";
    ASSERT_TRUE(fs::exists(golden)) << golden;
    EXPECT_EQ(render_svg(sample_plot()), slurp(golden));
}

TEST(Svg, EmptyDatasetIsConfigError) {
    Plot p;
    p.title = "empty";
    EXPECT_THROW(render_svg(p), ConfigError);
    p.series.push_back({"nothing", {}, Series::Style::Line, palette(0)});
    EXPECT_THROW(render_svg(p), ConfigError);
    p.series[0].points.push_back({std::nan(""), 1.0});
    EXPECT_THROW(render_svg(p), ConfigError);
}

TEST(Config, DefaultsAreBodyParameters) {
    const RunConfig c;
    EXPECT_EQ(c.params.I1, 1.0);
    EXPECT_EQ(c.params.I3, 1.5);
    EXPECT_EQ(c.params.b1, 1.0);
    EXPECT_EQ(c.params.b3, 2.0);
    EXPECT_EQ(c.params.m, 1.0);
    EXPECT_EQ(c.params.g, 1.0);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesSections) {
    const RunConfig c = parse_config(
        "; comment\n"
        "[run]\nmodel = rough\nseed = 7\nthreads = 3\nout = results\n"
        "[body]\nI3 = 2.5\n"
        "[integrator]\nrel_tol = 1e-9\nrenorm = false\n"
        "[loop]\nplane = c2=-0.1\nenclose = upper\nradius = 0.02\nsamples = 96\n"
        "[grid]\nspin_n = 11  ; fewer\nslice_plane = 0\n");
    EXPECT_EQ(c.model, Model::Rough);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.threads, 3u);
    EXPECT_EQ(c.out_dir, fs::path("results"));
    EXPECT_EQ(c.params.I3, 2.5);
    EXPECT_EQ(c.integrator.rel_tol, 1e-9);
    EXPECT_FALSE(c.integrator.renorm);
    EXPECT_EQ(c.loop.enclose, Enclose::Upper);
    EXPECT_EQ(c.loop.radius, 0.02);
    EXPECT_EQ(c.loop.n_samples, 96);
    EXPECT_EQ(c.grid.spin_n, 11);
    EXPECT_EQ(c.slice.plane_value, 0.0);
    const PlaneSpec p = parse_plane(c.loop.plane, c.model);
    EXPECT_EQ(p.axis, FixedAxis::J2Fixed);
    EXPECT_EQ(p.value, -0.1);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, SampleFileMatchesDefaults) {
    const RunConfig c = load_config(fs::path(ROLLMONO_SOURCE_DIR) / "config" / "rollmono.ini");
    const RunConfig d;
    EXPECT_EQ(c.model, d.model);
    EXPECT_EQ(c.seed, d.seed);
    EXPECT_EQ(c.integrator.rel_tol, d.integrator.rel_tol);
    EXPECT_EQ(c.integrator.max_steps, d.integrator.max_steps);
    EXPECT_EQ(c.simulate.M, d.simulate.M);
    EXPECT_EQ(c.loop.enclose, d.loop.enclose);
    EXPECT_EQ(c.loop.plane, d.loop.plane);
    EXPECT_EQ(c.grid.spin_n, d.grid.spin_n);
    EXPECT_EQ(c.slice.n, d.slice.n);
    EXPECT_EQ(c.gmatrix.n, d.gmatrix.n);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsMistakes) {
    EXPECT_THROW(parse_config("[bodyy]\nI1 = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[body]\nI4 = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[body]\nI1 = one\n"), ConfigError);
    EXPECT_THROW(parse_config("[body]\nI1 = 1.5x\n"), ConfigError);
    EXPECT_THROW(parse_config("[loop]\nsamples = 1.5\n"), ConfigError);
    EXPECT_THROW(parse_config("[run]\nmodel = icy\n"), ConfigError);
    EXPECT_THROW(parse_config("[run]\nthreads = -2\n"), ConfigError);
    EXPECT_THROW(parse_config("stray = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[body\n"), ConfigError);
    EXPECT_THROW(parse_config("[body]\nb3 = 0\n").validate(), ConfigError);
    EXPECT_THROW(parse_config("[loop]\nsamples = 32\n").validate(), ConfigError);
    EXPECT_THROW(parse_config("[loop]\nplane = c1=0.1\n").validate(), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/rollmono.ini"), ConfigError);
}

TEST(Config, PlaneNames) {
    EXPECT_EQ(parse_plane("p_psi=0.157", Model::Smooth).axis, FixedAxis::J1Fixed);
    EXPECT_EQ(parse_plane("p_phi = 0", Model::Smooth).axis, FixedAxis::J2Fixed);
    EXPECT_EQ(parse_plane("c1=0", Model::Rough).axis, FixedAxis::J1Fixed);
    EXPECT_EQ(parse_plane("j2=1", Model::Rough).axis, FixedAxis::J2Fixed);
    EXPECT_THROW(parse_plane("c1=0", Model::Smooth), ConfigError);
    EXPECT_THROW(parse_plane("p_psi", Model::Smooth), ConfigError);
    EXPECT_THROW(parse_plane("p_psi=nan", Model::Smooth), ConfigError);
}

TEST(Config, Threads) {
    EXPECT_EQ(parse_threads(" 4 "), 4u);
    EXPECT_EQ(parse_threads(""), std::nullopt);
    EXPECT_THROW(parse_threads("four"), ConfigError);
}

TEST(Run, HelpExitsCleanly) {
    const Invocation r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("monodromy"), std::string::npos);
}

TEST(Run, ConfigErrorsExitOne) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"monodromy", "--model", "granite"},
             {"monodromy", "--plane", "c1=0.1"},
             {"monodromy", "--samples", "8"},
             {"gmatrix", "--gamma3", "1.0"},
             {"simulate", "--config", "/nonexistent.ini"}}) {
        const Invocation r = invoke(args);
        EXPECT_EQ(r.code, 1) << r.err;
        const auto j = Json::parse(r.err);
        EXPECT_EQ(j["exit_code"], 1);
        EXPECT_TRUE(j["message"].is_string());
    }
}

TEST(Run, NumericalErrorsExitTwo) {
    const fs::path dir = scratch("numerical");
    const Invocation r = invoke({"monodromy", "--plane", "p_psi=0.157", "--radius", "5", "--samples",
                                 "64", "--out", dir.string()});
    EXPECT_EQ(r.code, 2);
    const auto j = Json::parse(r.err);
    EXPECT_EQ(j["error"], "LoopHitsSingularity");
    EXPECT_EQ(j["exit_code"], 2);
}

TEST(Run, GMatrixAtEquator) {
    const fs::path dir = scratch("gmatrix");
    const Invocation r = invoke({"gmatrix", "--gamma3", "0", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["max_det_defect"], 0.0);
    EXPECT_EQ(j["rows"][0]["G"], Json::parse("[[1.0, 0.0], [0.0, 1.0]]"));
    EXPECT_EQ(slurp(dir / "gmatrix.csv"),
              "gamma3 (1),G11 (1),G12 (1),G21 (1),G22 (1),det_defect (1)\r\n0,1,0,0,1,0\r\n");
}

TEST(Run, MonodromyBothFoci) {
    const fs::path dir = scratch("monodromy");
    const Invocation r = invoke({"monodromy", "--model", "smooth", "--plane", "p_psi=0.157",
                                 "--enclose", "both", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(std::abs(j["k"].get<int>()), 2);
    EXPECT_LE(j["closure_defect"].get<double>(), 0.05);
    const auto doc = Json::parse(slurp(dir / "monodromy_smooth_p_psi_both.json"));
    EXPECT_EQ(doc["samples"].size(), 129u);
    for (const char* f : {"monodromy_smooth_p_psi_both_image.csv",
                          "monodromy_smooth_p_psi_both_projection.csv",
                          "monodromy_smooth_p_psi_both_torus.svg",
                          "monodromy_smooth_p_psi_both_gamma1_gamma2.svg",
                          "monodromy_smooth_p_psi_both_gamma1_M3.svg"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const std::string csv = slurp(dir / "monodromy_smooth_p_psi_both_image.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\r')),
              "alpha (rad),delta_phi (rad),phi_image (rad),return_time (time)");
}

TEST(Run, OutputsIndependentOfThreadCount) {
    const fs::path a = scratch("threads_a"), b = scratch("threads_b");
    const fs::path ini = scratch("threads_ini") / "one.ini";
    {
        std::ofstream f(ini);
        f << "[run]\nthreads = 1\nmodel = rough\n[loop]\nplane = c2=0.157\nenclose = lower\nsamples = 64\n";
    }
    ASSERT_EQ(invoke({"monodromy", "--config", ini.string(), "--out", a.string()}).code, 0);
    setenv("ROLLMONO_THREADS", "4", 1);
    const Invocation r = invoke({"monodromy", "--model", "rough", "--plane", "c2=0.157", "--enclose",
                                 "lower", "--samples", "64", "--out", b.string()});
    unsetenv("ROLLMONO_THREADS");
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
        ++compared;
    }
    EXPECT_EQ(compared, 6u);
}

TEST(Run, SimulateWritesTrajectory) {
    const fs::path dir = scratch("simulate");
    const fs::path ini = dir / "sim.ini";
    {
        std::ofstream f(ini);
        f << "[simulate]\nt_end = 2\noutput_dt = 0.5\n";
    }
    const Invocation r = invoke({"simulate", "--config", ini.string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(dir / "trajectory_smooth.csv");
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    EXPECT_EQ(rows, 1u + 5u);
    EXPECT_LE(Json::parse(r.out)["energy_drift"].get<double>(), 1e-9);
}
