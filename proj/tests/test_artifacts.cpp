#include "etsmc/etsmc.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace etsmc;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimConfig short_config() {
    SimConfig cfg;
    cfg.t_end = 2.0;
    return cfg;
}

}  // namespace

TEST_CASE("line plot of a two-point series", "[plot]") {
    const Series s{"x", {0.0, 1.0}, {0.0, 1.0}};
    const std::string svg = render_svg(std::span<const Series>(&s, 1), {PlotKind::line, "t", "x", "y"});
    CHECK(count(svg, "<polyline") == 1);
    CHECK_THAT(svg, StartsWith("<?xml"));
    CHECK_THAT(svg, ContainsSubstring("</svg>"));
}

TEST_CASE("stem plot draws one stem per point", "[plot]") {
    const Series s{"T_k", {0.0, 1.0, 2.5}, {1.0, 1.5, 0.5}};
    const std::string svg = render_svg(std::span<const Series>(&s, 1), {PlotKind::stem, "e", "t", "T"});
    CHECK(count(svg, "<circle") == 3);
    CHECK(count(svg, "<polyline") == 0);
}

TEST_CASE("plot input errors write nothing", "[plot]") {
    TempDir dir("etsmc_test_plot");
    const auto path = dir.path / "empty.svg";
    CHECK_THROWS_AS(emit_plot({}, {}, path), InvalidParameterError);
    const Series empty{"x", {}, {}};
    CHECK_THROWS_AS(emit_plot(std::span<const Series>(&empty, 1), {}, path), InvalidParameterError);
    const Series ragged{"x", {0.0, 1.0}, {0.0}};
    CHECK_THROWS_AS(emit_plot(std::span<const Series>(&ragged, 1), {}, path), InvalidParameterError);
    CHECK_FALSE(fs::exists(path));
}

TEST_CASE("plots are byte-identical for identical input", "[plot]") {
    TempDir dir("etsmc_test_plot_det");
    std::vector<double> x, y;
    for (int i = 0; i < 10000; ++i) {
        x.push_back(0.01 * i);
        y.push_back(std::sin(0.01 * i));
    }
    const std::array<Series, 2> s{Series{"a", x, y}, Series{"b", x, x}};
    emit_plot(s, {PlotKind::line, "t", "x", "y"}, dir.path / "a.svg");
    emit_plot(s, {PlotKind::line, "t", "x", "y"}, dir.path / "b.svg");
    CHECK(slurp(dir.path / "a.svg") == slurp(dir.path / "b.svg"));
    CHECK(slurp(dir.path / "a.svg").size() > 1000);
}

TEST_CASE("trajectory and event CSV layout", "[report]") {
    const RunResult r = run_event_triggered(short_config());
    const std::string traj = trajectory_csv(r.trajectory);
    CHECK_THAT(traj, StartsWith("t,x1,x2,x1ref,x2ref,u,sigma,delta,event\n"));
    CHECK(count(traj, "\n") == r.trajectory.size() + 1);
    const std::string ev = events_csv(r.events);
    CHECK_THAT(ev, StartsWith("k,t_k,T_k,delta_fired,zeno_bound\n"));
    CHECK(count(ev, "\n") == r.events.size() + 1);
    CHECK_THAT(ev, ContainsSubstring("\n0,0,0.001,"));
}

TEST_CASE("shortest number formatting round-trips", "[report]") {
    for (double v : {0.1, 1.0 / 3.0, 2.6516, -1e-300, 123456789.125}) {
        CHECK(std::stod(detail::shortest(v)) == v);
    }
}

TEST_CASE("sha256 digests", "[report]") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("metrics report", "[report]") {
    const RunResult r = run_event_triggered(short_config());
    const auto entries = metrics_entries(r.metrics);
    const std::string txt = metrics_text(entries, check_invariants(r));
    CHECK_THAT(txt, ContainsSubstring("event_ratio = "));
    CHECK_THAT(txt, ContainsSubstring("check.reachability = pass"));
    const auto j = metrics_json(entries, check_invariants(r));
    CHECK(j["metrics"]["event_count"].get<double>() == static_cast<double>(r.metrics.event_count));
    CHECK(j["checks"].is_array());
}

TEST_CASE("scenario names map to configurations", "[scenario]") {
    const SimConfig base;
    CHECK(configure_scenario("nominal", base).scenario == Scenario::nominal);
    CHECK(configure_scenario("disturbed", base).scenario == Scenario::disturbed);
    const SimConfig r400 = configure_scenario("regulate-400", base);
    CHECK(r400.scenario == Scenario::regulate);
    CHECK(r400.setpoint_kelvin == 400.0);
    CHECK(std::abs(active_reference(r400).x2ss - 6.6667) < 1e-4);
    CHECK_THROWS_AS(configure_scenario("regulate", base), InvalidParameterError);
    CHECK_THROWS_AS(configure_scenario("regulate-abc", base), InvalidParameterError);
    CHECK_THROWS_AS(configure_scenario("sideways", base), InvalidParameterError);
}

TEST_CASE("scenario run writes the declared artifacts", "[scenario]") {
    TempDir dir("etsmc_test_scenario");
    const ScenarioOutcome out = run_scenario("nominal", short_config(), dir.path);
    const fs::path run = dir.path / "nominal";
    for (const char* f : {"trajectory.csv", "events.csv", "metrics.txt", "metrics.json", "config.cfg",
                          "composition.svg", "temperature.svg", "events.svg", "manifest"}) {
        INFO(f);
        CHECK(fs::exists(run / f));
    }
    CHECK(out.ok());
    CHECK(verify_manifest(read_manifest(run / kManifestName), run).empty());

    // tampering is detected
    {
        std::ofstream(run / "events.csv", std::ios::app) << "tampered\n";
    }
    const auto bad = verify_manifest(read_manifest(run / kManifestName), run);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "events.csv");
}

TEST_CASE("baseline comparison reports paired metrics", "[scenario]") {
    TempDir dir("etsmc_test_baseline");
    const ScenarioOutcome out = run_scenario("baseline-comparison", short_config(), dir.path);
    REQUIRE(out.baseline.has_value());
    const std::string txt = slurp(dir.path / "baseline-comparison" / "metrics.txt");
    CHECK_THAT(txt, ContainsSubstring("event_ratio = "));
    CHECK_THAT(txt, ContainsSubstring("event_ratio_vs_time_triggered = "));
    CHECK_THAT(txt, ContainsSubstring("time_triggered.event_count = "));
    CHECK(fs::exists(dir.path / "baseline-comparison" / "trajectory_time_triggered.csv"));
}

TEST_CASE("rerun from a manifest is bit-identical", "[scenario]") {
    TempDir dir("etsmc_test_rerun");
    SimConfig cfg = short_config();
    cfg.trigger.psi = 0.3;
    const ScenarioOutcome first = run_scenario("disturbed", cfg, dir.path / "a");
    const RunManifest m = read_manifest(dir.path / "a" / "disturbed" / kManifestName);
    const ScenarioOutcome second = rerun_from_manifest(m, dir.path / "b");
    REQUIRE(first.manifest.files.size() == second.manifest.files.size());
    for (std::size_t i = 0; i < first.manifest.files.size(); ++i) {
        INFO(first.manifest.files[i].name);
        CHECK(first.manifest.files[i] == second.manifest.files[i]);
    }
}

TEST_CASE("malformed manifest", "[scenario]") {
    TempDir dir("etsmc_test_manifest");
    {
        std::ofstream(dir.path / "manifest") << "{not json";
    }
    CHECK_THROWS_AS(read_manifest(dir.path / "manifest"), IoError);
    {
        std::ofstream(dir.path / "manifest") << "{\"scenario\": \"nominal\"}";
    }
    CHECK_THROWS_AS(read_manifest(dir.path / "manifest"), IoError);
}
