#pragma once

// Named experiment runs and their on-disk artifacts:
//
//   <out>/<scenario>/trajectory.csv   one row per grid point
//   <out>/<scenario>/events.csv       one row per control update
//   <out>/<scenario>/metrics.txt      flat key = value report
//   <out>/<scenario>/metrics.json     same content, machine readable
//   <out>/<scenario>/config.cfg       resolved configuration
//   <out>/<scenario>/*.svg            state profiles and sampling plots
//   <out>/<scenario>/manifest         written last, digests of all the above

#include "etsmc/config.hpp"
#include "etsmc/error.hpp"
#include "etsmc/plot.hpp"
#include "etsmc/report.hpp"
#include "etsmc/sim.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace etsmc {

inline constexpr std::array<std::string_view, 6> kScenarioNames{
    "nominal", "disturbed", "regulate-300", "regulate-400", "regulate-500", "baseline-comparison",
};

struct ScenarioOptions {
    bool baseline = false;  ///< also run and report the time-triggered loop
};

struct ScenarioOutcome {
    RunManifest manifest;
    RunResult result;
    std::optional<RunResult> baseline;
    std::vector<InvariantCheck> checks;

    [[nodiscard]] bool ok() const { return all_passed(checks); }
};

/// Map a scenario name onto the run configuration. `regulate` on its own
/// takes the setpoint from the configuration.
[[nodiscard]] inline SimConfig configure_scenario(std::string_view name, SimConfig cfg) {
    if (name == "nominal" || name == "baseline-comparison") {
        cfg.scenario = Scenario::nominal;
    } else if (name == "disturbed") {
        cfg.scenario = Scenario::disturbed;
    } else if (name == "regulate") {
        cfg.scenario = Scenario::regulate;
        if (!cfg.setpoint_kelvin) throw InvalidParameterError("scenario 'regulate' needs setpoint_kelvin");
    } else if (name.starts_with("regulate-")) {
        const auto digits = name.substr(9);
        double kelvin = 0.0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), kelvin);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || !(kelvin > 0.0)) {
            throw InvalidParameterError("bad regulation setpoint in scenario '" + std::string(name) + "'");
        }
        cfg.scenario = Scenario::regulate;
        cfg.setpoint_kelvin = kelvin;
    } else {
        throw InvalidParameterError("unknown scenario '" + std::string(name) + "'");
    }
    validate(cfg);
    return cfg;
}

namespace detail {

inline void emit_run_plots(const RunResult& r, const std::filesystem::path& dir) {
    const Trajectory& tr = r.trajectory;
    const std::array<Series, 2> comp{Series{"x1", tr.t, tr.x1}, Series{"x1ref", tr.t, tr.x1ref}};
    emit_plot(comp, {PlotKind::line, "Composition profile", "t (dimensionless)", "x1"}, dir / "composition.svg");
    const std::array<Series, 2> temp{Series{"x2", tr.t, tr.x2}, Series{"x2ref", tr.t, tr.x2ref}};
    emit_plot(temp, {PlotKind::line, "Temperature profile", "t (dimensionless)", "x2"}, dir / "temperature.svg");

    // Stem at each instant t_k with height T_k; the last event has no gap.
    const EventLog& log = r.events;
    Series gaps{"T_k", {}, {}};
    for (std::size_t k = 0; k < log.gaps.size(); ++k) {
        gaps.x.push_back(log.instants[k]);
        gaps.y.push_back(log.gaps[k]);
    }
    if (gaps.x.empty()) {
        gaps.x.push_back(log.instants.empty() ? 0.0 : log.instants.front());
        gaps.y.push_back(0.0);
    }
    emit_plot(std::span<const Series>(&gaps, 1),
              {PlotKind::stem, "Sampling instants and inter-event times", "t_k", "T_k", 2000}, dir / "events.svg");
}

}  // namespace detail

/// Run one named scenario and write its artifacts under `outdir/name`.
[[nodiscard]] inline ScenarioOutcome run_scenario(std::string_view name, const SimConfig& base,
                                                  const std::filesystem::path& outdir, ScenarioOptions opt = {}) {
    const SimConfig cfg = configure_scenario(name, base);
    const bool with_baseline = opt.baseline || name == "baseline-comparison";

    const std::filesystem::path dir = outdir / std::string(name);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    ScenarioOutcome out;
    out.result = run_event_triggered(cfg);
    out.checks = check_invariants(out.result);
    if (with_baseline) {
        out.baseline = run_time_triggered(cfg);
        for (auto c : check_invariants(*out.baseline)) {
            c.name = "time_triggered." + c.name;
            out.checks.push_back(std::move(c));
        }
    }

    std::vector<std::string> written;
    const auto put = [&](const std::string& file, const std::string& text) {
        detail::write_text(dir / file, text);
        written.push_back(file);
    };

    const std::string config_text = emit_config(cfg);
    put("config.cfg", config_text);
    put("trajectory.csv", trajectory_csv(out.result.trajectory));
    put("events.csv", events_csv(out.result.events));

    auto entries = metrics_entries(out.result.metrics);
    if (out.baseline) {
        put("trajectory_time_triggered.csv", trajectory_csv(out.baseline->trajectory));
        const Metrics& tt = out.baseline->metrics;
        entries.push_back({"event_ratio_vs_time_triggered",
                           static_cast<double>(out.result.metrics.event_count) / static_cast<double>(tt.event_count)});
        for (auto& e : metrics_entries(tt, "time_triggered.")) entries.push_back(std::move(e));
    }
    std::string header = "# scenario = " + std::string(name) + "\n";
    for (const auto& d : out.result.diagnostics) header += "# warning: " + d + "\n";
    put("metrics.txt", header + metrics_text(entries, out.checks));
    {
        auto j = metrics_json(entries, out.checks);
        j["scenario"] = std::string(name);
        put("metrics.json", j.dump(2) + "\n");
    }

    detail::emit_run_plots(out.result, dir);
    for (const char* f : {"composition.svg", "temperature.svg", "events.svg"}) written.emplace_back(f);

    out.manifest.scenario = std::string(name);
    out.manifest.config = config_text;
    out.manifest.output_directory = dir.string();
    out.manifest.baseline = opt.baseline;
    for (const auto& f : written) out.manifest.files.push_back({f, sha256_file(dir / f)});
    detail::write_text(dir / kManifestName, manifest_text(out.manifest));
    return out;
}

/// Re-run the scenario recorded in a manifest into `outdir`.
[[nodiscard]] inline ScenarioOutcome rerun_from_manifest(const RunManifest& m, const std::filesystem::path& outdir) {
    return run_scenario(m.scenario, parse_config_text(m.config), outdir, {m.baseline});
}

}  // namespace etsmc
