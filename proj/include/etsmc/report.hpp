#pragma once

// Artifact writers: trajectory / event CSVs, metrics report (flat text and
// JSON), SHA-256 digests and the run manifest.
//
// Requires linking OpenSSL::Crypto for the digests.

#include "etsmc/error.hpp"
#include "etsmc/sim.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace etsmc {

namespace detail {

/// Shortest text that parses back to the same double.
inline std::string shortest(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

inline constexpr const char* kTrajectoryHeader = "t,x1,x2,x1ref,x2ref,u,sigma,delta,event";
inline constexpr const char* kEventsHeader = "k,t_k,T_k,delta_fired,zeno_bound";

[[nodiscard]] inline std::string trajectory_csv(const Trajectory& tr) {
    std::string out = kTrajectoryHeader;
    out += '\n';
    out.reserve(tr.size() * 120);
    using detail::shortest;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        out += shortest(tr.t[k]) + ',' + shortest(tr.x1[k]) + ',' + shortest(tr.x2[k]) + ',' + shortest(tr.x1ref[k]) +
               ',' + shortest(tr.x2ref[k]) + ',' + shortest(tr.u[k]) + ',' + shortest(tr.sigma[k]) + ',' +
               shortest(tr.delta[k]) + ',' + (tr.event[k] ? '1' : '0') + '\n';
    }
    return out;
}

/// One row per event. T_k is left empty on the last row (no successor).
[[nodiscard]] inline std::string events_csv(const EventLog& log) {
    std::string out = kEventsHeader;
    out += '\n';
    using detail::shortest;
    for (std::size_t k = 0; k < log.size(); ++k) {
        out += std::to_string(k) + ',' + shortest(log.instants[k]) + ',';
        if (k < log.gaps.size()) out += shortest(log.gaps[k]);
        out += ',' + shortest(log.delta_at_event[k]) + ',';
        if (k < log.bound_at_event.size()) out += shortest(log.bound_at_event[k]);
        out += '\n';
    }
    return out;
}

/// Ordered key/value pairs for the text report and JSON.
struct MetricsEntry {
    std::string key;
    std::optional<double> value;  ///< nullopt renders as "n/a"
};

[[nodiscard]] inline std::vector<MetricsEntry> metrics_entries(const Metrics& m, const std::string& prefix = "") {
    auto sz = [](std::size_t v) { return std::optional<double>(static_cast<double>(v)); };
    return {
        {prefix + "event_count", sz(m.event_count)},
        {prefix + "step_count", sz(m.step_count)},
        {prefix + "event_ratio", m.event_ratio},
        {prefix + "min_gap", m.min_gap},
        {prefix + "mean_gap", m.mean_gap},
        {prefix + "max_gap", m.max_gap},
        {prefix + "eta_hat", m.eta_hat},
        {prefix + "reachability_violations", sz(m.reachability_violations)},
        {prefix + "lyapunov_violations", sz(m.lyapunov_violations)},
        {prefix + "steady_x1_min", m.steady_x1_min},
        {prefix + "steady_x1_max", m.steady_x1_max},
        {prefix + "tracking_rmse", m.tracking_rmse},
        {prefix + "eps_inf", m.eps_inf},
        {prefix + "L_bar", m.L_bar},
        {prefix + "min_zeno_bound", m.min_zeno_bound},
    };
}

[[nodiscard]] inline std::string metrics_text(const std::vector<MetricsEntry>& entries,
                                              const std::vector<InvariantCheck>& checks) {
    std::string out;
    for (const auto& e : entries) {
        out += e.key + " = " + (e.value ? detail::shortest(*e.value) : std::string("n/a")) + '\n';
    }
    for (const auto& c : checks) {
        out += "check." + c.name + " = " + (c.passed ? "pass" : "fail") + "  # " + c.detail + '\n';
    }
    return out;
}

[[nodiscard]] inline nlohmann::ordered_json metrics_json(const std::vector<MetricsEntry>& entries,
                                                         const std::vector<InvariantCheck>& checks) {
    nlohmann::ordered_json j;
    auto& metrics = j["metrics"];
    metrics = nlohmann::ordered_json::object();
    for (const auto& e : entries) {
        if (e.value) {
            metrics[e.key] = *e.value;
        } else {
            metrics[e.key] = nullptr;
        }
    }
    auto& arr = j["checks"];
    arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return j;
}

// ---------------------------------------------------------------------------
// Digests and manifest
// ---------------------------------------------------------------------------

[[nodiscard]] inline std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

[[nodiscard]] inline std::string sha256_file(const std::filesystem::path& path) {
    return sha256_hex(detail::read_text(path));
}

struct ManifestFile {
    std::string name;
    std::string sha256;
    friend bool operator==(const ManifestFile&, const ManifestFile&) = default;
};

struct RunManifest {
    std::string scenario;
    std::string config;  ///< resolved configuration text (see emit_config)
    std::string output_directory;
    bool baseline = false;  ///< time-triggered comparison was included
    std::vector<ManifestFile> files;
};

inline constexpr const char* kManifestName = "manifest";

[[nodiscard]] inline std::string manifest_text(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["scenario"] = m.scenario;
    j["output_directory"] = m.output_directory;
    j["baseline"] = m.baseline;
    j["config"] = m.config;
    auto& files = j["files"];
    files = nlohmann::ordered_json::array();
    for (const auto& f : m.files) files.push_back({{"name", f.name}, {"sha256", f.sha256}});
    return j.dump(2) + "\n";
}

[[nodiscard]] inline RunManifest read_manifest(const std::filesystem::path& path) {
    const auto j = nlohmann::json::parse(detail::read_text(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IoError("malformed manifest '" + path.string() + "'");
    RunManifest m;
    try {
        m.scenario = j.at("scenario").get<std::string>();
        m.config = j.at("config").get<std::string>();
        m.output_directory = j.at("output_directory").get<std::string>();
        m.baseline = j.value("baseline", false);
        for (const auto& f : j.at("files")) {
            m.files.push_back({f.at("name").get<std::string>(), f.at("sha256").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest '" + path.string() + "': " + e.what());
    }
    return m;
}

/// Names of listed files whose current content no longer matches the digest.
[[nodiscard]] inline std::vector<std::string> verify_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    std::vector<std::string> bad;
    for (const auto& f : m.files) {
        const auto path = dir / f.name;
        if (!std::filesystem::exists(path) || sha256_file(path) != f.sha256) bad.push_back(f.name);
    }
    return bad;
}

}  // namespace etsmc
