#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvbarc/errors.hpp"
#include "tvbarc/version.hpp"

namespace tvbarc {

/// Record of one CLI invocation, written next to its outputs. Everything in
/// here except duration_seconds is a pure function of the inputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
    bool seeded = false;
    double duration_seconds = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::string> outputs;
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = "tvbarc";
    j["version"] = version;
    j["command"] = m.command;
    j["inputs"] = m.inputs;
    j["config"] = m.config;
    if (m.seeded) j["seed"] = m.seed;
    j["duration_seconds"] = m.duration_seconds;
    j["warnings"] = m.warnings;
    j["outputs"] = m.outputs;
    return j;
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file: " + path.string());
    out << manifest_to_json(m).dump(2) << '\n';
    if (!out) throw data_error("write failed: " + path.string());
}

}  // namespace tvbarc
