// io.hpp — text formats for grids, study tables and run manifests.
//
// Numbers are written with %.17g so text output round-trips exactly; a run
// repeated with the manifest's settings reproduces every output byte.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "loopchi/spectra.hpp"

namespace loopchi {

std::string format_g17(double v);

std::uint64_t fnv1a64(std::string_view data);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string grid_to_csv(const SpectrumGrid& grid);
std::string grid_to_json(const SpectrumGrid& grid);

std::string study_to_csv(const ResonanceStudy& study);

struct ManifestOutput {
    std::string name;        // path relative to the output directory
    std::uint64_t bytes{0};
    std::uint64_t fnv64{0};
};

struct RunManifest {
    std::string version;
    std::vector<std::string> command;    // argv tokens, excluding --out
    std::string config_text;             // resolved config, embedded
    std::uint64_t seed{0};
    std::string evaluator;
    int threads{1};
    double wall_seconds{0.0};
    std::string timestamp;
    std::vector<ManifestOutput> outputs;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

} // namespace loopchi
