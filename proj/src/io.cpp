#include "loopchi/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "loopchi/errors.hpp"

namespace loopchi {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string grid_to_csv(const SpectrumGrid& grid) {
    std::string s = "omega1,omega2,re_chi,im_chi\n";
    for (int i = 0; i < grid.axis1.count; ++i)
        for (int j = 0; j < grid.axis2.count; ++j) {
            s += format_g17(grid.axis1.at(i)) + "," + format_g17(grid.axis2.at(j)) + "," +
                 format_g17(grid.values(i, j).real()) + "," +
                 format_g17(grid.values(i, j).imag()) + "\n";
        }
    return s;
}

std::string grid_to_json(const SpectrumGrid& grid) {
    nlohmann::json j;
    j["axes"]["omega1"] = {{"min", grid.axis1.min}, {"max", grid.axis1.max},
                           {"count", grid.axis1.count}};
    j["axes"]["omega2"] = {{"min", grid.axis2.min}, {"max", grid.axis2.max},
                           {"count", grid.axis2.count}};
    j["axes"]["omega3"] = grid.w3;
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < grid.axis1.count; ++i)
        for (int j2 = 0; j2 < grid.axis2.count; ++j2)
            rows.push_back({grid.values(i, j2).real(), grid.values(i, j2).imag()});
    j["values"] = std::move(rows);
    j["metadata"] = {{"evaluator", grid.evaluator_id},
                     {"model_hash", grid.model_hash},
                     {"timestamp", grid.timestamp}};
    if (!grid.failed_cells.empty()) {
        nlohmann::json f = nlohmann::json::array();
        for (auto [a, b] : grid.failed_cells) f.push_back({a, b});
        j["metadata"]["failed_cells"] = std::move(f);
    }
    return j.dump(2) + "\n";
}

std::string study_to_csv(const ResonanceStudy& study) {
    std::string s = "eta,status,center,width,amplitude_abs\n";
    for (const auto& row : study.rows) {
        s += format_g17(row.eta) + "," + row.status + "," + format_g17(row.fit.center) + "," +
             format_g17(row.fit.width) + "," + format_g17(std::abs(row.fit.amplitude)) + "\n";
    }
    return s;
}

std::string manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["version"] = m.version;
    j["command"] = m.command;
    j["config_text"] = m.config_text;
    j["seed"] = m.seed;
    j["evaluator"] = m.evaluator;
    j["threads"] = m.threads;
    j["wall_seconds"] = m.wall_seconds;
    j["timestamp"] = m.timestamp;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : m.outputs)
        outs.push_back({{"name", o.name}, {"bytes", o.bytes}, {"fnv64", o.fnv64}});
    j["outputs"] = std::move(outs);
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    RunManifest m;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        m.version = j.at("version").get<std::string>();
        m.command = j.at("command").get<std::vector<std::string>>();
        m.config_text = j.at("config_text").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.evaluator = j.at("evaluator").get<std::string>();
        m.threads = j.at("threads").get<int>();
        m.wall_seconds = j.at("wall_seconds").get<double>();
        m.timestamp = j.at("timestamp").get<std::string>();
        for (const auto& o : j.at("outputs")) {
            ManifestOutput out;
            out.name = o.at("name").get<std::string>();
            out.bytes = o.at("bytes").get<std::uint64_t>();
            out.fnv64 = o.at("fnv64").get<std::uint64_t>();
            m.outputs.push_back(out);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

} // namespace loopchi
