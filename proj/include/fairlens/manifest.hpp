#pragma once

// Provenance record written next to every CLI output.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <string>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "fairlens/error.hpp"
#include "fairlens/table.hpp"
#include "fairlens/version.hpp"

namespace fairlens {

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

inline std::string file_sha256(const std::string& path) { return sha256_hex(read_file(path)); }

// UTC ISO-8601. Honors SOURCE_DATE_EPOCH for reproducible builds of the manifest itself.
inline std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        if (auto v = parse_number(sde)) t = static_cast<std::time_t>(*v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
    std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
    std::string tool_version = kVersion;
    std::string timestamp = utc_timestamp();

    void add_input(const std::string& path) { inputs.emplace_back(path, file_sha256(path)); }
    void add_output(const std::string& path) { outputs.emplace_back(path, file_sha256(path)); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["config"] = config;
        auto files = [](const auto& list) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& [p, h] : list) arr.push_back({{"path", p}, {"sha256", h}});
            return arr;
        };
        j["inputs"] = files(inputs);
        j["outputs"] = files(outputs);
        j["tool_version"] = tool_version;
        j["timestamp"] = timestamp;
        return j;
    }
};

// "<primary output>.manifest.json"
inline std::string manifest_path(const std::string& primary_output) { return primary_output + ".manifest.json"; }

inline void write_manifest(const RunManifest& m, const std::string& primary_output) {
    write_file(manifest_path(primary_output), m.to_json().dump(2) + "\n");
}

} // namespace fairlens
