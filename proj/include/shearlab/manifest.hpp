#pragma once

// manifest.json in each output directory: resolved configuration, seed,
// code version, timestamps and the list of artifacts. Written with
// status "running" before any computation and rewritten at the end.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef SHEARLAB_VERSION
#define SHEARLAB_VERSION "0.1.0"
#endif

namespace shearlab {

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class RunManifest {
public:
    RunManifest(std::filesystem::path dir, std::string command, std::map<std::string, std::string> config,
                std::uint64_t seed)
        : dir_(std::move(dir)) {
        doc_["command"] = std::move(command);
        doc_["code_version"] = SHEARLAB_VERSION;
        doc_["seed"] = seed;
        doc_["config"] = std::move(config);
        doc_["started"] = utc_timestamp();
        doc_["finished"] = nullptr;
        doc_["status"] = "running";
        doc_["artifacts"] = nlohmann::json::array();
        write();
    }

    void add_artifact(const std::filesystem::path& p) { doc_["artifacts"].push_back(p.filename().string()); }

    void finish(int exit_code, const std::string& message = "") {
        doc_["finished"] = utc_timestamp();
        doc_["exit_code"] = exit_code;
        doc_["status"] = exit_code == 0 ? "ok" : "failed";
        if (!message.empty()) doc_["message"] = message;
        write();
    }

    const nlohmann::json& json() const { return doc_; }
    std::filesystem::path path() const { return dir_ / "manifest.json"; }

private:
    void write() const {
        std::ofstream os(path());
        if (!os) throw std::runtime_error("cannot write " + path().string());
        os << doc_.dump(2) << "\n";
    }

    std::filesystem::path dir_;
    nlohmann::json doc_;
};

}  // namespace shearlab
