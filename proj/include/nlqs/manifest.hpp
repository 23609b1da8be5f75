#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace nlqs {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> outputs;
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    double wall_time_s = 0.0;
    std::string version = kToolVersion;

    nlohmann::ordered_json to_json() const;
    void write(const std::string& path) const;
};

}  // namespace nlqs
