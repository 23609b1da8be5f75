#include "nlqs/manifest.hpp"

#include <fstream>
#include <stdexcept>

namespace nlqs {

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["argv"] = argv;
    j["version"] = version;
    j["config"] = config;
    j["outputs"] = outputs;
    j["results"] = results;
    j["wall_time_s"] = wall_time_s;
    return j;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest " + path);
    out << to_json().dump(2) << '\n';
}

}  // namespace nlqs
