// presets.hpp - named scenarios
#pragma once

#include <string>
#include <vector>

#include "nmqrt/app/config.hpp"

namespace nmqrt::app {

struct Preset {
    std::string name;
    std::string description;
    RunConfig config;
};

const std::vector<Preset>& presets();
// throws ConfigError naming the known presets
const Preset& find_preset(const std::string& name);

} // namespace nmqrt::app
