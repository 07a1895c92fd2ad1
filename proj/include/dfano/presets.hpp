#ifndef DFANO_PRESETS_HPP
#define DFANO_PRESETS_HPP

#include "dfano/config.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dfano
{
// Bundled figure presets fig2 ... fig9, compiled in from presets/*.yaml.
std::vector<std::string> preset_names();
std::optional<std::string_view> preset_text(std::string_view name);

// Throws ConfigError for an unknown name.
RunConfig load_preset(std::string_view name);

} // namespace dfano

#endif
