#include "dfano/presets.hpp"

#include "dfano/errors.hpp"
#include "presets_data.hpp"

#include <algorithm>

namespace dfano
{
std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& p : detail::bundled_presets)
        names.emplace_back(p.name);
    return names;
}

std::optional<std::string_view> preset_text(std::string_view name)
{
    const auto it = std::ranges::find(detail::bundled_presets, name, &detail::PresetEntry::name);
    if (it == std::end(detail::bundled_presets))
        return std::nullopt;
    return it->text;
}

RunConfig load_preset(std::string_view name)
{
    const auto text = preset_text(name);
    if (!text) {
        std::string known;
        for (const auto& n : preset_names())
            known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + known + ")");
    }
    return parse_config(std::string(*text));
}

} // namespace dfano
