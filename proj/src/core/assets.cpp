#include "arena/core/assets.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "arena/core/error.hpp"

#ifndef ARENA_ASSET_DIR
#define ARENA_ASSET_DIR "assets"
#endif

namespace arena {

std::string_view embedded_asset(std::string_view name) {
    const auto& table = detail::embedded_assets();
    const auto it = table.find(name);
    if (it == table.end()) throw MissingAsset("no embedded asset '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string_view> embedded_asset_names() {
    std::vector<std::string_view> names;
    for (const auto& [name, _] : detail::embedded_assets()) names.push_back(name);
    return names;
}

std::filesystem::path default_asset_dir() {
    if (const char* env = std::getenv("ARENA_ASSETS"); env != nullptr && *env != '\0') return env;
    return ARENA_ASSET_DIR;
}

std::string read_text_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingAsset("missing file " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write on " + tmp);
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp + " -> " + path.string() + ": " + ec.message());
}

std::string render_template(std::string_view tpl, const TemplateVars& vars) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            std::size_t j = i + 1;
            while (j < tpl.size() && ((tpl[j] >= 'a' && tpl[j] <= 'z') || tpl[j] == '_' ||
                                      (tpl[j] >= '0' && tpl[j] <= '9'))) {
                ++j;
            }
            if (j > i + 1 && j < tpl.size() && tpl[j] == '}') {
                const auto name = tpl.substr(i + 1, j - i - 1);
                const auto it = vars.find(name);
                if (it == vars.end()) throw FormatError("template placeholder {" + std::string(name) + "} has no value");
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out += tpl[i++];
    }
    return out;
}

}  // namespace arena
