#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace arena {

/// Text asset compiled into the binary, addressed by its path under assets/
/// (e.g. "prompts/exe_learner.txt"). Throws MissingAsset.
std::string_view embedded_asset(std::string_view name);
std::vector<std::string_view> embedded_asset_names();

/// Asset directory used for run-time files (datasets, expert prompts,
/// thresholds, pricing). $ARENA_ASSETS overrides the build-time default.
std::filesystem::path default_asset_dir();

/// Whole-file read; throws MissingAsset if absent, IoError on read failure.
std::string read_text_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename so readers never observe a
/// partially written file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

using TemplateVars = std::map<std::string, std::string, std::less<>>;

/// Replaces each `{name}` (lowercase identifier) with vars[name]. Braces that
/// do not enclose an identifier, such as JSON examples, are left untouched.
/// Throws FormatError for a placeholder without a value.
std::string render_template(std::string_view tpl, const TemplateVars& vars);

namespace detail {
const std::map<std::string_view, std::string_view>& embedded_assets();
}

}  // namespace arena
