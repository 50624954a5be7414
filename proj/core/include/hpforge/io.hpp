#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hpforge {

// Whole-file text helpers; both throw Error with the path on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace hpforge
