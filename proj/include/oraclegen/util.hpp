#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace oraclegen::util {

/// Throws ConfigError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temporary file and rename, creating parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Runs fn(0..count-1) on up to `workers` threads (0 = hardware concurrency).
/// The first exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

std::vector<std::string> split_lines(std::string_view text);
std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

/// Leading spaces/tabs of the line containing `offset`.
std::string indentation_at(std::string_view text, std::size_t offset);

}  // namespace oraclegen::util
