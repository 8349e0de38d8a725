#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace oraclegen::process {

struct Result {
    int exit_code = -1;     // -1 when killed or not started
    std::string out;
    std::string err;
    bool timed_out = false;
    int spawn_errno = 0;    // nonzero when the program could not be executed
    std::chrono::duration<double> duration{};
};

/// Runs argv[0] (PATH lookup) with `input` on stdin. The child is killed
/// (whole process group) once `timeout` elapses.
Result run(const std::vector<std::string>& argv, const std::string& input,
           std::chrono::milliseconds timeout, const std::filesystem::path& cwd = {});

}  // namespace oraclegen::process
