#pragma once

// Runs the fivebar executable in a shell and captures its exit code and
// stderr.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli_runner {

struct Outcome {
    int exit_code = -1;
    std::string stderr_text;
};

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string quoted(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

inline Outcome run(const std::string& args, const std::filesystem::path& scratch) {
    std::filesystem::create_directories(scratch);
    const auto err = scratch / "stderr.txt";
    const std::string command = quoted(FIVEBAR_CLI_PATH) + " " + args + " > /dev/null 2> " + quoted(err);
    const int status = std::system(command.c_str());
    Outcome out;
    out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    out.stderr_text = slurp(err);
    return out;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "fivebar_cli_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path data(const std::string& name) {
    return std::filesystem::path(FIVEBAR_DATA_DIR) / name;
}

}  // namespace cli_runner
