#ifndef MORSP_CLI_HPP
#define MORSP_CLI_HPP

#include <string>
#include <utility>
#include <vector>

namespace morsp {

/// Exit codes; each failure class is distinct.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,        // invalid flag or config values
    exit_missing_file = 3,
    exit_bad_format = 4,   // unreadable or malformed image data
    exit_mismatch = 5,     // incompatible image dimensions
    exit_numeric = 6,      // non-finite solver state
    exit_tolerance = 7,    // gradcheck tolerance failure
};

/// Record of one CLI run: command, resolved configuration, paths,
/// duration, iteration count and final residual. Serializes to
/// key=value lines and parses back losslessly.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    const std::string* find(const std::string& key) const;

    std::string to_text() const;
    static RunManifest from_text(const std::string& text);
};

std::string format_double(double v);

/// Entry point shared by the binary and the integration tests.
int run_cli(int argc, const char* const* argv);

}  // namespace morsp

#endif
