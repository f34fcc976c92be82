#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace certsgd::cli {

// Exit codes shared by all commands.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kCapReached = 2;
inline constexpr int kCheckFailed = 3;

// Each command parses its own arguments (without the command name).
int cmd_certify(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);
int cmd_coverage(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);
int cmd_verify_lemmas(const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err);
int cmd_demo_lower_bound(const std::vector<std::string>& args,
                         std::ostream& out, std::ostream& err);

// Dispatches on the first argument that names a command; every other argument
// is forwarded to it, so global flags may appear before or after the name.
int run(const std::vector<std::string>& argv, std::ostream& out,
        std::ostream& err);

}  // namespace certsgd::cli
