#pragma once

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

enum class Outcome { Verified = 0, Refuted = 1, Undecided = 2, Usage = 3 };
int exit_code(Outcome o);
const char* to_string(Outcome o);

/// One command run: rendered inputs, verdict, certificates (residuals,
/// witnesses), seed. Human text and the structured document are both
/// deterministic; timing is not part of either.
struct Report {
    std::string command;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    Outcome outcome = Outcome::Undecided;
    std::string verdict;
    nlohmann::ordered_json certificates = nlohmann::ordered_json::object();
    std::optional<std::uint64_t> seed;
    std::vector<std::string> lines;

    void say(const std::string& line) { lines.push_back(line); }
    /// {tool_version, command, inputs, verdict, certificates, seed}
    nlohmann::ordered_json document() const;
    std::string human() const;
};

const char* tool_version();

} // namespace liesym
