#include "liesym/report.hpp"

#include <sstream>

namespace liesym {

int exit_code(Outcome o) { return static_cast<int>(o); }

const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::Verified: return "verified";
    case Outcome::Refuted: return "refuted";
    case Outcome::Undecided: return "undecided";
    case Outcome::Usage: return "usage-error";
    }
    return "?";
}

const char* tool_version() { return LIESYM_VERSION; }

nlohmann::ordered_json Report::document() const {
    nlohmann::ordered_json d;
    d["tool_version"] = tool_version();
    d["command"] = command;
    d["inputs"] = inputs;
    d["verdict"] = {{"outcome", to_string(outcome)}, {"exit_code", exit_code(outcome)}, {"result", verdict}};
    d["certificates"] = certificates;
    d["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    return d;
}

std::string Report::human() const {
    std::ostringstream os;
    os << command << ": " << verdict << " (" << to_string(outcome) << ")\n";
    bool seeded = false;
    for (const auto& l : lines) {
        os << "  " << l << "\n";
        seeded = seeded || l.rfind("seed:", 0) == 0;
    }
    if (seed && !seeded) os << "  seed: " << *seed << "\n";
    return os.str();
}

} // namespace liesym
