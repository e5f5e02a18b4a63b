#pragma once

#include <string>

#include "evrp/hma.hpp"

namespace evrp {

// Built-in parameter profiles; the same values ship as config files under
// profiles/.
HmaParams profile_params(const std::string &name);

// key value (or key = value) lines, '#' comments. Unknown keys are errors.
HmaParams parse_params(const std::string &text, HmaParams base = {});

std::string write_params(const HmaParams &p);

}  // namespace evrp
