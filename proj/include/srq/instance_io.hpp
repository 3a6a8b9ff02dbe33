#pragma once

#include <stdexcept>
#include <string>

#include "srq/model.hpp"

namespace srq {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structured text instance format:
//
//   horizon = 1
//   prices { ev = 0.25  buy = 0.4  sell = 0.1 }
//   timestep {
//     j_bits = 2
//     j_offset = 0
//     recourse_bits = 2
//     p_offset = 0              # optional
//     dist = [1:0.2, 2:0.5, 3:0.3]
//   }
//
// One timestep block per t, in order; '#' starts a comment. Throws
// ParseError with a line number on malformed input. The parsed instance is
// NOT validated here; call validate() separately.
InstanceSpec parse_instance(const std::string& text);

InstanceSpec load_instance_file(const std::string& path);

} // namespace srq
