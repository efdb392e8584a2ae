#include "pcv/errors.hpp"

#include <cmath>

namespace pcv {

SingularOffset::SingularOffset(std::size_t caster_index, double b_x)
    : Error("SingularOffset: caster " + std::to_string(caster_index) + " has |b_x| = " +
                std::to_string(std::abs(b_x)) + " m <= 1e-4 m (no longitudinal offset, base would be nonholonomic)",
            ExitCode::kSingularOffset),
      index_(caster_index) {}

CommandLengthMismatch::CommandLengthMismatch(std::size_t got, std::size_t expected)
    : Error("CommandLengthMismatch: got " + std::to_string(got) + " per-caster entries for " + std::to_string(expected) +
            " casters") {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("ParseError at line " + std::to_string(line) + ": " + what, ExitCode::kParseError), line_(line) {}

PortInUse::PortInUse(unsigned short port)
    : Error("PortInUse: port " + std::to_string(port) + " is already bound", ExitCode::kPortInUse) {}

}  // namespace pcv
