#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcv {

/// Process exit codes used by the CLI, one per error class.
enum class ExitCode : int {
  kOk = 0,
  kGeneric = 1,
  kConfigInvalid = 2,
  kSingularOffset = 3,
  kRankDeficient = 4,
  kPortInUse = 5,
  kParseError = 6,
  kTimeout = 7,
  kTraceMismatch = 8,
  kUsage = 64,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ExitCode code = ExitCode::kGeneric)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Caster has |b_x| too small to be holonomic.
class SingularOffset : public Error {
 public:
  SingularOffset(std::size_t caster_index, double b_x);
  std::size_t caster_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& what) : Error(what, ExitCode::kRankDeficient) {}
};

/// A twist was handed to an operation declared for the other frame.
class FrameMismatch : public Error {
 public:
  explicit FrameMismatch(const std::string& what) : Error(what) {}
};

class TraceMismatch : public Error {
 public:
  explicit TraceMismatch(const std::string& what) : Error(what, ExitCode::kTraceMismatch) {}
};

class CommandLengthMismatch : public Error {
 public:
  CommandLengthMismatch(std::size_t got, std::size_t expected);
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(what) {}
};

class DegenerateYaw : public Error {
 public:
  DegenerateYaw() : Error("forward axis is vertical; yaw undefined") {}
};

class ConfigInvalid : public Error {
 public:
  explicit ConfigInvalid(const std::string& what) : Error(what, ExitCode::kConfigInvalid) {}
};

/// Line-oriented parse failure (episode files). Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class Timeout : public Error {
 public:
  explicit Timeout(const std::string& what) : Error(what, ExitCode::kTimeout) {}
};

class PortInUse : public Error {
 public:
  explicit PortInUse(unsigned short port);
};

}  // namespace pcv
