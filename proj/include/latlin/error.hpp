#pragma once

#include <stdexcept>
#include <string>

namespace latlin {

// Mirrors the status codes of the C API one to one (see latlin.h).
enum class ErrorCode : int {
  invalid_argument = 1,
  unsupported_dimension = 2,
  empty_lattice = 3,
  margin_violation = 4,
  fringe_point = 5,
  lattice_mismatch = 6,
  quadrature_misalignment = 7,
  malformed_model = 8,
  symmetry_violation = 9,
  non_finite = 10,
  instability = 11,
  no_convergence = 12,
  cfl_violation = 13,
  io = 14,
  config = 15,
  resolution_budget = 16,
  internal = 99,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace latlin
