#include "latlin/error.hpp"

namespace latlin {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::unsupported_dimension: return "unsupported dimension";
    case ErrorCode::empty_lattice: return "empty lattice";
    case ErrorCode::margin_violation: return "margin violation";
    case ErrorCode::fringe_point: return "fringe point";
    case ErrorCode::lattice_mismatch: return "lattice mismatch";
    case ErrorCode::quadrature_misalignment: return "quadrature misalignment";
    case ErrorCode::malformed_model: return "malformed model";
    case ErrorCode::symmetry_violation: return "symmetry violation";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::instability: return "instability";
    case ErrorCode::no_convergence: return "no convergence";
    case ErrorCode::cfl_violation: return "CFL violation";
    case ErrorCode::io: return "I/O failure";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::resolution_budget: return "resolution budget exceeded";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace latlin
