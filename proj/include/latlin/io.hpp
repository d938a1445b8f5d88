#pragma once

#include "latlin/config.hpp"
#include "latlin/dynamics.hpp"

#include <string>

namespace latlin {

// Binary layouts are little-endian 64-bit floats preceded by an 8-byte magic,
// a u64 header length and a JSON header.
//
//   trajectory  "LLTRJ1\0\0", header {request, points, dim, samples, dt_used,
//               steps, aborted, abort_reason, int_v2}, then per sample: t, u[points*dim], v[points*dim]
//   grid        "LLGRD1\0\0", header {dim, ncomp, centering, shape, origin, spacing},
//               then values in row-major sample order (last axis fastest), components innermost

void write_trajectory_binary(const Trajectory& traj, const SimulationRequest& request, const std::string& path);

struct LoadedTrajectory {
  SimulationRequest request;
  EnergyParams params;
  Trajectory traj;
};

/// Rebuilds the lattice and model from the header and reads every sample.
LoadedTrajectory read_trajectory_binary(const std::string& path);

/// One row per sample: t, |u|_eps, |v|_eps, then the ledger columns
/// kinetic, potential, dissipation, residual (substitution route).
void write_trajectory_csv(const Trajectory& traj, const EdieAudit& audit, const std::string& path);

/// Comment line with the grid geometry, a header line, then one row per
/// sample: coordinates x0..x{d-1} followed by components c0..c{ncomp-1}.
void write_grid_csv(const GridField& g, const std::string& path);
GridField read_grid_csv(const std::string& path);

void write_grid_binary(const GridField& g, const std::string& path);
GridField read_grid_binary(const std::string& path);

}  // namespace latlin
