#pragma once

// JSON configuration files. Unknown keys are rejected with ErrorCode::config.

#include "latlin/convergence.hpp"

#include "json.hpp"

#include <string>

namespace latlin {

using Json = nlohmann::json;

Json load_json_file(const std::string& path);

Box box_from_json(const Json& j, int dim);
Json box_to_json(const Box& b);

/// {"dim", "basis" (rows), "omega": {"lo","hi"}, "omega_tilde"?, "margin_cells"?}
Geometry geometry_from_json(const Json& j);
Json geometry_to_json(const Geometry& g);

/// {"name", "params": {...}}
ModelSpec model_from_json(const Json& j);
Json model_to_json(const ModelSpec& m);

/// {"shape", "center", "radius", "amplitude", "frequency"?}
SmoothFieldSpec field_from_json(const Json& j, int dim);
Json field_to_json(const SmoothFieldSpec& f);

/// {"kind": "equal"} | {"kind": "power", "p": ...} | {"kind": "fixed", "delta": ...}
DeltaRule delta_rule_from_json(const Json& j);
Json delta_rule_to_json(const DeltaRule& r);

CellQuadrature quadrature_from_json(const Json& j);
Json quadrature_to_json(const CellQuadrature& q);

ExecutionMode mode_from_string(const std::string& s);
const char* to_string(ExecutionMode m);

/// Sweep file: lattice, model, physics, sweep, initial_data, gateaux_fields?,
/// quadrature?, tolerances?.
SweepSpec sweep_from_json(const Json& j);
Json sweep_to_json(const SweepSpec& s);

/// Single-trajectory run.
struct SimulationRequest {
  Geometry geometry;
  double epsilon = 0.0;
  ModelSpec model;
  DeltaRule delta_rule;
  SimulationConfig config;
  SmoothFieldSpec w0;
  SmoothFieldSpec w1;
  CellQuadrature quadrature;
  ExecutionMode mode = ExecutionMode::audit;
  std::string trajectory_path;  // binary trajectory, optional
  std::string csv_path;         // ledger CSV, optional
};

/// Simulation file: lattice (with "epsilon"), model, delta_rule?, physics,
/// initial_data, quadrature?, output?.
SimulationRequest simulation_from_json(const Json& j);
Json simulation_to_json(const SimulationRequest& r);

struct RecoveryRequest {
  Geometry geometry;
  ModelSpec model;
  std::vector<double> eps_seq;
  DeltaRule delta_rule;
  std::vector<SmoothFieldSpec> fields;
  CellQuadrature quadrature;
};

/// Recovery file: lattice, model, sweep {eps_seq, delta_rule}, fields, quadrature?.
RecoveryRequest recovery_from_json(const Json& j);
Json recovery_to_json(const RecoveryRequest& r);

}  // namespace latlin
