#include "latlin/latlin.h"

#include "latlin/app.hpp"
#include "latlin/config.hpp"
#include "latlin/discrete_ops.hpp"
#include "latlin/error.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct latlin_lattice {
  latlin::LatticePtr lattice;
};

struct latlin_model {
  latlin::ModelPtr model;
  latlin::LatticePtr lattice;
};

namespace {

thread_local std::string g_last_error;

template <class F>
latlin_status guarded(F&& body) {
  try {
    body();
    return LATLIN_OK;
  } catch (const latlin::Error& e) {
    g_last_error = e.what();
    return static_cast<latlin_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LATLIN_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LATLIN_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return LATLIN_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  latlin::require(p != nullptr, latlin::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

latlin::LatticeField field_from(const latlin::LatticePtr& lat, const double* data) {
  latlin::LatticeField u(lat);
  std::memcpy(u.values().data(), data, u.values().size() * sizeof(double));
  return u;
}

latlin::EnergyParams params_for(const latlin_lattice* lattice, const latlin_model* model, double delta) {
  need(lattice, "lattice");
  need(model, "model");
  latlin::EnergyParams p{delta, model->model, lattice->lattice, latlin::ExecutionMode::audit};
  latlin::validate(p);
  return p;
}

}  // namespace

extern "C" {

const char* latlin_version(void) { return "1.0.0"; }

const char* latlin_status_string(latlin_status status) {
  if (status == LATLIN_OK) return "ok";
  return latlin::to_string(static_cast<latlin::ErrorCode>(status));
}

const char* latlin_last_error(void) { return g_last_error.c_str(); }

latlin_status latlin_lattice_create(int dim, const double* basis, double epsilon, const double* omega_lo,
                                    const double* omega_hi, const double* omega_tilde_lo,
                                    const double* omega_tilde_hi, latlin_lattice** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    latlin::require(dim >= 1 && dim <= 3, latlin::ErrorCode::unsupported_dimension, "dim must be 1, 2 or 3");
    need(basis, "basis");
    need(omega_lo, "omega_lo");
    need(omega_hi, "omega_hi");
    latlin::require((omega_tilde_lo == nullptr) == (omega_tilde_hi == nullptr), latlin::ErrorCode::invalid_argument,
                    "omega_tilde_lo and omega_tilde_hi must both be given or both be NULL");
    latlin::Geometry g;
    g.dim = dim;
    g.basis = Eigen::Map<const Eigen::MatrixXd>(basis, dim, dim);
    g.omega.lo.assign(omega_lo, omega_lo + dim);
    g.omega.hi.assign(omega_hi, omega_hi + dim);
    if (omega_tilde_lo) {
      latlin::Box t;
      t.lo.assign(omega_tilde_lo, omega_tilde_lo + dim);
      t.hi.assign(omega_tilde_hi, omega_tilde_hi + dim);
      g.omega_tilde = t;
    }
    *out = new latlin_lattice{latlin::Lattice::build(g.spec(epsilon))};
  });
}

void latlin_lattice_destroy(latlin_lattice* lattice) { delete lattice; }

latlin_status latlin_lattice_info(const latlin_lattice* lattice, int* dim, int64_t* points, int64_t* cells,
                                  int* corners, double* cell_volume) {
  return guarded([&] {
    need(lattice, "lattice");
    const auto& L = *lattice->lattice;
    if (dim) *dim = L.dim();
    if (points) *points = L.num_points();
    if (cells) *cells = L.num_cells();
    if (corners) *corners = L.corners();
    if (cell_volume) *cell_volume = L.cell_volume();
  });
}

latlin_status latlin_lattice_points(const latlin_lattice* lattice, double* coords) {
  return guarded([&] {
    need(lattice, "lattice");
    need(coords, "coords");
    const auto& L = *lattice->lattice;
    for (latlin::Index p = 0; p < L.num_points(); ++p) {
      const auto x = L.point(p);
      std::memcpy(coords + p * L.dim(), x.data(), x.size() * sizeof(double));
    }
  });
}

latlin_status latlin_lattice_in_omega(const latlin_lattice* lattice, unsigned char* flags) {
  return guarded([&] {
    need(lattice, "lattice");
    need(flags, "flags");
    const auto& L = *lattice->lattice;
    for (latlin::Index p = 0; p < L.num_points(); ++p) flags[p] = L.in_omega(p) ? 1 : 0;
  });
}

latlin_status latlin_lattice_barycenters(const latlin_lattice* lattice, double* barycenters) {
  return guarded([&] {
    need(lattice, "lattice");
    need(barycenters, "barycenters");
    const auto& L = *lattice->lattice;
    for (latlin::Index c = 0; c < L.num_cells(); ++c) {
      const auto x = L.barycenter(c);
      std::memcpy(barycenters + c * L.dim(), x.data(), x.size() * sizeof(double));
    }
  });
}

latlin_status latlin_lattice_corner_labels(const latlin_lattice* lattice, double* Z) {
  return guarded([&] {
    need(lattice, "lattice");
    need(Z, "Z");
    const auto& z = lattice->lattice->Z();
    Eigen::Map<Eigen::MatrixXd>(Z, z.rows(), z.cols()) = z;
  });
}

latlin_status latlin_lattice_cell_of(const latlin_lattice* lattice, const double* x, int64_t* cell) {
  return guarded([&] {
    need(lattice, "lattice");
    need(x, "x");
    need(cell, "cell");
    const auto& L = *lattice->lattice;
    *cell = L.cell_of(std::span<const double>(x, static_cast<std::size_t>(L.dim())));
  });
}

latlin_status latlin_model_create(const char* model_json, const latlin_lattice* lattice, latlin_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(model_json, "model_json");
    need(lattice, "lattice");
    latlin::Json j;
    try {
      j = latlin::Json::parse(model_json);
    } catch (const latlin::Json::parse_error& e) {
      latlin::fail(latlin::ErrorCode::config, std::string("model_json is not valid JSON: ") + e.what());
    }
    const latlin::ModelSpec spec = latlin::model_from_json(j);
    *out = new latlin_model{spec.build(lattice->lattice->Z()), lattice->lattice};
  });
}

void latlin_model_destroy(latlin_model* model) { delete model; }

latlin_status latlin_model_eval(const latlin_model* model, const double* F, double* W, double* grad) {
  return guarded([&] {
    need(model, "model");
    need(F, "F");
    const auto& m = *model->model;
    const Eigen::Map<const Eigen::MatrixXd> Fm(F, m.dim(), m.corners());
    if (W) *W = m.eval(Fm);
    if (grad) {
      Eigen::MatrixXd G(m.dim(), m.corners());
      m.grad(Fm, G);
      Eigen::Map<Eigen::MatrixXd>(grad, m.dim(), m.corners()) = G;
    }
  });
}

latlin_status latlin_model_tensor(const latlin_model* model, double* C) {
  return guarded([&] {
    need(model, "model");
    need(C, "C");
    const auto& m = *model->model;
    const latlin::ElasticityTensor t = latlin::elasticity_tensor(latlin::hessian_at_Z(m), m.reference());
    std::memcpy(C, t.c.data(), t.c.size() * sizeof(double));
  });
}

latlin_status latlin_inner_product(const latlin_lattice* lattice, const double* u, const double* v, double* out) {
  return guarded([&] {
    need(lattice, "lattice");
    need(u, "u");
    need(v, "v");
    need(out, "out");
    *out = latlin::inner_product(field_from(lattice->lattice, u), field_from(lattice->lattice, v));
  });
}

latlin_status latlin_discrete_gradient(const latlin_lattice* lattice, const double* u, double* g) {
  return guarded([&] {
    need(lattice, "lattice");
    need(u, "u");
    need(g, "g");
    const latlin::CellField G = latlin::discrete_gradient(field_from(lattice->lattice, u));
    std::memcpy(g, G.values().data(), G.values().size() * sizeof(double));
  });
}

latlin_status latlin_discrete_divergence(const latlin_lattice* lattice, const double* g, double* out) {
  return guarded([&] {
    need(lattice, "lattice");
    need(g, "g");
    need(out, "out");
    latlin::CellField G(lattice->lattice);
    std::memcpy(G.values().data(), g, G.values().size() * sizeof(double));
    const latlin::LatticeField d = latlin::discrete_divergence(G);
    std::memcpy(out, d.values().data(), d.values().size() * sizeof(double));
  });
}

latlin_status latlin_energy(const latlin_lattice* lattice, const latlin_model* model, double delta, const double* u,
                            double* energy) {
  return guarded([&] {
    const latlin::EnergyParams p = params_for(lattice, model, delta);
    need(u, "u");
    need(energy, "energy");
    *energy = latlin::atomistic_energy(field_from(p.lattice, u), p);
  });
}

latlin_status latlin_force(const latlin_lattice* lattice, const latlin_model* model, double delta, const double* u,
                           double* force) {
  return guarded([&] {
    const latlin::EnergyParams p = params_for(lattice, model, delta);
    need(u, "u");
    need(force, "force");
    const latlin::LatticeField f = latlin::atomistic_force(field_from(p.lattice, u), p);
    std::memcpy(force, f.values().data(), f.values().size() * sizeof(double));
  });
}

latlin_status latlin_run(const char* command, const char* request_json, char** result_json) {
  return guarded([&] {
    need(command, "command");
    need(request_json, "request_json");
    need(result_json, "result_json");
    *result_json = nullptr;
    latlin::Json req;
    try {
      req = latlin::Json::parse(request_json, nullptr, true, true);
    } catch (const latlin::Json::parse_error& e) {
      latlin::fail(latlin::ErrorCode::config, std::string("request_json is not valid JSON: ") + e.what());
    }
    const std::string cmd = command;
    latlin::Json result;
    if (cmd == "simulate") {
      result = latlin::app_simulate(req);
    } else if (cmd == "converge") {
      latlin::require(req.is_object() && req.contains("config") && req.contains("out") && req.at("out").is_string(),
                      latlin::ErrorCode::config, "converge request needs \"config\" and \"out\"");
      result = latlin::app_converge(req.at("config"), req.at("out").get<std::string>());
    } else if (cmd == "tensor") {
      result = latlin::app_tensor(req);
    } else if (cmd == "check-model") {
      result = latlin::app_check_model(req);
    } else if (cmd == "audit") {
      latlin::require(req.is_object() && req.contains("trajectory") && req.at("trajectory").is_string(),
                      latlin::ErrorCode::config, "audit request needs \"trajectory\"");
      result = latlin::app_audit(req.at("trajectory").get<std::string>(), req.value("edie_tolerance", 1e-6));
    } else if (cmd == "recover") {
      result = latlin::app_recover(req);
    } else {
      latlin::fail(latlin::ErrorCode::invalid_argument, "unknown command '" + cmd + "'");
    }
    const std::string text = result.dump(2);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    latlin::require(buf != nullptr, latlin::ErrorCode::internal, "out of memory");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *result_json = buf;
  });
}

void latlin_string_free(char* s) { std::free(s); }

}  // extern "C"
