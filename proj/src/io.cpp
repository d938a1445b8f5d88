#include "latlin/io.hpp"

#include "latlin/error.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace latlin {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr char kTrajMagic[8] = {'L', 'L', 'T', 'R', 'J', '1', 0, 0};
constexpr char kGridMagic[8] = {'L', 'L', 'G', 'R', 'D', '1', 0, 0};

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  require(in.good(), ErrorCode::io, "cannot open '" + path + "'");
  return in;
}

void write_header(std::ofstream& out, const char (&magic)[8], const Json& header) {
  const std::string text = header.dump();
  const std::uint64_t n = text.size();
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(text.data(), static_cast<std::streamsize>(n));
}

Json read_header(std::ifstream& in, const char (&magic)[8], const std::string& path) {
  char m[8];
  in.read(m, 8);
  require(in.good() && std::memcmp(m, magic, 8) == 0, ErrorCode::io, "'" + path + "': bad magic");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  require(in.good() && n < (1u << 30), ErrorCode::io, "'" + path + "': bad header length");
  std::string text(n, '\0');
  in.read(text.data(), static_cast<std::streamsize>(n));
  require(in.good(), ErrorCode::io, "'" + path + "': truncated header");
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::io, "'" + path + "': corrupt header: " + e.what());
  }
}

void write_doubles(std::ofstream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* p, std::size_t n, const std::string& path) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  require(in.good(), ErrorCode::io, "'" + path + "': truncated data");
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json grid_header(const GridField& g) {
  return {{"dim", g.dim},
          {"ncomp", g.ncomp},
          {"centering", g.centering == Centering::node ? "node" : "cell"},
          {"shape", g.shape},
          {"origin", g.origin},
          {"spacing", g.spacing}};
}

GridField grid_from_header(const Json& h, const std::string& path) {
  try {
    const Centering c = h.at("centering").get<std::string>() == "cell" ? Centering::cell : Centering::node;
    GridField g = GridField::zeros(h.at("dim").get<int>(), h.at("ncomp").get<int>(), c,
                                   h.at("shape").get<std::array<Index, 3>>(),
                                   h.at("origin").get<std::array<double, 3>>(),
                                   h.at("spacing").get<std::array<double, 3>>());
    return g;
  } catch (const Json::exception& e) {
    fail(ErrorCode::io, "'" + path + "': bad grid header: " + e.what());
  }
}

}  // namespace

void write_trajectory_binary(const Trajectory& traj, const SimulationRequest& request, const std::string& path) {
  require(traj.size() > 0, ErrorCode::invalid_argument, "write_trajectory_binary: empty trajectory");
  const Index points = traj.u.front().size();
  const int dim = traj.u.front().dim();
  Json h = {{"request", simulation_to_json(request)},
            {"points", points},
            {"dim", dim},
            {"samples", traj.size()},
            {"dt_used", traj.dt_used},
            {"steps", traj.steps},
            {"aborted", traj.aborted},
            {"abort_reason", traj.abort_reason},
            {"int_v2", traj.int_v2}};
  auto out = open_out(path, true);
  write_header(out, kTrajMagic, h);
  for (std::size_t s = 0; s < traj.size(); ++s) {
    write_doubles(out, &traj.times[s], 1);
    write_doubles(out, traj.u[s].values().data(), traj.u[s].values().size());
    write_doubles(out, traj.v[s].values().data(), traj.v[s].values().size());
  }
  require(out.good(), ErrorCode::io, "write failed for '" + path + "'");
}

LoadedTrajectory read_trajectory_binary(const std::string& path) {
  auto in = open_in(path, true);
  const Json h = read_header(in, kTrajMagic, path);
  LoadedTrajectory L;
  std::size_t samples = 0;
  Index points = 0;
  try {
    L.request = simulation_from_json(h.at("request"));
    samples = h.at("samples").get<std::size_t>();
    points = h.at("points").get<Index>();
    L.traj.dt_used = h.at("dt_used").get<double>();
    L.traj.steps = h.at("steps").get<long>();
    L.traj.aborted = h.at("aborted").get<bool>();
    L.traj.abort_reason = h.at("abort_reason").get<std::string>();
    if (h.contains("int_v2")) L.traj.int_v2 = h.at("int_v2").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::io, "'" + path + "': bad trajectory header: " + e.what());
  }
  const LatticePtr lat = Lattice::build(L.request.geometry.spec(L.request.epsilon));
  require(lat->num_points() == points, ErrorCode::io, "'" + path + "': lattice in header does not match the data");
  L.params = EnergyParams{L.request.delta_rule.delta(L.request.epsilon), L.request.model.build(lat->Z()), lat,
                          L.request.mode};
  L.traj.config = L.request.config;
  L.traj.delta = L.params.delta;
  L.traj.model = L.params.model->name();
  for (std::size_t s = 0; s < samples; ++s) {
    double t = 0.0;
    read_doubles(in, &t, 1, path);
    LatticeField u(lat);
    LatticeField v(lat);
    read_doubles(in, u.values().data(), u.values().size(), path);
    read_doubles(in, v.values().data(), v.values().size(), path);
    L.traj.times.push_back(t);
    L.traj.u.push_back(std::move(u));
    L.traj.v.push_back(std::move(v));
  }
  return L;
}

void write_trajectory_csv(const Trajectory& traj, const EdieAudit& audit, const std::string& path) {
  auto out = open_out(path, false);
  out << "t,norm_u,norm_v,kinetic,potential,dissipation,residual\n";
  const EdieLedger& L = audit.substitution;
  for (std::size_t s = 0; s < traj.size(); ++s) {
    out << g17(traj.times[s]) << ',' << g17(norm(traj.u[s])) << ',' << g17(norm(traj.v[s])) << ','
        << g17(L.kinetic[s]) << ',' << g17(L.potential[s]) << ',' << g17(L.dissipation_visc[s]) << ','
        << g17(L.residual[s]) << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed for '" + path + "'");
}

void write_grid_csv(const GridField& g, const std::string& path) {
  auto out = open_out(path, false);
  out << "# " << grid_header(g).dump() << '\n';
  for (int a = 0; a < g.dim; ++a) out << (a ? "," : "") << 'x' << a;
  for (int c = 0; c < g.ncomp; ++c) out << ",c" << c;
  out << '\n';
  for (Index f = 0; f < g.num_samples(); ++f) {
    const auto x = g.position(f);
    for (int a = 0; a < g.dim; ++a) out << (a ? "," : "") << g17(x[a]);
    for (double v : g.at(f)) out << ',' << g17(v);
    out << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed for '" + path + "'");
}

GridField read_grid_csv(const std::string& path) {
  auto in = open_in(path, false);
  std::string line;
  std::getline(in, line);
  require(line.rfind("# ", 0) == 0, ErrorCode::io, "'" + path + "': missing grid geometry line");
  Json h;
  try {
    h = Json::parse(line.substr(2));
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::io, "'" + path + "': bad geometry line: " + e.what());
  }
  GridField g = grid_from_header(h, path);
  std::getline(in, line);
  for (Index f = 0; f < g.num_samples(); ++f) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, "'" + path + "': too few rows");
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    auto vals = g.at(f);
    while (std::getline(ss, cell, ',')) {
      if (col >= g.dim) {
        require(col - g.dim < g.ncomp, ErrorCode::io, "'" + path + "': too many columns");
        vals[col - g.dim] = std::stod(cell);
      }
      ++col;
    }
    require(col == g.dim + g.ncomp, ErrorCode::io, "'" + path + "': wrong column count");
  }
  return g;
}

void write_grid_binary(const GridField& g, const std::string& path) {
  auto out = open_out(path, true);
  write_header(out, kGridMagic, grid_header(g));
  write_doubles(out, g.values.data(), g.values.size());
  require(out.good(), ErrorCode::io, "write failed for '" + path + "'");
}

GridField read_grid_binary(const std::string& path) {
  auto in = open_in(path, true);
  GridField g = grid_from_header(read_header(in, kGridMagic, path), path);
  read_doubles(in, g.values.data(), g.values.size(), path);
  return g;
}

}  // namespace latlin
