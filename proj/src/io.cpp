#include "mlfsi/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mlfsi/errors.hpp"

namespace mlfsi::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(x)) return false;
  out = x;
  return true;
}

bool parse_integer(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return false;
  out = x;
  return true;
}

PressureSignal parse_signal(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = trim(spec.substr(0, colon));
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto number = [&](const std::string& s) {
    double x;
    if (!parse_double(s, x)) throw ConfigError("bad number '" + s + "' in '" + spec + "'");
    return x;
  };
  if (kind == "constant") {
    const auto p = split(rest, ':');
    if (p.size() != 1) throw ConfigError("expected constant:c, got '" + spec + "'");
    return PressureSignal::constant(number(p[0]));
  }
  if (kind == "pulse") {
    const auto p = split(rest, ':');
    if (p.size() != 2) throw ConfigError("expected pulse:amplitude:duration, got '" + spec + "'");
    return PressureSignal::cosine_pulse(number(p[0]), number(p[1]));
  }
  if (kind == "table") {
    const auto p = split(rest, ',');
    if (p.size() < 2 || p.size() % 2 != 0)
      throw ConfigError("expected table:t0,p0,t1,p1,..., got '" + spec + "'");
    std::vector<double> t, v;
    for (std::size_t i = 0; i < p.size(); i += 2) {
      t.push_back(number(p[i]));
      v.push_back(number(p[i + 1]));
    }
    return PressureSignal::table(std::move(t), std::move(v));
  }
  throw ConfigError("unknown pressure signal '" + spec + "' (constant, pulse or table)");
}

std::string signal_text(const PressureSignal& s) {
  switch (s.kind) {
    case PressureSignal::Kind::kConstant:
      return "constant:" + format_number(s.value);
    case PressureSignal::Kind::kCosinePulse:
      return "pulse:" + format_number(s.amplitude) + ":" + format_number(s.duration);
    case PressureSignal::Kind::kTable: {
      std::string out = "table:";
      for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (i) out += ",";
        out += format_number(s.times[i]) + "," + format_number(s.values[i]);
      }
      return out;
    }
  }
  return {};
}

using Section = std::map<std::string, std::pair<std::string, int>>;  // key -> (value, line)

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"geometry", {"L", "R", "H", "nz", "nr_fluid", "nr_solid"}},
      {"physics",
       {"rho_f", "mu", "rho_s1h", "c2", "C1", "C0", "D0", "D1", "C2", "D2", "lambda", "mu_s",
        "rho_s2"}},
      {"time", {"T", "N", "dt"}},
      {"pressure", {"inlet", "outlet"}},
      {"initial", {"eta0", "v0", "random_amplitude", "seed"}},
      {"output", {"dir", "snapshot_every", "format"}},
      {"guards", {"r_min", "r_max"}},
  };
  return keys;
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig parse_config(const std::string& text) {
  std::vector<std::string> errors;
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header '" + line + "'");
        continue;
      }
      current = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(current)) errors.push_back(where + "unknown section [" + current + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected key = value, got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (current.empty()) {
      errors.push_back(where + "key '" + key + "' outside any section");
      continue;
    }
    const auto known = known_keys().find(current);
    if (known == known_keys().end()) continue;  // already reported
    if (!known->second.count(key)) {
      errors.push_back(where + "unknown key '" + key + "' in [" + current + "]");
      continue;
    }
    auto& sec = sections[current];
    if (sec.count(key)) {
      errors.push_back(where + "duplicate key '" + key + "' in [" + current + "]");
      continue;
    }
    sec[key] = {value, lineno};
  }

  RunConfig cfg;
  auto lookup = [&](const std::string& sec, const std::string& key) -> const std::pair<std::string, int>* {
    const auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  auto get_double = [&](const std::string& sec, const std::string& key, double& out) {
    const auto* v = lookup(sec, key);
    if (!v) return false;
    if (!parse_double(v->first, out)) {
      errors.push_back("line " + std::to_string(v->second) + ": " + sec + "." + key +
                       ": expected a number, got '" + v->first + "'");
      return false;
    }
    return true;
  };
  auto get_integer = [&](const std::string& sec, const std::string& key, long long lo,
                         long long& out) {
    const auto* v = lookup(sec, key);
    if (!v) return false;
    if (!parse_integer(v->first, out)) {
      errors.push_back("line " + std::to_string(v->second) + ": " + sec + "." + key +
                       ": expected an integer, got '" + v->first + "'");
      return false;
    }
    if (out < lo) {
      errors.push_back(sec + "." + key + " must be >= " + std::to_string(lo));
      return false;
    }
    return true;
  };

  long long n = 0;
  get_double("geometry", "L", cfg.geometry.length);
  get_double("geometry", "R", cfg.geometry.radius);
  get_double("geometry", "H", cfg.geometry.thickness);
  if (get_integer("geometry", "nz", 1, n)) cfg.geometry.nz = static_cast<int>(n);
  if (get_integer("geometry", "nr_fluid", 1, n)) cfg.geometry.nr_fluid = static_cast<int>(n);
  if (get_integer("geometry", "nr_solid", 1, n)) cfg.geometry.nr_solid = static_cast<int>(n);

  auto& w = cfg.weights;
  get_double("physics", "rho_f", w.rho_f);
  get_double("physics", "mu", w.mu);
  get_double("physics", "rho_s1h", w.rho_s1h);
  if (lookup("physics", "c2") && lookup("physics", "C1"))
    errors.push_back("physics: c2 and C1 name the same coefficient; give only one");
  if (!get_double("physics", "c2", w.c2)) get_double("physics", "C1", w.c2);
  get_double("physics", "C0", w.koiter_c0);
  get_double("physics", "D0", w.koiter_d0);
  get_double("physics", "D1", w.koiter_d1);
  get_double("physics", "C2", w.koiter_c2);
  get_double("physics", "D2", w.koiter_d2);
  get_double("physics", "lambda", w.lambda);
  get_double("physics", "mu_s", w.mu_s);
  get_double("physics", "rho_s2", w.rho_s2);

  const bool have_T = get_double("time", "T", cfg.T);
  if (!lookup("time", "T")) errors.push_back("time: T is required");
  const bool have_N_key = lookup("time", "N") != nullptr;
  const bool have_dt_key = lookup("time", "dt") != nullptr;
  if (!have_N_key && !have_dt_key) errors.push_back("time: N or dt is required");
  if (have_N_key && have_dt_key) errors.push_back("time: give N or dt, not both");
  if (have_N_key && !have_dt_key) {
    if (get_integer("time", "N", 1, n)) cfg.N = static_cast<std::size_t>(n);
  } else if (have_dt_key && !have_N_key) {
    double dt = 0.0;
    if (get_double("time", "dt", dt)) {
      if (!(dt > 0.0)) {
        errors.push_back("time: dt must be > 0");
      } else if (have_T && cfg.T > 0.0) {
        const double steps = cfg.T / dt;
        const double rounded = std::round(steps);
        if (rounded < 1.0 || std::abs(steps - rounded) > 1e-9 * rounded)
          errors.push_back("time: T / dt must be a positive integer, got " + format_number(steps));
        else
          cfg.N = static_cast<std::size_t>(rounded);
      }
    }
  }

  for (const char* end : {"inlet", "outlet"}) {
    const auto* v = lookup("pressure", end);
    if (!v) continue;
    try {
      (std::string(end) == "inlet" ? cfg.pressure.inlet : cfg.pressure.outlet) =
          parse_signal(v->first);
    } catch (const ConfigError& e) {
      errors.push_back("line " + std::to_string(v->second) + ": pressure." + end + ": " + e.what());
    }
  }

  if (const auto* v = lookup("initial", "eta0")) cfg.initial.eta0 = v->first;
  if (const auto* v = lookup("initial", "v0")) cfg.initial.v0 = v->first;
  get_double("initial", "random_amplitude", cfg.initial.random_amplitude);
  if (get_integer("initial", "seed", 0, n)) cfg.initial.seed = static_cast<std::uint64_t>(n);

  if (const auto* v = lookup("output", "dir")) cfg.output_dir = v->first;
  if (get_integer("output", "snapshot_every", 0, n)) cfg.snapshot_every = static_cast<std::size_t>(n);
  if (const auto* v = lookup("output", "format")) {
    cfg.snapshot_format = v->first;
    try {
      parse_snapshot_format(v->first);
    } catch (const ConfigError& e) {
      errors.push_back(std::string("output.format: ") + e.what());
    }
  }

  double r_min = cfg.r_min_factor * cfg.geometry.radius;
  double r_max = cfg.r_max_factor * cfg.geometry.radius;
  const bool got_min = get_double("guards", "r_min", r_min);
  const bool got_max = get_double("guards", "r_max", r_max);
  bool guards_ok = true;
  auto guard_error = [&](const char* msg) {
    errors.push_back(msg);
    guards_ok = false;
  };
  if (got_min && !(r_min > 0.0)) guard_error("guards: r_min must be > 0");
  else if (got_min && !(r_min < cfg.geometry.radius)) guard_error("guards: r_min must be < R");
  if (got_max && !(r_max > cfg.geometry.radius)) guard_error("guards: r_max must be > R");
  if (guards_ok && cfg.geometry.radius > 0.0) {
    cfg.r_min_factor = r_min / cfg.geometry.radius;
    cfg.r_max_factor = r_max / cfg.geometry.radius;
  }

  {
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      for (const auto& part : split(e.what(), ';'))
        if (!part.empty()) errors.push_back(part);
    }
  }
  if (errors.empty()) {
    try {
      CoupledProblem pb(cfg.geometry, cfg.weights, cfg.monitor());
      initial_state(cfg, pb);
    } catch (const ConfigError& e) {
      for (const auto& part : split(e.what(), ';'))
        if (!part.empty()) errors.push_back(part);
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string canonical_config(const RunConfig& c) {
  std::ostringstream o;
  const auto& g = c.geometry;
  const auto& w = c.weights;
  o << "[geometry]\nL = " << format_number(g.length) << "\nR = " << format_number(g.radius)
    << "\nH = " << format_number(g.thickness) << "\nnz = " << g.nz << "\nnr_fluid = " << g.nr_fluid
    << "\nnr_solid = " << g.nr_solid << "\n";
  o << "[physics]\nrho_f = " << format_number(w.rho_f) << "\nmu = " << format_number(w.mu)
    << "\nrho_s1h = " << format_number(w.rho_s1h) << "\nc2 = " << format_number(w.c2)
    << "\nC0 = " << format_number(w.koiter_c0) << "\nD0 = " << format_number(w.koiter_d0)
    << "\nD1 = " << format_number(w.koiter_d1) << "\nC2 = " << format_number(w.koiter_c2)
    << "\nD2 = " << format_number(w.koiter_d2) << "\nlambda = " << format_number(w.lambda)
    << "\nmu_s = " << format_number(w.mu_s) << "\nrho_s2 = " << format_number(w.rho_s2) << "\n";
  o << "[time]\nT = " << format_number(c.T) << "\nN = " << c.N << "\n";
  o << "[pressure]\ninlet = " << signal_text(c.pressure.inlet)
    << "\noutlet = " << signal_text(c.pressure.outlet) << "\n";
  o << "[initial]\neta0 = " << c.initial.eta0 << "\nv0 = " << c.initial.v0
    << "\nrandom_amplitude = " << format_number(c.initial.random_amplitude)
    << "\nseed = " << c.initial.seed << "\n";
  o << "[guards]\nr_min = " << format_number(c.r_min_factor * g.radius)
    << "\nr_max = " << format_number(c.r_max_factor * g.radius) << "\n";
  return o.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& cfg) { return hex64(fnv1a(canonical_config(cfg))); }

// ---------------------------------------------------------------------------------------------
// Ledger

std::string ledger_to_csv(const EnergyLedger& ledger) {
  std::string out = kLedgerHeader;
  out += '\n';
  for (const auto& r : ledger.rows()) {
    out += std::to_string(r.step) + "," + std::to_string(r.stage);
    for (double x : {r.time, r.E_kin, r.E_el, r.D, r.structure_residual, r.fluid_slack,
                     r.boundary_work, r.min_radius, r.max_radius, r.v_vstar_gap})
      out += "," + format_number(x);
    out += '\n';
  }
  return out;
}

EnergyLedger ledger_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kLedgerHeader)
    throw std::runtime_error("ledger: unexpected header");
  EnergyLedger ledger;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12)
      throw std::runtime_error("ledger: line " + std::to_string(lineno) + " has " +
                               std::to_string(f.size()) + " fields");
    LedgerRow r;
    long long step = 0, stage = 0;
    double x[10];
    bool ok = parse_integer(f[0], step) && parse_integer(f[1], stage);
    for (int i = 0; i < 10 && ok; ++i) ok = parse_double(f[2 + i], x[i]);
    if (!ok) throw std::runtime_error("ledger: bad number on line " + std::to_string(lineno));
    r.step = step;
    r.stage = static_cast<int>(stage);
    r.time = x[0];
    r.E_kin = x[1];
    r.E_el = x[2];
    r.D = x[3];
    r.structure_residual = x[4];
    r.fluid_slack = x[5];
    r.boundary_work = x[6];
    r.min_radius = x[7];
    r.max_radius = x[8];
    r.v_vstar_gap = x[9];
    ledger.append(r);
  }
  return ledger;
}

void write_ledger_csv(const EnergyLedger& ledger, const std::string& path) {
  write_file(path, ledger_to_csv(ledger));
}

EnergyLedger read_ledger_csv(const std::string& path) { return ledger_from_csv(read_file(path)); }

// ---------------------------------------------------------------------------------------------
// Snapshots

SnapshotFormat parse_snapshot_format(const std::string& s) {
  if (s == "csv") return SnapshotFormat::kCsv;
  if (s == "vtk") return SnapshotFormat::kVtk;
  if (s == "both") return SnapshotFormat::kBoth;
  throw ConfigError("unknown snapshot format '" + s + "' (csv, vtk or both)");
}

namespace {

// Bilinear Q1 pressure at every Q2 node.
std::vector<double> pressure_at_nodes(const FemMesh& m, const Vector& p) {
  const std::size_t nzq = m.nodes_z(), nrq = m.nodes_r();
  const std::size_t pz = static_cast<std::size_t>(m.nz) + 1;
  std::vector<double> out(m.node_count(), 0.0);
  if (static_cast<std::size_t>(p.size()) != m.pressure_node_count()) return out;
  for (std::size_t j = 0; j < nrq; ++j)
    for (std::size_t i = 0; i < nzq; ++i) {
      const std::size_t i0 = i / 2, i1 = (i + 1) / 2, j0 = j / 2, j1 = (j + 1) / 2;
      out[m.node_index(i, j)] =
          0.25 * (p[j0 * pz + i0] + p[j0 * pz + i1] + p[j1 * pz + i0] + p[j1 * pz + i1]);
    }
  return out;
}

double wall_value_at(const Vector& wall, std::size_t i) {
  return i < static_cast<std::size_t>(wall.size()) ? wall[static_cast<Eigen::Index>(i)] : 0.0;
}

std::string vtk_grid(const FemMesh& m, const std::vector<double>& r_coord,
                     const std::vector<std::pair<std::string, std::vector<double>>>& scalars,
                     const std::vector<std::pair<std::string, const Vector*>>& vectors) {
  std::string o = "# vtk DataFile Version 3.0\nmlfsi snapshot\nASCII\nDATASET STRUCTURED_GRID\n";
  o += "DIMENSIONS " + std::to_string(m.nodes_z()) + " " + std::to_string(m.nodes_r()) + " 1\n";
  o += "POINTS " + std::to_string(m.node_count()) + " double\n";
  for (std::size_t k = 0; k < m.node_count(); ++k)
    o += format_number(m.node_z[k]) + " " + format_number(r_coord[k]) + " 0\n";
  o += "POINT_DATA " + std::to_string(m.node_count()) + "\n";
  for (const auto& [name, values] : scalars) {
    o += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
    for (double x : values) o += format_number(x) + "\n";
  }
  for (const auto& [name, vec] : vectors) {
    o += "VECTORS " + name + " double\n";
    for (std::size_t k = 0; k < m.node_count(); ++k)
      o += format_number((*vec)[2 * k]) + " " + format_number((*vec)[2 * k + 1]) + " 0\n";
  }
  return o;
}

std::vector<double> fluid_radii(const CoupledState& s, const CoupledProblem& pb, bool physical) {
  const FemMesh& m = pb.fluid_mesh;
  std::vector<double> r(m.node_r);
  if (!physical) return r;
  const double R = pb.geometry.radius;
  for (std::size_t j = 0; j < m.nodes_r(); ++j)
    for (std::size_t i = 0; i < m.nodes_z(); ++i) {
      const std::size_t k = m.node_index(i, j);
      r[k] = m.node_r[k] * (1.0 + wall_value_at(s.eta, i) / R);
    }
  return r;
}

}  // namespace

std::string fluid_csv(const CoupledState& s, const CoupledProblem& pb, bool physical) {
  const FemMesh& m = pb.fluid_mesh;
  const auto r = fluid_radii(s, pb, physical);
  const auto p = pressure_at_nodes(m, s.p);
  std::string o = "z,r,u_z,u_r,p\n";
  for (std::size_t k = 0; k < m.node_count(); ++k)
    o += format_number(m.node_z[k]) + "," + format_number(r[k]) + "," + format_number(s.u[2 * k]) +
         "," + format_number(s.u[2 * k + 1]) + "," + format_number(p[k]) + "\n";
  return o;
}

std::string solid_csv(const CoupledState& s, const CoupledProblem& pb) {
  const FemMesh& m = pb.solid_mesh;
  std::string o = "z,r,d_z,d_r,V_z,V_r\n";
  for (std::size_t k = 0; k < m.node_count(); ++k)
    o += format_number(m.node_z[k]) + "," + format_number(m.node_r[k]) + "," +
         format_number(s.d[2 * k]) + "," + format_number(s.d[2 * k + 1]) + "," +
         format_number(s.V[2 * k]) + "," + format_number(s.V[2 * k + 1]) + "\n";
  return o;
}

std::string interface_csv(const CoupledState& s, const Vector& v_star, const CoupledProblem& pb) {
  std::string o = "z,eta,v,v_star\n";
  const auto& z = pb.maps.wall_z;
  for (std::size_t i = 0; i < z.size(); ++i)
    o += format_number(z[i]) + "," + format_number(wall_value_at(s.eta, i)) + "," +
         format_number(wall_value_at(s.v, i)) + "," + format_number(wall_value_at(v_star, i)) + "\n";
  return o;
}

std::string fluid_vtk(const CoupledState& s, const CoupledProblem& pb) {
  const FemMesh& m = pb.fluid_mesh;
  return vtk_grid(m, fluid_radii(s, pb, true), {{"p", pressure_at_nodes(m, s.p)}},
                  {{"u", &s.u}});
}

std::string solid_vtk(const CoupledState& s, const CoupledProblem& pb) {
  const FemMesh& m = pb.solid_mesh;
  return vtk_grid(m, m.node_r, {}, {{"d", &s.d}, {"V", &s.V}});
}

std::vector<std::string> write_field_snapshot(const CoupledState& state, const Vector& v_star,
                                              const CoupledProblem& pb, const std::string& dir,
                                              const std::string& stem, SnapshotFormat format) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files;
  if (format != SnapshotFormat::kVtk) {
    files.emplace_back(stem + "_fluid.csv", fluid_csv(state, pb, false));
    files.emplace_back(stem + "_fluid_physical.csv", fluid_csv(state, pb, true));
    files.emplace_back(stem + "_solid.csv", solid_csv(state, pb));
    files.emplace_back(stem + "_interface.csv", interface_csv(state, v_star, pb));
  }
  if (format != SnapshotFormat::kCsv) {
    files.emplace_back(stem + "_fluid.vtk", fluid_vtk(state, pb));
    files.emplace_back(stem + "_solid.vtk", solid_vtk(state, pb));
  }
  std::vector<std::string> names;
  for (const auto& [name, text] : files) {
    write_file((fs::path(dir) / name).string(), text);
    names.push_back(name);
  }
  return names;
}

// ---------------------------------------------------------------------------------------------
// Manifest

void write_manifest(const Manifest& m, const std::string& path) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["ledger_hash"] = m.ledger_hash;
  j["status"] = m.status;
  j["snapshots"] = nlohmann::json::array();
  for (const auto& e : m.snapshots)
    j["snapshots"].push_back(
        {{"index", e.index}, {"step", e.step}, {"stage", e.stage}, {"time", e.time}, {"files", e.files}});
  write_file(path, j.dump(2) + "\n");
}

Manifest read_manifest(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  Manifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.ledger_hash = j.at("ledger_hash").get<std::string>();
  m.status = j.at("status").get<std::string>();
  for (const auto& e : j.at("snapshots")) {
    ManifestEntry me;
    me.index = e.at("index").get<std::size_t>();
    me.step = e.at("step").get<long>();
    me.stage = e.at("stage").get<int>();
    me.time = e.at("time").get<double>();
    me.files = e.at("files").get<std::vector<std::string>>();
    m.snapshots.push_back(std::move(me));
  }
  return m;
}

Manifest write_run_outputs(const RunConfig& cfg, const CoupledProblem& pb, const RunResult& res) {
  namespace fs = std::filesystem;
  const std::string dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
  fs::create_directories(dir);
  const std::string ledger_text = ledger_to_csv(res.ledger);
  write_file((fs::path(dir) / "ledger.csv").string(), ledger_text);

  Manifest m;
  m.config_hash = config_hash(cfg);
  m.ledger_hash = hex64(fnv1a(ledger_text));
  m.status = res.degenerate ? "degenerate" : res.solver_failed ? "solver-failure" : "completed";

  if (cfg.snapshot_every > 0) {
    const auto format = parse_snapshot_format(cfg.snapshot_format);
    const auto& se = res.series;
    for (std::size_t k = 0; k < se.t.size(); ++k) {
      const bool last = k + 1 == se.t.size();
      if (k % cfg.snapshot_every != 0 && !last) continue;
      CoupledState s = CoupledState::zero(pb);
      s.u = se.u[k];
      s.p = se.p[k];
      s.v = se.v[k];
      s.eta = se.eta[k];
      s.d = se.d[k];
      s.V = se.V[k];
      s.t = se.t[k];
      s.n = k;
      char stem[32];
      std::snprintf(stem, sizeof stem, "snap_%06zu", k);
      ManifestEntry e;
      e.index = k;
      e.step = static_cast<long>(k);
      e.stage = k == 0 ? 0 : 2;
      e.time = se.t[k];
      e.files = write_field_snapshot(s, se.v_star[k], pb, dir, stem, format);
      m.snapshots.push_back(std::move(e));
    }
  }
  write_manifest(m, (fs::path(dir) / "manifest.json").string());
  return m;
}

}  // namespace mlfsi::io
