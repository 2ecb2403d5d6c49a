#include "mlfsi/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mlfsi/basis.hpp"
#include "mlfsi/errors.hpp"

namespace mlfsi::verify {

namespace {

constexpr double kPi = std::numbers::pi;

// Value with first and second partial derivatives in (z, r).
struct Jet {
  double f = 0, z = 0, r = 0, zz = 0, zr = 0, rr = 0;

  static Jet constant(double c) { return {c}; }
  static Jet var_z(double z) { return {z, 1.0}; }
  static Jet var_r(double r) { return {r, 0.0, 1.0}; }
};

Jet operator+(const Jet& a, const Jet& b) {
  return {a.f + b.f, a.z + b.z, a.r + b.r, a.zz + b.zz, a.zr + b.zr, a.rr + b.rr};
}
Jet operator-(const Jet& a, const Jet& b) {
  return {a.f - b.f, a.z - b.z, a.r - b.r, a.zz - b.zz, a.zr - b.zr, a.rr - b.rr};
}
Jet operator*(double c, const Jet& a) {
  return {c * a.f, c * a.z, c * a.r, c * a.zz, c * a.zr, c * a.rr};
}
Jet operator+(double c, const Jet& a) { return Jet::constant(c) + a; }
Jet operator-(double c, const Jet& a) { return Jet::constant(c) - a; }
Jet operator*(const Jet& a, const Jet& b) {
  return {a.f * b.f,
          a.z * b.f + a.f * b.z,
          a.r * b.f + a.f * b.r,
          a.zz * b.f + 2.0 * a.z * b.z + a.f * b.zz,
          a.zr * b.f + a.z * b.r + a.r * b.z + a.f * b.zr,
          a.rr * b.f + 2.0 * a.r * b.r + a.f * b.rr};
}

// g(a) from g, g', g''.
Jet chain(const Jet& a, double g0, double g1, double g2) {
  return {g0,
          g1 * a.z,
          g1 * a.r,
          g2 * a.z * a.z + g1 * a.zz,
          g2 * a.z * a.r + g1 * a.zr,
          g2 * a.r * a.r + g1 * a.rr};
}
Jet operator/(const Jet& a, const Jet& b) {
  const double x = b.f;
  return a * chain(b, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}
Jet sin(const Jet& a) { return chain(a, std::sin(a.f), std::cos(a.f), -std::sin(a.f)); }

using std::sin;

template <class T>
T ipow(const T& x, int k) {
  T out = x;
  for (int i = 1; i < k; ++i) out = out * x;
  return out;
}

template <class T>
T shape_value(const BoundaryShape& b, const T& z, double length) {
  const T x = (1.0 / length) * z;
  switch (b.kind) {
    case BoundaryShape::Kind::kFlat:
      return 0.0 * x;
    case BoundaryShape::Kind::kBump:
      return b.amplitude * (x * (1.0 - x));
    case BoundaryShape::Kind::kSawtooth: {
      T series = 0.0 * x;
      for (int k = 1; k <= b.modes; ++k)
        series = series + ((k % 2 ? 2.0 : -2.0) / (kPi * k)) * sin((2.0 * kPi * k) * x);
      return (4.0 * b.amplitude) * (x * (1.0 - x) * series);
    }
  }
  return 0.0 * x;
}

template <class T>
T g_profile(int family, const T& x) {
  switch (family) {
    case 0:
      return ipow(x, 2) * ipow(1.0 - x, 2);
    case 1:
      return ipow(x, 2) * ipow(1.0 - x, 3);
    default: {
      const T s = sin(kPi * x);
      return s * s;
    }
  }
}

template <class T>
T h_profile(const ManufacturedField& f, const T& s) {
  if (f.violate_interface) return ipow(s, 2);
  switch (f.family) {
    case 0:
      return ipow(s, 2) * ipow(1.0 - s, 2);
    case 1:
      return ipow(s, 2) * ipow(1.0 - s, 2) * (1.0 + s);
    default:
      return ipow(s, 3) * ipow(1.0 - s, 2);
  }
}

// Physical velocity and its physical gradient at (z, r): grad[i][j] = d u_i / d x_j,
// x = (z, r).
struct PhysicalSample {
  double u[2];
  double grad[2][2];
};

PhysicalSample physical_sample(const BoundaryShape& b, const ManufacturedField& f, double z,
                               double r, double length, double radius) {
  const Jet zj = Jet::var_z(z);
  const Jet rj = Jet::var_r(r);
  const Jet wall = radius + shape_value(b, zj, length);
  const Jet phi = g_profile(f.family, (1.0 / length) * zj) * h_profile(f, rj / wall);
  PhysicalSample s;
  s.u[0] = phi.r;
  s.u[1] = -phi.z;
  s.grad[0][0] = phi.zr;
  s.grad[0][1] = phi.rr;
  s.grad[1][0] = -phi.zz;
  s.grad[1][1] = -phi.zr;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

BoundaryShape BoundaryShape::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::istringstream is(spec);
  for (std::string p; std::getline(is, p, ':');) parts.push_back(p);
  auto num = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(s, &pos);
      if (pos == s.size() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("eta shape: bad number '" + s + "' in '" + spec + "'");
  };
  if (parts.size() == 1 && parts[0] == "flat") return flat();
  if (parts.size() == 2 && parts[0] == "bump") return bump(num(parts[1]));
  if (parts.size() == 3 && parts[0] == "sawtooth") {
    const double k = num(parts[2]);
    if (k < 1 || k != std::floor(k)) throw ConfigError("eta shape: sawtooth needs K >= 1");
    return sawtooth(num(parts[1]), static_cast<int>(k));
  }
  throw ConfigError("eta shape: expected flat, bump:a or sawtooth:a:K, got '" + spec + "'");
}

std::string BoundaryShape::name() const {
  char buf[64];
  switch (kind) {
    case Kind::kFlat:
      return "flat";
    case Kind::kBump:
      std::snprintf(buf, sizeof buf, "bump:%g", amplitude);
      return buf;
    case Kind::kSawtooth:
      std::snprintf(buf, sizeof buf, "sawtooth:%g:%d", amplitude, modes);
      return buf;
  }
  return "?";
}

double BoundaryShape::value(double z, double length) const {
  return shape_value(*this, z, length);
}

std::string ManufacturedField::name() const {
  std::string n = "family " + std::to_string(family);
  if (violate_interface) n += " (nonzero on the wall)";
  return n;
}

KornResult korn_mismatch(const BoundaryShape& shape, const ManufacturedField& field,
                         double length, double radius, const KornGrid& grid) {
  if (grid.cells_z < 1 || grid.cells_r < 1 || grid.gauss < 1 || grid.gauss > 8)
    throw std::invalid_argument("korn: bad quadrature grid");
  const auto rule = fem::gauss_rule(static_cast<std::size_t>(grid.gauss));
  const double hz = length / grid.cells_z;
  const double hr = radius / grid.cells_r;
  KornResult res;
  for (int cz = 0; cz < grid.cells_z; ++cz)
    for (std::size_t qa = 0; qa < rule.n; ++qa) {
      const double z = (cz + 0.5 * (rule.points[qa] + 1.0)) * hz;
      const Jet ej = shape_value(shape, Jet::var_z(z), length);
      const double jac = 1.0 + ej.f / radius;
      const double deta = ej.z;
      for (int cr = 0; cr < grid.cells_r; ++cr)
        for (std::size_t qb = 0; qb < rule.n; ++qb) {
          const double rt = (cr + 0.5 * (rule.points[qb] + 1.0)) * hr;
          const double w = rule.weights[qa] * rule.weights[qb] * 0.25 * hz * hr;
          const PhysicalSample ps = physical_sample(shape, field, z, rt * jac, length, radius);
          // Reference derivatives of the pulled-back field, then the transformed gradient.
          const double s = rt / radius;
          double g[2][2];
          for (int i = 0; i < 2; ++i) {
            const double dzt = ps.grad[i][0] + ps.grad[i][1] * rt * deta / radius;
            const double drt = ps.grad[i][1] * jac;
            g[i][0] = dzt - s * deta / jac * drt;
            g[i][1] = drt / jac;
          }
          double grad2 = 0.0, sym2 = 0.0;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
              grad2 += g[i][j] * g[i][j];
              const double d = 0.5 * (g[i][j] + g[j][i]);
              sym2 += d * d;
            }
          res.gradient_norm += w * jac * grad2;
          res.strain_norm += w * jac * 2.0 * sym2;
        }
    }
  res.mismatch = std::abs(res.strain_norm - res.gradient_norm) / res.gradient_norm;
  return res;
}

double max_divergence(const BoundaryShape& shape, const ManufacturedField& field, double length,
                      double radius, std::size_t samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double z = length * u01(rng);
    const double r = (radius + shape.value(z, length)) * u01(rng);
    const auto s = physical_sample(shape, field, z, r, length, radius);
    worst = std::max(worst, std::abs(s.grad[0][0] + s.grad[1][1]));
  }
  return worst;
}

double max_boundary_violation(const BoundaryShape& shape, const ManufacturedField& field,
                              double length, double radius, std::size_t samples) {
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(samples - 1);
    const double z = length * t;
    const double wall = radius + shape.value(z, length);
    worst = std::max(worst, std::abs(physical_sample(shape, field, z, wall, length, radius).u[0]));
    worst = std::max(worst, std::abs(physical_sample(shape, field, z, 0.0, length, radius).u[1]));
    worst = std::max(worst,
                     std::abs(physical_sample(shape, field, 0.0, radius * t, length, radius).u[1]));
    worst = std::max(
        worst, std::abs(physical_sample(shape, field, length, radius * t, length, radius).u[1]));
  }
  return worst;
}

KornResult korn_check(const BoundaryShape& shape, const ManufacturedField& field, double length,
                      double radius, const KornGrid& grid) {
  const double bc = max_boundary_violation(shape, field, length, radius);
  const double dv = max_divergence(shape, field, length, radius, 10000);
  if (bc > 1e-12 || dv > 1e-12) {
    std::ostringstream os;
    os << "korn_check: field " << field.name() << " is not admissible (boundary violation "
       << bc << ", divergence " << dv << ")";
    throw std::invalid_argument(os.str());
  }
  return korn_mismatch(shape, field, length, radius, grid);
}

// ---------------------------------------------------------------------------------------------

double vstar_gap_norm(const RunSeries& s, const CsrMatrix& wall_l2_mass, double dt) {
  double sum = 0.0;
  for (std::size_t n = 1; n < s.v.size(); ++n)
    sum += dt * wall_l2_mass.quadratic(Vector(s.v[n] - s.v_star[n]));
  return std::sqrt(sum);
}

double wall_velocity_norm(const RunSeries& s, const CsrMatrix& wall_l2_mass, double dt) {
  double sum = 0.0;
  for (std::size_t n = 1; n < s.v.size(); ++n) sum += dt * wall_l2_mass.quadratic(s.v[n]);
  return std::sqrt(sum);
}

GapReport v_vstar_gap(const std::vector<double>& dt, const std::vector<double>& gap,
                      const std::vector<double>& wall_motion) {
  if (dt.size() < 3 || gap.size() != dt.size() || wall_motion.size() != dt.size())
    throw std::invalid_argument("v_vstar_gap: need at least three refinement levels");
  GapReport r;
  r.dt = dt;
  r.gap = gap;
  const bool all_zero = std::all_of(gap.begin(), gap.end(), [](double g) { return g == 0.0; });
  const bool moving =
      std::any_of(wall_motion.begin(), wall_motion.end(), [](double m) { return m > 0.0; });
  if (all_zero) {
    r.exact = !moving;
    r.suspicious = moving;
    r.pass = r.exact;
    return r;
  }
  if (std::any_of(gap.begin(), gap.end(), [](double g) { return !(g > 0.0); })) return r;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dt.size());
  for (std::size_t k = 0; k < dt.size(); ++k) {
    const double x = std::log(dt[k]), y = std::log(gap[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  r.pass = r.slope >= 0.4;
  return r;
}

// ---------------------------------------------------------------------------------------------

std::string ConvergenceReport::summary() const {
  std::ostringstream os;
  os << "levels:";
  for (auto n : levels) os << ' ' << n;
  os << '\n';
  char buf[256];
  for (const auto& c : channels) {
    os << "  " << c.channel << ": differences";
    for (double d : c.differences) {
      std::snprintf(buf, sizeof buf, " %.4e", d);
      os << buf;
    }
    os << "  orders";
    for (double o : c.orders) {
      std::snprintf(buf, sizeof buf, " %.3f", o);
      os << buf;
    }
    os << (c.exact ? "  (exact)" : "") << '\n';
  }
  std::snprintf(buf, sizeof buf, "  sup-norm drift of eta from eta0: %.4e\n", eta_drift);
  os << buf << "  " << (pass ? "PASS" : "FAIL") << ": eta and v orders in [0.8, 1.3]\n";
  return os.str();
}

ConvergenceReport self_convergence(const CoupledProblem& pb, const std::vector<RunResult>& runs,
                                   const std::vector<std::size_t>& levels) {
  if (runs.size() < 3 || runs.size() != levels.size())
    throw std::invalid_argument("self_convergence: need at least three runs");
  for (const auto& r : runs)
    if (r.degenerate || r.solver_failed)
      throw std::invalid_argument("self_convergence: a refinement run halted early");
  ConvergenceReport rep;
  rep.levels = levels;
  const CsrMatrix& wall = pb.structure.thin_wall().l2_mass;
  const CsrMatrix fluid = fem::assemble_mass(pb.fluid_mesh, 1.0, 2);
  const CsrMatrix solid = fem::assemble_mass(pb.solid_mesh, 1.0, 2);
  struct Channel {
    const char* name;
    const CsrMatrix* mass;
    const Vector CoupledState::*field;
  };
  const Channel chans[] = {{"eta", &wall, &CoupledState::eta},
                           {"v", &wall, &CoupledState::v},
                           {"u", &fluid, &CoupledState::u},
                           {"d", &solid, &CoupledState::d}};
  rep.pass = true;
  for (const auto& ch : chans) {
    ChannelOrder co;
    co.channel = ch.name;
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      const Vector diff = runs[k].final_state.*ch.field - runs[k + 1].final_state.*ch.field;
      co.differences.push_back(std::sqrt(ch.mass->quadratic(diff)));
    }
    co.exact = std::all_of(co.differences.begin(), co.differences.end(),
                           [](double d) { return d == 0.0; });
    for (std::size_t k = 0; k + 1 < co.differences.size(); ++k)
      co.orders.push_back(std::log2(co.differences[k] / co.differences[k + 1]));
    co.order = co.orders.back();
    const bool primary = co.channel == "eta" || co.channel == "v";
    if (primary && !co.exact && !(co.order >= 0.8 && co.order <= 1.3)) rep.pass = false;
    rep.channels.push_back(co);
  }
  const auto& fine = runs.back().series.eta;
  for (const auto& e : fine)
    rep.eta_drift = std::max(rep.eta_drift, (e - fine.front()).lpNorm<Eigen::Infinity>());
  return rep;
}

ConvergenceReport temporal_self_convergence(const RunConfig& cfg, std::size_t levels) {
  if (levels < 3) throw std::invalid_argument("temporal_self_convergence: need >= 3 levels");
  cfg.validate();
  CoupledProblem pb(cfg.geometry, cfg.weights, cfg.monitor());
  std::vector<RunResult> runs;
  std::vector<std::size_t> ns;
  for (std::size_t k = 0; k < levels; ++k) {
    RunConfig c = cfg;
    c.N = cfg.N << k;
    runs.push_back(run(c, pb, initial_state(c, pb), StepOptions{false}));
    ns.push_back(c.N);
  }
  return self_convergence(pb, runs, ns);
}

// ---------------------------------------------------------------------------------------------

InterpolantCheck interpolant_inequality(const std::string& channel,
                                        const std::vector<Vector>& values, double dt,
                                        const CsrMatrix* mass) {
  InterpolantCheck c;
  c.channel = channel;
  auto norm2 = [mass](const Vector& x) { return mass ? mass->quadratic(x) : x.squaredNorm(); };
  const auto rule = fem::gauss_rule(2);
  for (std::size_t n = 0; n + 1 < values.size(); ++n) {
    const Vector jump = values[n + 1] - values[n];
    for (std::size_t q = 0; q < rule.n; ++q) {
      const double s = 0.5 * (rule.points[q] + 1.0);
      // piecewise constant value v^{n+1} minus linear interpolant at t_n + s dt
      const Vector diff = values[n + 1] - (values[n] + s * jump);
      c.lhs += 0.5 * dt * rule.weights[q] * norm2(diff);
    }
    c.rhs += dt / 3.0 * norm2(jump);
  }
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
  return c;
}

std::vector<InterpolantCheck> interpolant_inequality_check(const RunSeries& s,
                                                           const CoupledProblem& pb, double dt) {
  const CsrMatrix& wall = pb.structure.thin_wall().l2_mass;
  const CsrMatrix fluid = fem::assemble_mass(pb.fluid_mesh, 1.0, 2);
  const CsrMatrix solid = fem::assemble_mass(pb.solid_mesh, 1.0, 2);
  return {interpolant_inequality("u", s.u, dt, &fluid),
          interpolant_inequality("v", s.v, dt, &wall),
          interpolant_inequality("eta", s.eta, dt, &wall),
          interpolant_inequality("V", s.V, dt, &solid)};
}

// ---------------------------------------------------------------------------------------------

ShiftSeries::ShiftSeries(std::vector<Vector> values, double dt)
    : values_(std::move(values)), dt_(dt) {
  if (values_.empty() || !(dt > 0.0)) throw std::invalid_argument("ShiftSeries: empty or bad dt");
}

ShiftSeries ShiftSeries::shifted(std::size_t k) const {
  std::vector<Vector> out(values_.size());
  for (std::size_t n = 0; n < values_.size(); ++n) out[n] = values_[n >= k ? n - k : 0];
  return ShiftSeries(std::move(out), dt_);
}

double ShiftSeries::translation_norm_squared(std::size_t k, const CsrMatrix* mass) const {
  double sum = 0.0;
  for (std::size_t n = k; n < values_.size(); ++n) {
    const Vector d = values_[n] - values_[n - k];
    sum += dt_ * (mass ? mass->quadratic(d) : d.squaredNorm());
  }
  return sum;
}

}  // namespace mlfsi::verify
