#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mlfsi/errors.hpp"
#include "mlfsi/fluid.hpp"

namespace mlfsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integrals of a piecewise-linear table over [t0, t1], split at the breakpoints.
template <class F>
void for_each_linear_piece(const PressureSignal& s, double t0, double t1, F&& f) {
  std::vector<double> cuts{t0};
  for (double t : s.times)
    if (t > t0 && t < t1) cuts.push_back(t);
  cuts.push_back(t1);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) f(cuts[k], cuts[k + 1]);
}

}  // namespace

PressureSignal PressureSignal::constant(double c) {
  PressureSignal s;
  s.kind = Kind::kConstant;
  s.value = c;
  return s;
}

PressureSignal PressureSignal::cosine_pulse(double amplitude, double duration) {
  PressureSignal s;
  s.kind = Kind::kCosinePulse;
  s.amplitude = amplitude;
  s.duration = duration;
  return s;
}

PressureSignal PressureSignal::table(std::vector<double> times, std::vector<double> values) {
  PressureSignal s;
  s.kind = Kind::kTable;
  s.times = std::move(times);
  s.values = std::move(values);
  return s;
}

void PressureSignal::validate() const {
  std::ostringstream err;
  switch (kind) {
    case Kind::kConstant:
      if (!std::isfinite(value)) err << "pressure: constant value must be finite; ";
      break;
    case Kind::kCosinePulse:
      if (!std::isfinite(amplitude)) err << "pressure: pulse amplitude must be finite; ";
      if (!(duration > 0.0)) err << "pressure: pulse duration must be > 0; ";
      break;
    case Kind::kTable:
      if (times.empty() || times.size() != values.size())
        err << "pressure: table needs matching, non-empty time and value lists; ";
      for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) {
          err << "pressure: table times must be strictly increasing; ";
          break;
        }
      break;
  }
  if (!err.str().empty()) throw ConfigError(err.str());
}

double PressureSignal::at(double t) const {
  switch (kind) {
    case Kind::kConstant:
      return value;
    case Kind::kCosinePulse:
      return (t >= 0.0 && t <= duration) ? 0.5 * amplitude * (1.0 - std::cos(kTwoPi * t / duration))
                                         : 0.0;
    case Kind::kTable: {
      if (t <= times.front()) return values.front();
      if (t >= times.back()) return values.back();
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - times.begin());
      const double a = (t - times[k - 1]) / (times[k] - times[k - 1]);
      return (1.0 - a) * values[k - 1] + a * values[k];
    }
  }
  return 0.0;
}

double PressureSignal::average(double t0, double t1) const {
  if (!(t1 > t0)) throw std::invalid_argument("pressure average: empty interval");
  switch (kind) {
    case Kind::kConstant:
      return value;
    case Kind::kCosinePulse: {
      const double a = std::max(t0, 0.0);
      const double b = std::min(t1, duration);
      if (!(b > a)) return 0.0;
      const double c = duration / kTwoPi;
      const double integral = 0.5 * amplitude *
                              ((b - a) - c * (std::sin(b / c) - std::sin(a / c)));
      return integral / (t1 - t0);
    }
    case Kind::kTable: {
      double integral = 0.0;
      for_each_linear_piece(*this, t0, t1, [&](double a, double b) {
        integral += 0.5 * (b - a) * (at(a) + at(b));
      });
      return integral / (t1 - t0);
    }
  }
  return 0.0;
}

double PressureSignal::l2_squared(double T) const {
  if (!(T > 0.0)) return 0.0;
  switch (kind) {
    case Kind::kConstant:
      return value * value * T;
    case Kind::kCosinePulse: {
      const double b = std::min(T, duration);
      const double th = kTwoPi * b / duration;
      const double c = duration / kTwoPi;
      // (1 - cos)^2 = 1 - 2 cos + cos^2
      return 0.25 * amplitude * amplitude *
             (1.5 * b - 2.0 * c * std::sin(th) + 0.25 * c * std::sin(2.0 * th));
    }
    case Kind::kTable: {
      double integral = 0.0;
      for_each_linear_piece(*this, 0.0, T, [&](double a, double b) {
        const double pa = at(a), pb = at(b);
        integral += (b - a) * (pa * pa + pa * pb + pb * pb) / 3.0;
      });
      return integral;
    }
  }
  return 0.0;
}

std::pair<double, double> pressure_average(const PressureData& data, std::size_t n, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pressure_average: dt must be positive");
  const double t0 = static_cast<double>(n) * dt;
  const double t1 = static_cast<double>(n + 1) * dt;
  return {data.inlet.average(t0, t1), data.outlet.average(t0, t1)};
}

}  // namespace mlfsi
