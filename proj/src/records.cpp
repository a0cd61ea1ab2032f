#include "spinpair/records.hpp"

#include <cmath>

#include "spinpair/errors.hpp"

namespace spinpair {

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

namespace {
void check_arrays(const std::vector<double>& x, const std::vector<double>& y, const char* what) {
  if (x.size() != y.size()) throw InvalidInput(std::string(what) + ": array lengths differ");
  if (!strictly_increasing(x)) throw InvalidInput(std::string(what) + ": grid not strictly increasing");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw InvalidInput(std::string(what) + ": non-finite value");
}
}  // namespace

void TransientRecord::validate() const { check_arrays(tau_ns, q, "transient"); }
void SweepRecord::validate() const { check_arrays(b0_mT, q, "sweep"); }
void SpectrumRecord::validate() const { check_arrays(x, y, "spectrum"); }

SpectrumRecord as_spectrum(const SweepRecord& sweep) {
  SpectrumRecord s;
  s.x = sweep.b0_mT;
  s.y = sweep.q;
  s.label = "sweep";
  return s;
}

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
    throw InvalidInput("uniform grid: need step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

std::vector<double> default_tau_grid() { return uniform_grid(0.0, 800.0, 2.0); }

}  // namespace spinpair
