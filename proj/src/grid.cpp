#include "pvo/grid.hpp"

#include "pvo/errors.hpp"

namespace pvo {

namespace {

double lattice(double lo, double hi, std::size_t i, std::size_t n) {
  if (n == 1) return 0.5 * (lo + hi);
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

std::vector<ControlInput> make_grid(const GridSpec& spec) {
  if (spec.nx == 0 || spec.ny == 0) throw ConfigError("control grid: resolution must be positive");
  if (!(spec.ax_min <= spec.ax_max) || !(spec.ay_min <= spec.ay_max)) {
    throw ConfigError("control grid: empty box bounds");
  }
  std::vector<ControlInput> out;
  out.reserve(spec.nx * spec.ny);
  for (std::size_t i = 0; i < spec.nx; ++i) {
    const double ax = lattice(spec.ax_min, spec.ax_max, i, spec.nx);
    for (std::size_t j = 0; j < spec.ny; ++j) {
      out.push_back({ax, lattice(spec.ay_min, spec.ay_max, j, spec.ny)});
    }
  }
  return out;
}

bool candidate_less(double total_a, double control_a, const ControlInput& a, double total_b,
                    double control_b, const ControlInput& b) {
  if (total_a != total_b) return total_a < total_b;
  if (control_a != control_b) return control_a < control_b;
  if (a.ax != b.ax) return a.ax < b.ax;
  return a.ay < b.ay;
}

}  // namespace pvo
