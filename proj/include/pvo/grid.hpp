#pragma once

#include <cstddef>
#include <vector>

#include "pvo/types.hpp"

namespace pvo {

/// Box of admissible accelerations sampled as an nx-by-ny lattice.
struct GridSpec {
  std::size_t nx = 7;
  std::size_t ny = 7;
  double ax_min = -1.0;
  double ax_max = 1.0;
  double ay_min = -1.0;
  double ay_max = 1.0;

  bool contains(const ControlInput& u) const {
    return u.ax >= ax_min && u.ax <= ax_max && u.ay >= ay_min && u.ay <= ay_max;
  }
};

/// Lattice points ordered with ax major, ay minor. A single point along an
/// axis sits at the middle of that axis.
std::vector<ControlInput> make_grid(const GridSpec& spec);

/// Strict ordering of candidates: lower total, then lower control cost, then
/// lexicographic (ax, ay).
bool candidate_less(double total_a, double control_a, const ControlInput& a, double total_b,
                    double control_b, const ControlInput& b);

}  // namespace pvo
