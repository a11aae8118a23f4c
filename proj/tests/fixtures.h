#pragma once

#include <vector>

#include "peanolab/corrpath.h"

namespace peanolab::testing {

inline PathPair make_path(std::vector<double> l, std::vector<double> r,
                          PathKind kind = PathKind::lattice) {
  PathPair p;
  p.spec = build_cov_spec(6.0);
  p.kind = kind;
  p.dt = 1.0;
  p.L = std::move(l);
  p.R = std::move(r);
  return p;
}

// Lattice walk from a list of +-1 steps.
inline std::vector<double> walk(const std::vector<int>& steps) {
  std::vector<double> w{0.0};
  for (const int s : steps) w.push_back(w.back() + s);
  return w;
}

}  // namespace peanolab::testing
