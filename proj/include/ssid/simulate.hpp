#pragma once

#include <cstdint>

#include "ssid/models.hpp"

namespace ssid {

struct SimulationConfig {
  InnovationsModel model;
  Eigen::Index n = 0;       // sample count
  uint64_t seed = 0;
  Eigen::Index burn_in = -1;  // negative: default ceil(10/(1−ρ(A))), capped at 1e4
};

// Draws e_k ~ N(0, I) from a Philox stream and runs
// x_{k+1} = A x_k + K Q^{1/2} e_k, y_k = C x_k + Q^{1/2} e_k from x_0 = 0,
// discarding the burn-in prefix. Identical (seed, config) gives bit-identical
// output. Throws UnstableMatrix for unstable A.
TimeSeries simulate(const SimulationConfig& cfg);

Eigen::Index default_burn_in(const MatrixXd& a);

}  // namespace ssid
