#pragma once

#include "ssid/transfer_function.hpp"

namespace ssid {

// H-infinity norm by bisection on γ, each candidate certified through the
// discrete bounded-real LMI (feasible ⇔ ‖G‖_∞ < γ), seeded by a coarse
// frequency-grid maximum. Returns γ within rel_tol of the true norm.
// Throws UnstableMatrix for unstable G and SolverFailure when the
// semidefinite feasibility oracle cannot decide a candidate.
double hinf_norm(const TransferFunction& g, double rel_tol = 1e-4);

// Feasibility oracle for fixed γ: exists P ≻ 0 with
// [[A,B],[C,D]]ᵀ diag(P, I) [[A,B],[C,D]] − diag(P, γ²I) ≺ 0.
bool bounded_real_feasible(const TransferFunction& g, double gamma);

}  // namespace ssid
