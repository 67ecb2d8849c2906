#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace opc {

// Centralized numeric tolerances. All comparisons in the library route through
// one instance of this record so that a profile switch retunes everything
// coherently. Relative tolerances are applied against the operator norm of the
// object under test when one is available, absolute otherwise.
struct Tolerances {
  double ortho = 1e-10;    // isometry / orthogonality defect ceiling
  double herm = 1e-10;     // hermiticity defect ceiling (relative)
  double psd = 1e-9;       // negative-eigenvalue clamp window (relative)
  double recon = 1e-10;    // spectral reconstruction residual (relative)
  double realize = 1e-9;   // quadratic-form realization residual
  double region = 1e-9;    // region-membership slack
  double span = 1e-3;      // subspace / hull comparison slack
  double rank = 1e-10;     // relative singular-value threshold for rank decisions
  double rounding = 1e-11; // rounding allowance added to structural certificates
  int n_angles = 360;      // default boundary-sweep resolution
};

inline Tolerances tolerances_for_profile(const std::string& profile) {
  if (profile == "default" || profile.empty()) return Tolerances{};
  if (profile == "strict") {
    Tolerances t;
    t.ortho = 1e-12;
    t.herm = 1e-12;
    t.psd = 1e-11;
    t.recon = 1e-12;
    t.realize = 1e-11;
    t.region = 1e-11;
    t.span = 1e-4;
    t.rank = 1e-12;
    t.rounding = 1e-12;
    return t;
  }
  throw std::invalid_argument("unknown tolerance profile: " + profile);
}

// Process-wide tolerance record, selected once via OPC_TOL_PROFILE
// ("default" when unset).
inline const Tolerances& tols() {
  static const Tolerances t = [] {
    const char* env = std::getenv("OPC_TOL_PROFILE");
    return tolerances_for_profile(env ? std::string(env) : std::string());
  }();
  return t;
}

}  // namespace opc
