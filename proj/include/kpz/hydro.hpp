#pragma once

namespace kpz {

// Particle flux j(rho); zero on the static phase rho <= 1/2.
double flux(double rho);
// j(rho) / rho.
double drift(double rho);
// Characteristic speed j'(rho).
double characteristic_speed(double rho);

struct FrontConstants {
  double rho0 = 0.0, pi0 = 0.0;            // analytic
  double rho0_numeric = 0.0, pi0_numeric = 0.0;  // golden-section maximizer of the drift
};
FrontConstants front_constants();

// Macroscopic density at position x (sites per unit time) from step data.
double density_profile(double x);

// Position per unit time of particle r t.
double lln_position(double r);
// Inverse of lln_position on [-1, 1/4].
double kappa_of_pi(double pi);

}  // namespace kpz
