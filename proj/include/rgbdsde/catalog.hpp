#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rgbdsde/coefficients.hpp"
#include "rgbdsde/domain.hpp"
#include "rgbdsde/reflected.hpp"

namespace rgbdsde::catalog {

// Built-in problem families, selected by name with a JSON parameter object.
// Unknown names and unknown parameter keys are ConfigErrors.
//
// Coefficient families (z-terms use the sum of the components of z, x-terms the
// sum of the components of x):
//   zero                 f = phi = g = 0, l = xi0
//   linear               f = fy y + fz z, phi = phiy y, g = gy y + gz z, l = xi1 x
//   affine               linear plus constants f0, phi0, g0, xi0 and l += xi_bump x(1 - x)
//   saturating           f = f0 + f_amp tanh y, phi = phiy y, g = g_amp tanh y, l = xi0 + xi_amp sin(pi x)
//   ramp                 zero data with xi = 0 (pair with the ramp obstacle)
//   pinned               phi = -y, l = 1
//   heat_obstacle        phi = -y, l = 1 + x(1 - x)/2
//   standard_stochastic  heat_obstacle with f = fy y (default -0.5) and g = gy y (default 0.2)
// Every family also accepts the declared constants c, beta, alpha, K, mu and b_dim.
CoefficientSet coefficients(const std::string& family, const nlohmann::json& params);
std::vector<std::string> coefficient_families();

// Obstacle families: none; constant {level}; ramp {slope = 1, offset = 0}, level slope t + offset.
ObstacleSpec obstacle(const std::string& family, const nlohmann::json& params);

// {"kind": "interval", "lo", "hi"} or {"kind": "ball", "center": [...], "radius"}.
Domain domain(const nlohmann::json& spec);

// {"start": [...], "drift0", "drift1", "sigma"}: b(x) = drift0 + drift1 x, sigma(x) = sigma I.
DiffusionSpec diffusion(const nlohmann::json& spec);

}  // namespace rgbdsde::catalog
