#pragma once

#include "toruslab/torus_system.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace toruslab {

/// Names of the shipped example systems, in a fixed order.
std::vector<std::string> catalog_names();

/// Throws InputError for an unknown name.
TorusSystem catalog_system(const std::string& name);

std::vector<TorusSystem> catalog_systems();

/// A random conservative system on T^2: a random matrix in GL(2, Z) with
/// entries bounded by 3 composed with one or two random shears of amplitude
/// at most 0.1. Deterministic in `seed`.
TorusSystem random_conservative_system(std::uint64_t seed);

}  // namespace toruslab
