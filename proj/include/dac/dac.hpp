#pragma once

#include "dac/bonds.hpp"
#include "dac/colouring.hpp"
#include "dac/connectivity.hpp"
#include "dac/estimators.hpp"
#include "dac/events.hpp"
#include "dac/io.hpp"
#include "dac/lattice.hpp"
#include "dac/oracle.hpp"
#include "dac/parallel.hpp"
#include "dac/pivotal.hpp"
#include "dac/rng.hpp"
#include "dac/suite.hpp"

namespace dac {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dac
