#pragma once

// Umbrella header for the interconnect current-mode delay library.

#include "icm/analytic.hpp"
#include "icm/errors.hpp"
#include "icm/exact_line.hpp"
#include "icm/harness.hpp"
#include "icm/ladder.hpp"
#include "icm/merit.hpp"
#include "icm/params.hpp"
#include "icm/scenario.hpp"
#include "icm/units.hpp"
