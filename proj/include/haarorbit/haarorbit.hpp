#pragma once

// Umbrella header.

#include "haarorbit/figures.hpp"
#include "haarorbit/haar.hpp"
#include "haarorbit/io.hpp"
#include "haarorbit/linalg.hpp"
#include "haarorbit/montecarlo.hpp"
#include "haarorbit/orbit_stats.hpp"
#include "haarorbit/verify.hpp"
#include "haarorbit/weingarten.hpp"
