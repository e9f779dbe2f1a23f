#pragma once

// Umbrella header for the reconstruction toolkit.

#include "tomo/bench.hpp"
#include "tomo/core.hpp"
#include "tomo/io.hpp"
#include "tomo/iterative.hpp"
#include "tomo/metrics.hpp"
#include "tomo/projection.hpp"
#include "tomo/simulation.hpp"
#include "tomo/sparse_filter.hpp"
#include "tomo/spectral.hpp"
