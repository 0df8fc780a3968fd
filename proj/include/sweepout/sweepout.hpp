#pragma once

#include "sweepout/enclosure.hpp"
#include "sweepout/errors.hpp"
#include "sweepout/grid.hpp"
#include "sweepout/random.hpp"
#include "sweepout/rational.hpp"
#include "sweepout/rotation_solver.hpp"
#include "sweepout/sequences.hpp"
#include "sweepout/torus.hpp"
#include "sweepout/weights.hpp"

#define SWEEPOUT_VERSION "0.1.0"
