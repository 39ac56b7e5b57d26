#pragma once

// Umbrella header: asynchronous federated AdaBoost with adaptive
// communication scheduling, staleness-decayed aggregation, and a
// deterministic discrete-event federation simulator.

#include "boost.hpp"
#include "config.hpp"
#include "data.hpp"
#include "experiment.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "scheduler.hpp"
#include "sim.hpp"
#include "stump.hpp"
