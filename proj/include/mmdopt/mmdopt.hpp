#pragma once

// Umbrella header: trajectory-distribution embedding, reduced-set selection,
// the sampling optimizer, and the benchmark harness around them.

#include "mmdopt/baseline.hpp"
#include "mmdopt/bench.hpp"
#include "mmdopt/collision.hpp"
#include "mmdopt/errors.hpp"
#include "mmdopt/frenet.hpp"
#include "mmdopt/io.hpp"
#include "mmdopt/kernel.hpp"
#include "mmdopt/optimizer.hpp"
#include "mmdopt/projection.hpp"
#include "mmdopt/reduced_set.hpp"
#include "mmdopt/rng.hpp"
#include "mmdopt/scene.hpp"
#include "mmdopt/trajectory.hpp"
