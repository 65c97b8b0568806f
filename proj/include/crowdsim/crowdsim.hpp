#pragma once

#include "crowdsim/bench.hpp"
#include "crowdsim/diagnostics.hpp"
#include "crowdsim/dynamics.hpp"
#include "crowdsim/forces.hpp"
#include "crowdsim/geometry.hpp"
#include "crowdsim/neighbors.hpp"
#include "crowdsim/params.hpp"
#include "crowdsim/perception.hpp"
#include "crowdsim/rng.hpp"
#include "crowdsim/scenario.hpp"
#include "crowdsim/scenario_io.hpp"
#include "crowdsim/state.hpp"
#include "crowdsim/vec2.hpp"
