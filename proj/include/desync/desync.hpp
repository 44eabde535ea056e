#pragma once

#include "desync/analysis.hpp"
#include "desync/engine.hpp"
#include "desync/error.hpp"
#include "desync/interaction.hpp"
#include "desync/phase.hpp"
#include "desync/phasemap.hpp"
#include "desync/rng.hpp"
#include "desync/scenario.hpp"
#include "desync/topology.hpp"
