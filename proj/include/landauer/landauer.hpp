#pragma once

#include "landauer/core.hpp"
#include "landauer/register.hpp"
#include "landauer/state.hpp"
#include "landauer/thermo.hpp"
#include "landauer/gates.hpp"
#include "landauer/molecule.hpp"
#include "landauer/pulse.hpp"
#include "landauer/heatstats.hpp"
#include "landauer/experiment.hpp"
