#pragma once

// Event-triggered sliding-mode control of a CSTR: umbrella header.

#include "etsmc/config.hpp"
#include "etsmc/controller.hpp"
#include "etsmc/error.hpp"
#include "etsmc/plant.hpp"
#include "etsmc/plot.hpp"
#include "etsmc/report.hpp"
#include "etsmc/scenario.hpp"
#include "etsmc/sim.hpp"
#include "etsmc/trigger.hpp"
