#pragma once

// Umbrella header for the pvuptake library: Monte Carlo profitability of
// small rooftop PV systems and the prospect-theory uptake model on top.

#include "pvuptake/analysis.hpp"
#include "pvuptake/cashflow.hpp"
#include "pvuptake/errors.hpp"
#include "pvuptake/irr.hpp"
#include "pvuptake/month.hpp"
#include "pvuptake/sampling.hpp"
#include "pvuptake/scenario.hpp"
#include "pvuptake/timeseries.hpp"
#include "pvuptake/uptake.hpp"
