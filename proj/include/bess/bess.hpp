#pragma once

// Umbrella header: battery cycle-aging pricing, rainflow benchmarking, and
// market dispatch optimization.

#include "bess/backtest.hpp"
#include "bess/config.hpp"
#include "bess/csv.hpp"
#include "bess/dispatch.hpp"
#include "bess/linprog.hpp"
#include "bess/market.hpp"
#include "bess/mip.hpp"
#include "bess/mps.hpp"
#include "bess/rainflow.hpp"
#include "bess/segment_policy.hpp"
#include "bess/stress.hpp"
