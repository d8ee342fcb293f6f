#pragma once

#include "trlse/error.hpp"
#include "trlse/random.hpp"
#include "trlse/gp.hpp"
#include "trlse/acquisition.hpp"
#include "trlse/box_optimizer.hpp"
#include "trlse/trust_region.hpp"
#include "trlse/benchmarks.hpp"
#include "trlse/engine.hpp"
#include "trlse/harness.hpp"
