#pragma once

// Umbrella header.

#include "ptt/aggregate.hpp"
#include "ptt/analysis.hpp"
#include "ptt/core.hpp"
#include "ptt/io.hpp"
#include "ptt/mechanisms.hpp"
#include "ptt/random.hpp"
