// Convenience umbrella: pulls in the whole analysis library.
#pragma once

#include "wta/csv_io.hpp"
#include "wta/gee.hpp"
#include "wta/km.hpp"
#include "wta/markov_null.hpp"
#include "wta/power.hpp"
#include "wta/report.hpp"
#include "wta/rng.hpp"
#include "wta/stats.hpp"
#include "wta/svg.hpp"
#include "wta/test_result.hpp"
#include "wta/trial_data.hpp"
#include "wta/trial_sim.hpp"
#include "wta/version.hpp"
#include "wta/wta_curve.hpp"
