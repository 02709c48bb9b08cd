#pragma once

#include "bedcast/admission_trend.hpp"
#include "bedcast/calendar.hpp"
#include "bedcast/config.hpp"
#include "bedcast/evaluation.hpp"
#include "bedcast/io.hpp"
#include "bedcast/los_model.hpp"
#include "bedcast/lp_solver.hpp"
#include "bedcast/occupancy_forecast.hpp"
#include "bedcast/random.hpp"
#include "bedcast/residual_los.hpp"
#include "bedcast/simulator.hpp"
