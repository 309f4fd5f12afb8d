// Umbrella header.
#pragma once

#include "edm/ccm.hpp"
#include "edm/core.hpp"
#include "edm/csv.hpp"
#include "edm/embedding.hpp"
#include "edm/forecast.hpp"
#include "edm/report.hpp"
#include "edm/systems.hpp"
