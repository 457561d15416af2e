#pragma once

#include "eqgh/action_geometry.hpp"
#include "eqgh/epgh.hpp"
#include "eqgh/errors.hpp"
#include "eqgh/generators.hpp"
#include "eqgh/groups.hpp"
#include "eqgh/json_io.hpp"
#include "eqgh/metric_space.hpp"
#include "eqgh/rotation.hpp"
#include "eqgh/scenarios.hpp"
#include "eqgh/search_bounds.hpp"
#include "eqgh/smoothing.hpp"
