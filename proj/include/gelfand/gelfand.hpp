#pragma once

#include "gelfand/error.hpp"
#include "gelfand/rng.hpp"
#include "gelfand/numlin.hpp"
#include "gelfand/report.hpp"
#include "gelfand/cstarcat.hpp"
#include "gelfand/spaceoid.hpp"
#include "gelfand/functors.hpp"
#include "gelfand/duality.hpp"
#include "gelfand/generators.hpp"
#include "gelfand/json_io.hpp"
