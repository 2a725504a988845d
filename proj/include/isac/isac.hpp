#pragma once

#include "array_model.hpp"
#include "config.hpp"
#include "covariance.hpp"
#include "errors.hpp"
#include "idempotent.hpp"
#include "problem.hpp"
#include "rate_check.hpp"
#include "rng.hpp"
#include "sca.hpp"
#include "serialize.hpp"
#include "sim.hpp"
#include "solver.hpp"
#include "stats.hpp"
#include "types.hpp"
