#pragma once

#include "riskalloc/allocate.hpp"
#include "riskalloc/errors.hpp"
#include "riskalloc/expectation.hpp"
#include "riskalloc/model.hpp"
#include "riskalloc/monte_carlo.hpp"
#include "riskalloc/quadrature.hpp"
#include "riskalloc/random.hpp"
#include "riskalloc/risk.hpp"
#include "riskalloc/scenario_io.hpp"
