#pragma once

#include "rsmanet/errors.hpp"
#include "rsmanet/core_model.hpp"
#include "rsmanet/specfun.hpp"
#include "rsmanet/quadrature.hpp"
#include "rsmanet/kernels.hpp"
#include "rsmanet/rates.hpp"
#include "rsmanet/stats.hpp"
#include "rsmanet/montecarlo.hpp"
#include "rsmanet/metrics.hpp"
#include "rsmanet/config.hpp"
#include "rsmanet/commands.hpp"
