/**
 * @file lambdapi.hpp
 * @brief Umbrella header.
 */
#pragma once

#include "lambdapi/error.hpp"
#include "lambdapi/linalg.hpp"
#include "lambdapi/text.hpp"
#include "lambdapi/mdp.hpp"
#include "lambdapi/distribution.hpp"
#include "lambdapi/bellman.hpp"
#include "lambdapi/rng.hpp"
#include "lambdapi/basis.hpp"
#include "lambdapi/projection.hpp"
#include "lambdapi/trajectory.hpp"
#include "lambdapi/estimators.hpp"
#include "lambdapi/evaluators.hpp"
#include "lambdapi/pi_driver.hpp"
#include "lambdapi/bench.hpp"
