#pragma once

#include "ouspec/analysis.hpp"
#include "ouspec/bayes.hpp"
#include "ouspec/dynamics.hpp"
#include "ouspec/noise.hpp"
#include "ouspec/optimize.hpp"
#include "ouspec/parallel.hpp"
#include "ouspec/qfi.hpp"
#include "ouspec/random.hpp"
