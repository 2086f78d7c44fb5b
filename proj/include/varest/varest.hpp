#pragma once

#include "error.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "montecarlo.hpp"
#include "mse.hpp"
#include "numeric.hpp"
#include "population.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "spec_text.hpp"
#include "synth.hpp"
#include "tuning.hpp"
