#pragma once

// Umbrella header for the ergolab library: chaotic-map orbit ensembles and
// Monte Carlo verification of their probabilistic laws.

#include "ergolab/concentration.hpp"
#include "ergolab/config.hpp"
#include "ergolab/deviation.hpp"
#include "ergolab/ergostat.hpp"
#include "ergolab/experiments.hpp"
#include "ergolab/limitlaw.hpp"
#include "ergolab/numeric.hpp"
#include "ergolab/observables.hpp"
#include "ergolab/prng.hpp"
#include "ergolab/report.hpp"
#include "ergolab/systems.hpp"
#include "ergolab/version.hpp"
