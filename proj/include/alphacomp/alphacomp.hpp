#pragma once

// Umbrella header.

#include "alphacomp/alpha_fit.hpp"
#include "alphacomp/asymptotics.hpp"
#include "alphacomp/datasets.hpp"
#include "alphacomp/dirichlet.hpp"
#include "alphacomp/errors.hpp"
#include "alphacomp/io.hpp"
#include "alphacomp/random.hpp"
#include "alphacomp/report.hpp"
#include "alphacomp/sim_harness.hpp"
#include "alphacomp/simplex.hpp"
#include "alphacomp/special_functions.hpp"
#include "alphacomp/verification.hpp"
