#pragma once

// Umbrella header for the sparse diffusion-coefficient estimation toolkit:
// covariate-driven SDE simulation, quasi-likelihood score/Hessian machinery,
// the l1-constrained (Dantzig-type) estimator, cone-restricted matrix
// factors, and the Monte Carlo experiment harness.

#include "sparsediff/bench.hpp"
#include "sparsediff/common.hpp"
#include "sparsediff/csv.hpp"
#include "sparsediff/decomposition.hpp"
#include "sparsediff/experiment.hpp"
#include "sparsediff/factors.hpp"
#include "sparsediff/lp.hpp"
#include "sparsediff/model.hpp"
#include "sparsediff/path_io.hpp"
#include "sparsediff/quasi_lik.hpp"
#include "sparsediff/rng.hpp"
#include "sparsediff/selector.hpp"
#include "sparsediff/simulate.hpp"
#include "sparsediff/svg.hpp"
