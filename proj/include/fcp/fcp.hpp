#pragma once
// Umbrella header for the library (the CLI layer is included separately
// through fcp/cli.hpp).

#include "fcp/csv.hpp"
#include "fcp/dataset.hpp"
#include "fcp/errors.hpp"
#include "fcp/lasso.hpp"
#include "fcp/losses.hpp"
#include "fcp/mlp.hpp"
#include "fcp/nn_experiment.hpp"
#include "fcp/parallel.hpp"
#include "fcp/penalty.hpp"
#include "fcp/rng.hpp"
#include "fcp/solver.hpp"
#include "fcp/stats.hpp"
#include "fcp/svm_bench.hpp"
