#pragma once

// Umbrella header.

#include "qsw/error.hpp"
#include "qsw/warnings.hpp"
#include "qsw/grid.hpp"
#include "qsw/fft.hpp"
#include "qsw/field.hpp"
#include "qsw/spectral_ops.hpp"
#include "qsw/dyadic.hpp"
#include "qsw/besov.hpp"
#include "qsw/initial_data.hpp"
#include "qsw/paraproduct.hpp"
#include "qsw/quasi_solution.hpp"
#include "qsw/estimates.hpp"
#include "qsw/perturbation_solver.hpp"
#include "qsw/decay_fit.hpp"
#include "qsw/field_io.hpp"
#include "qsw/run_config.hpp"
#include "qsw/runner.hpp"
#include "qsw/verify.hpp"
