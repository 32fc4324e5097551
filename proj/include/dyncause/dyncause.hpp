#pragma once

// Umbrella header: static and time-varying Granger-causality testing with
// positive/negative partial-sum decomposition, lag-augmented VAR estimation,
// a leverage-adjusted residual bootstrap, and residual diagnostics.

#include "dyncause/bootstrap.hpp"
#include "dyncause/causality.hpp"
#include "dyncause/csv.hpp"
#include "dyncause/diagnostics.hpp"
#include "dyncause/dynamic.hpp"
#include "dyncause/errors.hpp"
#include "dyncause/panel.hpp"
#include "dyncause/report.hpp"
#include "dyncause/rng.hpp"
#include "dyncause/transform.hpp"
#include "dyncause/var.hpp"
