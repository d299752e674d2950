#pragma once
// Umbrella header.
#include "bigfloat.hpp"
#include "errors.hpp"
#include "log_prob.hpp"
#include "mc.hpp"
#include "numerics.hpp"
#include "percentiles.hpp"
#include "precision.hpp"
#include "recovery.hpp"
#include "ric.hpp"
#include "robustness.hpp"
#include "root_finding.hpp"
#include "tw.hpp"
#include "types.hpp"
#include "wishart.hpp"
#include "validation.hpp"
