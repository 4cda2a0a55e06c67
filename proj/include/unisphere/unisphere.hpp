#pragma once
// Umbrella header.

#include "errors.hpp"
#include "geometry.hpp"
#include "john.hpp"
#include "metric.hpp"
#include "norm_json.hpp"
#include "norms.hpp"
#include "numeric.hpp"
#include "report.hpp"
#include "vec.hpp"
#include "verify.hpp"
