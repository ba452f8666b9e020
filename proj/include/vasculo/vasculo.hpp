#pragma once

#include "vasculo/analysis.hpp"
#include "vasculo/constructors.hpp"
#include "vasculo/errors.hpp"
#include "vasculo/matching.hpp"
#include "vasculo/model.hpp"
#include "vasculo/quadrature.hpp"
#include "vasculo/roots.hpp"
#include "vasculo/solutions.hpp"
#include "vasculo/specfun.hpp"
#include "vasculo/sweep.hpp"
