#pragma once

#include "lemlab/asympt.hpp"
#include "lemlab/bigreal.hpp"
#include "lemlab/errors.hpp"
#include "lemlab/exact_z.hpp"
#include "lemlab/ginibre_moments.hpp"
#include "lemlab/harness.hpp"
#include "lemlab/linalg.hpp"
#include "lemlab/log_value.hpp"
#include "lemlab/model.hpp"
#include "lemlab/quadrature.hpp"
#include "lemlab/specfun.hpp"
