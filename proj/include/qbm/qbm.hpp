#pragma once

#include "qbm/correlators.hpp"
#include "qbm/csv.hpp"
#include "qbm/densmat.hpp"
#include "qbm/errors.hpp"
#include "qbm/grid.hpp"
#include "qbm/interference.hpp"
#include "qbm/oracle.hpp"
#include "qbm/quadrature.hpp"
#include "qbm/scenario.hpp"
#include "qbm/svg.hpp"
#include "qbm/version.hpp"
