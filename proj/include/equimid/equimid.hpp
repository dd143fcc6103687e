#pragma once

#include "equimid/characterization.hpp"
#include "equimid/convex_param.hpp"
#include "equimid/dual.hpp"
#include "equimid/error.hpp"
#include "equimid/expr.hpp"
#include "equimid/focal.hpp"
#include "equimid/general_solver.hpp"
#include "equimid/hyperboloid.hpp"
#include "equimid/numeric.hpp"
#include "equimid/parallel.hpp"
#include "equimid/report.hpp"
#include "equimid/scalar_field.hpp"
#include "equimid/types.hpp"
