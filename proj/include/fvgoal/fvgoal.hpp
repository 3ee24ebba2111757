#pragma once

#include "fvgoal/error.hpp"
#include "fvgoal/mesh.hpp"
#include "fvgoal/quadrature.hpp"
#include "fvgoal/dual.hpp"
#include "fvgoal/fields.hpp"
#include "fvgoal/transport.hpp"
#include "fvgoal/swe.hpp"
#include "fvgoal/qoi.hpp"
#include "fvgoal/transport_adjoint.hpp"
#include "fvgoal/swe_adjoint.hpp"
#include "fvgoal/estimator.hpp"
#include "fvgoal/amr.hpp"
#include "fvgoal/runner.hpp"
