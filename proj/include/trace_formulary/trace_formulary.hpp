#pragma once

#include "trace_formulary/arith.hpp"
#include "trace_formulary/config.hpp"
#include "trace_formulary/error.hpp"
#include "trace_formulary/exact.hpp"
#include "trace_formulary/explicit_formula.hpp"
#include "trace_formulary/folcoh.hpp"
#include "trace_formulary/lfunc.hpp"
#include "trace_formulary/parallel.hpp"
#include "trace_formulary/quadrature.hpp"
#include "trace_formulary/solenoid.hpp"
#include "trace_formulary/special.hpp"
#include "trace_formulary/testfn.hpp"
