#pragma once

#include "nshoot/errors.hpp"
#include "nshoot/integrate.hpp"
#include "nshoot/lemma_checks.hpp"
#include "nshoot/nonlinearity.hpp"
#include "nshoot/numeric.hpp"
#include "nshoot/problem.hpp"
#include "nshoot/roots.hpp"
#include "nshoot/shooting.hpp"
#include "nshoot/thresholds.hpp"
#include "nshoot/transforms.hpp"
#include "nshoot/weight.hpp"
