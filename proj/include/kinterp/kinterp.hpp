#pragma once

#include "kinterp/config.hpp"
#include "kinterp/cosine_bump.hpp"
#include "kinterp/error.hpp"
#include "kinterp/experiment.hpp"
#include "kinterp/geometry.hpp"
#include "kinterp/interpolate.hpp"
#include "kinterp/kernels.hpp"
#include "kinterp/linalg.hpp"
#include "kinterp/native_error.hpp"
#include "kinterp/norms.hpp"
#include "kinterp/polynomial.hpp"
#include "kinterp/polyrepro.hpp"
#include "kinterp/quadrature.hpp"
#include "kinterp/quasiinterp.hpp"
#include "kinterp/report.hpp"
#include "kinterp/target.hpp"
