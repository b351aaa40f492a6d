#pragma once

#include "statdist/channels.hpp"
#include "statdist/common.hpp"
#include "statdist/distance.hpp"
#include "statdist/finite_sample.hpp"
#include "statdist/hilbert.hpp"
#include "statdist/parallel.hpp"
#include "statdist/quadrature.hpp"
#include "statdist/response_law.hpp"
#include "statdist/rng.hpp"
#include "statdist/simulate.hpp"
