#pragma once

#include "abfix/contraction.hpp"
#include "abfix/error.hpp"
#include "abfix/fredholm.hpp"
#include "abfix/grid.hpp"
#include "abfix/iterate.hpp"
#include "abfix/metric.hpp"
#include "abfix/ode.hpp"
#include "abfix/random.hpp"
