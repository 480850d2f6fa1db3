#pragma once

#include "qinf/cantor.hpp"
#include "qinf/covering.hpp"
#include "qinf/error.hpp"
#include "qinf/expansion.hpp"
#include "qinf/faithfulness.hpp"
#include "qinf/io.hpp"
#include "qinf/numeric.hpp"
#include "qinf/power_sums.hpp"
#include "qinf/qvector.hpp"
#include "qinf/random.hpp"
