#pragma once

#include "citest/bootstrap.hpp"
#include "citest/errors.hpp"
#include "citest/grid.hpp"
#include "citest/index.hpp"
#include "citest/io.hpp"
#include "citest/kernel.hpp"
#include "citest/math.hpp"
#include "citest/parallel.hpp"
#include "citest/presets.hpp"
#include "citest/process.hpp"
#include "citest/report.hpp"
#include "citest/rng.hpp"
#include "citest/sample.hpp"
#include "citest/simulate.hpp"
#include "citest/stats.hpp"
#include "citest/transform.hpp"
#include "citest/version.hpp"
#include "citest/weights.hpp"
