#pragma once

#include "itcs/analysis.hpp"
#include "itcs/bench.hpp"
#include "itcs/cim.hpp"
#include "itcs/classical.hpp"
#include "itcs/cli.hpp"
#include "itcs/core.hpp"
#include "itcs/encoding.hpp"
#include "itcs/errors.hpp"
#include "itcs/problem.hpp"
#include "itcs/random.hpp"
#include "itcs/solver.hpp"
#include "itcs/util.hpp"
#include "itcs/yaml.hpp"
