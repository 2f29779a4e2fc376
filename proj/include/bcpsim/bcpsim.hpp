#pragma once

#include "bcpsim/bench.hpp"
#include "bcpsim/cnf.hpp"
#include "bcpsim/coproc.hpp"
#include "bcpsim/dpll.hpp"
#include "bcpsim/generators.hpp"
#include "bcpsim/host.hpp"
#include "bcpsim/partition.hpp"
#include "bcpsim/reference.hpp"
