#pragma once

#include "dsgrn/error.hpp"
#include "dsgrn/rational.hpp"
#include "dsgrn/network.hpp"
#include "dsgrn/lp.hpp"
#include "dsgrn/realizability.hpp"
#include "dsgrn/factor_graph.hpp"
#include "dsgrn/parameter_graph.hpp"
#include "dsgrn/digraph.hpp"
#include "dsgrn/phase_graphs.hpp"
#include "dsgrn/morse.hpp"
#include "dsgrn/query.hpp"
#include "dsgrn/database.hpp"
#include "dsgrn/witness.hpp"
#include "dsgrn/hill.hpp"
