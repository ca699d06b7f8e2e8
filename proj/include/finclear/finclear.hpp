#pragma once

#include "finclear/circulation.hpp"
#include "finclear/clearing.hpp"
#include "finclear/equilibria.hpp"
#include "finclear/instances.hpp"
#include "finclear/io.hpp"
#include "finclear/money.hpp"
#include "finclear/network.hpp"
#include "finclear/strategies.hpp"
