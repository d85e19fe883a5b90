#pragma once

// Umbrella header for the equity protection swap toolkit.

#include "epswap/backtest.hpp"
#include "epswap/black_scholes.hpp"
#include "epswap/date.hpp"
#include "epswap/errors.hpp"
#include "epswap/fair_fee.hpp"
#include "epswap/gbm.hpp"
#include "epswap/hedge.hpp"
#include "epswap/instrument.hpp"
#include "epswap/io.hpp"
#include "epswap/portfolio.hpp"
#include "epswap/random.hpp"
#include "epswap/simulation.hpp"
