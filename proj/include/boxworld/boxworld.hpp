#pragma once

#include "boxworld/cone.hpp"
#include "boxworld/constructors.hpp"
#include "boxworld/deterministic.hpp"
#include "boxworld/effects.hpp"
#include "boxworld/entropy.hpp"
#include "boxworld/errors.hpp"
#include "boxworld/layout.hpp"
#include "boxworld/locality.hpp"
#include "boxworld/lp.hpp"
#include "boxworld/rational.hpp"
#include "boxworld/reproduce.hpp"
#include "boxworld/state.hpp"
#include "boxworld/state_io.hpp"
#include "boxworld/strategy.hpp"
#include "boxworld/strategy_io.hpp"
