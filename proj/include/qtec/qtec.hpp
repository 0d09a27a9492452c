#pragma once

#include "qtec/channel_io.hpp"
#include "qtec/channels.hpp"
#include "qtec/eigen.hpp"
#include "qtec/error.hpp"
#include "qtec/fidelity.hpp"
#include "qtec/matrix.hpp"
#include "qtec/pure_state.hpp"
#include "qtec/random.hpp"
#include "qtec/states.hpp"
#include "qtec/tecost.hpp"
#include "qtec/teur.hpp"
