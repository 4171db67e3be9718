#pragma once

// Everything except the oracles and the command-line front end.

#include "phaseroot/bessel.hpp"
#include "phaseroot/chebkit.hpp"
#include "phaseroot/error.hpp"
#include "phaseroot/gauss.hpp"
#include "phaseroot/kummer.hpp"
#include "phaseroot/parallel.hpp"
#include "phaseroot/phaseinv.hpp"
#include "phaseroot/problems.hpp"
#include "phaseroot/rootfind.hpp"
