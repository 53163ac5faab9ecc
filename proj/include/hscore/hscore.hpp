#pragma once

#include "hscore/conjugate.hpp"
#include "hscore/estimation.hpp"
#include "hscore/io.hpp"
#include "hscore/prequential.hpp"
#include "hscore/rule.hpp"
#include "hscore/sampling.hpp"
#include "hscore/simulation.hpp"
