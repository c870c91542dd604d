#pragma once

#include "config.hpp"
#include "davidson.hpp"
#include "determinant.hpp"
#include "driver.hpp"
#include "integrals.hpp"
#include "pauli.hpp"
#include "recovery.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "sci.hpp"
#include "statevector.hpp"
