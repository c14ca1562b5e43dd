#pragma once

// Umbrella header.

#include "steersim/errors.hpp"
#include "steersim/expsim.hpp"
#include "steersim/finite_field.hpp"
#include "steersim/mub.hpp"
#include "steersim/qlinalg.hpp"
#include "steersim/states.hpp"
#include "steersim/steering.hpp"
#include "steersim/version.hpp"
