#pragma once

#include "elg/estimation.hpp"

namespace elg {

// Relief times (in hours) of twenty patients receiving an analgesic; the
// classic benchmark series used throughout the documentation and tests.
const Dataset& relief_times();

}  // namespace elg
