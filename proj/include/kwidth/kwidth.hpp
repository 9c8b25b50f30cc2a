#pragma once

#include "kwidth/bounds.hpp"
#include "kwidth/bystander.hpp"
#include "kwidth/ensembles.hpp"
#include "kwidth/hypergeom.hpp"
#include "kwidth/io.hpp"
#include "kwidth/parallel.hpp"
#include "kwidth/properties.hpp"
#include "kwidth/rng.hpp"
#include "kwidth/scaling.hpp"
#include "kwidth/universe.hpp"

namespace kwidth {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kwidth
