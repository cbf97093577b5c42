#pragma once

#include "kpzc/cascade.hpp"
#include "kpzc/dimension.hpp"
#include "kpzc/dyadic.hpp"
#include "kpzc/energy.hpp"
#include "kpzc/errors.hpp"
#include "kpzc/kpz.hpp"
#include "kpzc/measure.hpp"
#include "kpzc/mixing.hpp"
#include "kpzc/sets.hpp"
#include "kpzc/weights.hpp"
