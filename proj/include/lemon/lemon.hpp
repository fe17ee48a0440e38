#pragma once

#include "lemon/dynamics.hpp"
#include "lemon/errors.hpp"
#include "lemon/geometry.hpp"
#include "lemon/io.hpp"
#include "lemon/neighborhoods.hpp"
#include "lemon/parallel.hpp"
#include "lemon/phase.hpp"
#include "lemon/returnmap.hpp"
#include "lemon/rng.hpp"
#include "lemon/tangent.hpp"
#include "lemon/verify.hpp"
