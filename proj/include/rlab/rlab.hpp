#pragma once

#include "rlab/errors.hpp"
#include "rlab/numerics.hpp"
#include "rlab/lie.hpp"
#include "rlab/kak.hpp"
#include "rlab/reduction.hpp"
#include "rlab/dynamics.hpp"
#include "rlab/lax.hpp"
#include "rlab/config.hpp"
#include "rlab/io.hpp"
