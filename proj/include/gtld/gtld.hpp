#pragma once

#include "gtld/errors.hpp"
#include "gtld/numerics.hpp"
#include "gtld/model.hpp"
#include "gtld/subfamilies.hpp"
#include "gtld/properties.hpp"
#include "gtld/data.hpp"
#include "gtld/estimation.hpp"
#include "gtld/gof.hpp"
#include "gtld/simulation.hpp"
