#pragma once

#include "consensus/certify.hpp"
#include "consensus/error.hpp"
#include "consensus/feasibility.hpp"
#include "consensus/linalg.hpp"
#include "consensus/lp.hpp"
#include "consensus/matrix.hpp"
#include "consensus/products.hpp"
#include "consensus/random.hpp"
#include "consensus/seminorms.hpp"
