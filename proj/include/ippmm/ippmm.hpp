#pragma once

#include "ippmm/error.hpp"
#include "ippmm/linalg.hpp"
#include "ippmm/problem.hpp"
#include "ippmm/sdpa.hpp"
#include "ippmm/generators.hpp"
#include "ippmm/scaling.hpp"
#include "ippmm/seminorm.hpp"
#include "ippmm/neighbourhood.hpp"
#include "ippmm/iterate.hpp"
#include "ippmm/minres.hpp"
#include "ippmm/newton.hpp"
#include "ippmm/driver.hpp"
#include "ippmm/oracle.hpp"
