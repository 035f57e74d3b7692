#pragma once

#include "kcg/error.hpp"
#include "kcg/gain.hpp"
#include "kcg/harness.hpp"
#include "kcg/model.hpp"
#include "kcg/network.hpp"
#include "kcg/policy.hpp"
#include "kcg/random.hpp"
#include "kcg/realization.hpp"
#include "kcg/revenue.hpp"
#include "kcg/submodularity.hpp"
#include "kcg/synthetic.hpp"
