#pragma once

#include "mnlmatch/customized.hpp"
#include "mnlmatch/formulations.hpp"
#include "mnlmatch/inclusive.hpp"
#include "mnlmatch/instance.hpp"
#include "mnlmatch/instance_io.hpp"
#include "mnlmatch/lp.hpp"
#include "mnlmatch/matrix.hpp"
#include "mnlmatch/mnl.hpp"
#include "mnlmatch/oracle.hpp"
#include "mnlmatch/reward.hpp"
#include "mnlmatch/rng.hpp"
#include "mnlmatch/serialize.hpp"
