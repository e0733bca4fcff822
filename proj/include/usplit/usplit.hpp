#pragma once

#include "usplit/baseline.hpp"
#include "usplit/dist.hpp"
#include "usplit/error.hpp"
#include "usplit/json_io.hpp"
#include "usplit/model.hpp"
#include "usplit/oracle.hpp"
#include "usplit/pipeline.hpp"
#include "usplit/process.hpp"
#include "usplit/rng.hpp"
#include "usplit/sched.hpp"
#include "usplit/special.hpp"
#include "usplit/split.hpp"
#include "usplit/stats.hpp"
