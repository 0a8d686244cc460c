#pragma once

#include "noisy_select/adversary.hpp"
#include "noisy_select/compare.hpp"
#include "noisy_select/constants.hpp"
#include "noisy_select/context.hpp"
#include "noisy_select/errors.hpp"
#include "noisy_select/ground_truth.hpp"
#include "noisy_select/harness.hpp"
#include "noisy_select/instance.hpp"
#include "noisy_select/max.hpp"
#include "noisy_select/oracle.hpp"
#include "noisy_select/query.hpp"
#include "noisy_select/rank.hpp"
#include "noisy_select/reduction.hpp"
#include "noisy_select/rng.hpp"
#include "noisy_select/task.hpp"
#include "noisy_select/threshold.hpp"
#include "noisy_select/topk.hpp"
#include "noisy_select/tower.hpp"
