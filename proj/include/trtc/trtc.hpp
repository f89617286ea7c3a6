// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "trtc/core.hpp"
#include "trtc/rng.hpp"
#include "trtc/tma.hpp"
#include "trtc/channel.hpp"
#include "trtc/chanest.hpp"
#include "trtc/dl_opt.hpp"
#include "trtc/ul_opt.hpp"
#include "trtc/config.hpp"
#include "trtc/sweep.hpp"
#include "trtc/link.hpp"
