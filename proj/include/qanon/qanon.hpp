// Umbrella header.
#pragma once

#include "qanon/adversary.hpp"
#include "qanon/analysis.hpp"
#include "qanon/distribution.hpp"
#include "qanon/enumerate.hpp"
#include "qanon/errors.hpp"
#include "qanon/network.hpp"
#include "qanon/protocols.hpp"
#include "qanon/qsim.hpp"
#include "qanon/random.hpp"
#include "qanon/report.hpp"
#include "qanon/scenario.hpp"
