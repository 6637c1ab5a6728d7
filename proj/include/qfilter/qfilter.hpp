#pragma once

#include "qfilter/commands.hpp"
#include "qfilter/config.hpp"
#include "qfilter/csv.hpp"
#include "qfilter/detector.hpp"
#include "qfilter/discord.hpp"
#include "qfilter/dynamics.hpp"
#include "qfilter/ensemble.hpp"
#include "qfilter/errors.hpp"
#include "qfilter/goalprog.hpp"
#include "qfilter/linalg.hpp"
#include "qfilter/metrics.hpp"
#include "qfilter/qstate.hpp"
#include "qfilter/random.hpp"
