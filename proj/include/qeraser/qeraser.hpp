// Umbrella header for the whole toolkit.

#pragma once

#include "qeraser/epr.hpp"
#include "qeraser/experiment_config.hpp"
#include "qeraser/interferometer.hpp"
#include "qeraser/mwi.hpp"
#include "qeraser/qstate.hpp"
#include "qeraser/runner.hpp"
#include "qeraser/scully_druhl.hpp"
#include "qeraser/selftest.hpp"
#include "qeraser/shots.hpp"
