#pragma once

// Umbrella header for the exokit library: identified actuator model,
// two-stage least-squares identification, gravity-compensation control,
// benchtop/squat simulation and the EMG effort pipeline.

#include "exokit/actuator_model.hpp"
#include "exokit/bench_sim.hpp"
#include "exokit/csv.hpp"
#include "exokit/emg.hpp"
#include "exokit/errors.hpp"
#include "exokit/filters.hpp"
#include "exokit/gravity_comp.hpp"
#include "exokit/log.hpp"
#include "exokit/report_io.hpp"
#include "exokit/rng.hpp"
#include "exokit/run_config.hpp"
#include "exokit/sysid.hpp"
#include "exokit/trial_log.hpp"

namespace exokit {
inline constexpr const char* kVersion = "0.1.0";
}
