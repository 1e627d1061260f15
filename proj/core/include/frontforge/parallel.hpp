#pragma once

namespace frontforge {

// Thread budget for internal loops: FRONTFORGE_THREADS if set and positive,
// otherwise the OpenMP default (1 when built without OpenMP).
int thread_budget();

}  // namespace frontforge
