#ifndef ANISORES_PIPELINE_HPP
#define ANISORES_PIPELINE_HPP

#include "anisores/store.hpp"

namespace anisores {

// Runs the configured experiment; deterministic for a fixed seed. Stage errors
// are captured into the store (manifest marked "failed"), not rethrown.
ResultStore run_pipeline(const RunConfig& cfg);

}  // namespace anisores

#endif
