#pragma once

namespace sppa {

/// Thread budget for the OpenMP kernels. The SPPA_THREADS environment
/// variable caps it; 0 or unset means all available. Serial builds
/// always report 1.
int max_threads();

}  // namespace sppa
