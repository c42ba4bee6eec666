#pragma once

namespace mf {

/// Worker count used by the OpenMP loops in the library. Results never depend on it.
void set_num_threads(int threads);
int num_threads();

}  // namespace mf
