#pragma once

namespace monstr {

/// Sets the worker count for all parallel loops; 0 restores the runtime default.
/// Results never depend on this value.
void set_num_threads(int threads);
int num_threads();

}  // namespace monstr
