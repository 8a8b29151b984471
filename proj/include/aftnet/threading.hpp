#pragma once

namespace aftnet {

// Thread budget: AFTNET_THREADS caps OpenMP parallelism (0 or unset = all
// cores). apply_thread_cap() reads the variable and configures OpenMP; call
// it once at process start.
int thread_cap();
void apply_thread_cap();

}  // namespace aftnet
