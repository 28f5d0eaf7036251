#include "nslog/parallel.hpp"

#include <cstdlib>
#include <string>

namespace nslog::par {

namespace {
int g_limit = 0;
}

void set_thread_limit(int n) {
  if (n < 1) return;
  g_limit = n;
  omp_set_num_threads(n);
}

int thread_limit() { return g_limit > 0 ? g_limit : omp_get_max_threads(); }

void init_from_env() {
  const char* v = std::getenv("NSLOG_THREADS");
  if (!v || !*v) return;
  try {
    set_thread_limit(std::stoi(v));
  } catch (const std::exception&) {
    // malformed values leave the OpenMP default in place
  }
}

}  // namespace nslog::par
