#include "cmtrace/parallel.hpp"

#include <atomic>

namespace cmtrace {

namespace {
std::atomic<int> g_threads{0};
}

void set_threads(int n) { g_threads.store(n < 0 ? 0 : n); }

int get_threads()
{
    int n = g_threads.load();
    return n > 0 ? n : omp_get_max_threads();
}

} // namespace cmtrace
