#ifndef CMTRACE_PARALLEL_HPP
#define CMTRACE_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace cmtrace {

// Sets the worker count used by every parallel kernel; 0 keeps the OpenMP default.
void set_threads(int n);
int get_threads();

// Runs body(i) for i in [0, n) on the worker pool.  Results are written by
// index, so any reduction done afterwards in index order is bit-identical
// for every thread count.
template <class F>
void parallel_for(std::size_t n, F&& body)
{
    const long nn = static_cast<long>(n);
    // exceptions cannot leave an OpenMP region; keep the one with the lowest index
    std::vector<std::exception_ptr> errs(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(get_threads())
    for (long i = 0; i < nn; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errs[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& body)
{
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = body(i); });
    return out;
}

} // namespace cmtrace

#endif
