#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ckn/sampling.hpp"

namespace ckn {

inline int worker_count(Exec exec)
{
    if (!exec.parallel)
        return 1;
#ifdef _OPENMP
    return exec.jobs > 0 ? exec.jobs : omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(i) for i in [0, n). Results must be written to slots owned by
/// index i; the first exception by index is rethrown after the loop.
template <class Body>
void parallel_for(std::int64_t n, Exec exec, Body&& body)
{
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    const int workers = worker_count(exec);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

struct ArgMin {
    double value = std::numeric_limits<double>::infinity();
    std::int64_t index = -1;

    void offer(double v, std::int64_t i)
    {
        if (std::isnan(v))
            return;
        if (v < value || (v == value && i < index)) {
            value = v;
            index = i;
        }
    }
};

/// Minimum of f(i) over [0, n) ignoring NaN, ties broken by the smaller
/// index so the answer does not depend on the worker count.
template <class F>
ArgMin parallel_argmin(std::int64_t n, Exec exec, F&& f)
{
    ArgMin best;
    const int workers = worker_count(exec);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i)
            best.offer(f(i), i);
        return best;
    }
#pragma omp parallel num_threads(workers)
    {
        ArgMin local;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            local.offer(f(i), i);
#pragma omp critical(ckn_argmin)
        best.offer(local.value, local.index);
    }
    return best;
}

} // namespace ckn
