/**
 * @file parallel.hpp
 * @brief Execution policy for the data-parallel kernels.
 *
 * Every parallel kernel in the library (U_crit sweeps, overlap quadrature,
 * simulation batteries) has a serial reference path selected by
 * ExecPolicy::Serial. Results are written into pre-sized slots indexed by the
 * work item, so the output never depends on scheduling or thread count.
 */
#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace beamflutter {

enum class ExecPolicy { Serial, OpenMP };

struct Execution {
    ExecPolicy policy = ExecPolicy::OpenMP;
    int threads = 0; ///< 0 = OpenMP default

    static Execution serial() { return {ExecPolicy::Serial, 1}; }
    static Execution openmp(int threads = 0) { return {ExecPolicy::OpenMP, threads}; }
};

int available_threads();

/// Calls body(i) for i in [0, n). Exceptions thrown by body are captured per
/// item and the first one (lowest index) is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, const Execution& exec, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
    if (exec.policy == ExecPolicy::Serial) {
        for (long long i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
#ifdef _OPENMP
        const int threads = exec.threads > 0 ? exec.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
        for (long long i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace beamflutter
