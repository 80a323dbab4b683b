#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace evbranch {

/// Selects between the serial reference kernel and its OpenMP counterpart.
/// Both produce identical results; the serial path is kept for testing.
enum class Exec { serial, parallel };

int max_threads() noexcept;
void set_threads(int n) noexcept;

/// Pairwise tree reduction. The summation tree depends only on the input
/// length, so results do not change with the number of threads.
template <class T, class Combine>
T pairwise_reduce(std::span<const T> values, T identity, Combine combine) {
    if (values.empty()) {
        return identity;
    }
    if (values.size() == 1) {
        return values[0];
    }
    const std::size_t half = values.size() / 2;
    return combine(pairwise_reduce(values.first(half), identity, combine),
                   pairwise_reduce(values.subspan(half), identity, combine));
}

/// Runs body(i) for i in [0, n). In parallel mode, an exception thrown by any
/// index is rethrown after the loop; the lowest failing index wins, as in the
/// serial loop.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline double pairwise_sum(std::span<const double> values) {
    return pairwise_reduce(values, 0.0, [](double a, double b) { return a + b; });
}

}  // namespace evbranch
