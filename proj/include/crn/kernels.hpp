#pragma once

// Data-parallel inner loops. Every kernel has a serial reference version and
// an OpenMP version; both produce bit-identical results for any thread count.

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "crn/core_model.hpp"

namespace crn {

class StateSpace;

/// Thread count for the OpenMP kernels; 1 selects the serial reference path.
struct Exec {
    int threads = 1;
};

/// Compressed sparse column matrix; row indices ascending within a column.
struct CscMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> col_ptr{0};
    std::vector<std::size_t> row;
    std::vector<double> value;

    std::size_t nnz() const noexcept { return value.size(); }
};

/// Compressed sparse row matrix; column indices ascending within a row.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col;
    std::vector<double> value;
};

CsrMatrix to_csr(const CscMatrix& m);

namespace kernels {

/// Entries (row, value) of generator column `j`, rows ascending, zeros omitted.
/// Reactions whose target state leaves the space contribute nothing.
void generator_column(const StochasticReactionNetwork& net, const StateSpace& space,
                      std::size_t j, std::vector<std::pair<std::size_t, double>>& out);

CscMatrix assemble_generator_serial(const StochasticReactionNetwork& net, const StateSpace& space);
CscMatrix assemble_generator_omp(const StochasticReactionNetwork& net, const StateSpace& space,
                                 int threads);

/// y = A x by column scatter.
void spmv_serial(const CscMatrix& a, std::span<const double> x, std::span<double> y);
/// y = A x by row gather over the transpose layout; same summation order as
/// spmv_serial, so the results match bit for bit.
void spmv_omp(const CsrMatrix& a, std::span<const double> x, std::span<double> y, int threads);

/// y += w * x.
void axpy_serial(double w, std::span<const double> x, std::span<double> y);
void axpy_omp(double w, std::span<const double> x, std::span<double> y, int threads);

/// Calls f(i) for i in [0, n). Exceptions thrown by f are rethrown (first one wins).
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_lock;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (long long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> guard(error_lock);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace kernels
}  // namespace crn
