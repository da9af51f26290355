#include <omp.h>

#include "crn/kernels.hpp"
#include "crn/master_eq.hpp"

namespace crn::kernels {

CscMatrix assemble_generator_omp(const StochasticReactionNetwork& net, const StateSpace& space,
                                 int threads) {
    const std::size_t n = space.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> columns(n);
    // Each column is owned by exactly one iteration.
    parallel_for(n, threads, [&](std::size_t j) { generator_column(net, space, j, columns[j]); });

    CscMatrix m;
    m.n = n;
    m.col_ptr.assign(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) m.col_ptr[j + 1] = m.col_ptr[j] + columns[j].size();
    m.row.resize(m.col_ptr[n]);
    m.value.resize(m.col_ptr[n]);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long jj = 0; jj < count; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        std::size_t p = m.col_ptr[j];
        for (const auto& [row, value] : columns[j]) {
            m.row[p] = row;
            m.value[p] = value;
            ++p;
        }
    }
    return m;
}

void spmv_omp(const CsrMatrix& a, std::span<const double> x, std::span<double> y, int threads) {
    const auto count = static_cast<long long>(a.n);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double acc = 0.0;
        for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) acc += a.value[p] * x[a.col[p]];
        y[i] = acc;
    }
}

void axpy_omp(double w, std::span<const double> x, std::span<double> y, int threads) {
    const auto count = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < count; ++i) y[i] += w * x[i];
}

}  // namespace crn::kernels
