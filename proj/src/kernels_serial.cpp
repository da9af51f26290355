#include <algorithm>

#include "crn/kernels.hpp"
#include "crn/master_eq.hpp"

namespace crn {

CsrMatrix to_csr(const CscMatrix& m) {
    CsrMatrix out;
    out.n = m.n;
    out.row_ptr.assign(m.n + 1, 0);
    for (std::size_t r : m.row) ++out.row_ptr[r + 1];
    for (std::size_t i = 0; i < m.n; ++i) out.row_ptr[i + 1] += out.row_ptr[i];
    out.col.resize(m.nnz());
    out.value.resize(m.nnz());
    std::vector<std::size_t> next(out.row_ptr.begin(), out.row_ptr.end() - 1);
    // Columns visited in ascending order, so each row's columns come out sorted.
    for (std::size_t j = 0; j < m.n; ++j) {
        for (std::size_t p = m.col_ptr[j]; p < m.col_ptr[j + 1]; ++p) {
            const std::size_t dst = next[m.row[p]]++;
            out.col[dst] = j;
            out.value[dst] = m.value[p];
        }
    }
    return out;
}

namespace kernels {

void generator_column(const StochasticReactionNetwork& net, const StateSpace& space,
                      std::size_t j, std::vector<std::pair<std::size_t, double>>& out) {
    out.clear();
    const MultiIndex& l = space.state(j);
    double diag = 0.0;
    for (const auto& r : net.reactions()) {
        const Count ways = multi_falling_power(l, r.source);
        if (ways == 0) continue;
        auto target = l.checked_minus(r.source);
        const auto next = space.ordinal(*target + r.target);
        if (!next || *next == j) continue;  // clamped, or a no-op reaction
        const double rate = r.rate * static_cast<double>(ways);
        out.emplace_back(*next, rate);
        diag -= rate;
    }
    if (diag != 0.0) out.emplace_back(j, diag);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t w = 0;
    for (std::size_t p = 0; p < out.size(); ++p) {
        if (w > 0 && out[w - 1].first == out[p].first) {
            out[w - 1].second += out[p].second;
        } else {
            out[w++] = out[p];
        }
    }
    out.resize(w);
}

CscMatrix assemble_generator_serial(const StochasticReactionNetwork& net, const StateSpace& space) {
    CscMatrix m;
    m.n = space.size();
    m.col_ptr.reserve(m.n + 1);
    std::vector<std::pair<std::size_t, double>> column;
    for (std::size_t j = 0; j < m.n; ++j) {
        generator_column(net, space, j, column);
        for (const auto& [row, value] : column) {
            m.row.push_back(row);
            m.value.push_back(value);
        }
        m.col_ptr.push_back(m.row.size());
    }
    return m;
}

void spmv_serial(const CscMatrix& a, std::span<const double> x, std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < a.n; ++j) {
        const double xj = x[j];
        for (std::size_t p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
            y[a.row[p]] += a.value[p] * xj;
        }
    }
}

void axpy_serial(double w, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += w * x[i];
}

}  // namespace kernels
}  // namespace crn
