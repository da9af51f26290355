// Serial reference kernels versus their OpenMP counterparts on the HIV
// network. Prints wall time per kernel and thread count, and whether the
// outputs match bit for bit.
//
//   bench_kernels [--threads N] [--cap C]

#include <omp.h>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "crn/dsl.hpp"
#include "crn/kernels.hpp"
#include "crn/master_eq.hpp"
#include "crn/ssa.hpp"

namespace {

const char* kHiv =
    "species H, I, V\n"
    "reaction alpha: 0 -> H @ 1\n"
    "reaction beta: H -> 0 @ 0.01\n"
    "reaction gamma: H + V -> I @ 0.002\n"
    "reaction delta: I -> I + V @ 0.5\n"
    "reaction epsilon: I -> 0 @ 0.1\n"
    "reaction zeta: V -> 0 @ 0.3\n";

template <class F>
double seconds(F&& f, int reps) {
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    return d.count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int max_threads = omp_get_max_threads();
    crn::Count cap = 40;
    CLI::App app{"serial versus OpenMP kernel timings"};
    app.add_option("--threads", max_threads, "largest thread count to time")->check(CLI::PositiveNumber);
    app.add_option("--cap", cap, "total-count truncation")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    const auto net = crn::dsl::parse_network(kHiv);
    const crn::StateSpace space(3, crn::Truncation::total_count(cap));
    std::printf("HIV network, total cap %llu: %zu states, up to %d threads\n",
                static_cast<unsigned long long>(cap), space.size(), max_threads);

    const auto reference = crn::kernels::assemble_generator_serial(net, space);
    const double t_serial =
        seconds([&] { (void)crn::kernels::assemble_generator_serial(net, space); }, 3);
    std::printf("%-28s %8s %12.6f s\n", "assemble_generator", "serial", t_serial);
    for (int th = 1; th <= max_threads; th *= 2) {
        crn::CscMatrix m;
        const double t = seconds([&] { m = crn::kernels::assemble_generator_omp(net, space, th); }, 3);
        const bool same = m.row == reference.row && m.value == reference.value;
        std::printf("%-28s %5d th %12.6f s  identical=%s\n", "assemble_generator", th, t,
                    same ? "yes" : "NO");
    }

    const auto csr = crn::to_csr(reference);
    std::vector<double> x(space.size(), 1.0 / static_cast<double>(space.size()));
    std::vector<double> y_ref(space.size()), y(space.size());
    crn::kernels::spmv_serial(reference, x, y_ref);
    std::printf("%-28s %8s %12.6f s\n", "spmv", "serial",
                seconds([&] { crn::kernels::spmv_serial(reference, x, y); }, 50));
    for (int th = 1; th <= max_threads; th *= 2) {
        const double t = seconds([&] { crn::kernels::spmv_omp(csr, x, y, th); }, 50);
        std::printf("%-28s %5d th %12.6f s  identical=%s\n", "spmv", th, t, y == y_ref ? "yes" : "NO");
    }

    const crn::MultiIndex l0{10, 0, 5};
    const auto ens_ref = crn::ssa::ensemble(net, l0, 5.0, 0.5, 2000, 7, crn::Exec{1});
    std::printf("%-28s %8s %12.6f s\n", "ssa ensemble (2000 traj)", "serial",
                seconds([&] { (void)crn::ssa::ensemble(net, l0, 5.0, 0.5, 2000, 7, crn::Exec{1}); }, 1));
    for (int th = 2; th <= max_threads; th *= 2) {
        crn::ssa::EnsembleStats s;
        const double t =
            seconds([&] { s = crn::ssa::ensemble(net, l0, 5.0, 0.5, 2000, 7, crn::Exec{th}); }, 1);
        std::printf("%-28s %5d th %12.6f s  identical=%s\n", "ssa ensemble (2000 traj)", th, t,
                    s == ens_ref ? "yes" : "NO");
    }
    return 0;
}
