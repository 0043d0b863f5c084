// Compares the row-parallel p-Laplacian kernel against the serial reference
// and reports timings. Results must agree bit-for-bit.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "flocksim/model.hpp"
#include "flocksim/rng.hpp"

using namespace flocksim;
using Clock = std::chrono::steady_clock;

namespace {

AgentEnsemble random_state(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    U53Rng rng(seed);
    Matrix x(n, d), v(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < d; ++k) {
            x(i, k) = rng.uniform(-10.0, 10.0);
            v(i, k) = rng.uniform(-10.0, 10.0);
        }
    return AgentEnsemble(std::move(x), std::move(v));
}

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    const double p = 1.5;
    const CommWeight w = CommWeight::regular(0.5);
    const int reps = argc > 1 ? std::atoi(argv[1]) : 20;

    std::printf("%8s %6s %12s %12s %9s %10s\n", "agents", "dim", "serial(ms)", "omp(ms)",
                "speedup", "max|diff|");
    for (Eigen::Index n : {32, 128, 512, 2048}) {
        const AgentEnsemble st = random_state(n, 2, 42 + static_cast<std::uint64_t>(n));
        Matrix a, b;
        const double ts = time_ms([&] { a = p_laplacian_serial(st, w, p); }, reps);
        const double tp = time_ms([&] { b = p_laplacian(st, w, p); }, reps);
        const double diff = (a - b).cwiseAbs().maxCoeff();
        std::printf("%8ld %6d %12.3f %12.3f %9.2fx %10.3g\n", static_cast<long>(n), 2, ts, tp,
                    ts / tp, diff);
        if (diff != 0.0) {
            std::fprintf(stderr, "kernel mismatch at n=%ld\n", static_cast<long>(n));
            return 1;
        }
    }
    return 0;
}
