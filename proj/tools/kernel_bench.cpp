#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ordinal/data.hpp"
#include "ordinal/metrics.hpp"
#include "ordinal/trainer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

template <typename F>
double best_of(int repeats, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = clock_type::now();
        fn();
        best = std::min(best, seconds_since(start));
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel comparison"};
    int n = 1500;
    int dim = 16;
    int repeats = 3;
    app.add_option("--n", n, "sample count");
    app.add_option("--dim", dim, "feature width");
    app.add_option("--repeats", repeats, "timed repeats, best kept");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

#ifdef _OPENMP
    std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "built without openmp; both paths run serial\n";
#endif

    ordinal::SyntheticParams params;
    params.input_dim = dim;
    params.n_samples = n;
    const ordinal::Dataset ds = ordinal::generate_synthetic(params, 7);

    double sil_serial_value = 0.0, sil_parallel_value = 0.0;
    const double sil_serial = best_of(
        repeats, [&] { sil_serial_value = ordinal::silhouette_serial(ds.X, ds.y); });
    const double sil_parallel =
        best_of(repeats, [&] { sil_parallel_value = ordinal::silhouette(ds.X, ds.y); });

    ordinal::MlpConfig mc;
    mc.input_dim = dim;
    mc.hidden_dims = {64, 32};
    mc.init_seed = 11;
    const ordinal::MlpModel model = ordinal::init_model(mc);
    ordinal::LossSpec loss;
    loss.num_classes = 4;

    double eval_serial_loss = 0.0, eval_parallel_loss = 0.0;
    const double eval_serial = best_of(repeats, [&] {
        eval_serial_loss = ordinal::evaluate(model, loss, ds.X, ds.y, false).mean_loss;
    });
    const double eval_parallel = best_of(repeats, [&] {
        eval_parallel_loss = ordinal::evaluate(model, loss, ds.X, ds.y, true).mean_loss;
    });

    std::printf("%-12s %12s %12s %9s %s\n", "kernel", "serial s", "parallel s", "speedup",
                "identical");
    std::printf("%-12s %12.4f %12.4f %8.2fx %s\n", "silhouette", sil_serial, sil_parallel,
                sil_serial / sil_parallel,
                sil_serial_value == sil_parallel_value ? "yes" : "NO");
    std::printf("%-12s %12.4f %12.4f %8.2fx %s\n", "batch_eval", eval_serial, eval_parallel,
                eval_serial / eval_parallel,
                eval_serial_loss == eval_parallel_loss ? "yes" : "NO");
    if (sil_serial_value != sil_parallel_value || eval_serial_loss != eval_parallel_loss) {
        std::cerr << "parallel kernels drifted from the serial reference\n";
        return 1;
    }
    return 0;
}
