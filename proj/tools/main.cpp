// Temporary scratch entry point used while exploring device parameters;
#include <string_view>
// replaced by the CLI once presets are frozen.
#include <cstdio>
#include <cstdlib>

#include "csfq/circuit.hpp"

using namespace csfq;

static void fit_device(const char* name, double anharm_target, double ec, double ej0,
                       double beta0) {
    circuit::FitTargets targets;
    targets.anharm_ghz = anharm_target;
    circuit::FitOptions opt;
    opt.fixed = {{"alpha", 0.43}, {"ec", ec}};
    opt.free = {"ej", "beta"};
    opt.initial = {ej0, ec, 0.43, beta0, 0.5};
    opt.basis = circuit::BasisConfig{15};
    opt.tol_w_ge_ghz = 5e-5;
    opt.tol_anharm_ghz = 5e-5;
    const auto rep = circuit::fit_parameters(targets, opt);
    std::printf("%s: ej=%.9f ec=%.3f alpha=0.43 beta=%.9f  (it=%d, res %.2e / %.2e)\n", name,
                rep.params.ej_ghz, ec, rep.params.beta, rep.iterations, rep.residual_w_ge_ghz,
                rep.residual_anharm_ghz);
    // verify forward at n_max 15 and 20
    for (int nm : {15, 20}) {
        const auto t =
            circuit::transitions(circuit::solve(rep.params, circuit::BasisConfig{nm}, 3));
        std::printf("  n_max=%d: w_ge=%.9f w_gf=%.9f anharm=%.9f\n", nm, t.w_ge_ghz, t.w_gf_ghz,
                    t.anharm_ghz);
    }
}

int main(int argc, char** argv) {
    if (argc >= 2 && std::string_view(argv[1]) == "fit") {
        fit_device("device-a", 0.848, 7.5, 41.25, 18.0);
        fit_device("device-b", 1.260, 22.5, 78.8, 60.0);
        return 0;
    }
    double ej = 90.0, ec = 4.0, alpha = 0.43, beta = 10.0;
    int n_max = 10;
    if (argc >= 5) {
        ej = std::atof(argv[1]);
        ec = std::atof(argv[2]);
        alpha = std::atof(argv[3]);
        beta = std::atof(argv[4]);
    }
    if (argc >= 6) n_max = std::atoi(argv[5]);
    circuit::CircuitParams p{ej, ec, alpha, beta, 0.5};
    circuit::BasisConfig basis{n_max};
    const auto spec = circuit::solve(p, basis, 3);
    const auto t = circuit::transitions(spec);
    std::printf("ej=%g ec=%g alpha=%g beta=%g n_max=%d  w_ge=%.6f  w_gf=%.6f  anharm=%.6f\n",
                ej, ec, alpha, beta, n_max, t.w_ge_ghz, t.w_gf_ghz, t.anharm_ghz);
    return 0;
}
