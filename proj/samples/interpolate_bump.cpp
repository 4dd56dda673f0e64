// Interpolate a smooth bump with a Matérn kernel on a doubling ladder and print the
// observed convergence rates in L2 and H1.

#include <cstdio>

#include "kinterp/kinterp.hpp"

using namespace kinterp;

int main()
{
    const KernelSpec kernel = KernelSpec::matern(1, 2);
    const Box domain = Box::unit(1);
    const TargetFunction f = make_target(kernel, CosineBump({0.5}, {0.25}, 12), domain);
    const Box inner = domain.shrunk(0.1);
    const double sigmas[] = {0, 1};

    std::vector<double> hs, e0, e1;
    std::printf("%6s %10s %12s %12s\n", "n", "h", "L2 error", "H1 error");
    for (int level = 4; level <= 8; ++level) {
        const PointSet ps = generate_point_set(domain, level, 0.0, 1);
        const Interpolant s = solve_interpolant(assemble_system(kernel, ps), f.values(ps.coords()));
        const GridFunction err = sample_grid(inner, {4097}, [&](std::span<const double> x) {
            return f.value(x) - evaluate_interpolant(s, x)[0];
        });
        const auto e = sobolev_norms_grid(err, sigmas);
        hs.push_back(ps.quality()->fill);
        e0.push_back(e[0]);
        e1.push_back(e[1]);
        std::printf("%6zu %10.4g %12.4g %12.4g\n", ps.size(), hs.back(), e[0], e[1]);
    }
    std::printf("rates: L2 %.2f, H1 %.2f\n", fit_convergence_rate(hs, e0).slope, fit_convergence_rate(hs, e1).slope);
}
