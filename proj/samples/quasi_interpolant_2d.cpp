// Quasi-interpolation with the thin-plate spline on a jittered 2-d point cloud:
// no linear solve, coefficients come from local polynomial reproduction.

#include <cstdio>

#include "kinterp/kinterp.hpp"

using namespace kinterp;

int main()
{
    const KernelSpec kernel = KernelSpec::surface_spline(2, 2);
    const Box domain = Box::unit(2);
    const TargetFunction f = make_target(kernel, CosineBump({0.5, 0.5}, {0.3, 0.3}, 12), domain);

    for (int level = 3; level <= 5; ++level) {
        const PointSet ps = generate_point_set(domain, level, 0.3, 42);
        ReproConfig rc;
        rc.degree = 3;
        rc.fill = ps.quality()->fill;
        rc.locality = 4;
        const QuadratureRule rule = quasi_rule(f.density(), rc);
        const QuasiCoefficients qc = quasi_coefficients(f, ps, rc, rule);
        const MomentCertificate cert = moment_certificate(qc, ps, f);

        const std::vector<double> probe = {0.5, 0.5, 0.6, 0.45, 0.3, 0.7};
        const auto t = evaluate_quasi_interpolant(kernel, ps, qc.a, probe);
        double worst = 0;
        for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t[i] - f.value({probe.data() + 2 * i, 2})));
        std::printf("n=%5zu h=%.4f gamma=%.2f moments %s (%.2g)  max probe error %.3g\n", ps.size(), rc.fill, qc.gamma,
                    cert.passed() ? "ok" : "FAILED", cert.max_residual, worst);
    }
}
