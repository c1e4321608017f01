#pragma once

#include <complex>
#include <functional>

namespace wavekin {

// Adaptive Gauss-Kronrod 7/15 on [a,b] for complex integrands.  Bisects until
// the embedded error estimate satisfies  err <= abs_tol + rel_tol*|whole|.
// Throws std::runtime_error if max_depth subdivision still fails.
std::complex<double> integrate_gk(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, double abs_tol = 1e-12,
                                  double rel_tol = 1e-10, int max_depth = 48);

double integrate_gk_real(const std::function<double(double)>& f, double a, double b,
                         double abs_tol = 1e-12, double rel_tol = 1e-10,
                         int max_depth = 48);

}  // namespace wavekin
