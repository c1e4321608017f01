#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wavekin/lattice.hpp"

namespace wavekin {

// periodic pseudo-spectral cubic Schrodinger solver,
//   i u_t = -Lap(u) + lambda |u|^2 u   on [-S/2, S/2)^2,
// Strang splitting (exact kinetic half-steps in frequency, exact phase
// rotation for the cubic part)
struct NlsConfig {
    int N = 512;
    double S = 160.0;
    double dt = 1e-3;
    double lambda = 1.0;
};

class SplitStepSolver {
public:
    explicit SplitStepSolver(const NlsConfig& cfg);
    ~SplitStepSolver();
    SplitStepSolver(const SplitStepSolver&) = delete;
    SplitStepSolver& operator=(const SplitStepSolver&) = delete;

    const NlsConfig& config() const { return cfg_; }
    double time() const { return t_; }

    // u(0,x) = eps * phi(x) for the lattice data of (p, eta); eps = p.eps
    void set_initial_lattice(const ScalingParams& p, const SpectralProfile& eta,
                             const PhaseEnsemble* phases = nullptr,
                             std::uint64_t realization = 0);
    void set_field(const std::vector<cd>& u, double t0 = 0.0);
    const std::vector<cd>& field() const { return u_; }

    void run_steps(long long n);
    void run_until(double t_final);  // integer number of dt steps (t must match)

    double mass() const;                     // sum |u|^2 dx^2
    std::array<double, 2> momentum() const;  // sum k |uhat|^2 (arb. norm)
    double max_abs() const;
    double boundary_max() const;  // max |u| on the outermost grid ring

    // <v(t)>_{K,sigma} where v = e^{-it Lap} u(t); requires sigma to be
    // resolved by at least 4 frequency bins (throws std::domain_error)
    cd observe(double K1, double K2, double sigma) const;

    void save_checkpoint(const std::string& path, std::uint64_t params_hash) const;
    // returns the stored params hash
    std::uint64_t load_checkpoint(const std::string& path);

private:
    NlsConfig cfg_;
    double t_ = 0.0;
    std::vector<cd> u_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    mutable std::vector<cd> work_;  // FFT scratch (plans are bound to it)
    std::vector<double> k1d_;  // frequency per index along one axis

    void fft_forward() const;
    void fft_backward() const;
};

}  // namespace wavekin
