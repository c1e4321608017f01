#include "wavekin/nls.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "wavekin/kahan.hpp"
#include "wavekin/parallel.hpp"

namespace wavekin {

SplitStepSolver::SplitStepSolver(const NlsConfig& cfg) : cfg_(cfg) {
    if (cfg_.N < 8 || (cfg_.N & (cfg_.N - 1)) != 0)
        throw std::domain_error("SplitStepSolver: N must be a power of two >= 8");
    if (!(cfg_.S > 0.0) || !(cfg_.dt > 0.0))
        throw std::domain_error("SplitStepSolver: need S > 0 and dt > 0");
    const std::size_t n2 = static_cast<std::size_t>(cfg_.N) * cfg_.N;
    u_.assign(n2, cd(0.0));
    work_.assign(n2, cd(0.0));
    auto* in = reinterpret_cast<fftw_complex*>(work_.data());
    plan_fwd_ = fftw_plan_dft_2d(cfg_.N, cfg_.N, in, in, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_2d(cfg_.N, cfg_.N, in, in, FFTW_BACKWARD, FFTW_ESTIMATE);
    k1d_.resize(static_cast<std::size_t>(cfg_.N));
    const double dk = kTwoPi / cfg_.S;
    for (int j = 0; j < cfg_.N; ++j)
        k1d_[static_cast<std::size_t>(j)] = dk * (j < cfg_.N / 2 ? j : j - cfg_.N);
}

SplitStepSolver::~SplitStepSolver() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void SplitStepSolver::fft_forward() const {
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
}
void SplitStepSolver::fft_backward() const {
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
}

void SplitStepSolver::set_initial_lattice(const ScalingParams& p,
                                          const SpectralProfile& eta,
                                          const PhaseEnsemble* phases,
                                          std::uint64_t realization) {
    if (!(p.eps > 0.0))
        throw std::domain_error("set_initial_lattice: eps must be positive");
    const int N = cfg_.N;
    const double dx = cfg_.S / N;
    const auto sites = window_sites(LatticeSpec{p.L}, eta.support_radius);
    std::vector<cd> zeta;
    std::vector<double> kx, ky;
    for (const IVec2& n : sites) {
        const double q1 = static_cast<double>(n.x) / p.L;
        const double q2 = static_cast<double>(n.y) / p.L;
        const double a = eta(q1, q2);
        if (a <= 0.0) continue;
        cd z(a, 0.0);
        if (phases) z *= std::exp(cd(0.0, phases->phase(realization, n)));
        zeta.push_back(z);
        kx.push_back(q1);
        ky.push_back(q2);
    }
    const std::size_t M = zeta.size();
    // per-axis mode tables: phi is (2pi)^-2 e^{-h^2|x|^2/2} sum zeta e^{iK.x}
    std::vector<cd> Ax(M * static_cast<std::size_t>(N)), Ay(Ax.size());
    std::vector<double> env(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const double x = -0.5 * cfg_.S + dx * j;
        env[static_cast<std::size_t>(j)] = std::exp(-0.5 * p.h * p.h * x * x);
        for (std::size_t s = 0; s < M; ++s) {
            Ax[s * static_cast<std::size_t>(N) + static_cast<std::size_t>(j)] =
                std::exp(cd(0.0, kx[s] * x));
            Ay[s * static_cast<std::size_t>(N) + static_cast<std::size_t>(j)] =
                std::exp(cd(0.0, ky[s] * x));
        }
    }
    const double amp = p.eps / (kTwoPi * kTwoPi);
    for_chunks(static_cast<std::size_t>(N), default_chunks(static_cast<std::size_t>(N) * 4),
               [&](std::size_t, std::size_t b, std::size_t e) {
                   for (std::size_t ix = b; ix < e; ++ix) {
                       for (std::size_t iy = 0; iy < static_cast<std::size_t>(N); ++iy) {
                           cd s(0.0);
                           for (std::size_t m = 0; m < M; ++m)
                               s += zeta[m] * Ax[m * static_cast<std::size_t>(N) + ix] *
                                    Ay[m * static_cast<std::size_t>(N) + iy];
                           u_[ix * static_cast<std::size_t>(N) + iy] =
                               amp * env[ix] * env[iy] * s;
                       }
                   }
               });
    t_ = 0.0;
}

void SplitStepSolver::set_field(const std::vector<cd>& u, double t0) {
    if (u.size() != u_.size())
        throw std::invalid_argument("set_field: size mismatch");
    u_ = u;
    t_ = t0;
}

void SplitStepSolver::run_steps(long long n) {
    const int N = cfg_.N;
    const std::size_t n2 = u_.size();
    const double dt = cfg_.dt;
    const double inv_n2 = 1.0 / static_cast<double>(n2);
    // precompute kinetic half-step multipliers e^{-i |k|^2 dt/2} (with the
    // inverse-FFT normalization folded in)
    std::vector<cd> half(n2);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const double k2 = k1d_[static_cast<std::size_t>(a)] * k1d_[static_cast<std::size_t>(a)] +
                              k1d_[static_cast<std::size_t>(b)] * k1d_[static_cast<std::size_t>(b)];
            half[static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)] =
                inv_n2 * std::exp(cd(0.0, -0.5 * dt * k2));
        }
    std::memcpy(work_.data(), u_.data(), n2 * sizeof(cd));
    for (long long s = 0; s < n; ++s) {
        fft_forward();
        for (std::size_t i = 0; i < n2; ++i) work_[i] *= half[i];
        fft_backward();
        for (std::size_t i = 0; i < n2; ++i)
            work_[i] *= std::exp(cd(0.0, -cfg_.lambda * dt * std::norm(work_[i])));
        fft_forward();
        for (std::size_t i = 0; i < n2; ++i) work_[i] *= half[i];
        fft_backward();
        t_ += dt;
    }
    std::memcpy(u_.data(), work_.data(), n2 * sizeof(cd));
}

void SplitStepSolver::run_until(double t_final) {
    const double steps = (t_final - t_) / cfg_.dt;
    const long long n = std::llround(steps);
    if (n < 0 || std::abs(steps - static_cast<double>(n)) > 1e-9)
        throw std::domain_error("run_until: t_final is not a whole number of steps");
    run_steps(n);
    t_ = t_final;  // avoid accumulated drift in the time stamp
}

double SplitStepSolver::mass() const {
    const double dx = cfg_.S / cfg_.N;
    KahanReal s;
    for (const cd& v : u_) s += std::norm(v);
    return s.value() * dx * dx;
}

std::array<double, 2> SplitStepSolver::momentum() const {
    const std::size_t n2 = u_.size();
    std::memcpy(work_.data(), const_cast<cd*>(u_.data()), n2 * sizeof(cd));
    fft_forward();
    KahanReal p1, p2;
    const int N = cfg_.N;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const double w = std::norm(work_[static_cast<std::size_t>(a) * N + b]);
            p1 += k1d_[static_cast<std::size_t>(a)] * w;
            p2 += k1d_[static_cast<std::size_t>(b)] * w;
        }
    const double scale = 1.0 / static_cast<double>(n2);
    return {p1.value() * scale, p2.value() * scale};
}

double SplitStepSolver::max_abs() const {
    double m = 0.0;
    for (const cd& v : u_) m = std::max(m, std::abs(v));
    return m;
}

double SplitStepSolver::boundary_max() const {
    const int N = cfg_.N;
    double m = 0.0;
    for (int j = 0; j < N; ++j) {
        m = std::max(m, std::abs(u_[static_cast<std::size_t>(j)]));
        m = std::max(m, std::abs(u_[static_cast<std::size_t>(N - 1) * N + j]));
        m = std::max(m, std::abs(u_[static_cast<std::size_t>(j) * N]));
        m = std::max(m, std::abs(u_[static_cast<std::size_t>(j) * N + N - 1]));
    }
    return m;
}

cd SplitStepSolver::observe(double K1, double K2, double sigma) const {
    const int N = cfg_.N;
    const double dk = kTwoPi / cfg_.S;
    if (!(sigma >= 4.0 * dk))
        throw std::domain_error(
            "observe: sigma must span at least 4 frequency bins of the box");
    const std::size_t n2 = u_.size();
    std::memcpy(work_.data(), const_cast<cd*>(u_.data()), n2 * sizeof(cd));
    fft_forward();
    const double dx = cfg_.S / N;
    const double cutoff2 = std::pow(8.0 * sigma, 2);
    KahanComplex acc;
    for (int a = 0; a < N; ++a) {
        const double q1 = k1d_[static_cast<std::size_t>(a)];
        const double d1 = q1 - K1;
        if (d1 * d1 > cutoff2) continue;
        for (int b = 0; b < N; ++b) {
            const double q2 = k1d_[static_cast<std::size_t>(b)];
            const double d2 = q2 - K2;
            const double r2 = d1 * d1 + d2 * d2;
            if (r2 > cutoff2) continue;
            // continuum transform sample: dx^2 e^{i(q1+q2)S/2} FFT value;
            // free-flow unwind e^{+i t |q|^2} turns u into v
            const cd uhat = dx * dx *
                            std::exp(cd(0.0, 0.5 * cfg_.S * (q1 + q2))) *
                            work_[static_cast<std::size_t>(a) * N + b];
            const cd vhat = std::exp(cd(0.0, t_ * (q1 * q1 + q2 * q2))) * uhat;
            acc += std::exp(-r2 / (2.0 * sigma * sigma)) * vhat;
        }
    }
    return acc.value() * dk * dk;
}

void SplitStepSolver::save_checkpoint(const std::string& path,
                                      std::uint64_t params_hash) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    const char magic[8] = {'W', 'K', 'C', 'K', 'P', 'T', '0', '1'};
    const std::int64_t n = cfg_.N;
    std::fwrite(magic, 1, 8, f);
    std::fwrite(&n, sizeof(n), 1, f);
    std::fwrite(&cfg_.S, sizeof(double), 1, f);
    std::fwrite(&t_, sizeof(double), 1, f);
    std::fwrite(&cfg_.dt, sizeof(double), 1, f);
    std::fwrite(&cfg_.lambda, sizeof(double), 1, f);
    std::fwrite(&params_hash, sizeof(params_hash), 1, f);
    std::fwrite(u_.data(), sizeof(cd), u_.size(), f);
    std::fclose(f);
}

std::uint64_t SplitStepSolver::load_checkpoint(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[8];
    std::int64_t n = 0;
    double S, t, dt, lambda;
    std::uint64_t hash = 0;
    bool ok = std::fread(magic, 1, 8, f) == 8 &&
              std::memcmp(magic, "WKCKPT01", 8) == 0 &&
              std::fread(&n, sizeof(n), 1, f) == 1 &&
              std::fread(&S, sizeof(double), 1, f) == 1 &&
              std::fread(&t, sizeof(double), 1, f) == 1 &&
              std::fread(&dt, sizeof(double), 1, f) == 1 &&
              std::fread(&lambda, sizeof(double), 1, f) == 1 &&
              std::fread(&hash, sizeof(hash), 1, f) == 1;
    if (ok && (n != cfg_.N || S != cfg_.S)) ok = false;
    if (ok)
        ok = std::fread(u_.data(), sizeof(cd), u_.size(), f) == u_.size();
    std::fclose(f);
    if (!ok) throw std::runtime_error("load_checkpoint: bad or mismatched file");
    cfg_.dt = dt;
    cfg_.lambda = lambda;
    t_ = t;
    return hash;
}

}  // namespace wavekin
