#pragma once

// The Lyapunov metric h^eps: on each Oseledec block H_i,
//   h_i(u, v) = sum_{n in Z} e^{-2|n| eps - 2 n lambda_i} <Phi(n,x) u, Phi(n,x) v>,
// blocks mutually orthogonal. Also its L^p integrals and the growth-ratio
// bound for exterior powers.

#include "toruslab/cocycle.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace toruslab {

struct MetricOptions {
    double tol = 1e-10;        ///< relative size of the last kept term
    long long n_max = 4096;    ///< truncation budget per direction
    int n_probe = 60;          ///< frame sweep length
};

struct MetricSample {
    TorusPoint x;
    double epsilon = 0.0;
    GramMatrix gram;           ///< standard coordinates
    Matrix block_gram;         ///< same metric in the frame basis (block diagonal)
    OseledecFrame frame;
    long long truncation = 0;  ///< largest |n| summed
    double tail_bound = 0.0;   ///< geometric majorant of the dropped terms (trace)

    GramMatrix exterior(int k) const { return induced_gram_power(gram, k); }
};

/// Sums the series over [-N, N] along the orbit of frame.x, projecting the
/// propagated block onto H_i(f^n x) at every step. N starts near
/// log(1/tol) / (2 eps) and doubles until both tails stop (last term below
/// tol times the partial sum and the 5-step decay ratio below e^{-eps}).
/// Throws DivergenceError naming the block when N would exceed n_max.
MetricSample metric_at(const TorusSystem& sys, const OseledecFrame& frame, double epsilon,
                       const MetricOptions& options = {});

struct LpOptions {
    std::optional<LyapunovSpectrum> spectrum;  ///< shared reference; computed when absent
    long long spectrum_steps = 100000;
    MetricOptions metric;
};

struct LpEstimate {
    double estimate = 0.0;       ///< mean of ||h_x||_F^p over the kept samples
    double std_error = 0.0;
    double top_mass_fraction = 0.0;  ///< share of the sum carried by the largest 1% of samples
    bool is_norm = true;             ///< false for p < 1
    std::size_t used = 0;
    std::size_t excluded = 0;
    long long max_truncation = 0;
    std::vector<double> values;      ///< per sample, NaN where excluded
};

/// Monte Carlo estimate of the integral of ||h^eps_x||_F^p over T^n. Sample i
/// is drawn from SplitRng(seed, i); samples whose series diverges or whose
/// splitting degenerates are excluded and counted.
LpEstimate lp_estimate(const TorusSystem& sys, double epsilon, double p, std::size_t n_samples,
                       std::uint64_t seed, const LpOptions& options = {});

/// Several exponents p from one set of metric samples.
std::vector<LpEstimate> lp_estimates(const TorusSystem& sys, double epsilon, const std::vector<double>& ps,
                                     std::size_t n_samples, std::uint64_t seed, const LpOptions& options = {});

struct GrowthRatio {
    double max_ratio = 0.0;
    long long argmax = 0;
    std::vector<double> ratios;  ///< n = 0..n_max
    double log_slope = 0.0;      ///< least-squares slope of log ratio against n
};

/// ||compound(Phi(n,x), k)|| measured from h^{eps,k}_x to h^{eps,k}_{f^n x},
/// divided by e^{n (Lambda_k + k eps)}, for n = 0..n_max. Lambda_k is the sum
/// of the top k block exponents of the frame (with multiplicity).
GrowthRatio growth_ratio_check(const TorusSystem& sys, const OseledecFrame& frame, double epsilon, int k,
                               long long n_max, const MetricOptions& options = {});

}  // namespace toruslab
