#pragma once

// The derivative cocycle Phi(n, x) = D_x f^n: products along orbits, QR
// Lyapunov spectra, exterior-power growth rates and Oseledec splittings.

#include "toruslab/torus_system.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace toruslab {

/// D_x f^n by the chain rule; backward Jacobians for n < 0. No rescaling:
/// throws NumericError carrying the step index if entries become non-finite.
Matrix cocycle_product(const TorusSystem& sys, const TorusPoint& x, long long n);

struct LyapunovSpectrum {
    std::vector<double> exponents;  ///< descending, nats per iterate
    long long n_steps = 0;
    /// Iterate counts at which running means were recorded, and the running
    /// means themselves (history[c][i] belongs to exponents[i]).
    std::vector<long long> checkpoints;
    std::vector<std::vector<double>> history;
    /// Half the max-min spread of each running mean over the last decade
    /// [n_steps/10, n_steps].
    std::vector<double> halfwidths;
    double sum = 0.0;
    double sigma_plus = 0.0;

    double max_halfwidth() const;
    /// Sum of the top k exponents.
    double top_sum(int k) const;
};

/// Discrete QR method. n_transient iterates re-orthonormalize the frame
/// without accumulating; then (1/n) sum log R_ii over n_steps iterates.
/// Requires n_steps >= 1000.
LyapunovSpectrum qr_spectrum(const TorusSystem& sys, const TorusPoint& x0, long long n_steps,
                             long long n_transient = 1000, Direction direction = Direction::forward);

/// log ||compound(Phi(n, x), k)|| for each requested degree, propagated one
/// step at a time with exact power-of-two rescaling.
std::vector<double> log_exterior_norms(const TorusSystem& sys, const TorusPoint& x, long long n,
                                       const std::vector<int>& degrees);

/// (1/n) log ||compound(Phi(n, x0), k)||, an estimate of Lambda_k.
double exterior_top_exponent(const TorusSystem& sys, int k, const TorusPoint& x0, long long n_steps);

struct UniformExponent {
    double value = 0.0;              ///< max over the ensemble
    std::vector<double> per_orbit;   ///< indexed by orbit
    double spread = 0.0;             ///< max - min over the ensemble
    std::size_t argmax = 0;
};

/// Ensemble maximum of exterior_top_exponent over seeded uniform starting
/// points; orbit i draws its start from SplitRng(seed, i).
UniformExponent uniform_exponent(const TorusSystem& sys, int k, std::size_t ensemble_size, long long n_steps,
                                 std::uint64_t seed);

/// Same ensemble, every degree 0..n at once (result indexed by degree).
std::vector<UniformExponent> uniform_exponents(const TorusSystem& sys, std::size_t ensemble_size,
                                               long long n_steps, std::uint64_t seed);

/// A group of equal exponents: positions [start, end) of the sorted spectrum.
struct ExponentBlock {
    int start = 0;
    int end = 0;
    double exponent = 0.0;
    int dim() const noexcept { return end - start; }
};

/// Groups the spectrum with gap threshold tau = max(10 * max halfwidth, 1e-2).
/// Exponents with |lambda| < tau/2 form the zero block; neighbours closer than
/// tau/2 merge; gaps of at least tau split. Anything in between throws
/// DegenerateSplittingError naming the exponents.
std::vector<ExponentBlock> cluster_exponents(const LyapunovSpectrum& spectrum);

struct OseledecFrame {
    TorusPoint x;
    /// n x n; the columns of block i are basis.middleCols(blocks[i].start, dim).
    Matrix basis;
    std::vector<ExponentBlock> blocks;
    double condition_number = 1.0;

    std::vector<double> block_exponents() const;
    std::vector<int> block_dims() const;
    Matrix block_basis(std::size_t i) const;
};

struct FrameOptions {
    /// Reference spectrum; computed from x when absent.
    std::optional<LyapunovSpectrum> spectrum;
    long long spectrum_steps = 100000;
    long long spectrum_transient = 1000;
};

/// Expanding flags from a generic frame pushed forward from f^{-n_probe} x,
/// contracting flags pulled back from f^{n_probe} x; block i is the
/// intersection of the two. Throws DegenerateSplittingError when the basis
/// condition number reaches 1e8.
OseledecFrame oseledec_frame(const TorusSystem& sys, const TorusPoint& x, int n_probe,
                             const FrameOptions& options = {});

/// Oseledec frames along a stretch x_t, t0 <= t <= t1, of one orbit, computed
/// with a single forward and a single backward sweep.
class OrbitFrames {
public:
    OrbitFrames(const TorusSystem& sys, const TorusPoint& x, std::vector<ExponentBlock> blocks, long long t0,
                long long t1, int n_probe);

    long long t0() const noexcept { return t0_; }
    long long t1() const noexcept { return t1_; }
    const std::vector<ExponentBlock>& blocks() const noexcept { return blocks_; }

    const TorusPoint& point(long long t) const;
    /// D f at x_t (t0 <= t < t1) and D f^{-1} at x_t (t0 < t <= t1).
    const Matrix& forward_jacobian(long long t) const;
    const Matrix& backward_jacobian(long long t) const;
    const Matrix& basis(long long t) const;
    /// Oblique projection onto block i along the other blocks at x_t.
    Matrix projector(long long t, std::size_t block) const;
    OseledecFrame frame(long long t) const;

private:
    std::size_t slot(long long t) const;

    std::vector<ExponentBlock> blocks_;
    long long t0_;
    long long t1_;
    long long lo_;
    std::vector<TorusPoint> points_;       // t in [lo_, t1 + n_probe]
    std::vector<Matrix> forward_jac_;      // indexed like points_
    std::vector<Matrix> backward_jac_;
    std::vector<Matrix> bases_;            // t in [t0, t1]
    std::vector<Matrix> inverse_bases_;
    std::vector<double> conditions_;
};

}  // namespace toruslab
