#pragma once

// Differential forms on flat T^n with trigonometric-polynomial coefficients,
// their pullbacks, harmonic projection (coefficient averaging), the induced
// action on cohomology and volume-growth integrals.

#include "toruslab/torus_system.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace toruslab {

/// a cos(2 pi m.x) + b sin(2 pi m.x).
struct TrigMode {
    std::vector<int> m;
    double cos = 0.0;
    double sin = 0.0;
};

struct TrigPoly {
    double constant = 0.0;
    std::vector<TrigMode> modes;

    double eval(std::span<const double> x) const;
    /// d/dx_j as another trig polynomial.
    TrigPoly derivative(int j) const;
    /// max over modes of |m|_inf; 0 for constants.
    int max_frequency() const;
};

/// A k-form sum_I c_I(x) dx_I on T^n, coefficients over increasing
/// multi-indices in lexicographic order.
class KForm {
public:
    KForm(int dim, int degree);

    /// Constant (harmonic) form with the given coefficient vector.
    static KForm constant(int dim, int degree, const Vector& coefficients);
    /// Parses {"degree": k, "terms": [{"index": [...], "const": c, "modes": [{"m", "cos", "sin"}]}]}.
    /// Repeated indices accumulate. Throws ValidationError on bad shapes.
    static KForm from_json(const nlohmann::json& j, int dim);

    int dim() const noexcept { return dim_; }
    int degree() const noexcept { return degree_; }
    TrigPoly& coefficient(const MultiIndex& index);
    const TrigPoly& coefficient_at(std::size_t position) const { return coeffs_.at(position); }

    Vector eval(const TorusPoint& x) const;
    /// Mean of each coefficient (constants plus zero-frequency cosines), the
    /// harmonic part on flat T^n.
    Vector harmonic_part() const;
    KForm exterior_derivative() const;
    int max_frequency() const;
    nlohmann::ordered_json to_json() const;

private:
    int dim_;
    int degree_;
    std::vector<TrigPoly> coeffs_;
};

/// Coefficients of (f^* omega)_x: compound(D_x f, k)^T omega(f x).
Vector pullback_at(const TorusSystem& sys, const KForm& form, const TorusPoint& x);

/// (f^n)^* of a constant form at x (n >= 0).
CVector pullback_constant(const TorusSystem& sys, const CVector& omega, int degree, const TorusPoint& x, long long n);

using FormSampler = std::function<Vector(const TorusPoint&)>;

struct ProjectionEstimate {
    Vector mean;
    Vector std_error;  ///< zero under grid quadrature
    std::size_t evaluations = 0;
};

/// Average over the tensor grid {i/order}^n. Exact for trig polynomials whose
/// frequencies are below `order` in every coordinate.
ProjectionEstimate harmonic_projection_grid(const FormSampler& sampler, int dim, int order);

/// Monte Carlo mean over n_samples >= 100 uniform points (sample i drawn from
/// SplitRng(seed, i)), with standard errors.
ProjectionEstimate harmonic_projection_mc(const FormSampler& sampler, int dim, std::size_t n_samples,
                                          std::uint64_t seed);

/// Grid order making the projection of f^* (constant form) exact: one shear
/// makes the integrand affine in cos(2 pi (A^T m).x + phi), so 2|A^T m| + 1
/// nodes per axis suffice. Compositions of several shears are not trig
/// polynomials; 32 nodes per axis are used, accurate to rounding for small
/// amplitudes.
int pullback_grid_order(const TorusSystem& sys);

struct EigenData {
    int degree = 0;
    std::complex<double> exponent;  ///< principal log of the eigenvalue
    CVector vector;                 ///< unit coefficient vector of the eigenform
    double residual = 0.0;          ///< ||M v - e^lambda v||
};

struct HomologyAction {
    int degree = 0;
    IntMatrix matrix;  ///< compound(A^T, k)
    std::vector<EigenData> eigen;
};

/// H^k(f) = compound(A^T, k) on constant k-forms, with its eigen-decomposition.
HomologyAction cohomology_action(const TorusSystem& sys, int k);

struct SpectralRadius {
    double radius = 1.0;
    int degree = 0;
};

/// max_k sp(H^k(f)); ties go to the smallest degree.
SpectralRadius total_spectral_radius(const TorusSystem& sys);

struct AlphaSequence {
    std::vector<CVector> recursion;  ///< alpha_1..alpha_n from the pullback sum
    std::vector<CVector> direct;     ///< (f^j)^* omega - e^{j lambda} omega
    double discrepancy = 0.0;        ///< max_j |recursion_j - direct_j| / scale_j
};

/// Both evaluations of alpha_j at x, j = 1..n. Throws ConsistencyError when
/// they differ by more than 1e-8 relative to
/// max(1, |e^{j lambda}|, ||compound(D_x f^j, k)|| ||omega||), the size of the
/// rounding error either evaluation can carry.
AlphaSequence alpha_sequence(const TorusSystem& sys, const EigenData& eigen, const TorusPoint& x, int n);

/// P(alpha) for alpha = f^* omega - e^lambda omega, by exact grid quadrature.
/// Zero together with closedness characterizes the closure of Im(d).
CVector alpha_harmonic_part(const TorusSystem& sys, const EigenData& eigen);

struct GrowthEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::vector<double> log_norms;  ///< per sample
};

/// (1/n) log of the Monte Carlo mean of ||compound(D_x f^n, k)|| over uniform
/// x, by log-sum-exp; stderr by the delta method.
GrowthEstimate volume_growth(const TorusSystem& sys, int k, long long n, std::size_t n_samples, std::uint64_t seed);

/// Same with the norm on the whole exterior algebra: max over degrees.
GrowthEstimate entropy_estimate(const TorusSystem& sys, long long n, std::size_t n_samples, std::uint64_t seed);

}  // namespace toruslab
