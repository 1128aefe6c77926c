#include "toruslab/cocycle.hpp"

#include "toruslab/errors.hpp"
#include "toruslab/parallel.hpp"
#include "toruslab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace toruslab {

namespace {

// Modified Gram-Schmidt with a second orthogonalization pass. Overwrites q
// with its orthonormal factor and stores the positive diagonal of R.
void reorthonormalize(Matrix& q, std::vector<double>& r_diag, long long step) {
    const Eigen::Index cols = q.cols();
    for (Eigen::Index j = 0; j < cols; ++j) {
        auto v = q.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < j; ++i) v -= q.col(i).dot(v) * q.col(i);
        const double norm = v.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw NumericError("QR re-orthonormalization failed: degenerate R(" + std::to_string(j) + "," +
                                   std::to_string(j) + ")",
                               step);
        }
        r_diag[static_cast<std::size_t>(j)] = norm;
        v /= norm;
    }
}

Matrix generic_frame(int n, std::uint64_t stream) {
    SplitRng rng(0x6f73656cULL, stream);
    Matrix q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = 2.0 * rng.uniform() - 1.0;
    std::vector<double> r(static_cast<std::size_t>(n));
    reorthonormalize(q, r, 0);
    return q;
}

void check_steps(long long n) {
    if (n > 10'000'000 || n < -10'000'000) throw InputError("|n| must not exceed 1e7");
}

}  // namespace

Matrix cocycle_product(const TorusSystem& sys, const TorusPoint& x, long long n) {
    check_steps(n);
    const Direction dir = n >= 0 ? Direction::forward : Direction::backward;
    const long long steps = n >= 0 ? n : -n;
    Matrix phi = Matrix::Identity(sys.dim(), sys.dim());
    Matrix tmp(sys.dim(), sys.dim());
    TorusPoint p = x;
    for (long long t = 0; t < steps; ++t) {
        Step s = sys.advance(p, dir);
        tmp.noalias() = s.jacobian * phi;
        phi.swap(tmp);
        if (!phi.allFinite()) throw NumericError("cocycle product overflowed", t + 1);
        p = std::move(s.next);
    }
    return phi;
}

double LyapunovSpectrum::max_halfwidth() const {
    double m = 0.0;
    for (double h : halfwidths) m = std::max(m, h);
    return m;
}

double LyapunovSpectrum::top_sum(int k) const {
    if (k < 0 || k > static_cast<int>(exponents.size())) throw InputError("top_sum: degree out of range");
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += exponents[static_cast<std::size_t>(i)];
    return s;
}

LyapunovSpectrum qr_spectrum(const TorusSystem& sys, const TorusPoint& x0, long long n_steps,
                             long long n_transient, Direction direction) {
    if (n_steps < 1000) throw InputError("qr_spectrum needs n_steps >= 1000");
    check_steps(n_steps);
    if (n_transient < 0) throw InputError("n_transient must be non-negative");
    if (x0.dim() != sys.dim()) throw InputError("qr_spectrum: point dimension mismatch");
    const int n = sys.dim();
    const auto un = static_cast<std::size_t>(n);

    Matrix q = Matrix::Identity(n, n);
    Matrix tmp(n, n);
    std::vector<double> r(un);
    TorusPoint p = x0;
    for (long long t = 0; t < n_transient; ++t) {
        Step s = sys.advance(p, direction);
        tmp.noalias() = s.jacobian * q;
        q.swap(tmp);
        reorthonormalize(q, r, t + 1);
        p = std::move(s.next);
    }

    const long long stride = std::max<long long>(1, n_steps / 1000);
    std::vector<double> sums(un, 0.0);
    std::vector<long long> checkpoints;
    std::vector<std::vector<double>> history;
    for (long long t = 1; t <= n_steps; ++t) {
        Step s = sys.advance(p, direction);
        tmp.noalias() = s.jacobian * q;
        q.swap(tmp);
        reorthonormalize(q, r, n_transient + t);
        for (std::size_t i = 0; i < un; ++i) sums[i] += std::log(r[i]);
        p = std::move(s.next);
        if (t % stride == 0 || t == n_steps) {
            checkpoints.push_back(t);
            std::vector<double> means(un);
            for (std::size_t i = 0; i < un; ++i) means[i] = sums[i] / static_cast<double>(t);
            history.push_back(std::move(means));
        }
    }

    std::vector<std::size_t> order(un);
    for (std::size_t i = 0; i < un; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sums[a] > sums[b]; });

    LyapunovSpectrum out;
    out.n_steps = n_steps;
    out.checkpoints = std::move(checkpoints);
    out.history.reserve(history.size());
    for (const auto& h : history) {
        std::vector<double> sorted(un);
        for (std::size_t i = 0; i < un; ++i) sorted[i] = h[order[i]];
        out.history.push_back(std::move(sorted));
    }
    out.exponents = out.history.back();
    out.halfwidths.assign(un, 0.0);
    const long long decade = n_steps / 10;
    for (std::size_t i = 0; i < un; ++i) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t c = 0; c < out.checkpoints.size(); ++c) {
            if (out.checkpoints[c] < decade) continue;
            lo = std::min(lo, out.history[c][i]);
            hi = std::max(hi, out.history[c][i]);
        }
        out.halfwidths[i] = (hi - lo) / 2.0;
    }
    for (double e : out.exponents) {
        out.sum += e;
        if (e > 0.0) out.sigma_plus += e;
    }
    return out;
}

std::vector<double> log_exterior_norms(const TorusSystem& sys, const TorusPoint& x, long long n,
                                       const std::vector<int>& degrees) {
    if (n < 0) throw InputError("log_exterior_norms needs n >= 0");
    check_steps(n);
    const int dim = sys.dim();
    for (int k : degrees)
        if (k < 0 || k > dim) throw InputError("exterior degree " + std::to_string(k) + " out of range");

    std::vector<Matrix> acc;
    std::vector<long long> exps(degrees.size(), 0);
    for (int k : degrees) {
        const auto d = binomial(dim, k);
        acc.push_back(Matrix::Identity(d, d));
    }
    Matrix tmp;
    TorusPoint p = x;
    for (long long t = 0; t < n; ++t) {
        Step s = sys.advance(p, Direction::forward);
        for (std::size_t j = 0; j < degrees.size(); ++j) {
            const int k = degrees[j];
            if (k == 0) continue;
            tmp.noalias() = (k == 1 ? s.jacobian : compound(s.jacobian, k)) * acc[j];
            acc[j].swap(tmp);
            const double m = acc[j].cwiseAbs().maxCoeff();
            if (!(m > 0.0) || !std::isfinite(m)) throw NumericError("exterior cocycle overflowed", t + 1);
            const int e = std::ilogb(m);
            if (e != 0) {
                acc[j] *= std::ldexp(1.0, -e);
                exps[j] += e;
            }
        }
        p = std::move(s.next);
    }
    std::vector<double> out(degrees.size());
    for (std::size_t j = 0; j < degrees.size(); ++j) {
        out[j] = std::log(operator_norm(acc[j])) + static_cast<double>(exps[j]) * std::numbers::ln2;
    }
    return out;
}

double exterior_top_exponent(const TorusSystem& sys, int k, const TorusPoint& x0, long long n_steps) {
    if (k < 1 || k > sys.dim()) throw InputError("exterior_top_exponent needs 1 <= k <= dim");
    if (n_steps < 1) throw InputError("exterior_top_exponent needs n_steps >= 1");
    return log_exterior_norms(sys, x0, n_steps, {k})[0] / static_cast<double>(n_steps);
}

namespace {

UniformExponent summarize(std::vector<double> per_orbit) {
    UniformExponent u;
    const auto mx = std::max_element(per_orbit.begin(), per_orbit.end());
    const auto mn = std::min_element(per_orbit.begin(), per_orbit.end());
    u.value = *mx;
    u.spread = *mx - *mn;
    u.argmax = static_cast<std::size_t>(mx - per_orbit.begin());
    u.per_orbit = std::move(per_orbit);
    return u;
}

}  // namespace

std::vector<UniformExponent> uniform_exponents(const TorusSystem& sys, std::size_t ensemble_size,
                                               long long n_steps, std::uint64_t seed) {
    if (ensemble_size < 1) throw InputError("ensemble_size must be at least 1");
    if (n_steps < 1) throw InputError("uniform_exponent needs n_steps >= 1");
    const int dim = sys.dim();
    std::vector<int> degrees(static_cast<std::size_t>(dim) + 1);
    for (int k = 0; k <= dim; ++k) degrees[static_cast<std::size_t>(k)] = k;
    std::vector<std::vector<double>> rates(ensemble_size);
    parallel_for(ensemble_size, [&](std::size_t i) {
        SplitRng rng(seed, i);
        const TorusPoint x = rng.point(dim);
        auto logs = log_exterior_norms(sys, x, n_steps, degrees);
        for (double& v : logs) v /= static_cast<double>(n_steps);
        rates[i] = std::move(logs);
    });
    std::vector<UniformExponent> out;
    for (int k = 0; k <= dim; ++k) {
        std::vector<double> per(ensemble_size);
        for (std::size_t i = 0; i < ensemble_size; ++i) per[i] = rates[i][static_cast<std::size_t>(k)];
        out.push_back(summarize(std::move(per)));
    }
    return out;
}

UniformExponent uniform_exponent(const TorusSystem& sys, int k, std::size_t ensemble_size, long long n_steps,
                                 std::uint64_t seed) {
    if (k < 1 || k > sys.dim()) throw InputError("uniform_exponent needs 1 <= k <= dim");
    if (ensemble_size < 1) throw InputError("ensemble_size must be at least 1");
    if (n_steps < 1) throw InputError("uniform_exponent needs n_steps >= 1");
    std::vector<double> per(ensemble_size);
    parallel_for(ensemble_size, [&](std::size_t i) {
        SplitRng rng(seed, i);
        per[i] = exterior_top_exponent(sys, k, rng.point(sys.dim()), n_steps);
    });
    return summarize(std::move(per));
}

std::vector<ExponentBlock> cluster_exponents(const LyapunovSpectrum& spectrum) {
    const auto& ex = spectrum.exponents;
    if (ex.empty()) throw InputError("cluster_exponents: empty spectrum");
    const double tau = std::max(10.0 * spectrum.max_halfwidth(), 1e-2);
    auto unresolved = [&](double a, double b) {
        std::ostringstream os;
        os.precision(6);
        os << "exponents " << a << " and " << b << " cannot be separated at gap threshold " << tau;
        return DegenerateSplittingError(os.str());
    };
    for (double e : ex) {
        if (std::abs(e) >= tau / 2 && std::abs(e) < tau) throw unresolved(e, 0.0);
    }
    std::vector<ExponentBlock> blocks;
    int start = 0;
    const int n = static_cast<int>(ex.size());
    for (int i = 1; i <= n; ++i) {
        bool split = i == n;
        if (!split) {
            const double a = ex[static_cast<std::size_t>(i - 1)];
            const double b = ex[static_cast<std::size_t>(i)];
            const bool za = std::abs(a) < tau / 2;
            const bool zb = std::abs(b) < tau / 2;
            if (za != zb) {
                split = true;
            } else if (!za) {
                const double gap = a - b;
                if (gap >= tau) split = true;
                else if (gap >= tau / 2) throw unresolved(a, b);
            }
        }
        if (split) {
            double s = 0.0;
            for (int j = start; j < i; ++j) s += ex[static_cast<std::size_t>(j)];
            blocks.push_back({start, i, s / (i - start)});
            start = i;
        }
    }
    return blocks;
}

std::vector<double> OseledecFrame::block_exponents() const {
    std::vector<double> out;
    for (const auto& b : blocks) out.push_back(b.exponent);
    return out;
}

std::vector<int> OseledecFrame::block_dims() const {
    std::vector<int> out;
    for (const auto& b : blocks) out.push_back(b.dim());
    return out;
}

Matrix OseledecFrame::block_basis(std::size_t i) const {
    if (i >= blocks.size()) throw InputError("block index out of range");
    return basis.middleCols(blocks[i].start, blocks[i].dim());
}

OrbitFrames::OrbitFrames(const TorusSystem& sys, const TorusPoint& x, std::vector<ExponentBlock> blocks, long long t0,
                         long long t1, int n_probe)
    : blocks_(std::move(blocks)), t0_(t0), t1_(t1), lo_(t0 - n_probe) {
    if (t0 > 0 || t1 < 0) throw InputError("OrbitFrames needs t0 <= 0 <= t1");
    if (n_probe < 1) throw InputError("n_probe must be positive");
    if (x.dim() != sys.dim()) throw InputError("OrbitFrames: point dimension mismatch");
    const int n = sys.dim();
    if (blocks_.empty() || blocks_.front().start != 0 || blocks_.back().end != n) {
        throw InputError("exponent blocks must cover the spectrum");
    }
    const long long hi = t1 + n_probe;
    const auto count = static_cast<std::size_t>(hi - lo_ + 1);
    points_.resize(count);
    forward_jac_.resize(count);
    backward_jac_.resize(count);

    // Orbit: forward iterates for t > 0, backward iterates for t < 0.
    points_[slot(0)] = x;
    for (long long t = 0; t < hi; ++t) {
        Step s = sys.advance(points_[slot(t)], Direction::forward);
        forward_jac_[slot(t)] = std::move(s.jacobian);
        points_[slot(t + 1)] = std::move(s.next);
    }
    for (long long t = 0; t > lo_; --t) {
        Step s = sys.advance(points_[slot(t)], Direction::backward);
        backward_jac_[slot(t)] = std::move(s.jacobian);
        points_[slot(t - 1)] = std::move(s.next);
    }
    for (long long t = lo_; t < 0; ++t) forward_jac_[slot(t)] = sys.jacobian(points_[slot(t)], Direction::forward);
    for (long long t = 1; t <= hi; ++t) backward_jac_[slot(t)] = sys.jacobian(points_[slot(t)], Direction::backward);

    const auto frames = static_cast<std::size_t>(t1 - t0 + 1);
    bases_.resize(frames);
    inverse_bases_.resize(frames);
    conditions_.assign(frames, 1.0);
    if (blocks_.size() == 1) {
        for (std::size_t i = 0; i < frames; ++i) {
            bases_[i] = Matrix::Identity(n, n);
            inverse_bases_[i] = Matrix::Identity(n, n);
        }
        return;
    }

    std::vector<Matrix> qf(frames), qb(frames);
    std::vector<double> r(static_cast<std::size_t>(n));
    Matrix q = generic_frame(n, 1);
    Matrix tmp(n, n);
    for (long long t = lo_; t < t1; ++t) {
        tmp.noalias() = forward_jac_[slot(t)] * q;
        q.swap(tmp);
        reorthonormalize(q, r, t + 1);
        if (t + 1 >= t0) qf[static_cast<std::size_t>(t + 1 - t0)] = q;
    }
    q = generic_frame(n, 2);
    for (long long t = hi; t > t0; --t) {
        tmp.noalias() = backward_jac_[slot(t)] * q;
        q.swap(tmp);
        reorthonormalize(q, r, t - 1);
        if (t - 1 <= t1) qb[static_cast<std::size_t>(t - 1 - t0)] = q;
    }

    for (std::size_t f = 0; f < frames; ++f) {
        Matrix basis(n, n);
        for (const auto& b : blocks_) {
            const auto u = qf[f].leftCols(b.end);
            const auto w = qb[f].leftCols(n - b.start);
            const Matrix m = u - w * (w.transpose() * u);
            Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
            basis.middleCols(b.start, b.dim()) = u * svd.matrixV().rightCols(b.dim());
        }
        Eigen::JacobiSVD<Matrix> svd(basis);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / sv(n - 1);
        if (!(cond < 1e8)) {
            throw DegenerateSplittingError("Oseledec basis is numerically singular (condition number " +
                                           std::to_string(cond) + ") at orbit step " +
                                           std::to_string(t0 + static_cast<long long>(f)));
        }
        conditions_[f] = cond;
        inverse_bases_[f] = basis.inverse();
        bases_[f] = std::move(basis);
    }
}

std::size_t OrbitFrames::slot(long long t) const {
    return static_cast<std::size_t>(t - lo_);
}

const TorusPoint& OrbitFrames::point(long long t) const {
    if (t < lo_ || slot(t) >= points_.size()) throw InputError("orbit step out of range");
    return points_[slot(t)];
}

const Matrix& OrbitFrames::forward_jacobian(long long t) const {
    if (t < t0_ || t >= t1_) throw InputError("forward Jacobian requested outside [t0, t1)");
    return forward_jac_[slot(t)];
}

const Matrix& OrbitFrames::backward_jacobian(long long t) const {
    if (t <= t0_ || t > t1_) throw InputError("backward Jacobian requested outside (t0, t1]");
    return backward_jac_[slot(t)];
}

const Matrix& OrbitFrames::basis(long long t) const {
    if (t < t0_ || t > t1_) throw InputError("frame requested outside [t0, t1]");
    return bases_[static_cast<std::size_t>(t - t0_)];
}

Matrix OrbitFrames::projector(long long t, std::size_t block) const {
    if (block >= blocks_.size()) throw InputError("block index out of range");
    const Matrix& b = basis(t);
    const Matrix& inv = inverse_bases_[static_cast<std::size_t>(t - t0_)];
    const auto& blk = blocks_[block];
    return b.middleCols(blk.start, blk.dim()) * inv.middleRows(blk.start, blk.dim());
}

OseledecFrame OrbitFrames::frame(long long t) const {
    OseledecFrame f;
    f.x = point(t);
    f.basis = basis(t);
    f.blocks = blocks_;
    f.condition_number = conditions_[static_cast<std::size_t>(t - t0_)];
    return f;
}

OseledecFrame oseledec_frame(const TorusSystem& sys, const TorusPoint& x, int n_probe, const FrameOptions& options) {
    const LyapunovSpectrum spectrum = options.spectrum
                                          ? *options.spectrum
                                          : qr_spectrum(sys, x, options.spectrum_steps, options.spectrum_transient);
    if (static_cast<int>(spectrum.exponents.size()) != sys.dim()) {
        throw InputError("reference spectrum has the wrong dimension");
    }
    OrbitFrames frames(sys, x, cluster_exponents(spectrum), 0, 0, n_probe);
    return frames.frame(0);
}

}  // namespace toruslab
