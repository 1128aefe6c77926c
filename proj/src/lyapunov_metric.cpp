#include "toruslab/lyapunov_metric.hpp"

#include "toruslab/errors.hpp"
#include "toruslab/parallel.hpp"
#include "toruslab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace toruslab {

namespace {

struct SeriesTail {
    Matrix sum;
    bool converged = false;
    long long steps = 0;
    double tail = 0.0;
};

// One direction of the series for block i, n = 1..N (forward) or -1..-N.
SeriesTail block_series(const OrbitFrames& fr, std::size_t i, double epsilon, long long N, bool forward,
                        double tol, const Matrix& head) {
    const auto& blk = fr.blocks()[i];
    const double weight = forward ? std::exp(-(blk.exponent + epsilon)) : std::exp(blk.exponent - epsilon);
    const double decay_guard = std::exp(-epsilon);
    Matrix m = fr.basis(0).middleCols(blk.start, blk.dim());
    SeriesTail out;
    out.sum = Matrix::Zero(blk.dim(), blk.dim());
    std::vector<double> traces{head.trace()};
    for (long long n = 1; n <= N; ++n) {
        const long long t = forward ? n : -n;
        const Matrix& jac = forward ? fr.forward_jacobian(t - 1) : fr.backward_jacobian(t + 1);
        m = fr.projector(t, i) * (jac * m) * weight;
        const Matrix term = m.transpose() * m;
        const double tr = term.trace();
        if (!std::isfinite(tr)) return out;
        out.sum += term;
        out.steps = n;
        traces.push_back(tr);
        if (n < 5) continue;
        const double total = head.trace() + out.sum.trace();
        const double ratio = std::pow(tr / traces[static_cast<std::size_t>(n - 5)], 0.2);
        if (tr < tol * total && ratio < decay_guard) {
            out.converged = true;
            out.tail = tr * ratio / (1.0 - ratio);
            return out;
        }
    }
    return out;
}

MetricSample metric_on_orbit(const TorusSystem& sys, const TorusPoint& x, const std::vector<ExponentBlock>& blocks,
                             double epsilon, const MetricOptions& options) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be positive");
    if (!(options.tol > 0.0) || options.tol >= 1.0) throw InputError("metric tolerance must lie in (0, 1)");
    const int n = sys.dim();
    long long N = static_cast<long long>(std::ceil(std::log(1.0 / options.tol) / (2.0 * epsilon))) + 16;
    N = std::min(N, options.n_max);
    while (true) {
        const OrbitFrames fr(sys, x, blocks, -N, N, options.n_probe);
        Matrix h = Matrix::Zero(n, n);
        long long used = 0;
        double tail = 0.0;
        std::optional<std::size_t> failed;
        for (std::size_t i = 0; i < blocks.size() && !failed; ++i) {
            const auto& blk = blocks[i];
            const Matrix v = fr.basis(0).middleCols(blk.start, blk.dim());
            const Matrix head = v.transpose() * v;
            const auto fwd = block_series(fr, i, epsilon, N, true, options.tol, head);
            const auto bwd = block_series(fr, i, epsilon, N, false, options.tol, head);
            if (!fwd.converged || !bwd.converged) {
                failed = i;
                break;
            }
            h.block(blk.start, blk.start, blk.dim(), blk.dim()) = head + fwd.sum + bwd.sum;
            used = std::max({used, fwd.steps, bwd.steps});
            tail += fwd.tail + bwd.tail;
        }
        if (!failed) {
            MetricSample s;
            s.x = x;
            s.epsilon = epsilon;
            s.frame = fr.frame(0);
            const Matrix binv = s.frame.basis.inverse();
            Matrix g = binv.transpose() * h * binv;
            s.gram.entries = (g + g.transpose()) / 2.0;
            s.block_gram = std::move(h);
            s.truncation = used;
            s.tail_bound = tail;
            return s;
        }
        if (N >= options.n_max) {
            std::ostringstream os;
            os.precision(6);
            os << "Lyapunov metric series for block " << *failed << " (exponent " << blocks[*failed].exponent
               << ") does not decay within " << options.n_max << " steps";
            throw DivergenceError(os.str(), static_cast<int>(*failed));
        }
        N = std::min(2 * N, options.n_max);
    }
}

}  // namespace

MetricSample metric_at(const TorusSystem& sys, const OseledecFrame& frame, double epsilon,
                       const MetricOptions& options) {
    if (frame.x.dim() != sys.dim()) throw InputError("frame and system dimensions differ");
    return metric_on_orbit(sys, frame.x, frame.blocks, epsilon, options);
}

std::vector<LpEstimate> lp_estimates(const TorusSystem& sys, double epsilon, const std::vector<double>& ps,
                                     std::size_t n_samples, std::uint64_t seed, const LpOptions& options) {
    for (double p : ps)
        if (!(p > 0.0) || !std::isfinite(p)) throw InputError("p must be positive");
    if (n_samples < 1) throw InputError("lp_estimate needs at least one sample");
    LyapunovSpectrum spectrum;
    if (options.spectrum) {
        spectrum = *options.spectrum;
    } else {
        SplitRng rng(seed, 0x7265666572656e63ULL);
        spectrum = qr_spectrum(sys, rng.point(sys.dim()), options.spectrum_steps);
    }
    const auto blocks = cluster_exponents(spectrum);

    std::vector<double> norms(n_samples, std::nan(""));
    std::vector<long long> truncation(n_samples, 0);
    parallel_for(n_samples, [&](std::size_t i) {
        SplitRng rng(seed, i);
        const TorusPoint x = rng.point(sys.dim());
        try {
            const auto s = metric_on_orbit(sys, x, blocks, epsilon, options.metric);
            norms[i] = s.gram.entries.norm();
            truncation[i] = s.truncation;
        } catch (const DivergenceError&) {
        } catch (const DegenerateSplittingError&) {
        }
    });

    std::vector<LpEstimate> results;
    for (double p : ps) {
        LpEstimate out;
        out.is_norm = p >= 1.0;
        out.values.assign(n_samples, std::nan(""));
        std::vector<double> kept;
        for (std::size_t i = 0; i < n_samples; ++i) {
            if (std::isnan(norms[i])) {
                ++out.excluded;
                continue;
            }
            out.values[i] = std::pow(norms[i], p);
            kept.push_back(out.values[i]);
            out.max_truncation = std::max(out.max_truncation, truncation[i]);
        }
        out.used = kept.size();
        if (kept.empty()) {
            out.estimate = std::nan("");
            out.std_error = std::nan("");
            results.push_back(std::move(out));
            continue;
        }
        // Shifted two-pass moments: identical samples give exactly zero spread.
        const double shift = kept[0];
        const auto m = static_cast<double>(kept.size());
        double d = 0.0;
        for (double v : kept) d += v - shift;
        d /= m;
        out.estimate = shift + d;
        double var = 0.0;
        for (double v : kept) var += (v - shift - d) * (v - shift - d);
        out.std_error = kept.size() > 1 ? std::sqrt(var / (m - 1.0) / m) : 0.0;

        std::sort(kept.begin(), kept.end(), std::greater<>());
        const auto top = std::max<std::size_t>(1, (kept.size() + 99) / 100);
        double top_sum = 0.0, total = 0.0;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            total += kept[i];
            if (i < top) top_sum += kept[i];
        }
        out.top_mass_fraction = total > 0.0 ? top_sum / total : 0.0;
        results.push_back(std::move(out));
    }
    return results;
}

LpEstimate lp_estimate(const TorusSystem& sys, double epsilon, double p, std::size_t n_samples, std::uint64_t seed,
                       const LpOptions& options) {
    return lp_estimates(sys, epsilon, {p}, n_samples, seed, options)[0];
}

GrowthRatio growth_ratio_check(const TorusSystem& sys, const OseledecFrame& frame, double epsilon, int k,
                               long long n_max, const MetricOptions& options) {
    const int n = sys.dim();
    if (k < 1 || k > n) throw InputError("growth_ratio_check needs 1 <= k <= dim");
    if (n_max < 0) throw InputError("n_max must be non-negative");
    std::vector<double> exps;
    for (const auto& b : frame.blocks)
        for (int j = 0; j < b.dim(); ++j) exps.push_back(b.exponent);
    std::sort(exps.begin(), exps.end(), std::greater<>());
    double lambda_k = 0.0;
    for (int j = 0; j < k; ++j) lambda_k += exps[static_cast<std::size_t>(j)];

    const OrbitFrames fr(sys, frame.x, frame.blocks, 0, std::max<long long>(n_max, 1), options.n_probe);
    const auto g0 = metric_on_orbit(sys, frame.x, frame.blocks, epsilon, options).exterior(k);
    const Matrix source = spd_inverse_sqrt(g0.entries);

    GrowthRatio out;
    const auto d = binomial(n, k);
    Matrix c = Matrix::Identity(d, d);
    long long scale = 0;
    for (long long t = 0; t <= n_max; ++t) {
        if (t > 0) {
            c = compound(fr.forward_jacobian(t - 1), k) * c;
            const int e = std::ilogb(c.cwiseAbs().maxCoeff());
            c *= std::ldexp(1.0, -e);
            scale += e;
        }
        const Matrix target = t == 0 ? spd_sqrt(g0.entries)
                                     : spd_sqrt(metric_on_orbit(sys, fr.point(t), frame.blocks, epsilon, options)
                                                    .exterior(k)
                                                    .entries);
        const double log_norm = std::log(operator_norm(target * c * source)) +
                                static_cast<double>(scale) * std::numbers::ln2;
        const double log_ratio = log_norm - static_cast<double>(t) * (lambda_k + k * epsilon);
        out.ratios.push_back(std::exp(log_ratio));
    }
    const auto mx = std::max_element(out.ratios.begin(), out.ratios.end());
    out.max_ratio = *mx;
    out.argmax = mx - out.ratios.begin();
    if (out.ratios.size() > 1) {
        const auto count = static_cast<double>(out.ratios.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t t = 0; t < out.ratios.size(); ++t) {
            const double x = static_cast<double>(t);
            const double y = std::log(out.ratios[t]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        out.log_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    }
    return out;
}

}  // namespace toruslab
