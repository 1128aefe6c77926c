#include "toruslab/verify.hpp"

#include "toruslab/cocycle.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/hodge_torus.hpp"
#include "toruslab/lyapunov_metric.hpp"
#include "toruslab/parallel.hpp"
#include "toruslab/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

namespace toruslab {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t sub_seed(std::uint64_t seed, const std::string& tag) {
    return fnv1a(std::to_string(seed) + ":" + tag);
}

int severity(Verdict v) {
    switch (v) {
        case Verdict::holds: return 0;
        case Verdict::holds_within_tolerance: return 1;
        case Verdict::not_evaluated: return 2;
        case Verdict::hypothesis_failed: return 3;
        case Verdict::violated: return 4;
        case Verdict::failed: return 5;
    }
    return 5;
}

Verdict worst(Verdict a, Verdict b) { return severity(a) >= severity(b) ? a : b; }

std::string format_number(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

nlohmann::ordered_json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round12(x);
}

struct OrbitStats {
    double max = 0.0;
    double min = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
};

OrbitStats stats(const std::vector<double>& v) {
    OrbitStats s;
    if (v.empty()) return s;
    s.max = *std::max_element(v.begin(), v.end());
    s.min = *std::min_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double var = 0.0;
        for (double x : v) var += (x - s.mean) * (x - s.mean);
        s.std_error = std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return s;
}

// Measurements shared between claims, each computed on first use.
class Workbench {
public:
    Workbench(const TorusSystem& sys, const RunParams& params) : sys_(sys), params_(params) {}

    const TorusSystem& sys() const { return sys_; }
    const RunParams& params() const { return params_; }
    int dim() const { return sys_.dim(); }

    const std::vector<HomologyAction>& cohomology() {
        if (!cohomology_) {
            std::vector<HomologyAction> out;
            for (int k = 0; k <= dim(); ++k) out.push_back(cohomology_action(sys_, k));
            cohomology_ = std::move(out);
        }
        return *cohomology_;
    }

    double log_spectral_radius() { return std::log(total_spectral_radius(sys_).radius); }

    const std::vector<UniformExponent>& sup_exponents() {
        if (!sup_)
            sup_ = uniform_exponents(sys_, params_.sup_ensemble, params_.sup_horizon, sub_seed(params_.seed, "sup"));
        return *sup_;
    }

    const std::vector<UniformExponent>& long_exponents() {
        if (!long_)
            long_ = uniform_exponents(sys_, params_.ensemble, params_.steps, sub_seed(params_.seed, "long"));
        return *long_;
    }

    const std::vector<LyapunovSpectrum>& spectra() {
        if (!spectra_) {
            std::vector<LyapunovSpectrum> out(params_.ensemble);
            const auto seed = sub_seed(params_.seed, "orbits");
            parallel_for(params_.ensemble, [&](std::size_t i) {
                SplitRng rng(seed, i);
                out[i] = qr_spectrum(sys_, rng.point(dim()), params_.steps, params_.transient);
            });
            spectra_ = std::move(out);
        }
        return *spectra_;
    }

    // Many short orbits: they find invariant components of small volume that
    // the long ensemble misses.
    const std::vector<LyapunovSpectrum>& wide_spectra() {
        if (!wide_) {
            std::vector<LyapunovSpectrum> out(params_.wide_ensemble);
            const auto seed = sub_seed(params_.seed, "wide");
            parallel_for(params_.wide_ensemble, [&](std::size_t i) {
                SplitRng rng(seed, i);
                out[i] = qr_spectrum(sys_, rng.point(dim()), params_.wide_steps, std::min<long long>(params_.transient, 100));
            });
            wide_ = std::move(out);
        }
        return *wide_;
    }

    // L^inf estimate of an orbit functional over both ensembles. The error is
    // the larger of the long ensemble's spread error and the convergence
    // halfwidth of the orbit attaining the max.
    std::pair<double, double> essential_max(const std::function<double(const LyapunovSpectrum&)>& value,
                                            const std::function<double(const LyapunovSpectrum&)>& halfwidth) {
        std::vector<double> v;
        double best = -INFINITY, best_hw = 0.0, hw = 0.0;
        for (const auto& s : spectra()) {
            v.push_back(value(s));
            hw = std::max(hw, halfwidth(s));
            if (v.back() > best) {
                best = v.back();
                best_hw = halfwidth(s);
            }
        }
        for (const auto& s : wide_spectra()) {
            if (value(s) > best) {
                best = value(s);
                best_hw = halfwidth(s);
            }
        }
        return {best, std::max({stats(v).std_error, hw, best_hw})};
    }

    // Lambda_k estimate: the top-k partial sum.
    std::pair<double, double> top_sum(int k) {
        return essential_max([k](const LyapunovSpectrum& s) { return s.top_sum(k); },
                             [k](const LyapunovSpectrum& s) {
                                 double h = 0.0;
                                 for (int i = 0; i < k; ++i) h += s.halfwidths[static_cast<std::size_t>(i)];
                                 return h;
                             });
    }

    static double sigma_halfwidth(const LyapunovSpectrum& s) {
        double h = 0.0;
        for (std::size_t i = 0; i < s.exponents.size(); ++i)
            if (s.exponents[i] > 0.0) h += s.halfwidths[i];
        return h;
    }

    std::pair<double, double> sigma_max() {
        return essential_max([](const LyapunovSpectrum& s) { return s.sigma_plus; }, sigma_halfwidth);
    }

    // Sum of positive exponents over the long ensemble, with its error estimate.
    std::pair<OrbitStats, double> sigma() {
        std::vector<double> v;
        double hw = 0.0;
        for (const auto& s : spectra()) {
            v.push_back(s.sigma_plus);
            hw = std::max(hw, sigma_halfwidth(s));
        }
        const auto st = stats(v);
        return {st, std::max(st.std_error, hw)};
    }

    // Exponent i over the ensemble, with its error estimate.
    std::pair<OrbitStats, double> exponent(int i) {
        std::vector<double> v;
        double hw = 0.0;
        for (const auto& s : spectra()) {
            v.push_back(s.exponents[static_cast<std::size_t>(i)]);
            hw = std::max(hw, s.halfwidths[static_cast<std::size_t>(i)]);
        }
        const auto st = stats(v);
        return {st, std::max(st.std_error, hw)};
    }

    // Metric integrability at p = k/2, k = 1..dim.
    const LpEstimate& lp(int k) {
        if (!lp_) {
            LpOptions opts;
            opts.spectrum = spectra().front();
            opts.metric.n_probe = params_.n_probe;
            std::vector<double> ps;
            for (int j = 1; j <= dim(); ++j) ps.push_back(0.5 * j);
            lp_ = lp_estimates(sys_, params_.epsilon, ps, params_.metric_samples, sub_seed(params_.seed, "metric"),
                               opts);
        }
        return (*lp_)[static_cast<std::size_t>(k - 1)];
    }

    const GrowthEstimate& volume(int k, long long n) {
        auto it = volume_.find({k, n});
        if (it == volume_.end()) {
            it = volume_.emplace(std::make_pair(k, n),
                                 volume_growth(sys_, k, n, params_.samples, sub_seed(params_.seed, "volume")))
                     .first;
        }
        return it->second;
    }

    const GrowthEstimate& entropy(long long n) {
        auto it = entropy_.find(n);
        if (it == entropy_.end())
            it = entropy_.emplace(n, entropy_estimate(sys_, n, params_.samples, sub_seed(params_.seed, "entropy")))
                     .first;
        return it->second;
    }

private:
    const TorusSystem& sys_;
    RunParams params_;
    std::optional<std::vector<HomologyAction>> cohomology_;
    std::optional<std::vector<UniformExponent>> sup_;
    std::optional<std::vector<UniformExponent>> long_;
    std::optional<std::vector<LyapunovSpectrum>> spectra_;
    std::optional<std::vector<LyapunovSpectrum>> wide_;
    std::optional<std::vector<LpEstimate>> lp_;
    std::map<std::pair<int, long long>, GrowthEstimate> volume_;
    std::map<long long, GrowthEstimate> entropy_;
};

ReportRow failed_row(const std::string& claim, int k, const std::string& what) {
    ReportRow r;
    r.claim = claim;
    r.k = k;
    r.lhs_kind = "error";
    r.lhs = std::nan("");
    r.bound = std::nan("");
    r.slack = std::nan("");
    r.bound_kind = "error";
    r.verdict = Verdict::failed;
    r.note = what;
    return r;
}

void finish(ClaimResult& c) {
    c.verdict = Verdict::holds;
    for (const auto& r : c.rows) c.verdict = worst(c.verdict, r.verdict);
}

// Runs `body`; a module error becomes a FAILED row instead of aborting.
ClaimResult run_claim(const std::string& name, const std::function<void(ClaimResult&)>& body) {
    ClaimResult c;
    c.name = name;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.rows.push_back(failed_row(name, -1, e.what()));
    }
    finish(c);
    return c;
}

double max_re(const HomologyAction& h) {
    double m = -INFINITY;
    for (const auto& e : h.eigen) m = std::max(m, e.exponent.real());
    return m;
}

ClaimResult theorem_a(Workbench& w) {
    return run_claim("theorem_a", [&](ClaimResult& c) {
        const auto& sup = w.sup_exponents();
        auto diag = nlohmann::ordered_json::array();
        for (int k = 0; k <= w.dim(); ++k) {
            const auto& u = sup[static_cast<std::size_t>(k)];
            for (const auto& e : w.cohomology()[static_cast<std::size_t>(k)].eigen) {
                c.rows.push_back(
                    make_row("theorem_a", k, "re_lambda", e.exponent.real(), "ensemble_sup_exponent", u.value, 0.0));
            }
            nlohmann::ordered_json d;
            d["k"] = k;
            d["sup_horizon_value"] = num(u.value);
            d["sup_horizon_spread"] = num(u.spread);
            d["long_horizon_value"] = num(w.long_exponents()[static_cast<std::size_t>(k)].value);
            d["long_horizon_spread"] = num(w.long_exponents()[static_cast<std::size_t>(k)].spread);
            diag.push_back(d);
        }
        c.diagnostics["exponents"] = diag;
    });
}

ClaimResult corollary_a(Workbench& w) {
    return run_claim("corollary_a", [&](ClaimResult& c) {
        const double tol = w.params().subexp_tol;
        bool hypothesis = true;
        for (int k = 1; k <= w.dim(); ++k) {
            auto r = make_row("corollary_a_hypothesis", k, "long_horizon_exponent",
                              w.long_exponents()[static_cast<std::size_t>(k)].value, "subexponential_tolerance", tol,
                              0.0);
            if (r.lhs > tol) {
                r.verdict = Verdict::hypothesis_failed;
                r.note = "not uniformly subexponential";
                hypothesis = false;
            } else {
                r.verdict = Verdict::holds;
            }
            c.rows.push_back(std::move(r));
        }
        auto r = make_row("corollary_a", -1, "abs_log_spectral_radius", std::abs(w.log_spectral_radius()),
                          "exact_tolerance", 1e-9, 0.0);
        if (!hypothesis) {
            r.verdict = Verdict::not_evaluated;
            r.note = "hypothesis failed";
        } else {
            r.verdict = r.lhs <= 1e-9 ? Verdict::holds : Verdict::violated;
        }
        c.rows.push_back(std::move(r));
    });
}

ClaimResult corollary_b(Workbench& w) {
    return run_claim("corollary_b", [&](ClaimResult& c) {
        double sup = 0.0;
        for (const auto& u : w.sup_exponents()) sup = std::max(sup, u.value);
        c.rows.push_back(
            make_row("corollary_b", -1, "log_spectral_radius", w.log_spectral_radius(), "ensemble_sup_sigma", sup, 0.0));
        const auto [sig, err] = w.sigma();
        c.diagnostics["lebesgue_sigma_mean"] = num(sig.mean);
        c.diagnostics["lebesgue_sigma_max"] = num(sig.max);
        c.diagnostics["lebesgue_sigma_std_error"] = num(err);
    });
}

ClaimResult corollary_c(Workbench& w) {
    return run_claim("corollary_c", [&](ClaimResult& c) {
        const double lsp = w.log_spectral_radius();
        if (!(lsp > 1e-12)) {
            c.diagnostics["note"] = "log sp = 0: positivity clause is vacuous";
            return;
        }
        const auto [top, top_err] = w.exponent(0);
        c.rows.push_back(make_row("corollary_c", 1, "three_std_error", 3.0 * top_err, "ensemble_max_lambda_1",
                                  top.max, 0.0));
        const auto [bottom, bottom_err] = w.exponent(w.dim() - 1);
        c.rows.push_back(make_row("corollary_c", w.dim(), "ensemble_min_lambda_n", bottom.min,
                                  "minus_three_std_error", -3.0 * bottom_err, 0.0));
    });
}

// Hypothesis row for integrability of the Lyapunov metric at p = k/2.
// Returns whether the hypothesis is indicated.
bool metric_hypothesis(Workbench& w, ClaimResult& c, const std::string& claim, int k) {
    const LpEstimate* found = nullptr;
    try {
        found = &w.lp(k);
    } catch (const DegenerateSplittingError& e) {
        // No splitting, no metric: every sample counts as excluded.
        auto r = make_row(claim + "_hypothesis", k, "excluded_metric_samples",
                          static_cast<double>(w.params().metric_samples), "max_excluded", 0.0, 0.0);
        r.verdict = Verdict::hypothesis_failed;
        r.note = std::string("no Lyapunov metric: ") + e.what();
        c.rows.push_back(std::move(r));
        return false;
    }
    const auto& lp = *found;
    auto r = make_row(claim + "_hypothesis", k, "excluded_metric_samples", static_cast<double>(lp.excluded),
                      "max_excluded", 0.0, 0.0);
    const bool ok = lp.excluded == 0 && std::isfinite(lp.estimate);
    r.verdict = ok ? Verdict::holds : Verdict::hypothesis_failed;
    std::ostringstream note;
    note << "L^" << format_number(0.5 * k) << " estimate " << format_number(round12(lp.estimate)) << " +- "
         << format_number(round12(lp.std_error)) << ", top 1% mass " << format_number(round12(lp.top_mass_fraction));
    if (!lp.is_norm) note << ", non-norm integral";
    if (lp.top_mass_fraction > 0.5) note << ", heavy tail";
    r.note = note.str();
    c.rows.push_back(std::move(r));

    nlohmann::ordered_json d;
    d["k"] = k;
    d["p"] = 0.5 * k;
    d["estimate"] = num(lp.estimate);
    d["std_error"] = num(lp.std_error);
    d["top_mass_fraction"] = num(lp.top_mass_fraction);
    d["used"] = lp.used;
    d["excluded"] = lp.excluded;
    d["max_truncation"] = lp.max_truncation;
    if (!c.diagnostics.contains("metric")) c.diagnostics["metric"] = nlohmann::ordered_json::array();
    c.diagnostics["metric"].push_back(d);
    return ok;
}

ClaimResult theorem_b(Workbench& w) {
    return run_claim("theorem_b", [&](ClaimResult& c) {
        const double eps = w.params().epsilon;
        for (int k = 1; k <= w.dim(); ++k) {
            const bool hypothesis = metric_hypothesis(w, c, "theorem_b", k);
            const auto [lambda_k, lambda_err] = w.top_sum(k);
            const double bound = lambda_k + k * eps;
            const auto& h = w.cohomology()[static_cast<std::size_t>(k)];
            for (const auto& e : h.eigen) {
                auto r = make_row("theorem_b", k, "re_lambda", e.exponent.real(), "lambda_k_plus_k_epsilon", bound,
                                  lambda_err);
                if (!hypothesis) {
                    r.verdict = Verdict::not_evaluated;
                    r.note = "hypothesis failed";
                }
                c.rows.push_back(std::move(r));
            }
            // Short horizon for the lower side: the sample mean of e^{n X}
            // underestimates at long horizons. Long horizon for the upper side,
            // with the drift from half the horizon counted as error.
            const auto& short_vg = w.volume(k, w.params().growth_n);
            c.rows.push_back(make_row("theorem_b_volume_growth", k, "max_re_lambda", max_re(h), "volume_growth",
                                      short_vg.value, short_vg.std_error));
            const long long n = w.params().growth_long_n;
            const auto& vg = w.volume(k, n);
            const double drift = std::abs(vg.value - w.volume(k, n / 2).value);
            c.rows.push_back(make_row("theorem_b_volume_growth", k, "volume_growth", vg.value,
                                      "lambda_k_plus_k_epsilon", bound,
                                      std::sqrt(vg.std_error * vg.std_error + drift * drift + lambda_err * lambda_err)));
            nlohmann::ordered_json d;
            d["k"] = k;
            d["volume_growth_short"] = num(short_vg.value);
            d["volume_growth"] = num(vg.value);
            d["volume_growth_half_horizon"] = num(w.volume(k, n / 2).value);
            d["lambda_k"] = num(lambda_k);
            d["lambda_k_std_error"] = num(lambda_err);
            if (!c.diagnostics.contains("growth")) c.diagnostics["growth"] = nlohmann::ordered_json::array();
            c.diagnostics["growth"].push_back(d);
        }
    });
}

ClaimResult corollary_d(Workbench& w) {
    return run_claim("corollary_d", [&](ClaimResult& c) {
        const int n = w.dim();
        const bool hypothesis = metric_hypothesis(w, c, "corollary_d", n);
        const auto [sig, err] = w.sigma_max();
        const double bound = sig + n * w.params().epsilon;
        for (int k = 0; k <= n; ++k) {
            for (const auto& e : w.cohomology()[static_cast<std::size_t>(k)].eigen) {
                auto r = make_row("corollary_d", k, "re_lambda", e.exponent.real(), "sigma_plus_dim_epsilon", bound,
                                  err);
                if (!hypothesis) {
                    r.verdict = Verdict::not_evaluated;
                    r.note = "hypothesis failed";
                }
                c.rows.push_back(std::move(r));
            }
        }
    });
}

ClaimResult corollary_f(Workbench& w) {
    return run_claim("corollary_f", [&](ClaimResult& c) {
        // Ergodicity indicator: orbits of one ergodic volume share their
        // exponents, so the intervals sigma_i +- halfwidth_i must overlap.
        std::vector<double> wide;
        double lower = -INFINITY, upper = INFINITY;
        for (const auto& s : w.wide_spectra()) {
            wide.push_back(s.sigma_plus);
            const double hw = Workbench::sigma_halfwidth(s);
            lower = std::max(lower, s.sigma_plus - hw);
            upper = std::min(upper, s.sigma_plus + hw);
        }
        const auto spread = stats(wide);
        auto erg = make_row("corollary_f_hypothesis", -1, "wide_ensemble_sigma_separation", lower - upper,
                            "ergodicity_threshold", 0.01 + 0.05 * std::abs(spread.max), 0.0);
        const bool ergodic = erg.slack >= 0.0;
        erg.verdict = ergodic ? Verdict::holds : Verdict::hypothesis_failed;
        if (!ergodic) erg.note = "orbits disagree: volume is not ergodic";
        c.rows.push_back(std::move(erg));
        const bool integrable = metric_hypothesis(w, c, "corollary_f", w.dim());

        const long long n = w.params().growth_long_n;
        const auto& h = w.entropy(n);
        const auto& h_half = w.entropy(n / 2);
        const double drift = std::abs(h.value - h_half.value);
        const auto [sig, sig_err] = w.sigma();
        const double err = std::sqrt(h.std_error * h.std_error + drift * drift + sig_err * sig_err);
        const double extra = 0.05 * std::abs(sig.mean);
        for (auto r : {make_row("corollary_f", -1, "entropy", h.value, "lebesgue_sigma", sig.mean, err, extra),
                       make_row("corollary_f", -1, "lebesgue_sigma", sig.mean, "entropy", h.value, err, extra)}) {
            if (!ergodic || !integrable) {
                r.verdict = Verdict::not_evaluated;
                r.note = "hypothesis failed";
            }
            c.rows.push_back(std::move(r));
        }
        c.diagnostics["entropy"] = num(h.value);
        c.diagnostics["entropy_std_error"] = num(h.std_error);
        c.diagnostics["entropy_half_horizon"] = num(h_half.value);
        c.diagnostics["horizon_drift"] = num(drift);
        c.diagnostics["sigma_std_error"] = num(sig_err);
        c.diagnostics["wide_sigma_min"] = num(spread.min);
        c.diagnostics["wide_sigma_max"] = num(spread.max);
    });
}

VerificationReport new_report(const TorusSystem& sys, const RunParams& params) {
    if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) throw InputError("epsilon must be positive");
    if (params.steps < 1000) throw InputError("steps must be at least 1000");
    if (params.samples < 1 || params.ensemble < 1 || params.sup_ensemble < 1 || params.metric_samples < 1)
        throw InputError("sample and ensemble sizes must be positive");
    if (params.sup_horizon < 1 || params.growth_n < 1 || params.growth_long_n < 2)
        throw InputError("horizons must be positive");
    if (params.wide_ensemble < 1 || params.wide_steps < 1000) throw InputError("wide ensemble needs orbits of >= 1000 steps");
    VerificationReport r;
    r.system_name = sys.name();
    r.system_spec = sys.to_json();
    r.params = params;
    return r;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::holds: return "HOLDS";
        case Verdict::holds_within_tolerance: return "HOLDS-WITHIN-TOLERANCE";
        case Verdict::not_evaluated: return "NOT-EVALUATED";
        case Verdict::hypothesis_failed: return "HYPOTHESIS-FAILED";
        case Verdict::violated: return "VIOLATED";
        case Verdict::failed: return "FAILED";
    }
    return "FAILED";
}

double round12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

nlohmann::ordered_json RunParams::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["steps"] = steps;
    j["transient"] = transient;
    j["samples"] = samples;
    j["epsilon"] = round12(epsilon);
    j["ensemble"] = ensemble;
    j["wide_ensemble"] = wide_ensemble;
    j["wide_steps"] = wide_steps;
    j["sup_ensemble"] = sup_ensemble;
    j["sup_horizon"] = sup_horizon;
    j["growth_n"] = growth_n;
    j["growth_long_n"] = growth_long_n;
    j["metric_samples"] = metric_samples;
    j["n_probe"] = n_probe;
    j["subexp_tol"] = round12(subexp_tol);
    return j;
}

ReportRow make_row(std::string claim, int k, std::string lhs_kind, double lhs, std::string bound_kind, double bound,
                   double std_error, double extra_tolerance) {
    ReportRow r;
    r.claim = std::move(claim);
    r.k = k;
    r.lhs_kind = std::move(lhs_kind);
    r.bound_kind = std::move(bound_kind);
    r.lhs = round12(lhs);
    r.bound = round12(bound);
    r.std_error = round12(std_error);
    r.slack = round12(r.bound - r.lhs);
    r.tolerance = round12(3.0 * r.std_error + 1e-3 + extra_tolerance);
    if (!std::isfinite(r.slack) || !std::isfinite(r.tolerance)) {
        r.verdict = Verdict::failed;
        r.note = "non-finite estimate";
    } else if (r.slack >= 0.0) {
        r.verdict = Verdict::holds;
    } else if (r.slack >= -r.tolerance) {
        r.verdict = Verdict::holds_within_tolerance;
    } else {
        r.verdict = Verdict::violated;
    }
    return r;
}

std::string VerificationReport::config_hash() const {
    const auto h = fnv1a(params.to_json().dump(), fnv1a(system_spec.dump()));
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::ordered_json VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["system"]["name"] = system_name;
    j["system"]["spec"] = system_spec;
    j["system"]["config_hash"] = config_hash();
    auto claims_json = nlohmann::ordered_json::array();
    for (const auto& c : claims) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["verdict"] = verdict_name(c.verdict);
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : c.rows) {
            nlohmann::ordered_json rj;
            rj["claim"] = r.claim;
            rj["k"] = r.k;
            rj["lhs_kind"] = r.lhs_kind;
            rj["lhs"] = num(r.lhs);
            rj["bound_kind"] = r.bound_kind;
            rj["bound"] = num(r.bound);
            rj["slack"] = num(r.slack);
            rj["std_error"] = num(r.std_error);
            rj["tolerance"] = num(r.tolerance);
            rj["verdict"] = verdict_name(r.verdict);
            rj["note"] = r.note;
            rows.push_back(rj);
        }
        cj["rows"] = rows;
        cj["diagnostics"] = c.diagnostics;
        claims_json.push_back(cj);
    }
    j["claims"] = claims_json;
    j["provenance"] = params.to_json();
    j["metadata"]["eigenvalues"] = "cohomology; homology has the same spectrum by universal coefficients";
    j["metadata"]["tolerance"] = "3 * std_error + 0.001";
    j["exit_code"] = exit_code();
    return j;
}

std::string VerificationReport::to_csv() const {
    std::ostringstream out;
    out << "system,claim,row_claim,k,lhs_kind,lhs,bound_kind,bound,slack,std_error,tolerance,verdict\n";
    for (const auto& c : claims) {
        for (const auto& r : c.rows) {
            out << system_name << ',' << c.name << ',' << r.claim << ',' << r.k << ',' << r.lhs_kind << ','
                << format_number(r.lhs) << ',' << r.bound_kind << ',' << format_number(r.bound) << ','
                << format_number(r.slack) << ',' << format_number(r.std_error) << ','
                << format_number(r.tolerance) << ',' << verdict_name(r.verdict) << '\n';
        }
    }
    return out.str();
}

int VerificationReport::exit_code() const {
    bool hypothesis = false;
    for (const auto& c : claims) {
        for (const auto& r : c.rows) {
            if (r.verdict == Verdict::violated || r.verdict == Verdict::failed) return 2;
            if (r.verdict == Verdict::hypothesis_failed) hypothesis = true;
        }
    }
    return hypothesis ? 3 : 0;
}

VerificationReport check_theorem_a(const TorusSystem& sys, const RunParams& params) {
    return run_verification(sys, params, "a");
}

VerificationReport check_corollary_a(const TorusSystem& sys, const RunParams& params) {
    return run_verification(sys, params, "ca");
}

VerificationReport check_corollaries_bc(const TorusSystem& sys, const RunParams& params) {
    return run_verification(sys, params, "bc");
}

VerificationReport check_theorem_b(const TorusSystem& sys, const RunParams& params) {
    return run_verification(sys, params, "b");
}

VerificationReport check_corollary_d(const TorusSystem& sys, const RunParams& params) {
    return run_verification(sys, params, "d");
}

VerificationReport check_corollary_f(const TorusSystem& sys, const RunParams& params) {
    return run_verification(sys, params, "f");
}

VerificationReport run_verification(const TorusSystem& sys, const RunParams& params, const std::string& which) {
    using Check = ClaimResult (*)(Workbench&);
    static const std::map<std::string, std::vector<Check>> plans = {
        {"a", {theorem_a}},
        {"ca", {corollary_a}},
        {"bc", {corollary_b, corollary_c}},
        {"b", {theorem_b, corollary_d}},
        {"d", {corollary_d}},
        {"f", {corollary_f}},
        {"all", {theorem_a, corollary_a, corollary_b, corollary_c, theorem_b, corollary_d, corollary_f}},
    };
    const auto it = plans.find(which);
    if (it == plans.end()) throw InputError("unknown claim set '" + which + "' (expected a, b, bc, d, f, ca or all)");
    auto report = new_report(sys, params);
    Workbench bench(sys, params);
    for (const auto check : it->second) report.claims.push_back(check(bench));
    return report;
}

}  // namespace toruslab
