#include "toruslab/hodge_torus.hpp"

#include "toruslab/cocycle.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/parallel.hpp"
#include "toruslab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace toruslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase_of(const std::vector<int>& m, std::span<const double> x) {
    double dot = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) dot += m[i] * x[i];
    return kTwoPi * dot;
}

// Estimate of mean and log-mean-exp from per-sample logs.
GrowthEstimate log_mean_exp(std::vector<double> logs, long long n) {
    GrowthEstimate g;
    const double top = *std::max_element(logs.begin(), logs.end());
    const auto count = static_cast<double>(logs.size());
    double mean = 0.0;
    for (double l : logs) mean += std::exp(l - top);
    mean /= count;
    double var = 0.0;
    for (double l : logs) {
        const double d = std::exp(l - top) - mean;
        var += d * d;
    }
    var = logs.size() > 1 ? var / (count - 1.0) : 0.0;
    g.value = (top + std::log(mean)) / static_cast<double>(n);
    g.std_error = std::sqrt(var / count) / mean / static_cast<double>(n);
    g.log_norms = std::move(logs);
    return g;
}

std::vector<TorusPoint> uniform_points(int dim, std::size_t count, std::uint64_t seed) {
    std::vector<TorusPoint> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SplitRng rng(seed, i);
        pts.push_back(rng.point(dim));
    }
    return pts;
}

}  // namespace

double TrigPoly::eval(std::span<const double> x) const {
    double v = constant;
    for (const auto& mode : modes) {
        const double arg = phase_of(mode.m, x);
        if (mode.cos != 0.0) v += mode.cos * std::cos(arg);
        if (mode.sin != 0.0) v += mode.sin * std::sin(arg);
    }
    return v;
}

TrigPoly TrigPoly::derivative(int j) const {
    TrigPoly out;
    for (const auto& mode : modes) {
        const int mj = mode.m.at(static_cast<std::size_t>(j));
        if (mj == 0) continue;
        const double w = kTwoPi * mj;
        out.modes.push_back({mode.m, w * mode.sin, -w * mode.cos});
    }
    return out;
}

int TrigPoly::max_frequency() const {
    int f = 0;
    for (const auto& mode : modes)
        for (int v : mode.m) f = std::max(f, std::abs(v));
    return f;
}

KForm::KForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1) throw InputError("form dimension must be positive");
    if (degree < 0 || degree > dim) throw InputError("form degree outside [0, dim]");
    coeffs_.resize(static_cast<std::size_t>(binomial(dim, degree)));
}

KForm KForm::constant(int dim, int degree, const Vector& coefficients) {
    KForm f(dim, degree);
    if (coefficients.size() != static_cast<Eigen::Index>(f.coeffs_.size())) {
        throw InputError("constant form needs C(n, k) coefficients");
    }
    for (std::size_t i = 0; i < f.coeffs_.size(); ++i) f.coeffs_[i].constant = coefficients(static_cast<Eigen::Index>(i));
    return f;
}

TrigPoly& KForm::coefficient(const MultiIndex& index) {
    if (static_cast<int>(index.size()) != degree_) throw InputError("multi-index length differs from the degree");
    return coeffs_[static_cast<std::size_t>(multi_index_position(dim_, index))];
}

KForm KForm::from_json(const nlohmann::json& j, int dim) {
    if (!j.is_object() || !j.contains("degree") || !j.at("degree").is_number_integer()) {
        throw ValidationError("form needs an integer field 'degree'");
    }
    const int k = j.at("degree").get<int>();
    if (k < 0 || k > dim) throw ValidationError("field 'degree' outside [0, " + std::to_string(dim) + "]");
    KForm f(dim, k);
    if (!j.contains("terms")) return f;
    const auto& terms = j.at("terms");
    if (!terms.is_array()) throw ValidationError("field 'terms' must be an array");
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string where = "terms[" + std::to_string(t) + "]";
        const auto& term = terms[t];
        if (!term.is_object() || !term.contains("index") || !term.at("index").is_array()) {
            throw ValidationError("field '" + where + ".index' must be an array");
        }
        MultiIndex idx;
        for (const auto& v : term.at("index")) {
            if (!v.is_number_integer()) throw ValidationError("field '" + where + ".index' must hold integers");
            idx.push_back(v.get<int>());
        }
        TrigPoly* c = nullptr;
        try {
            c = &f.coefficient(idx);
        } catch (const InputError&) {
            throw ValidationError("field '" + where + ".index' is not an increasing " + std::to_string(k) +
                                  "-tuple in [0, " + std::to_string(dim) + ")");
        }
        if (term.contains("const")) {
            if (!term.at("const").is_number()) throw ValidationError("field '" + where + ".const' must be a number");
            c->constant += term.at("const").get<double>();
        }
        if (!term.contains("modes")) continue;
        const auto& modes = term.at("modes");
        if (!modes.is_array()) throw ValidationError("field '" + where + ".modes' must be an array");
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const std::string mw = where + ".modes[" + std::to_string(m) + "]";
            const auto& e = modes[m];
            if (!e.is_object() || !e.contains("m") || !e.at("m").is_array() ||
                static_cast<int>(e.at("m").size()) != dim) {
                throw ValidationError("field '" + mw + ".m' must be an integer vector of length " +
                                      std::to_string(dim));
            }
            TrigMode mode;
            for (const auto& v : e.at("m")) {
                if (!v.is_number_integer()) throw ValidationError("field '" + mw + ".m' must hold integers");
                mode.m.push_back(v.get<int>());
            }
            for (const char* key : {"cos", "sin"}) {
                if (!e.contains(key)) continue;
                if (!e.at(key).is_number()) throw ValidationError("field '" + mw + "." + key + "' must be a number");
                (std::string(key) == "cos" ? mode.cos : mode.sin) = e.at(key).get<double>();
            }
            c->modes.push_back(std::move(mode));
        }
    }
    return f;
}

Vector KForm::eval(const TorusPoint& x) const {
    if (x.dim() != dim_) throw InputError("form evaluated at a point of the wrong dimension");
    Vector v(static_cast<Eigen::Index>(coeffs_.size()));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) v(static_cast<Eigen::Index>(i)) = coeffs_[i].eval(x.coords());
    return v;
}

Vector KForm::harmonic_part() const {
    Vector v(static_cast<Eigen::Index>(coeffs_.size()));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        double c = coeffs_[i].constant;
        for (const auto& mode : coeffs_[i].modes)
            if (std::all_of(mode.m.begin(), mode.m.end(), [](int v) { return v == 0; })) c += mode.cos;
        v(static_cast<Eigen::Index>(i)) = c;
    }
    return v;
}

KForm KForm::exterior_derivative() const {
    if (degree_ == dim_) return KForm(dim_, dim_);
    KForm out(dim_, degree_ + 1);
    const auto idx = multi_indices(dim_, degree_);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        for (int j = 0; j < dim_; ++j) {
            const auto& I = idx[p];
            if (std::find(I.begin(), I.end(), j) != I.end()) continue;
            // dx_j ^ dx_I = (-1)^{#{i in I : i < j}} dx_{sorted(j, I)}
            int before = 0;
            for (int i : I)
                if (i < j) ++before;
            const double sign = before % 2 == 0 ? 1.0 : -1.0;
            MultiIndex J = I;
            J.insert(J.begin() + before, j);
            TrigPoly term = coeffs_[p].derivative(j);
            auto& target = out.coefficient(J);
            for (auto& mode : term.modes) {
                mode.cos *= sign;
                mode.sin *= sign;
                target.modes.push_back(std::move(mode));
            }
        }
    }
    return out;
}

int KForm::max_frequency() const {
    int f = 0;
    for (const auto& c : coeffs_) f = std::max(f, c.max_frequency());
    return f;
}

nlohmann::ordered_json KForm::to_json() const {
    nlohmann::ordered_json j;
    j["degree"] = degree_;
    auto terms = nlohmann::ordered_json::array();
    const auto idx = multi_indices(dim_, degree_);
    for (std::size_t p = 0; p < idx.size(); ++p) {
        const auto& c = coeffs_[p];
        if (c.constant == 0.0 && c.modes.empty()) continue;
        nlohmann::ordered_json t;
        t["index"] = idx[p];
        t["const"] = c.constant;
        auto modes = nlohmann::ordered_json::array();
        for (const auto& m : c.modes) modes.push_back({{"m", m.m}, {"cos", m.cos}, {"sin", m.sin}});
        t["modes"] = modes;
        terms.push_back(t);
    }
    j["terms"] = terms;
    return j;
}

Vector pullback_at(const TorusSystem& sys, const KForm& form, const TorusPoint& x) {
    if (form.dim() != sys.dim()) throw InputError("form and system dimensions differ");
    const Step s = sys.advance(x, Direction::forward);
    return compound(s.jacobian, form.degree()).transpose() * form.eval(s.next);
}

CVector pullback_constant(const TorusSystem& sys, const CVector& omega, int degree, const TorusPoint& x,
                          long long n) {
    if (n < 0) throw InputError("pullback_constant needs n >= 0");
    if (omega.size() != binomial(sys.dim(), degree)) throw InputError("coefficient vector has the wrong length");
    const Matrix c = compound(cocycle_product(sys, x, n), degree);
    return c.transpose().cast<std::complex<double>>() * omega;
}

ProjectionEstimate harmonic_projection_grid(const FormSampler& sampler, int dim, int order) {
    if (order < 1) throw InputError("grid order must be positive");
    if (dim < 1) throw InputError("dimension must be positive");
    double total = 1.0;
    for (int i = 0; i < dim; ++i) total *= order;
    if (total > 1e8) throw InputError("quadrature grid too large");
    const auto count = static_cast<std::size_t>(total);
    // Sum rows of the grid separately so the reduction order is fixed.
    const auto rows = static_cast<std::size_t>(order);
    const std::size_t per_row = count / rows;
    std::vector<Vector> partial(rows);
    parallel_for(rows, [&](std::size_t r) {
        std::vector<double> c(static_cast<std::size_t>(dim));
        Vector acc;
        for (std::size_t i = 0; i < per_row; ++i) {
            std::size_t rem = i;
            c[0] = static_cast<double>(r) / order;
            for (int d = 1; d < dim; ++d) {
                c[static_cast<std::size_t>(d)] = static_cast<double>(rem % rows) / order;
                rem /= rows;
            }
            const Vector v = sampler(TorusPoint(c));
            if (acc.size() == 0) acc = Vector::Zero(v.size());
            acc += v;
        }
        partial[r] = std::move(acc);
    });
    ProjectionEstimate out;
    out.mean = Vector::Zero(partial[0].size());
    for (const auto& p : partial) out.mean += p;
    out.mean /= total;
    out.std_error = Vector::Zero(out.mean.size());
    out.evaluations = count;
    return out;
}

ProjectionEstimate harmonic_projection_mc(const FormSampler& sampler, int dim, std::size_t n_samples,
                                          std::uint64_t seed) {
    if (n_samples < 100) throw InputError("harmonic projection needs at least 100 samples");
    const auto pts = uniform_points(dim, n_samples, seed);
    std::vector<Vector> vals(n_samples);
    parallel_for(n_samples, [&](std::size_t i) { vals[i] = sampler(pts[i]); });
    ProjectionEstimate out;
    const auto count = static_cast<double>(n_samples);
    out.mean = Vector::Zero(vals[0].size());
    for (const auto& v : vals) out.mean += v;
    out.mean /= count;
    Vector var = Vector::Zero(out.mean.size());
    for (const auto& v : vals) var += (v - out.mean).cwiseAbs2();
    out.std_error = (var / (count - 1.0) / count).cwiseSqrt();
    out.evaluations = n_samples;
    return out;
}

int pullback_grid_order(const TorusSystem& sys) {
    const auto& shears = sys.shears();
    if (shears.empty()) return 1;
    if (shears.size() > 1) return 32;
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> m(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) m(i) = shears[0].frequency[static_cast<std::size_t>(i)];
    const auto freq = (sys.matrix().transpose() * m).cwiseAbs().maxCoeff();
    return static_cast<int>(2 * freq + 1);
}

HomologyAction cohomology_action(const TorusSystem& sys, int k) {
    if (k < 0 || k > sys.dim()) throw InputError("cohomology degree outside [0, dim]");
    HomologyAction h;
    h.degree = k;
    h.matrix = compound(IntMatrix(sys.matrix().transpose()), k);
    const Matrix m = h.matrix.cast<double>();
    const CMatrix mc = m.cast<std::complex<double>>();
    Eigen::EigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw NumericError("cohomology eigen-decomposition failed");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const std::complex<double> mu = es.eigenvalues()(i);
        CVector v = es.eigenvectors().col(i);
        v.normalize();
        double res = (mc * v - mu * v).norm();
        if (!(res <= 1e-9)) {
            Eigen::JacobiSVD<CMatrix> svd(mc - mu * CMatrix::Identity(m.rows(), m.cols()), Eigen::ComputeFullV);
            v = svd.matrixV().col(m.cols() - 1);
            res = (mc * v - mu * v).norm();
        }
        h.eigen.push_back({k, std::log(mu), v, res});
    }
    return h;
}

SpectralRadius total_spectral_radius(const TorusSystem& sys) {
    SpectralRadius best;
    for (int k = 0; k <= sys.dim(); ++k) {
        const double r = spectral_radius(compound(IntMatrix(sys.matrix().transpose()), k).cast<double>());
        if (r > best.radius * (1.0 + 1e-12)) best = {r, k};
    }
    return best;
}

AlphaSequence alpha_sequence(const TorusSystem& sys, const EigenData& eigen, const TorusPoint& x, int n) {
    if (n < 1) throw InputError("alpha_sequence needs n >= 1");
    if (x.dim() != sys.dim()) throw InputError("alpha_sequence: point dimension mismatch");
    const int k = eigen.degree;
    const CVector& omega = eigen.vector;
    if (omega.size() != binomial(sys.dim(), k)) throw InputError("eigenvector length does not match the degree");
    const std::complex<double> lam = eigen.exponent;
    const std::complex<double> mu = std::exp(lam);

    // Orbit cocycle compounds Phi_j = compound(D_x f^j, k) and alpha along the orbit.
    std::vector<Matrix> phi;
    std::vector<CVector> alpha_at;
    phi.push_back(Matrix::Identity(omega.size(), omega.size()));
    // Compounds are multiplied step by step: compound(Phi_n) as the compound
    // of the product loses the small singular directions to cancellation.
    TorusPoint p = x;
    for (int j = 0; j < n; ++j) {
        const Step s = sys.advance(p, Direction::forward);
        const Matrix cj = compound(s.jacobian, k);
        alpha_at.push_back(cj.transpose().cast<std::complex<double>>() * omega - mu * omega);
        phi.push_back(cj * phi.back());
        p = s.next;
    }

    AlphaSequence out;
    CVector sum = CVector::Zero(omega.size());
    for (int m = 1; m <= n; ++m) {
        // (f^{m-1})^* alpha = Phi_{m-1}^T alpha(f^{m-1} x)
        const int j = m - 1;
        const CVector pulled = phi[static_cast<std::size_t>(j)].transpose().cast<std::complex<double>>() *
                               alpha_at[static_cast<std::size_t>(j)];
        sum += std::exp(-static_cast<double>(j) * lam) * pulled;
        out.recursion.push_back(std::exp(static_cast<double>(m - 1) * lam) * sum);
        const CVector full = phi[static_cast<std::size_t>(m)].transpose().cast<std::complex<double>>() * omega;
        const std::complex<double> power = std::exp(static_cast<double>(m) * lam);
        out.direct.push_back(full - power * omega);
        const double scale =
            std::max({1.0, std::abs(power), operator_norm(phi[static_cast<std::size_t>(m)]) * omega.norm()});
        out.discrepancy = std::max(out.discrepancy, (out.recursion.back() - out.direct.back()).norm() / scale);
    }
    if (!(out.discrepancy <= 1e-8)) {
        throw ConsistencyError("alpha recursion disagrees with direct evaluation (relative discrepancy " +
                               std::to_string(out.discrepancy) + ")");
    }
    return out;
}

CVector alpha_harmonic_part(const TorusSystem& sys, const EigenData& eigen) {
    const int k = eigen.degree;
    const std::complex<double> mu = std::exp(eigen.exponent);
    const Vector re = eigen.vector.real();
    const Vector im = eigen.vector.imag();
    auto sampler = [&](const TorusPoint& x) {
        const Matrix c = compound(sys.jacobian(x), k).transpose();
        Vector out(2 * re.size());
        out << c * re, c * im;
        return out;
    };
    const auto p = harmonic_projection_grid(sampler, sys.dim(), pullback_grid_order(sys));
    const Eigen::Index d = re.size();
    CVector pulled(d);
    for (Eigen::Index i = 0; i < d; ++i) pulled(i) = {p.mean(i), p.mean(d + i)};
    return pulled - mu * eigen.vector;
}

GrowthEstimate volume_growth(const TorusSystem& sys, int k, long long n, std::size_t n_samples, std::uint64_t seed) {
    if (n < 1) throw InputError("volume_growth needs n >= 1");
    if (n_samples < 1) throw InputError("volume_growth needs at least one sample");
    if (k < 0 || k > sys.dim()) throw InputError("degree outside [0, dim]");
    const auto pts = uniform_points(sys.dim(), n_samples, seed);
    std::vector<double> logs(n_samples);
    parallel_for(n_samples, [&](std::size_t i) { logs[i] = log_exterior_norms(sys, pts[i], n, {k})[0]; });
    return log_mean_exp(std::move(logs), n);
}

GrowthEstimate entropy_estimate(const TorusSystem& sys, long long n, std::size_t n_samples, std::uint64_t seed) {
    if (n < 1) throw InputError("entropy_estimate needs n >= 1");
    if (n_samples < 1) throw InputError("entropy_estimate needs at least one sample");
    std::vector<int> degrees;
    for (int k = 0; k <= sys.dim(); ++k) degrees.push_back(k);
    const auto pts = uniform_points(sys.dim(), n_samples, seed);
    std::vector<double> logs(n_samples);
    parallel_for(n_samples, [&](std::size_t i) {
        const auto all = log_exterior_norms(sys, pts[i], n, degrees);
        logs[i] = *std::max_element(all.begin(), all.end());
    });
    return log_mean_exp(std::move(logs), n);
}

}  // namespace toruslab
