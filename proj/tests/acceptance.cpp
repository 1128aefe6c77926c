// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "toruslab/catalog.hpp"
#include "toruslab/cli.hpp"
#include "toruslab/cocycle.hpp"
#include "toruslab/hodge_torus.hpp"
#include "toruslab/linalg_ext.hpp"
#include "toruslab/lyapunov_metric.hpp"
#include "toruslab/random.hpp"
#include "toruslab/verify.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace toruslab;

namespace {

const double kGolden2 = (3.0 + std::sqrt(5.0)) / 2.0;
const double kCatExponent = std::log(kGolden2);

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "failed: " + what;
        }
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "toruslab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<TorusSystem> harness_systems() {
    auto systems = catalog_systems();
    for (std::uint64_t s = 0; s < 20; ++s) systems.push_back(random_conservative_system(s));
    return systems;
}

// Rows of a JSON report whose one-sided slack falls below -(3 stderr + 1e-3).
// Hypothesis indicator rows and rows not evaluated are skipped.
std::size_t slack_failures(const nlohmann::json& report, std::size_t& rows, std::size_t& violated) {
    std::size_t bad = 0;
    for (const auto& c : report["claims"]) {
        for (const auto& row : c["rows"]) {
            const std::string v = row["verdict"];
            if (v == "VIOLATED" || v == "FAILED") ++violated;
            if (v == "HYPOTHESIS-FAILED" || v == "NOT-EVALUATED" || v == "FAILED") continue;
            const std::string claim = row["claim"];
            if (claim.size() > 11 && claim.compare(claim.size() - 11, 11, "_hypothesis") == 0) continue;
            ++rows;
            const double slack = row["slack"];
            const double se = row["std_error"];
            if (slack < -(3.0 * se + 1e-3)) ++bad;
        }
    }
    return bad;
}

Outcome criterion_1() {
    Outcome o;
    const auto r = run_cli({"spectrum", "--catalog", "cat", "--steps", "1000000"});
    o.require(r.code == 0, "exit code 0");
    if (r.code != 0) return o;
    const auto j = nlohmann::json::parse(r.out);
    const double l1 = j["exponents"][0], l2 = j["exponents"][1];
    o.detail = "lambda_1=" + fmt("%.9f", l1) + " |lambda_1+lambda_2|=" + fmt("%.2e", std::abs(l1 + l2));
    o.require(std::abs(l1 - kCatExponent) <= 1e-3, "lambda_1 within 1e-3");
    o.require(std::abs(l1 + l2) <= 1e-6, "sum within 1e-6");
    return o;
}

Outcome criterion_2() {
    Outcome o;
    double worst = 0.0;
    for (const auto& sys : catalog_systems()) {
        const auto x = SplitRng(9, 1).point(sys.dim());
        const long long n = 100'000;
        const auto spectrum = qr_spectrum(sys, x, n, 1000);
        TorusPoint start = x;
        for (int i = 0; i < 1000; ++i) start = sys.eval_map(start);
        for (int k = 1; k <= sys.dim(); ++k) {
            double partial = 0.0;
            for (int i = 0; i < k; ++i) partial += spectrum.exponents[static_cast<std::size_t>(i)];
            const double d = std::abs(exterior_top_exponent(sys, k, start, n) - partial);
            worst = std::max(worst, d);
            o.require(d <= 2e-3, sys.name() + " k=" + std::to_string(k));
        }
    }
    o.detail = "max deviation " + fmt("%.2e", worst) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome criterion_3() {
    Outcome o;
    const double sp = total_spectral_radius(catalog_system("cat")).radius;
    double top = 0.0;
    for (const auto& e : cohomology_action(catalog_system("cat-cat"), 2).eigen)
        top = std::max(top, std::abs(std::exp(e.exponent)));
    o.detail = "sp(cat)=" + fmt("%.12f", sp) + " cat-cat k=2 radius=" + fmt("%.12f", top);
    o.require(std::abs(sp - kGolden2) <= 1e-9, "sp(cat)");
    o.require(std::abs(top - kGolden2 * kGolden2) <= 1e-8, "cat-cat k=2");
    return o;
}

Outcome criterion_4() {
    Outcome o;
    const auto sys = catalog_system("perturbed-cat-0.1");
    const auto p = harmonic_projection_grid(
        [&](const TorusPoint& x) { return Matrix(sys.jacobian(x).transpose()).reshaped().eval(); }, 2,
        pullback_grid_order(sys));
    // Column i of the result holds the coefficients of f^* dx_i.
    const Matrix expected = sys.matrix().transpose().cast<double>();
    const double err = (p.mean - expected.reshaped()).cwiseAbs().maxCoeff();
    o.detail = "max |P(f^* dx_i) - A^T e_i| = " + fmt("%.2e", err);
    o.require(err <= 1e-12, "grid projection exact");
    return o;
}

Outcome criterion_5() {
    Outcome o;
    SplitRng rng(5151, 0);
    std::vector<TorusSystem> systems;
    for (const auto& s : catalog_systems())
        if (!s.is_linear()) systems.push_back(s);
    for (std::uint64_t s = 0; s < 10; ++s) systems.push_back(random_conservative_system(s));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& sys = systems[rng.below(systems.size())];
        const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(sys.dim()) + 1));
        const auto action = cohomology_action(sys, k);
        const auto& e = action.eigen[rng.below(action.eigen.size())];
        const int n = 1 + static_cast<int>(rng.below(20));
        worst = std::max(worst, alpha_sequence(sys, e, rng.point(sys.dim()), n).discrepancy);
    }
    o.detail = "max relative discrepancy " + fmt("%.2e", worst) + " over 100 cases";
    o.require(worst <= 1e-9, "discrepancy <= 1e-9");
    return o;
}

Outcome criterion_6() {
    Outcome o;
    const auto cat = catalog_system("cat");
    const auto frame = oseledec_frame(cat, TorusPoint({0.3, 0.2}), 60);
    double worst = 0.0;
    for (double eps : {0.25, 0.5, 1.0}) {
        const auto s = metric_at(cat, frame, eps);
        // Eigen-directions of [[2,1],[1,1]]: (phi, 1) and (-1, phi).
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        for (Vector u : {Vector{{phi, 1.0}}, Vector{{-1.0, phi}}}) {
            u.normalize();
            worst = std::max(worst, std::abs(u.dot(s.gram.entries * u) - 1.0 / std::tanh(eps)));
        }
    }
    o.detail = "max |h(u,u) - coth(eps)| = " + fmt("%.2e", worst);
    o.require(worst <= 1e-6, "within 1e-6");
    return o;
}

Outcome criterion_7() {
    Outcome o;
    const auto cat = catalog_system("cat");
    const auto frame = oseledec_frame(cat, TorusPoint({0.3, 0.2}), 60);
    const auto g = growth_ratio_check(cat, frame, 0.2, 1, 60);
    o.detail = "max ratio " + fmt("%.6f", g.max_ratio) + ", log slope " + fmt("%.6f", g.log_slope);
    o.require(g.max_ratio <= 4.0, "ratio <= 4");
    o.require(g.log_slope <= 1e-3, "slope <= 1e-3");
    return o;
}

Outcome criterion_8() {
    Outcome o;
    std::size_t rows = 0, violated = 0, bad = 0;
    for (const auto& sys : harness_systems()) {
        const auto report = run_verification(sys, RunParams{}, "a").to_json();
        bad += slack_failures(report, rows, violated);
    }
    o.detail = std::to_string(rows) + " rows, " + std::to_string(violated) + " violated";
    o.require(violated == 0 && bad == 0, "no VIOLATED rows");
    return o;
}

Outcome criterion_9() {
    Outcome o;
    std::size_t rows = 0, violated = 0, bad = 0, growth = 0;
    for (const char* name : {"cat", "perturbed-cat-0.05"}) {
        const auto r = run_cli({"verify", "b", "--catalog", name, "--epsilon", "0.1"});
        o.require(r.code == 0, std::string(name) + " exit code 0");
        if (r.out.empty()) continue;
        const auto j = nlohmann::json::parse(r.out);
        bad += slack_failures(j, rows, violated);
        for (const auto& c : j["claims"])
            for (const auto& row : c["rows"]) {
                if (row["claim"] != "theorem_b_volume_growth") continue;
                ++growth;
                const std::string v = row["verdict"];
                o.require(v == "HOLDS" || v == "HOLDS-WITHIN-TOLERANCE", std::string(name) + " volume-growth row");
            }
    }
    o.detail = std::to_string(rows) + " rows (" + std::to_string(growth) + " volume growth), " +
               std::to_string(violated) + " violated" + (o.detail.empty() ? "" : "; " + o.detail);
    o.require(bad == 0 && violated == 0, "slack bands");
    o.require(growth > 0, "volume-growth rows present");
    return o;
}

Outcome criterion_10() {
    Outcome o;
    const auto h = entropy_estimate(catalog_system("cat"), 50, 10'000, 1);
    const double rel = std::abs(h.value - kCatExponent) / kCatExponent;
    o.require(rel <= 0.05, "cat entropy within 5%");
    const auto r = run_verification(catalog_system("perturbed-cat-0.05"), RunParams{}, "f");
    std::string rows;
    for (const auto& c : r.claims)
        for (const auto& row : c.rows) {
            if (row.claim != "corollary_f") continue;
            rows += " " + fmt("%.4f", row.lhs) + " vs " + fmt("%.4f", row.bound) + " (" + verdict_name(row.verdict) + ")";
            o.require(row.verdict == Verdict::holds || row.verdict == Verdict::holds_within_tolerance,
                      "perturbed-cat-0.05 equality row");
        }
    o.detail = "cat entropy " + fmt("%.6f", h.value) + " (rel " + fmt("%.4f", rel) + "); perturbed:" + rows +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome criterion_11() {
    Outcome o;
    SplitRng rng(1111, 0);
    auto random_matrix = [&](int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = 2.0 * rng.uniform() - 1.0;
        return m;
    };
    double functor = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 6;
        const Matrix a = random_matrix(n), b = random_matrix(n);
        for (int k = 1; k <= n; ++k) {
            const Matrix lhs = compound(Matrix(a * b), k);
            const Matrix rhs = compound(a, k) * compound(b, k);
            functor = std::max(functor, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
        }
    }
    o.require(functor <= 1e-10, "compound functoriality");

    std::size_t comparison_bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 4;
        const Matrix bg = random_matrix(n), bh = random_matrix(n);
        const Matrix g = bg * bg.transpose() + 0.1 * Matrix::Identity(n, n);
        const Matrix h = bh * bh.transpose() + 0.1 * Matrix::Identity(n, n);
        const Matrix his = spd_inverse_sqrt(h);
        const double c = Eigen::SelfAdjointEigenSolver<Matrix>(his * g * his).eigenvalues().maxCoeff();
        for (int k = 1; k <= n; ++k) {
            const Matrix gk = induced_gram_power(GramMatrix{g}, k).entries;
            const Matrix hk = induced_gram_power(GramMatrix{h}, k).entries;
            const Matrix hks = spd_inverse_sqrt(hk);
            const double ck = Eigen::SelfAdjointEigenSolver<Matrix>(hks * gk * hks).eigenvalues().maxCoeff();
            if (ck > std::pow(c, k) * (1.0 + 1e-9)) ++comparison_bad;
        }
    }
    o.require(comparison_bad == 0, "induced comparison");

    double duality = 0.0;
    for (const auto& sys : catalog_systems()) {
        const TorusPoint x(std::vector<double>(static_cast<std::size_t>(sys.dim()), 0.3141));
        const auto fwd = qr_spectrum(sys, x, 400'000);
        const auto bwd = qr_spectrum(sys, x, 400'000, 1000, Direction::backward);
        const auto n = fwd.exponents.size();
        for (std::size_t i = 0; i < n; ++i)
            duality = std::max(duality, std::abs(bwd.exponents[i] + fwd.exponents[n - 1 - i]));
    }
    o.require(duality <= 2e-3, "inverse duality");

    const std::vector<std::string> args = {"verify", "all", "--catalog", "perturbed-cat-0.05", "--steps", "20000"};
    const auto first = run_cli(args), second = run_cli(args);
    const bool same = first.out == second.out && !first.out.empty();
    o.require(same, "byte-identical reports");

    o.detail = "functoriality " + fmt("%.2e", functor) + ", comparison failures " + std::to_string(comparison_bad) +
               ", duality " + fmt("%.2e", duality) + ", determinism " + (same ? "identical" : "differs") +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds, 0 = none
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "cat-map spectrum", 10.0, criterion_1},
        {2, "exterior identity", 60.0, criterion_2},
        {3, "homology action", 0.0, criterion_3},
        {4, "harmonic projection", 0.0, criterion_4},
        {5, "alpha-sequence identity", 0.0, criterion_5},
        {6, "Lyapunov metric closed form", 0.0, criterion_6},
        {7, "metric growth ratio", 0.0, criterion_7},
        {8, "theorem A harness", 0.0, criterion_8},
        {9, "theorem B / corollary D harness", 0.0, criterion_9},
        {10, "entropy cross-check", 120.0, criterion_10},
        {11, "property suites", 0.0, criterion_11},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0.0 && secs > c.time_limit) {
            o.pass = false;
            o.detail += "; runtime over " + fmt("%.0f", c.time_limit) + " s";
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << ", "
                  << fmt("%.1f", secs) << " s): " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
