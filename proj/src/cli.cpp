#include "toruslab/cli.hpp"

#include "toruslab/catalog.hpp"
#include "toruslab/cocycle.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/hodge_torus.hpp"
#include "toruslab/lyapunov_metric.hpp"
#include "toruslab/parallel.hpp"
#include "toruslab/random.hpp"
#include "toruslab/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace toruslab {

namespace {

using ojson = nlohmann::ordered_json;

struct Options {
    std::string system_file;
    std::string catalog;
    std::optional<long long> steps;
    std::optional<std::size_t> samples;
    std::uint64_t seed = 1;
    double epsilon = 0.1;
    std::string out_file;
    std::string format = "json";
    std::string which;
    unsigned threads = 0;
};

ojson num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round12(x);
}

ojson num_array(const std::vector<double>& v) {
    auto a = ojson::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

ojson matrix_json(const Matrix& m) {
    auto rows = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = ojson::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(12);
    s << round12(x);
    return s.str();
}

TorusSystem load_system(const Options& o) {
    if (o.system_file.empty() == o.catalog.empty())
        throw InputError("exactly one of --system FILE.json or --catalog NAME is required");
    return o.catalog.empty() ? load_system_file(o.system_file) : catalog_system(o.catalog);
}

TorusPoint start_point(const Options& o, int dim) { return SplitRng(o.seed, 0).point(dim); }

std::string run_spectrum(const Options& o) {
    const auto sys = load_system(o);
    const long long steps = o.steps.value_or(100000);
    const auto x0 = start_point(o, sys.dim());
    const auto s = qr_spectrum(sys, x0, steps);
    if (!o.out_file.empty()) {
        std::ofstream f(o.out_file);
        if (!f) throw InputError("cannot write '" + o.out_file + "'");
        f << "step";
        for (std::size_t i = 0; i < s.exponents.size(); ++i) f << ",lambda_" << i + 1;
        f << '\n';
        for (std::size_t c = 0; c < s.checkpoints.size(); ++c) {
            f << s.checkpoints[c];
            for (double v : s.history[c]) f << ',' << fmt(v);
            f << '\n';
        }
    }
    if (o.format == "csv") {
        std::ostringstream out;
        out << "index,exponent,halfwidth\n";
        for (std::size_t i = 0; i < s.exponents.size(); ++i)
            out << i + 1 << ',' << fmt(s.exponents[i]) << ',' << fmt(s.halfwidths[i]) << '\n';
        return out.str();
    }
    ojson j;
    j["system"] = sys.name();
    j["steps"] = steps;
    j["transient"] = 1000;
    j["seed"] = o.seed;
    j["x0"] = num_array(std::vector<double>(x0.coords().begin(), x0.coords().end()));
    j["exponents"] = num_array(s.exponents);
    j["halfwidths"] = num_array(s.halfwidths);
    j["sum"] = num(s.sum);
    j["sigma_plus"] = num(s.sigma_plus);
    try {
        auto blocks = ojson::array();
        for (const auto& b : cluster_exponents(s)) {
            ojson e;
            e["start"] = b.start;
            e["end"] = b.end;
            e["exponent"] = num(b.exponent);
            blocks.push_back(e);
        }
        j["blocks"] = blocks;
    } catch (const DegenerateSplittingError& e) {
        j["blocks"] = nullptr;
        j["blocks_error"] = e.what();
    }
    return j.dump(2) + "\n";
}

std::string run_homology(const Options& o) {
    const auto sys = load_system(o);
    const auto sp = total_spectral_radius(sys);
    if (o.format == "csv") {
        std::ostringstream out;
        out << "k,eigenvalue_re,eigenvalue_im,exponent_re,exponent_im\n";
        for (int k = 0; k <= sys.dim(); ++k) {
            for (const auto& e : cohomology_action(sys, k).eigen) {
                const auto ev = std::exp(e.exponent);
                out << k << ',' << fmt(ev.real()) << ',' << fmt(ev.imag()) << ',' << fmt(e.exponent.real()) << ','
                    << fmt(e.exponent.imag()) << '\n';
            }
        }
        return out.str();
    }
    ojson j;
    j["system"] = sys.name();
    auto degrees = ojson::array();
    for (int k = 0; k <= sys.dim(); ++k) {
        const auto h = cohomology_action(sys, k);
        ojson d;
        d["k"] = k;
        auto rows = ojson::array();
        for (Eigen::Index r = 0; r < h.matrix.rows(); ++r) {
            auto row = ojson::array();
            for (Eigen::Index c = 0; c < h.matrix.cols(); ++c) row.push_back(h.matrix(r, c));
            rows.push_back(row);
        }
        d["matrix"] = rows;
        auto eig = ojson::array();
        for (const auto& e : h.eigen) {
            const auto ev = std::exp(e.exponent);
            ojson v;
            v["re"] = num(ev.real());
            v["im"] = num(ev.imag());
            v["exponent_re"] = num(e.exponent.real());
            v["exponent_im"] = num(e.exponent.imag());
            eig.push_back(v);
        }
        d["eigenvalues"] = eig;
        degrees.push_back(d);
    }
    j["degrees"] = degrees;
    j["spectral_radius"]["radius"] = num(sp.radius);
    j["spectral_radius"]["log"] = num(std::log(sp.radius));
    j["spectral_radius"]["degree"] = sp.degree;
    j["note"] = "cohomology action compound(A^T, k); homology has the same spectrum by universal coefficients";
    return j.dump(2) + "\n";
}

std::string run_metric(const Options& o) {
    const auto sys = load_system(o);
    const auto x = start_point(o, sys.dim());
    FrameOptions frame_options;
    frame_options.spectrum_steps = o.steps.value_or(100000);
    const auto frame = oseledec_frame(sys, x, 60, frame_options);
    const auto sample = metric_at(sys, frame, o.epsilon);

    LpOptions lp_options;
    lp_options.spectrum_steps = frame_options.spectrum_steps;
    std::vector<double> ps;
    for (int k = 1; k <= sys.dim(); ++k) ps.push_back(0.5 * k);
    const auto lps = lp_estimates(sys, o.epsilon, ps, o.samples.value_or(32), o.seed, lp_options);

    if (o.format == "csv") {
        std::ostringstream out;
        out << "p,estimate,std_error,top_mass_fraction,used,excluded\n";
        for (std::size_t i = 0; i < ps.size(); ++i)
            out << fmt(ps[i]) << ',' << fmt(lps[i].estimate) << ',' << fmt(lps[i].std_error) << ','
                << fmt(lps[i].top_mass_fraction) << ',' << lps[i].used << ',' << lps[i].excluded << '\n';
        return out.str();
    }
    ojson j;
    j["system"] = sys.name();
    j["epsilon"] = num(o.epsilon);
    j["seed"] = o.seed;
    ojson s;
    s["x"] = num_array(std::vector<double>(x.coords().begin(), x.coords().end()));
    s["block_exponents"] = num_array(frame.block_exponents());
    s["block_dims"] = frame.block_dims();
    s["frame"] = matrix_json(frame.basis);
    s["condition_number"] = num(frame.condition_number);
    s["gram"] = matrix_json(sample.gram.entries);
    s["block_gram"] = matrix_json(sample.block_gram);
    s["truncation"] = sample.truncation;
    s["tail_bound"] = num(sample.tail_bound);
    j["sample"] = s;
    auto lp = ojson::array();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ojson e;
        e["p"] = num(ps[i]);
        e["estimate"] = num(lps[i].estimate);
        e["std_error"] = num(lps[i].std_error);
        e["top_mass_fraction"] = num(lps[i].top_mass_fraction);
        e["is_norm"] = lps[i].is_norm;
        e["used"] = lps[i].used;
        e["excluded"] = lps[i].excluded;
        e["max_truncation"] = lps[i].max_truncation;
        lp.push_back(e);
    }
    j["lp"] = lp;
    return j.dump(2) + "\n";
}

std::string run_entropy(const Options& o) {
    const auto sys = load_system(o);
    const long long n = o.steps.value_or(50);
    const std::size_t samples = o.samples.value_or(1000);
    const auto h = entropy_estimate(sys, n, samples, o.seed);
    std::vector<GrowthEstimate> vg;
    for (int k = 0; k <= sys.dim(); ++k) vg.push_back(volume_growth(sys, k, n, samples, o.seed));
    if (o.format == "csv") {
        std::ostringstream out;
        out << "quantity,k,value,std_error\n";
        out << "entropy,," << fmt(h.value) << ',' << fmt(h.std_error) << '\n';
        for (int k = 0; k <= sys.dim(); ++k)
            out << "volume_growth," << k << ',' << fmt(vg[k].value) << ',' << fmt(vg[k].std_error) << '\n';
        return out.str();
    }
    ojson j;
    j["system"] = sys.name();
    j["steps"] = n;
    j["samples"] = samples;
    j["seed"] = o.seed;
    j["entropy"] = num(h.value);
    j["std_error"] = num(h.std_error);
    auto v = ojson::array();
    for (int k = 0; k <= sys.dim(); ++k) {
        ojson e;
        e["k"] = k;
        e["value"] = num(vg[k].value);
        e["std_error"] = num(vg[k].std_error);
        v.push_back(e);
    }
    j["volume_growth"] = v;
    return j.dump(2) + "\n";
}

std::string run_catalog(const Options& o) {
    if (o.format == "csv") {
        std::string out = "name\n";
        for (const auto& name : catalog_names()) out += name + "\n";
        return out;
    }
    auto systems = ojson::array();
    for (const auto& name : catalog_names()) {
        ojson e;
        e["name"] = name;
        e["spec"] = catalog_system(name).to_json();
        systems.push_back(e);
    }
    ojson j;
    j["systems"] = systems;
    return j.dump(2) + "\n";
}

void write_output(const Options& o, const std::string& text, std::ostream& out, bool to_file) {
    if (!to_file) {
        out << text;
        return;
    }
    std::ofstream f(o.out_file);
    if (!f) throw InputError("cannot write '" + o.out_file + "'");
    f << text;
}

void add_common(CLI::App* cmd, Options& o, bool system, const std::string& steps_help,
                const std::string& samples_help) {
    if (system) {
        auto* file = cmd->add_option("--system", o.system_file, "System spec JSON file");
        auto* cat = cmd->add_option("--catalog", o.catalog, "Catalog system name");
        file->excludes(cat);
    }
    if (!steps_help.empty()) cmd->add_option("--steps", o.steps, steps_help)->check(CLI::PositiveNumber);
    if (!samples_help.empty()) cmd->add_option("--samples", o.samples, samples_help)->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    cmd->add_option("--epsilon", o.epsilon, "Lyapunov metric epsilon")->capture_default_str()->check(
        CLI::PositiveNumber);
    cmd->add_option("--out", o.out_file, "Output file");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lyapunov exponents, cohomology and volume growth of torus diffeomorphisms"};
    app.name("toruslab");
    app.require_subcommand(1);
    Options o;

    auto* spectrum = app.add_subcommand("spectrum", "Lyapunov spectrum by the QR method");
    add_common(spectrum, o, true, "Orbit length (default 100000)", "");
    auto* homology = app.add_subcommand("homology", "Action on cohomology and its spectral radius");
    add_common(homology, o, true, "", "");
    auto* metric = app.add_subcommand("metric", "Lyapunov metric at the seed point and its L^p norms");
    add_common(metric, o, true, "Reference spectrum length (default 100000)", "Metric samples (default 32)");
    auto* entropy = app.add_subcommand("entropy", "Entropy and volume growth estimates");
    add_common(entropy, o, true, "Horizon n (default 50)", "Monte Carlo samples (default 1000)");
    auto* verify = app.add_subcommand("verify", "Check the inequalities and write a report");
    verify->add_option("claims", o.which, "a, b, bc, d, f, ca or all")
        ->required()
        ->check(CLI::IsMember({"a", "b", "bc", "d", "f", "ca", "all"}));
    add_common(verify, o, true, "Long orbit length (default 100000)", "Monte Carlo samples (default 1000)");
    auto* catalog = app.add_subcommand("catalog", "List the built-in systems");
    add_common(catalog, o, false, "", "");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const unsigned saved_threads = parallel_thread_limit();
    parallel_thread_limit() = o.threads;
    int code = 0;
    try {
        if (spectrum->parsed()) {
            write_output(o, run_spectrum(o), out, false);
        } else if (homology->parsed()) {
            write_output(o, run_homology(o), out, !o.out_file.empty());
        } else if (metric->parsed()) {
            write_output(o, run_metric(o), out, !o.out_file.empty());
        } else if (entropy->parsed()) {
            write_output(o, run_entropy(o), out, !o.out_file.empty());
        } else if (catalog->parsed()) {
            write_output(o, run_catalog(o), out, !o.out_file.empty());
        } else if (verify->parsed()) {
            const auto sys = load_system(o);
            RunParams params;
            params.seed = o.seed;
            params.epsilon = o.epsilon;
            if (o.steps) params.steps = *o.steps;
            if (o.samples) params.samples = *o.samples;
            const auto report = run_verification(sys, params, o.which);
            const std::string text = o.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n";
            write_output(o, text, out, !o.out_file.empty());
            code = report.exit_code();
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        code = 1;
    } catch (const std::exception& e) {
        err << "computation failed: " << e.what() << "\n";
        code = 2;
    }
    parallel_thread_limit() = saved_threads;
    return code;
}

}  // namespace toruslab
