#pragma once

// Numerical checks of the inequalities between cohomology eigenvalues,
// Lyapunov exponents, volume growth and entropy, assembled into reports.

#include "toruslab/torus_system.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace toruslab {

enum class Verdict {
    holds,
    holds_within_tolerance,
    not_evaluated,
    hypothesis_failed,
    violated,
    failed,
};

/// "HOLDS", "HOLDS-WITHIN-TOLERANCE", "NOT-EVALUATED", "HYPOTHESIS-FAILED",
/// "VIOLATED", "FAILED".
const char* verdict_name(Verdict v);

/// Round to 12 significant digits (the report's float format).
double round12(double x);

struct RunParams {
    long long steps = 100000;       ///< long-horizon orbit length
    long long transient = 1000;
    std::size_t samples = 1000;     ///< Monte Carlo samples for volume growth / entropy
    std::uint64_t seed = 1;
    double epsilon = 0.1;
    std::size_t ensemble = 4;       ///< long-horizon orbits
    std::size_t wide_ensemble = 1024;  ///< short orbits for L^inf norms and the ergodicity indicator
    long long wide_steps = 2000;
    std::size_t sup_ensemble = 2048;
    long long sup_horizon = 32;
    long long growth_n = 50;        ///< horizon for lower bounds by volume growth
    long long growth_long_n = 400;  ///< horizon for upper bounds, compared with growth_long_n / 2
    std::size_t metric_samples = 32;
    int n_probe = 60;
    double subexp_tol = 1e-3;

    nlohmann::ordered_json to_json() const;
};

struct ReportRow {
    std::string claim;
    int k = 0;
    std::string lhs_kind;
    double lhs = 0.0;
    double bound = 0.0;
    std::string bound_kind;
    double slack = 0.0;   ///< bound - lhs
    double std_error = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::holds;
    std::string note;
};

/// Rounds lhs, bound and stderr to the report format, sets slack = bound - lhs
/// (rounded), tolerance = 3 stderr + 1e-3 + extra_tolerance and the verdict:
/// HOLDS for slack >= 0, HOLDS-WITHIN-TOLERANCE down to -tolerance, else VIOLATED.
ReportRow make_row(std::string claim, int k, std::string lhs_kind, double lhs, std::string bound_kind, double bound,
                   double std_error, double extra_tolerance = 0.0);

struct ClaimResult {
    std::string name;
    std::vector<ReportRow> rows;
    Verdict verdict = Verdict::holds;  ///< worst row
    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

struct VerificationReport {
    std::string system_name;
    nlohmann::ordered_json system_spec;
    RunParams params;
    std::vector<ClaimResult> claims;

    /// FNV-1a 64 of the canonical system spec and parameters.
    std::string config_hash() const;
    nlohmann::ordered_json to_json() const;
    /// One line per row with a header.
    std::string to_csv() const;
    /// 0 all HOLDS / HOLDS-WITHIN-TOLERANCE, 2 any VIOLATED or FAILED,
    /// 3 hypothesis failures only.
    int exit_code() const;
};

VerificationReport check_theorem_a(const TorusSystem& sys, const RunParams& params);
VerificationReport check_corollary_a(const TorusSystem& sys, const RunParams& params);
VerificationReport check_corollaries_bc(const TorusSystem& sys, const RunParams& params);
/// Theorem B rows, the volume-growth intermediate rows, and Corollary D.
VerificationReport check_theorem_b(const TorusSystem& sys, const RunParams& params);
VerificationReport check_corollary_d(const TorusSystem& sys, const RunParams& params);
VerificationReport check_corollary_f(const TorusSystem& sys, const RunParams& params);

/// which: "a", "b", "bc", "d", "f" or "all". Shared measurements are computed once.
VerificationReport run_verification(const TorusSystem& sys, const RunParams& params, const std::string& which);

}  // namespace toruslab
