#include "toruslab/torus_system.hpp"

#include "toruslab/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace toruslab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double shear_argument(const ShearFactor& s, std::span<const double> x) {
    double dot = 0.0;
    for (std::size_t i = 0; i < s.frequency.size(); ++i) dot += s.frequency[i] * x[i];
    return kTwoPi * dot + s.phase;
}

// J = I + sign * 2 pi delta cos(arg) e_axis m^T, applied on the left of `acc`.
void left_multiply_shear_jacobian(const ShearFactor& s, double arg, double sign, Matrix& acc) {
    const double c = sign * kTwoPi * s.amplitude * std::cos(arg);
    if (c == 0.0) return;
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(acc.cols());
    for (std::size_t i = 0; i < s.frequency.size(); ++i) {
        if (s.frequency[i] != 0) row += (c * s.frequency[i]) * acc.row(static_cast<Eigen::Index>(i));
    }
    acc.row(s.axis) += row;
}

std::vector<double> apply_integer_matrix(const Matrix& a, std::span<const double> x) {
    const auto n = static_cast<Eigen::Index>(x.size());
    std::vector<double> out(x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) acc += a(i, j) * x[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = wrap_unit(acc);
    }
    return out;
}

}  // namespace

double wrap_unit(double x) noexcept {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double& c : coords_) {
        if (!std::isfinite(c)) throw InputError("torus point has a non-finite coordinate");
        c = wrap_unit(c);
    }
}

Vector TorusPoint::as_vector() const {
    return Eigen::Map<const Vector>(coords_.data(), static_cast<Eigen::Index>(coords_.size()));
}

namespace {

double coordinate_gap(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

}  // namespace

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
    if (a.dim() != b.dim()) throw InputError("torus_distance: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double d = coordinate_gap(a[i], b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

double torus_max_coordinate_distance(const TorusPoint& a, const TorusPoint& b) {
    if (a.dim() != b.dim()) throw InputError("torus distance: dimension mismatch");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, coordinate_gap(a[i], b[i]));
    return m;
}

TorusSystem::TorusSystem(IntMatrix matrix, std::vector<ShearFactor> shears, std::string name)
    : matrix_(std::move(matrix)), shears_(std::move(shears)), name_(std::move(name)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
        throw ValidationError("matrix must be a non-empty square integer matrix");
    }
    inverse_ = unimodular_inverse(matrix_);
    det_ = integer_determinant(matrix_);
    matrix_real_ = matrix_.cast<double>();
    inverse_real_ = inverse_.cast<double>();
    const int n = dim();
    for (std::size_t j = 0; j < shears_.size(); ++j) {
        const auto& s = shears_[j];
        const std::string where = "shears[" + std::to_string(j) + "]";
        if (s.axis < 0 || s.axis >= n) throw ValidationError(where + ".axis out of range");
        if (static_cast<int>(s.frequency.size()) != n) {
            throw ValidationError(where + ".frequency must have " + std::to_string(n) + " entries");
        }
        if (s.frequency[static_cast<std::size_t>(s.axis)] != 0) {
            throw ValidationError(where + ".frequency[axis] must be 0");
        }
        if (!std::isfinite(s.amplitude) || !std::isfinite(s.phase)) {
            throw ValidationError(where + " has a non-finite amplitude or phase");
        }
    }
}

void TorusSystem::check_point(const TorusPoint& x) const {
    if (x.dim() != dim()) {
        throw InputError("point dimension " + std::to_string(x.dim()) + " does not match system dimension " +
                         std::to_string(dim()));
    }
}

TorusPoint TorusSystem::eval_map(const TorusPoint& x) const {
    check_point(x);
    std::vector<double> y = apply_integer_matrix(matrix_real_, x.coords());
    for (const auto& s : shears_) {
        const double arg = shear_argument(s, y);
        auto& c = y[static_cast<std::size_t>(s.axis)];
        c = wrap_unit(c + s.amplitude * std::sin(arg));
    }
    return TorusPoint(std::move(y));
}

TorusPoint TorusSystem::eval_inverse(const TorusPoint& x) const {
    check_point(x);
    std::vector<double> z(x.coords().begin(), x.coords().end());
    for (auto it = shears_.rbegin(); it != shears_.rend(); ++it) {
        const double arg = shear_argument(*it, z);
        auto& c = z[static_cast<std::size_t>(it->axis)];
        c = wrap_unit(c - it->amplitude * std::sin(arg));
    }
    return TorusPoint(apply_integer_matrix(inverse_real_, z));
}

Step TorusSystem::advance(const TorusPoint& x, Direction direction) const {
    check_point(x);
    if (direction == Direction::forward) {
        std::vector<double> y = apply_integer_matrix(matrix_real_, x.coords());
        Matrix jac = matrix_real_;
        for (const auto& s : shears_) {
            const double arg = shear_argument(s, y);
            left_multiply_shear_jacobian(s, arg, +1.0, jac);
            auto& c = y[static_cast<std::size_t>(s.axis)];
            c = wrap_unit(c + s.amplitude * std::sin(arg));
        }
        return {TorusPoint(std::move(y)), std::move(jac)};
    }
    std::vector<double> z(x.coords().begin(), x.coords().end());
    Matrix jac = Matrix::Identity(dim(), dim());
    for (auto it = shears_.rbegin(); it != shears_.rend(); ++it) {
        const double arg = shear_argument(*it, z);
        left_multiply_shear_jacobian(*it, arg, -1.0, jac);
        auto& c = z[static_cast<std::size_t>(it->axis)];
        c = wrap_unit(c - it->amplitude * std::sin(arg));
    }
    return {TorusPoint(apply_integer_matrix(inverse_real_, z)), inverse_real_ * jac};
}

Matrix TorusSystem::jacobian(const TorusPoint& x, Direction direction) const {
    return advance(x, direction).jacobian;
}

Vector TorusSystem::eval_lift(const Vector& x) const {
    if (x.size() != dim()) throw InputError("eval_lift: dimension mismatch");
    Vector y = matrix_real_ * x;
    for (const auto& s : shears_) {
        const double arg = shear_argument(s, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
        y(s.axis) += s.amplitude * std::sin(arg);
    }
    return y;
}

nlohmann::ordered_json TorusSystem::to_json() const {
    nlohmann::ordered_json j;
    j["dim"] = dim();
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < matrix_.cols(); ++c) row.push_back(matrix_(i, c));
        rows.push_back(row);
    }
    j["matrix"] = rows;
    auto sh = nlohmann::ordered_json::array();
    for (const auto& s : shears_) {
        nlohmann::ordered_json e;
        e["axis"] = s.axis;
        e["frequency"] = s.frequency;
        e["amplitude"] = s.amplitude;
        e["phase"] = s.phase;
        sh.push_back(e);
    }
    j["shears"] = sh;
    return j;
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ValidationError("missing field '" + where + key + "'");
    return obj.at(key);
}

long long require_int(const nlohmann::json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ValidationError("field '" + field + "' must be an integer");
    return v.get<long long>();
}

double require_number(const nlohmann::json& v, const std::string& field) {
    if (!v.is_number()) throw ValidationError("field '" + field + "' must be a number");
    return v.get<double>();
}

}  // namespace

TorusSystem system_from_json(const nlohmann::json& spec, std::string name) {
    if (!spec.is_object()) throw ValidationError("system spec must be a JSON object");
    const long long n = require_int(require(spec, "dim", ""), "dim");
    if (n < 1 || n > 10) throw ValidationError("field 'dim' must lie in [1, 10]");
    const auto& mat = require(spec, "matrix", "");
    if (!mat.is_array() || static_cast<long long>(mat.size()) != n) {
        throw ValidationError("field 'matrix' must be an array of " + std::to_string(n) + " rows");
    }
    IntMatrix a(n, n);
    for (long long i = 0; i < n; ++i) {
        const auto& row = mat[static_cast<std::size_t>(i)];
        const std::string field = "matrix[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<long long>(row.size()) != n) {
            throw ValidationError("field '" + field + "' must have " + std::to_string(n) + " entries");
        }
        for (long long j = 0; j < n; ++j) {
            a(i, j) = require_int(row[static_cast<std::size_t>(j)], field + "[" + std::to_string(j) + "]");
        }
    }
    std::vector<ShearFactor> shears;
    if (spec.contains("shears")) {
        const auto& arr = spec.at("shears");
        if (!arr.is_array()) throw ValidationError("field 'shears' must be an array");
        for (std::size_t s = 0; s < arr.size(); ++s) {
            const std::string where = "shears[" + std::to_string(s) + "].";
            const auto& e = arr[s];
            ShearFactor f;
            f.axis = static_cast<int>(require_int(require(e, "axis", where), where + "axis"));
            const auto& freq = require(e, "frequency", where);
            if (!freq.is_array()) throw ValidationError("field '" + where + "frequency' must be an array");
            for (std::size_t i = 0; i < freq.size(); ++i) {
                f.frequency.push_back(
                    static_cast<int>(require_int(freq[i], where + "frequency[" + std::to_string(i) + "]")));
            }
            f.amplitude = require_number(require(e, "amplitude", where), where + "amplitude");
            f.phase = e.contains("phase") ? require_number(e.at("phase"), where + "phase") : 0.0;
            shears.push_back(std::move(f));
        }
    }
    return TorusSystem(std::move(a), std::move(shears), std::move(name));
}

TorusSystem system_from_json_text(const std::string& text, std::string name) {
    nlohmann::json spec;
    try {
        spec = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw InputError("invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what());
    }
    return system_from_json(spec, std::move(name));
}

TorusSystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open system file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string stem = path;
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return system_from_json_text(ss.str(), stem);
}

}  // namespace toruslab
