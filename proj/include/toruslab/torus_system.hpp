#pragma once

// Volume-preserving diffeomorphisms of the flat torus T^n = R^n / Z^n of the
// form f(x) = (S_m o ... o S_1)(A x mod 1), A in GL(n, Z), each S_j a
// trigonometric shear along one coordinate axis.

#include "toruslab/linalg_ext.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace toruslab {

/// A point of T^n with every coordinate in [0, 1).
class TorusPoint {
public:
    TorusPoint() = default;
    /// Reduces every coordinate mod 1.
    explicit TorusPoint(std::vector<double> coords);

    int dim() const noexcept { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
    std::span<const double> coords() const noexcept { return coords_; }
    Vector as_vector() const;

private:
    std::vector<double> coords_;
};

/// x - floor(x), clamped so the result is always strictly below 1.
double wrap_unit(double x) noexcept;

/// Euclidean distance on T^n: the minimum over the 3^n nearest integer
/// translates, evaluated coordinate-wise (equivalent for points in [0,1)^n).
double torus_distance(const TorusPoint& a, const TorusPoint& b);

/// Largest coordinate-wise torus distance.
double torus_max_coordinate_distance(const TorusPoint& a, const TorusPoint& b);

/// x -> x + amplitude * sin(2 pi <frequency, x> + phase) e_axis.
/// frequency[axis] == 0, so the map is unipotent and inverted by negating
/// the amplitude.
struct ShearFactor {
    int axis = 0;
    std::vector<int> frequency;
    double amplitude = 0.0;
    double phase = 0.0;
};

enum class Direction { forward, backward };

/// One application of f (or f^-1) together with its Jacobian at the input.
struct Step {
    TorusPoint next;
    Matrix jacobian;
};

class TorusSystem {
public:
    /// Throws ValidationError on |det A| != 1, frequency[axis] != 0, bad
    /// shapes or non-finite shear parameters.
    TorusSystem(IntMatrix matrix, std::vector<ShearFactor> shears, std::string name = "custom");

    int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
    const IntMatrix& matrix() const noexcept { return matrix_; }
    const IntMatrix& inverse_matrix() const noexcept { return inverse_; }
    const std::vector<ShearFactor>& shears() const noexcept { return shears_; }
    std::int64_t determinant() const noexcept { return det_; }
    const std::string& name() const noexcept { return name_; }
    bool is_linear() const noexcept { return shears_.empty(); }

    TorusPoint eval_map(const TorusPoint& x) const;
    TorusPoint eval_inverse(const TorusPoint& x) const;

    /// D_x f (forward) or D_x (f^-1) (backward), chained through the
    /// intermediate points of the composition.
    Matrix jacobian(const TorusPoint& x, Direction direction = Direction::forward) const;

    /// Map evaluation and Jacobian in one pass.
    Step advance(const TorusPoint& x, Direction direction = Direction::forward) const;

    /// The lift F: R^n -> R^n with no reduction mod 1. F(x) - A x is
    /// Z^n-periodic.
    Vector eval_lift(const Vector& x) const;

    nlohmann::ordered_json to_json() const;

private:
    void check_point(const TorusPoint& x) const;

    IntMatrix matrix_;
    IntMatrix inverse_;
    Matrix matrix_real_;
    Matrix inverse_real_;
    std::vector<ShearFactor> shears_;
    std::int64_t det_ = 1;
    std::string name_;
};

/// Parses the system-spec schema
///   {"dim": n, "matrix": [[ints]], "shears": [{"axis", "frequency", "amplitude", "phase"}]}.
/// Errors name the offending field (ValidationError) or carry the line and
/// column of a syntax error (InputError).
TorusSystem system_from_json(const nlohmann::json& spec, std::string name = "custom");
TorusSystem system_from_json_text(const std::string& text, std::string name = "custom");
TorusSystem load_system_file(const std::string& path);

}  // namespace toruslab
