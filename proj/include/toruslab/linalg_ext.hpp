#pragma once

// Exterior-power (compound) matrices, Gram matrices, norms and spectral radii.
//
// Multi-indices I = (i_1 < ... < i_k) are enumerated in lexicographic order.
// Every compound matrix, k-form coefficient vector and induced Gram matrix in
// this library uses that order, so index positions can be shared freely.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace toruslab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

using MultiIndex = std::vector<int>;

/// C(n, k) as an integer; zero when k is outside [0, n].
std::int64_t binomial(int n, int k);

/// All increasing k-tuples drawn from {0, ..., n-1}, lexicographically.
std::vector<MultiIndex> multi_indices(int n, int k);

/// Position of an increasing tuple in the order produced by multi_indices.
int multi_index_position(int n, const MultiIndex& index);

/// Exterior-power matrix: entry (I, J) is the minor det M[I, J].
/// k = 0 yields the 1x1 matrix [1].
Matrix compound(const Matrix& m, int k);

/// Exact integer compound matrix (minors by fraction-free elimination).
IntMatrix compound(const IntMatrix& m, int k);

/// Exact determinant of an integer matrix (Bareiss elimination).
std::int64_t integer_determinant(const IntMatrix& m);

/// Exact inverse of a unimodular matrix via the adjugate.
/// Throws ValidationError if |det| != 1.
IntMatrix unimodular_inverse(const IntMatrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Max modulus over all eigenvalues of a square matrix.
double spectral_radius(const Matrix& m);

/// Symmetric positive-semidefinite matrix tagged with the frame it is expressed in.
struct GramMatrix {
    Matrix entries;
    std::string basis = "standard";

    /// Throws ValidationError unless symmetric to 1e-12 (relative) and
    /// eigenvalues are >= -1e-10 (relative to the largest).
    void validate() const;
};

/// Gram matrix of the induced inner product on the k-th exterior power:
/// <v_1 ^ ... ^ v_k, w_1 ^ ... ^ w_k> = det(G(v_i, w_j)).
GramMatrix induced_gram_power(const GramMatrix& gram, int k);

/// Principal square root and inverse square root of an SPD matrix.
Matrix spd_sqrt(const Matrix& m);
Matrix spd_inverse_sqrt(const Matrix& m);

/// Largest principal angle (radians) between the column spans of a and b.
/// Both spans must have the same dimension.
double principal_angle(const Matrix& a, const Matrix& b);

}  // namespace toruslab
