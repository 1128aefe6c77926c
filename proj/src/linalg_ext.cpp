#include "toruslab/linalg_ext.hpp"

#include "toruslab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace toruslab {

namespace {

constexpr int kMaxMinorOrder = 10;

// Partial-pivot LU determinant of a k x k block gathered into a stack buffer.
double small_determinant(std::array<double, kMaxMinorOrder * kMaxMinorOrder>& a, int k) {
    double det = 1.0;
    for (int c = 0; c < k; ++c) {
        int pivot = c;
        double best = std::abs(a[c * k + c]);
        for (int r = c + 1; r < k; ++r) {
            const double v = std::abs(a[r * k + c]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != c) {
            for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[pivot * k + j]);
            det = -det;
        }
        const double d = a[c * k + c];
        det *= d;
        for (int r = c + 1; r < k; ++r) {
            const double factor = a[r * k + c] / d;
            if (factor == 0.0) continue;
            for (int j = c + 1; j < k; ++j) a[r * k + j] -= factor * a[c * k + j];
        }
    }
    return det;
}

double minor(const Matrix& m, const MultiIndex& rows, const MultiIndex& cols) {
    const int k = static_cast<int>(rows.size());
    if (k == 1) return m(rows[0], cols[0]);
    if (k == 2) {
        return m(rows[0], cols[0]) * m(rows[1], cols[1]) - m(rows[0], cols[1]) * m(rows[1], cols[0]);
    }
    std::array<double, kMaxMinorOrder * kMaxMinorOrder> buf{};
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) buf[i * k + j] = m(rows[i], cols[j]);
    return small_determinant(buf, k);
}

std::int64_t bareiss(std::vector<__int128> a, int n) {
    if (n == 0) return 1;
    __int128 sign = 1;
    __int128 prev = 1;
    for (int c = 0; c < n - 1; ++c) {
        if (a[c * n + c] == 0) {
            int swap_row = -1;
            for (int r = c + 1; r < n; ++r) {
                if (a[r * n + c] != 0) {
                    swap_row = r;
                    break;
                }
            }
            if (swap_row < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[swap_row * n + j]);
            sign = -sign;
        }
        for (int r = c + 1; r < n; ++r) {
            for (int j = c + 1; j < n; ++j) {
                a[r * n + j] = (a[r * n + j] * a[c * n + c] - a[r * n + c] * a[c * n + j]) / prev;
            }
        }
        prev = a[c * n + c];
    }
    return static_cast<std::int64_t>(sign * a[(n - 1) * n + (n - 1)]);
}

std::int64_t integer_minor(const IntMatrix& m, const MultiIndex& rows, const MultiIndex& cols) {
    const int k = static_cast<int>(rows.size());
    std::vector<__int128> a(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a[i * k + j] = m(rows[i], cols[j]);
    return bareiss(std::move(a), k);
}

void check_degree(int n, int k) {
    if (k < 0 || k > n) {
        throw InputError("exterior degree " + std::to_string(k) + " outside [0, " +
                         std::to_string(n) + "]");
    }
    if (k > kMaxMinorOrder) throw InputError("exterior degree above supported maximum");
}

}  // namespace

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<MultiIndex> multi_indices(int n, int k) {
    std::vector<MultiIndex> out;
    if (k < 0 || k > n) return out;
    MultiIndex idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

int multi_index_position(int n, const MultiIndex& index) {
    // Count the tuples that precede `index` lexicographically.
    const int k = static_cast<int>(index.size());
    std::int64_t pos = 0;
    int start = 0;
    for (int i = 0; i < k; ++i) {
        if (index[i] < start || index[i] >= n || (i > 0 && index[i] <= index[i - 1])) {
            throw InputError("multi-index is not an increasing tuple in range");
        }
        for (int v = start; v < index[i]; ++v) pos += binomial(n - v - 1, k - i - 1);
        start = index[i] + 1;
    }
    return static_cast<int>(pos);
}

Matrix compound(const Matrix& m, int k) {
    if (m.rows() != m.cols()) throw InputError("compound requires a square matrix");
    const int n = static_cast<int>(m.rows());
    check_degree(n, k);
    if (k == 0) return Matrix::Ones(1, 1);
    const auto idx = multi_indices(n, k);
    const int d = static_cast<int>(idx.size());
    Matrix out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = minor(m, idx[i], idx[j]);
    return out;
}

IntMatrix compound(const IntMatrix& m, int k) {
    if (m.rows() != m.cols()) throw InputError("compound requires a square matrix");
    const int n = static_cast<int>(m.rows());
    check_degree(n, k);
    if (k == 0) return IntMatrix::Ones(1, 1);
    const auto idx = multi_indices(n, k);
    const int d = static_cast<int>(idx.size());
    IntMatrix out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = integer_minor(m, idx[i], idx[j]);
    return out;
}

std::int64_t integer_determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw InputError("determinant requires a square matrix");
    const int n = static_cast<int>(m.rows());
    MultiIndex all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return integer_minor(m, all, all);
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
    const std::int64_t det = integer_determinant(m);
    if (det != 1 && det != -1) {
        throw ValidationError("matrix not in GL(n,Z) (det = " + std::to_string(det) + ")");
    }
    const int n = static_cast<int>(m.rows());
    if (n == 1) return IntMatrix::Constant(1, 1, det);
    // adj(M)^T = cofactor matrix; inverse = adj(M) / det.
    IntMatrix inv(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            MultiIndex rows, cols;
            for (int r = 0; r < n; ++r)
                if (r != j) rows.push_back(r);
            for (int c = 0; c < n; ++c)
                if (c != i) cols.push_back(c);
            const std::int64_t cof = integer_minor(m, rows, cols) * (((i + j) % 2 == 0) ? 1 : -1);
            inv(i, j) = cof * det;
        }
    }
    return inv;
}

double operator_norm(const Matrix& m) {
    if (!m.allFinite()) throw NumericError("operator_norm: non-finite matrix entries");
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double spectral_radius(const Matrix& m) {
    if (m.rows() != m.cols()) throw InputError("spectral_radius requires a square matrix");
    if (!m.allFinite()) throw NumericError("spectral_radius: non-finite matrix entries");
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericError("spectral_radius: eigenvalue iteration failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void GramMatrix::validate() const {
    if (entries.rows() != entries.cols()) throw ValidationError("Gram matrix is not square");
    if (!entries.allFinite()) throw ValidationError("Gram matrix has non-finite entries");
    const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ValidationError("Gram matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw ValidationError("Gram matrix is not positive semidefinite");
    }
}

GramMatrix induced_gram_power(const GramMatrix& gram, int k) {
    GramMatrix out;
    out.entries = compound(gram.entries, k);
    out.basis = gram.basis + "^" + std::to_string(k);
    return out;
}

Matrix spd_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    return es.operatorSqrt();
}

Matrix spd_inverse_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.eigenvalues().minCoeff() <= 0.0) throw NumericError("spd_inverse_sqrt: matrix is not positive definite");
    return es.operatorInverseSqrt();
}

double principal_angle(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("principal_angle: shape mismatch");
    if (a.cols() == 0) return 0.0;
    const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
    const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
    const Matrix residual = qa - qb * (qb.transpose() * qa);
    const double s = std::min(1.0, operator_norm(residual));
    return std::asin(s);
}

}  // namespace toruslab
