#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bergman {

using cdouble = std::complex<double>;

/// Largest ambient dimension handled; vectors live on the stack.
inline constexpr int kMaxDim = 16;
inline constexpr int kMaxMatrix = 6;

using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using ComplexVector = Eigen::Matrix<cdouble, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxMatrix, kMaxMatrix>;
using SmallComplexMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxMatrix, kMaxMatrix>;

enum class ConeKind { HalfLine, Lorentz, SPD, Product };

/**
 * A symmetric cone together with its ambient Euclidean Jordan algebra.
 *
 * Coordinates are always Euclidean for the algebra's inner product:
 *  - HalfLine: V = R.
 *  - Lorentz(n): V = R^n, Delta(y) = y_1^2 - y_2^2 - ... - y_n^2.
 *  - SPD(r): symmetric r x r matrices; coordinates are the diagonal entries
 *    followed by the strictly upper entries (row-major) scaled by sqrt(2), so
 *    the coordinate dot product equals the Hilbert-Schmidt product.
 *  - Product: coordinates of the factors concatenated.
 */
class ConeDescriptor {
public:
    static ConeDescriptor half_line();
    static ConeDescriptor lorentz(int n);
    static ConeDescriptor spd(int r);
    static ConeDescriptor product(std::vector<ConeDescriptor> factors);

    /// Parses "halfline", "lorentz3", "spd2", "product(halfline,lorentz3)".
    static ConeDescriptor parse(std::string_view text);

    ConeKind kind() const { return kind_; }
    int dim() const { return n_; }
    int rank() const { return r_; }
    double n_over_r() const { return static_cast<double>(n_) / r_; }
    /// Peirce multiplicity d = 2(n/r - 1)/(r - 1); zero for rank one.
    double peirce_d() const;
    /// Matrix size for SPD(r); zero otherwise.
    int matrix_size() const { return kind_ == ConeKind::SPD ? r_ : 0; }
    const std::vector<ConeDescriptor>& factors() const { return factors_; }
    std::string name() const;

    bool operator==(const ConeDescriptor& other) const;

private:
    ConeDescriptor(ConeKind kind, int n, int r, std::vector<ConeDescriptor> factors = {});

    ConeKind kind_;
    int n_;
    int r_;
    std::vector<ConeDescriptor> factors_;
};

struct SpectralDecomposition {
    std::vector<double> eigenvalues;  ///< descending
    std::vector<RealVector> frame;    ///< idempotent c_i paired with eigenvalues[i]
};

RealVector identity(const ConeDescriptor& cone);
double inner(const RealVector& a, const RealVector& b);

/// Jordan product a o b.
RealVector jordan_product(const ConeDescriptor& cone, const RealVector& a, const RealVector& b);

double determinant(const ConeDescriptor& cone, const RealVector& v);
cdouble complex_determinant(const ConeDescriptor& cone, const ComplexVector& zeta);

/// Delta_k with respect to the fixed Jordan frame; 1 <= k <= rank.
double principal_minor(const ConeDescriptor& cone, const RealVector& v, int k);

bool contains(const ConeDescriptor& cone, const RealVector& v);

/// Delta_s(v) = prod_j Delta_j^{s_j - s_{j+1}}(v), s_{r+1} = 0. Requires v in the cone.
double generalized_power(const ConeDescriptor& cone, const RealVector& v, const std::vector<double>& s);

SpectralDecomposition spectral_decompose(const ConeDescriptor& cone, const RealVector& v);

/// The fixed Jordan frame used by principal_minor.
std::vector<RealVector> fixed_frame(const ConeDescriptor& cone);

/// f(v) = sum f(lambda_i) c_i for real powers; requires v in the cone when p is non-integer.
RealVector jordan_power(const ConeDescriptor& cone, const RealVector& v, double p);
RealVector jordan_exp(const ConeDescriptor& cone, const RealVector& v);

/// Matrix of the quadratic representation P(a) = 2 L(a)^2 - L(a^2).
Eigen::MatrixXd quadratic_representation(const ConeDescriptor& cone, const RealVector& a);

/// Matrix of L(a): x -> a o x.
Eigen::MatrixXd multiplication_operator(const ConeDescriptor& cone, const RealVector& a);

/// Factor such that ||spectrum(x)||_2 = scale * |x| on each factor; one entry per coordinate.
RealVector spectral_norm_scale(const ConeDescriptor& cone);

// SPD coordinate helpers.
SmallMatrix spd_matrix(int r, const RealVector& coords);
SmallComplexMatrix spd_matrix(int r, const ComplexVector& coords);
RealVector spd_coords(const SmallMatrix& m);

/// Determinant as a polynomial in the coordinates: multi-index (length n) -> coefficient.
using Polynomial = std::map<std::vector<int>, double>;
Polynomial determinant_polynomial(const ConeDescriptor& cone);
double evaluate(const Polynomial& poly, const RealVector& v);

/// Splits a concatenated product-cone vector into per-factor pieces.
std::vector<RealVector> split(const ConeDescriptor& cone, const RealVector& v);
std::vector<ComplexVector> split(const ConeDescriptor& cone, const ComplexVector& v);

} // namespace bergman
