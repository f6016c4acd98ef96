#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "tensorbit/matrix.hpp"

namespace tensorbit {

using Complex = std::complex<double>;

/// Real polynomial, coefficients in ascending degree order.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);
    Polynomial(std::initializer_list<double> coeffs);

    const std::vector<double>& coeffs() const noexcept { return c_; }
    double coeff(int k) const;

    /// Index of the last coefficient above drop_tol * max|coeff|; -1 for zero.
    int degree(double drop_tol = 0.0) const;
    bool is_zero() const;
    double scale() const; // max |coeff|

    double operator()(double u) const;
    Complex operator()(Complex u) const;

    Polynomial derivative() const;
    Polynomial trimmed(double drop_tol = 0.0) const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(double s);

private:
    std::vector<double> c_;
};

Polynomial operator+(Polynomial lhs, const Polynomial& rhs);
Polynomial operator-(Polynomial lhs, const Polynomial& rhs);
Polynomial operator-(Polynomial p);
Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
Polynomial operator*(double s, Polynomial p);

/// alpha u^2 + beta u + gamma with each coefficient a polynomial in a second
/// variable.
struct QuadraticPencil {
    Polynomial alpha;
    Polynomial beta;
    Polynomial gamma;

    std::array<double, 3> at(double v) const { return {alpha(v), beta(v), gamma(v)}; }
};

/// The three factors of the common-root relation of f and g:
/// A = alpha eps - beta delta, B = beta nu - eps gamma, C = gamma delta - alpha nu.
struct CommonRootParts {
    Polynomial a;
    Polynomial b;
    Polynomial c;
};
CommonRootParts common_root_parts(const QuadraticPencil& f, const QuadraticPencil& g);

/// A*B - C^2: vanishes exactly where f and g share a root.
Polynomial resultant(const QuadraticPencil& f, const QuadraticPencil& g);

/// All complex roots, with multiplicity, via the balanced companion matrix
/// and Newton polishing. Leading coefficients below drop_tol * scale are
/// treated as zero.
std::vector<Complex> roots(const Polynomial& f, double drop_tol = 1e-14);

/// Default real-root acceptance: |imag| <= 1e-7 * (1 + |real|).
bool is_real_root(Complex r, double tol_imag = 1e-7);
std::vector<double> real_roots(const Polynomial& f, double drop_tol = 1e-14,
                               double tol_imag = 1e-7);

/// Common root of two polynomials of degree <= 2, or nothing.
std::optional<double> common_root(const Polynomial& f, const Polynomial& g, double tol = 1e-9);

enum class EigenKind { DistinctReal, DoubleRealDiagonalizable, DoubleRealDefective, ComplexPair };

const char* to_string(EigenKind k);

struct EigenPair2 {
    EigenKind kind = EigenKind::DistinctReal;
    /// Real eigenvalues (ascending) or, for ComplexPair, (real part, |imag part|).
    double values[2] = {0.0, 0.0};
    int eigenvector_count = 2;
    /// |lambda1 - lambda2| / (1 + max|lambda|); for complex pairs 2|imag| / (1 + |lambda|).
    double relative_gap = 0.0;

    bool is_double() const {
        return kind == EigenKind::DoubleRealDiagonalizable || kind == EigenKind::DoubleRealDefective;
    }
};

EigenPair2 eig2(const Matrix& m, double coincidence_tol = 1e-6);

struct Spectrum {
    std::vector<Complex> eigenvalues; // real ones first (ascending), then pairs
    int n_complex_pairs = 0;
    int n_coincident_real_pairs = 0;
    /// Geometric multiplicity found at each coincident pair (1 = defective).
    std::vector<int> coincident_eigenvector_counts;
    /// Smallest relative gap between two real eigenvalues (inf when < 2 real).
    double min_real_gap = 0.0;
};

Spectrum spectrum_small(const Matrix& m, double coincidence_tol = 1e-6);

/// Eigenvalues of a general real square matrix via balancing, Hessenberg
/// reduction and Francis double-shift QR. Throws NumericalError on the cap.
std::vector<Complex> eigenvalues(const Matrix& m);

/// dim ker(M - lambda I), numerically: singular values of M - lambda I at or
/// below tol * max(1, |M|).
int geometric_multiplicity(const Matrix& m, double lambda, double tol);

/// Discriminant of A u^3 + B u^2 + C u + D.
double cubic_discriminant(double a, double b, double c, double d);

} // namespace tensorbit
