#include "tensorbit/smallalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tensorbit/errors.hpp"

namespace tensorbit {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
Polynomial::Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) {}

double Polynomial::coeff(int k) const {
    return k >= 0 && k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : 0.0;
}

double Polynomial::scale() const {
    double s = 0.0;
    for (double v : c_)
        s = std::max(s, std::abs(v));
    return s;
}

int Polynomial::degree(double drop_tol) const {
    const double thr = drop_tol * scale();
    for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k)
        if (std::abs(c_[static_cast<std::size_t>(k)]) > thr)
            return k;
    return -1;
}

bool Polynomial::is_zero() const { return degree() < 0; }

double Polynomial::operator()(double u) const {
    double r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        r = r * u + *it;
    return r;
}

Complex Polynomial::operator()(Complex u) const {
    Complex r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        r = r * u + *it;
    return r;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1)
        return Polynomial{};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
        d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::trimmed(double drop_tol) const {
    const int deg = degree(drop_tol);
    return Polynomial(std::vector<double>(c_.begin(), c_.begin() + (deg + 1)));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (rhs.c_.size() > c_.size())
        c_.resize(rhs.c_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.c_.size(); ++k)
        c_[k] += rhs.c_[k];
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (rhs.c_.size() > c_.size())
        c_.resize(rhs.c_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.c_.size(); ++k)
        c_[k] -= rhs.c_[k];
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (double& v : c_)
        v *= s;
    return *this;
}

Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
Polynomial operator-(Polynomial p) { return p *= -1.0; }
Polynomial operator*(double s, Polynomial p) { return p *= s; }

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
    const auto& a = lhs.coeffs();
    const auto& b = rhs.coeffs();
    if (a.empty() || b.empty())
        return Polynomial{};
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    return Polynomial(std::move(c));
}

CommonRootParts common_root_parts(const QuadraticPencil& f, const QuadraticPencil& g) {
    const Polynomial &al = f.alpha, &be = f.beta, &ga = f.gamma;
    const Polynomial &de = g.alpha, &ep = g.beta, &nu = g.gamma;
    return {al * ep - be * de, be * nu - ep * ga, ga * de - al * nu};
}

Polynomial resultant(const QuadraticPencil& f, const QuadraticPencil& g) {
    const auto p = common_root_parts(f, g);
    return p.a * p.b - p.c * p.c;
}

namespace {

constexpr int kMaxQrIterations = 150;

// Row/column scaling by powers of two so that row and column norms match.
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0)
                continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j)
                    a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j)
                    a(j, i) *= f;
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elimination.
void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t piv = m;
        for (std::size_t j = m; j < n; ++j)
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        if (piv != m) {
            for (std::size_t j = m - 1; j < n; ++j)
                std::swap(a(piv, j), a(m, j));
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a(j, piv), a(j, m));
        }
        if (x == 0.0)
            continue;
        for (std::size_t i = m + 1; i < n; ++i) {
            double y = a(i, m - 1);
            if (y == 0.0)
                continue;
            y /= x;
            a(i, m - 1) = 0.0;
            for (std::size_t j = m; j < n; ++j)
                a(i, j) -= y * a(m, j);
            for (std::size_t j = 0; j < n; ++j)
                a(j, m) += y * a(j, i);
        }
    }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (destroys a).
std::vector<Complex> hessenberg_qr(Matrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<Complex> w(static_cast<std::size_t>(n));
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j)
            anorm += std::abs(a(i, j));
    int nn = n - 1;
    double t = 0.0;
    double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0, ww = 0.0;
    int total_its = 0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0)
                    s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {
                w[static_cast<std::size_t>(nn)] = Complex(x + t, 0.0);
                --nn;
            } else {
                y = a(nn - 1, nn - 1);
                ww = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + ww;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        double lo = x + z, hi = x + z;
                        if (z != 0.0)
                            hi = x - ww / z;
                        w[static_cast<std::size_t>(nn - 1)] = Complex(lo, 0.0);
                        w[static_cast<std::size_t>(nn)] = Complex(hi, 0.0);
                    } else {
                        w[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
                        w[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == kMaxQrIterations)
                        throw NumericalError("eigenvalues: QR iteration did not converge after " +
                                                 std::to_string(total_its) + " iterations",
                                             total_its);
                    if (its > 0 && its % 10 == 0) {
                        // Exceptional shift; its size and sign vary so that
                        // symmetric cycles are broken.
                        const int k = its / 10;
                        const double f = (k % 2 ? 0.75 : -0.75) * (1.0 + 0.1 * (k - 1));
                        t += x;
                        for (int i = 0; i <= nn; ++i)
                            a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = f * s;
                        ww = -0.4375 * s * s;
                    }
                    ++its;
                    ++total_its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l)
                            break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                           std::abs(a(m + 1, m + 1)));
                        if (u + v == v)
                            break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2)
                            a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1)
                                r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m)
                                    a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (nn >= 0 && l < nn - 1);
    }
    return w;
}

void sort_spectrum(std::vector<Complex>& w) {
    std::sort(w.begin(), w.end(), [](Complex a, Complex b) {
        const bool ra = a.imag() == 0.0, rb = b.imag() == 0.0;
        if (ra != rb)
            return ra;
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() > b.imag();
    });
}

Complex newton_polish(const Polynomial& f, const Polynomial& df, Complex z) {
    Complex fz = f(z);
    for (int it = 0; it < 8; ++it) {
        const Complex d = df(z);
        if (d == 0.0)
            break;
        const Complex zn = z - fz / d;
        const Complex fn = f(zn);
        if (!(std::abs(fn) < std::abs(fz)))
            break;
        z = zn;
        fz = fn;
    }
    return z;
}

} // namespace

std::vector<Complex> eigenvalues(const Matrix& m) {
    if (!m.square())
        throw std::invalid_argument("eigenvalues: matrix must be square");
    for (double v : m.data())
        if (!std::isfinite(v))
            throw std::invalid_argument("eigenvalues: non-finite entry");
    if (m.rows() == 0)
        return {};
    Matrix a = m;
    balance(a);
    hessenberg(a);
    auto w = hessenberg_qr(a);
    sort_spectrum(w);
    return w;
}

std::vector<Complex> roots(const Polynomial& f, double drop_tol) {
    for (double c : f.coeffs())
        if (!std::isfinite(c))
            throw std::invalid_argument("roots: non-finite coefficient");
    if (f.is_zero())
        throw std::invalid_argument("roots: zero polynomial");
    const Polynomial g = f.trimmed(drop_tol);
    const auto& c = g.coeffs();
    const int deg = static_cast<int>(c.size()) - 1;
    std::vector<Complex> out;
    // Exact zeros at the origin.
    int low = 0;
    while (low < deg && c[static_cast<std::size_t>(low)] == 0.0)
        ++low;
    out.assign(static_cast<std::size_t>(low), Complex(0.0, 0.0));
    const int n = deg - low;
    if (n == 1) {
        out.emplace_back(-c[static_cast<std::size_t>(low)] / c[static_cast<std::size_t>(low + 1)],
                         0.0);
    } else if (n >= 2) {
        Matrix comp(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        const double lead = c[static_cast<std::size_t>(deg)];
        for (int j = 0; j < n; ++j)
            comp(0, static_cast<std::size_t>(j)) = -c[static_cast<std::size_t>(deg - 1 - j)] / lead;
        for (int i = 1; i < n; ++i)
            comp(static_cast<std::size_t>(i), static_cast<std::size_t>(i - 1)) = 1.0;
        balance(comp);
        auto w = hessenberg_qr(comp);
        const Polynomial dg = g.derivative();
        for (Complex z : w) {
            z = newton_polish(g, dg, z);
            if (std::abs(z.imag()) <= 1e-14 * (1.0 + std::abs(z.real())))
                z = Complex(z.real(), 0.0);
            out.push_back(z);
        }
    }
    sort_spectrum(out);
    return out;
}

bool is_real_root(Complex r, double tol_imag) {
    return std::abs(r.imag()) <= tol_imag * (1.0 + std::abs(r.real()));
}

std::vector<double> real_roots(const Polynomial& f, double drop_tol, double tol_imag) {
    std::vector<double> out;
    for (Complex r : roots(f, drop_tol))
        if (is_real_root(r, tol_imag))
            out.push_back(r.real());
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> common_root(const Polynomial& f, const Polynomial& g, double tol) {
    if (f.degree() > 2 || g.degree() > 2)
        throw std::invalid_argument("common_root: polynomials must have degree <= 2");
    const bool fz = f.is_zero(), gz = g.is_zero();
    if (fz && gz)
        throw std::invalid_argument("common_root: both polynomials are zero");
    if (fz || gz) {
        const Polynomial& h = fz ? g : f;
        if (h.degree() < 1)
            return std::nullopt;
        const auto rr = real_roots(h);
        if (rr.empty())
            return std::nullopt;
        return rr.front();
    }
    const double al = f.coeff(2), be = f.coeff(1), ga = f.coeff(0);
    const double de = g.coeff(2), ep = g.coeff(1), nu = g.coeff(0);
    const double A = al * ep - be * de;
    const double B = be * nu - ep * ga;
    const double C = ga * de - al * nu;
    const double sc = f.scale() * g.scale();
    if (std::abs(A * B - C * C) > tol * sc * sc)
        return std::nullopt;
    if (std::abs(A) > 1e-10 * sc && std::abs(C) > 1e-10 * sc) {
        const double r = std::abs(A) >= std::abs(C) ? C / A : B / C;
        return r;
    }
    // Degenerate factors: intersect the real root sets.
    const auto rf = f.degree() >= 1 ? real_roots(f) : std::vector<double>{};
    const auto rg = g.degree() >= 1 ? real_roots(g) : std::vector<double>{};
    std::optional<double> best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (double u : rf)
        for (double v : rg) {
            const double gap = std::abs(u - v);
            if (gap <= std::sqrt(tol) * (1.0 + std::abs(u)) && gap < best_gap) {
                best_gap = gap;
                best = 0.5 * (u + v);
            }
        }
    return best;
}

const char* to_string(EigenKind k) {
    switch (k) {
    case EigenKind::DistinctReal:
        return "distinct_real";
    case EigenKind::DoubleRealDiagonalizable:
        return "double_real_diagonalizable";
    case EigenKind::DoubleRealDefective:
        return "double_real_defective";
    case EigenKind::ComplexPair:
        return "complex_pair";
    }
    return "unknown";
}

int geometric_multiplicity(const Matrix& m, double lambda, double tol) {
    Matrix s = m;
    for (std::size_t i = 0; i < s.rows(); ++i)
        s(i, i) -= lambda;
    const double thr = tol * std::max(1.0, frobenius_norm(m));
    int count = 0;
    for (double sv : singular_values(s))
        if (sv <= thr)
            ++count;
    return count;
}

EigenPair2 eig2(const Matrix& m, double coincidence_tol) {
    if (m.rows() != 2 || m.cols() != 2)
        throw std::invalid_argument("eig2: expected a 2x2 matrix");
    for (double v : m.data())
        if (!std::isfinite(v))
            throw std::invalid_argument("eig2: non-finite entry");
    const double tr = m(0, 0) + m(1, 1);
    const double diff = m(0, 0) - m(1, 1);
    const double disc = diff * diff + 4.0 * m(0, 1) * m(1, 0);
    const double root = std::sqrt(std::abs(disc));
    const double mag = 0.5 * std::abs(tr) + 0.5 * root;
    EigenPair2 out;
    out.relative_gap = root / (1.0 + mag);
    if (root <= coincidence_tol * (1.0 + mag)) {
        const double lam = 0.5 * tr;
        out.values[0] = out.values[1] = lam;
        // A diagonalizable double eigenvalue leaves M - lambda I of the size of
        // the eigenvalue split; a defective one leaves a nilpotent part.
        const double thr = std::max(10.0 * root, 1e-10 * (1.0 + std::abs(lam)));
        Matrix s = m;
        s(0, 0) -= lam;
        s(1, 1) -= lam;
        const double smax = singular_values(s).front();
        if (smax <= thr) {
            out.kind = EigenKind::DoubleRealDiagonalizable;
            out.eigenvector_count = 2;
        } else {
            out.kind = EigenKind::DoubleRealDefective;
            out.eigenvector_count = 1;
        }
        return out;
    }
    if (disc > 0.0) {
        // Cancellation-free pair: q = -(tr + sign(tr) root)/2, roots q and det/q.
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double qq = 0.5 * (tr + (tr >= 0.0 ? root : -root));
        double l1 = qq;
        double l2 = qq != 0.0 ? det / qq : 0.5 * (tr - root);
        if (l1 > l2)
            std::swap(l1, l2);
        out.kind = EigenKind::DistinctReal;
        out.values[0] = l1;
        out.values[1] = l2;
        out.eigenvector_count = 2;
        return out;
    }
    out.kind = EigenKind::ComplexPair;
    out.values[0] = 0.5 * tr;
    out.values[1] = 0.5 * root;
    out.eigenvector_count = 0;
    return out;
}

Spectrum spectrum_small(const Matrix& m, double coincidence_tol) {
    if (!m.square())
        throw std::invalid_argument("spectrum_small: matrix must be square");
    if (m.rows() > 16)
        throw std::invalid_argument("spectrum_small: dimension above 16");
    Spectrum out;
    out.eigenvalues = eigenvalues(m);
    std::vector<double> reals;
    std::vector<Complex> pairs; // upper member of each conjugate pair
    for (Complex z : out.eigenvalues) {
        if (z.imag() == 0.0)
            reals.push_back(z.real());
        else if (z.imag() > 0.0)
            pairs.push_back(z);
    }
    // Enforce conjugate pairing exactly.
    std::vector<Complex> ordered;
    for (double r : reals)
        ordered.emplace_back(r, 0.0);
    for (Complex z : pairs) {
        ordered.push_back(z);
        ordered.push_back(std::conj(z));
    }
    out.eigenvalues = ordered;

    auto record_pair = [&](double lam, double gap_abs) {
        ++out.n_coincident_real_pairs;
        const double tol = std::max(10.0 * gap_abs, 1e-10 * (1.0 + std::abs(lam))) /
                           std::max(1.0, frobenius_norm(m));
        out.coincident_eigenvector_counts.push_back(geometric_multiplicity(m, lam, tol));
    };

    out.min_real_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < reals.size(); ++i) {
        const double g = std::abs(reals[i + 1] - reals[i]) /
                         (1.0 + std::max(std::abs(reals[i]), std::abs(reals[i + 1])));
        out.min_real_gap = std::min(out.min_real_gap, g);
    }
    for (std::size_t i = 0; i + 1 < reals.size();) {
        const double g = std::abs(reals[i + 1] - reals[i]);
        if (g <= coincidence_tol * (1.0 + std::max(std::abs(reals[i]), std::abs(reals[i + 1])))) {
            record_pair(0.5 * (reals[i] + reals[i + 1]), g);
            i += 2;
        } else {
            ++i;
        }
    }
    // A split defective pair can surface as a conjugate pair with a tiny
    // imaginary part; it counts as coincident real, not complex.
    for (Complex z : pairs) {
        const double g = 2.0 * z.imag();
        if (g <= coincidence_tol * (1.0 + std::abs(z)))
            record_pair(z.real(), g);
        else
            ++out.n_complex_pairs;
    }
    return out;
}

double cubic_discriminant(double a, double b, double c, double d) {
    return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c -
           27.0 * a * a * d * d;
}

} // namespace tensorbit
