#include "tensorbit/rank1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "tensorbit/rng.hpp"

namespace tensorbit {

double psi(const Tensor222& x, const Rank1Term& term) {
    const Tensor222 r = x - term.evaluate222();
    return frobenius_norm_sq(r);
}

double psi(const TensorPxPx2& x, const Rank1Term& term) {
    const TensorPxPx2 r = x - term.evaluate();
    return frobenius_norm_sq(r);
}

namespace {

template <class T>
Vector optimal_x_impl(const T& x, std::span<const double> y, std::span<const double> z) {
    const double ny = dot(y, y), nz = dot(z, z);
    if (ny == 0.0 || nz == 0.0)
        throw std::invalid_argument("optimal_x: y and z must be nonzero");
    const Matrix m = contract_mode(x, z, 3);
    Vector out = m * y;
    for (double& v : out)
        v /= ny * nz;
    return out;
}

} // namespace

Vector optimal_x(const Tensor222& x, std::span<const double> y, std::span<const double> z) {
    return optimal_x_impl(x, y, z);
}

Vector optimal_x(const TensorPxPx2& x, std::span<const double> y, std::span<const double> z) {
    return optimal_x_impl(x, y, z);
}

double reduced_psi(const Tensor222& x, double y2, double z2) {
    const double y[2] = {1.0, y2}, z[2] = {1.0, z2};
    const Vector w = contract_mode(x, z, 3) * std::span<const double>(y, 2);
    return frobenius_norm_sq(x) - dot(w, w) / ((1.0 + y2 * y2) * (1.0 + z2 * z2));
}

bool hessian_pd(const Tensor222& x, double y2, double z2) {
    const double hy = 1e-5 * (1.0 + std::abs(y2));
    const double hz = 1e-5 * (1.0 + std::abs(z2));
    const double f0 = reduced_psi(x, y2, z2);
    const double fyy = (reduced_psi(x, y2 + hy, z2) - 2.0 * f0 + reduced_psi(x, y2 - hy, z2)) / (hy * hy);
    const double fzz = (reduced_psi(x, y2, z2 + hz) - 2.0 * f0 + reduced_psi(x, y2, z2 - hz)) / (hz * hz);
    const double fyz = (reduced_psi(x, y2 + hy, z2 + hz) - reduced_psi(x, y2 + hy, z2 - hz) -
                        reduced_psi(x, y2 - hy, z2 + hz) + reduced_psi(x, y2 - hy, z2 - hz)) /
                       (4.0 * hy * hz);
    return fyy * fzz - fyz * fyz > 0.0 && fyy + fzz > 0.0;
}

namespace {

// Polynomial in (y, z) of degree <= 2 in each: sum c[i][j] y^i z^j.
struct Biquadratic {
    double c[3][3] = {};

    double operator()(double y, double z) const {
        double r = 0.0;
        for (int i = 2; i >= 0; --i) {
            const double row = (c[i][2] * z + c[i][1]) * z + c[i][0];
            r = r * y + row;
        }
        return r;
    }
    double dy(double y, double z) const {
        double r = 0.0;
        for (int i = 2; i >= 1; --i)
            r = r * y + i * ((c[i][2] * z + c[i][1]) * z + c[i][0]);
        return r;
    }
    double dz(double y, double z) const {
        double r = 0.0;
        for (int i = 2; i >= 0; --i)
            r = r * y + (2.0 * c[i][2] * z + c[i][1]);
        return r;
    }
    QuadraticPencil in_y() const {
        return {Polynomial{c[2][0], c[2][1], c[2][2]}, Polynomial{c[1][0], c[1][1], c[1][2]},
                Polynomial{c[0][0], c[0][1], c[0][2]}};
    }
    QuadraticPencil in_z() const {
        return {Polynomial{c[0][2], c[1][2], c[2][2]}, Polynomial{c[0][1], c[1][1], c[2][1]},
                Polynomial{c[0][0], c[1][0], c[2][0]}};
    }
};

struct Equations {
    Biquadratic eq1, eq2, delta;
};

Equations build_equations(const Tensor222& x) {
    const double a = x.a(), b = x.b(), c = x.c(), d = x.d();
    const double e = x.e(), f = x.f(), g = x.g(), h = x.h();
    Equations s;
    // First stationarity equation: al(z) y^2 + be(z) y - al(z).
    const double al[3] = {a * b + c * d, a * f + b * e + c * h + d * g, e * f + g * h};
    const double be[3] = {a * a + c * c - b * b - d * d, 2.0 * (a * e + c * g - b * f - d * h),
                          e * e + g * g - f * f - h * h};
    for (int j = 0; j < 3; ++j) {
        s.eq1.c[2][j] = al[j];
        s.eq1.c[1][j] = be[j];
        s.eq1.c[0][j] = -al[j];
    }
    // Second: de(z) y^2 + ep(z) y + nu(z).
    const double p1 = b * f + d * h, p2 = a * f + b * e + c * h + d * g, p3 = a * e + c * g;
    const double de[3] = {-p1, b * b + d * d - f * f - h * h, p1};
    const double ep[3] = {-p2, 2.0 * (a * b + c * d - e * f - g * h), p2};
    const double nu[3] = {-p3, a * a + c * c - e * e - g * g, p3};
    for (int j = 0; j < 3; ++j) {
        s.eq2.c[2][j] = de[j];
        s.eq2.c[1][j] = ep[j];
        s.eq2.c[0][j] = nu[j];
    }
    // Delta(X - Y) = 0 locus, square root taken.
    const double k = a * g - b * h - c * e + d * f;
    const double q = b * c - a * d + e * h - f * g;
    const double y2c[3] = {a * h - c * f, q, b * g - d * e};
    const double y1c[3] = {k, 0.0, k};
    const double y0c[3] = {d * e - b * g, q, c * f - a * h};
    for (int j = 0; j < 3; ++j) {
        s.delta.c[2][j] = y2c[j];
        s.delta.c[1][j] = y1c[j];
        s.delta.c[0][j] = y0c[j];
    }
    return s;
}

struct NewtonResult {
    double y = 0.0;
    double z = 0.0;
    double residual = std::numeric_limits<double>::infinity();
};

double normalized_residual(const Equations& s, double y, double z, double sx2) {
    const double w = sx2 * (1.0 + y * y) * (1.0 + z * z);
    return std::max(std::abs(s.eq1(y, z)), std::abs(s.eq2(y, z))) / w;
}

NewtonResult polish(const Equations& s, double y, double z, double sx2) {
    NewtonResult best{y, z, normalized_residual(s, y, z, sx2)};
    for (int it = 0; it < 40; ++it) {
        const double f1 = s.eq1(y, z), f2 = s.eq2(y, z);
        const double j11 = s.eq1.dy(y, z), j12 = s.eq1.dz(y, z);
        const double j21 = s.eq2.dy(y, z), j22 = s.eq2.dz(y, z);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det))
            break;
        const double dy = (f1 * j22 - f2 * j12) / det;
        const double dz = (j11 * f2 - j21 * f1) / det;
        y -= dy;
        z -= dz;
        if (!std::isfinite(y) || !std::isfinite(z))
            break;
        const double r = normalized_residual(s, y, z, sx2);
        if (r < best.residual)
            best = {y, z, r};
        if (std::abs(dy) <= 1e-15 * (1.0 + std::abs(y)) && std::abs(dz) <= 1e-15 * (1.0 + std::abs(z)))
            break;
    }
    return best;
}

constexpr double kAcceptResidual = 1e-10;

} // namespace

StationarySystem stationary_system(const Tensor222& x) {
    const Equations s = build_equations(x);
    return {s.eq1.in_y(), s.eq2.in_y(), s.delta.in_y(), s.eq1.in_z(), s.eq2.in_z(), s.delta.in_z()};
}

StationaryPolynomials stationary_polynomials(const Tensor222& x) {
    const StationarySystem s = stationary_system(x);
    StationaryPolynomials p;
    p.pz_stat = resultant(s.eq1_y, s.eq2_y);
    p.pz_eig1 = resultant(s.eq1_y, s.delta_y);
    p.pz_eig2 = resultant(s.eq2_y, s.delta_y);
    const CommonRootParts st = common_root_parts(s.eq1_y, s.eq2_y);
    const CommonRootParts e1 = common_root_parts(s.eq1_y, s.delta_y);
    p.pz_com = st.c * e1.a - e1.c * st.a;
    p.py_stat = resultant(s.eq1_z, s.eq2_z);
    p.py_eig1 = resultant(s.eq1_z, s.delta_z);
    p.py_eig2 = resultant(s.eq2_z, s.delta_z);
    return p;
}

StationarySet stationary_points_222(const Tensor222& x) {
    StationarySet out;
    const double sx = max_abs(x);
    if (sx == 0.0) {
        out.system_degenerate = true;
        return out;
    }
    const double sx2 = sx * sx;
    const Equations s = build_equations(x);
    const QuadraticPencil f = s.eq1.in_y(), g = s.eq2.in_y();
    const CommonRootParts parts = common_root_parts(f, g);
    const Polynomial pz = parts.a * parts.b - parts.c * parts.c;
    const double pscale = pz.scale();
    if (pscale <= 1e-13 * std::pow(sx2, 4)) {
        out.system_degenerate = true;
        return out;
    }
    out.polynomial_degree = pz.degree(1e-12);
    out.reduced_degree = out.polynomial_degree < 8;
    const auto zr = roots(pz, 1e-12);
    out.min_root_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zr.size(); ++i)
        for (std::size_t j = i + 1; j < zr.size(); ++j)
            out.min_root_separation =
                std::min(out.min_root_separation, std::abs(zr[i] - zr[j]) / (1.0 + std::abs(zr[i])));

    std::vector<std::pair<double, double>> found;
    auto accept = [&](double y, double z) {
        const NewtonResult nr = polish(s, y, z, sx2);
        if (!(nr.residual <= kAcceptResidual))
            return;
        for (const auto& [fy, fz] : found)
            if (std::abs(fy - nr.y) <= 1e-7 * (1.0 + std::abs(fy)) &&
                std::abs(fz - nr.z) <= 1e-7 * (1.0 + std::abs(fz)))
                return;
        found.emplace_back(nr.y, nr.z);
    };

    for (Complex r : zr) {
        if (!is_real_root(r)) {
            ++out.n_complex_roots;
            continue;
        }
        ++out.n_real_roots;
        const double z = r.real();
        const double A = parts.a(z), B = parts.b(z), C = parts.c(z);
        if (std::abs(A) >= std::abs(C) && A != 0.0)
            accept(C / A, z);
        else if (C != 0.0)
            accept(B / C, z);
        // Near-multiple roots blur the quotient; the individual quadratics
        // supply the remaining candidates.
        for (const QuadraticPencil* q : {&f, &g}) {
            const auto co = q->at(z);
            const Polynomial qy{co[2], co[1], co[0]};
            if (qy.degree(1e-14) >= 1)
                for (double y : real_roots(qy, 1e-14))
                    accept(y, z);
        }
    }

    const double nx2 = frobenius_norm_sq(x);
    for (const auto& [y2, z2] : found) {
        StationaryPoint p;
        p.y2 = y2;
        p.z2 = z2;
        const double y[2] = {1.0, y2}, z[2] = {1.0, z2};
        p.x = optimal_x(x, y, z);
        const Rank1Term t = p.term();
        p.psi = psi(x, t);
        p.delta_residual = hyperdet(x - t.evaluate222());
        p.equation_residual = normalized_residual(s, y2, z2, sx2);
        const double tnorm = norm2(p.x) * std::sqrt((1.0 + y2 * y2) * (1.0 + z2 * z2));
        p.degenerate = tnorm <= 1e-8 * std::sqrt(nx2);
        p.hessian_pd = hessian_pd(x, y2, z2);
        out.points.push_back(std::move(p));
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const StationaryPoint& l, const StationaryPoint& r) {
                  if (l.degenerate != r.degenerate)
                      return !l.degenerate;
                  if (l.psi != r.psi)
                      return l.psi < r.psi;
                  return std::make_pair(l.y2, l.z2) < std::make_pair(r.y2, r.z2);
              });
    return out;
}

namespace {

Vector dominant_left_vector(const Matrix& unfolding) {
    const Matrix gram = unfolding * unfolding.transposed();
    const SymmetricEigen eig = symmetric_eigen(gram);
    return eig.vectors.column(0);
}

void normalize(Vector& v) {
    const double n = norm2(v);
    if (n > 0.0)
        for (double& c : v)
            c /= n;
}

struct HopmRun {
    Rank1Term term;
    double psi = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

HopmRun hopm_single(const TensorPxPx2& x, Vector y, Vector z, const HopmOptions& opt, double nx2) {
    HopmRun run;
    normalize(y);
    normalize(z);
    const int p = x.p();
    Vector xv(static_cast<std::size_t>(p));
    double prev = std::numeric_limits<double>::infinity();
    double lambda = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const Vector y_old = y, z_old = z;
        xv = contract_mode(x, z, 3) * std::span<const double>(y);
        normalize(xv);
        y = contract_mode(x, xv, 1) * std::span<const double>(z); // rows j, cols k
        normalize(y);
        // z_k = sum_ij X_ijk x_i y_j
        const Matrix m1 = contract_mode(x, xv, 1);
        z = m1.transposed() * std::span<const double>(y);
        lambda = norm2(z);
        normalize(z);
        run.iterations = it;
        if (lambda == 0.0)
            break;
        const double cur = nx2 - lambda * lambda;
        double change = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            change = std::max(change, std::abs(y[i] - y_old[i]));
        for (std::size_t i = 0; i < z.size(); ++i)
            change = std::max(change, std::abs(z[i] - z_old[i]));
        if (std::abs(prev - cur) <= opt.tol * std::max(nx2, 1e-300) && change <= 1e-11) {
            run.converged = true;
            break;
        }
        prev = cur;
    }
    run.term.x = xv;
    for (double& c : run.term.x)
        c *= lambda;
    run.term.y = y;
    run.term.z = z;
    run.psi = psi(x, run.term);
    return run;
}

} // namespace

BestRank1Result hopm(const TensorPxPx2& x, const HopmOptions& opt) {
    if (opt.max_iter < 1)
        throw std::invalid_argument("hopm: max_iter must be at least 1");
    if (!(opt.tol > 0.0))
        throw std::invalid_argument("hopm: tol must be positive");
    if (opt.restarts < 1)
        throw std::invalid_argument("hopm: restarts must be at least 1");
    const int p = x.p();
    BestRank1Result out;
    const double nx2 = frobenius_norm_sq(x);
    if (nx2 == 0.0) {
        out.term = {Vector(static_cast<std::size_t>(p), 0.0), Vector(static_cast<std::size_t>(p), 0.0),
                    Vector(2, 0.0)};
        out.term.y[0] = 1.0;
        out.term.z[0] = 1.0;
        out.psi = 0.0;
        out.minimizers = {out.term};
        return out;
    }
    HopmRun best;
    int n_converged = 0;
    for (int r = 0; r < opt.restarts; ++r) {
        Vector y, z;
        if (r == 0) {
            y = dominant_left_vector(unfold(x, 2));
            z = dominant_left_vector(unfold(x, 3));
        } else {
            auto rng = stream_rng(opt.seed, static_cast<std::uint64_t>(r));
            std::normal_distribution<double> nd;
            y.resize(static_cast<std::size_t>(p));
            z.resize(2);
            for (double& v : y)
                v = nd(rng);
            for (double& v : z)
                v = nd(rng);
        }
        HopmRun run = hopm_single(x, y, z, opt, nx2);
        n_converged += run.converged;
        if (run.psi < best.psi)
            best = run;
    }
    out.term = best.term;
    out.psi = best.psi;
    out.iterations = best.iterations;
    out.converged = best.converged;
    out.minimizers = {best.term};
    if (!best.converged)
        out.diagnostic = "hopm: iteration cap reached without convergence";
    else if (n_converged < opt.restarts)
        out.diagnostic = "hopm: " + std::to_string(opt.restarts - n_converged) +
                         " restart(s) hit the iteration cap";
    return out;
}

namespace {

Matrix rotation(double theta) {
    return Matrix{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}};
}

struct Candidate {
    Rank1Term term;
    double psi = 0.0;
    double y2 = 0.0;
    double z2 = 0.0;
    int priority = 0; // lower wins among near-duplicates: exact sources first
};

// Stationary points with y = e2 (mode 2) or z = e2 (mode 3). With that factor
// fixed the others are singular pairs of a 2x2 contraction, computed exactly;
// the point is kept when the fixed factor is itself stationary.
std::vector<Candidate> edge_candidates(const Tensor222& x, double nx) {
    std::vector<Candidate> out;
    const double e2[2] = {0.0, 1.0};
    for (int mode : {2, 3}) {
        const Matrix m = contract_mode(x, e2, mode); // rows i, cols of the free mode
        const SymmetricEigen eig = symmetric_eigen(m.transposed() * m);
        for (int c = 0; c < 2; ++c) {
            const Vector v = eig.vectors.column(static_cast<std::size_t>(c));
            const Vector xv = m * std::span<const double>(v);
            const double sigma = norm2(xv);
            if (sigma <= 1e-12 * nx)
                continue;
            Rank1Term t;
            t.x = xv;
            t.y = mode == 2 ? Vector{0.0, 1.0} : v;
            t.z = mode == 3 ? Vector{0.0, 1.0} : v;
            // Gradient along the fixed factor: X contracted with the other two.
            const Matrix g_m = contract_mode(x, t.x, 1); // rows j, cols k
            const Vector g = mode == 2 ? g_m * std::span<const double>(t.z)
                                       : g_m.transposed() * std::span<const double>(t.y);
            if (std::abs(g[0]) > 1e-12 * nx * sigma)
                continue;
            out.push_back({t, psi(x, t), 0.0, 0.0, 0});
        }
    }
    return out;
}

// Chart coordinates of a rank-1 term, for deterministic tie ordering.
std::pair<double, double> chart_coords(const Rank1Term& t) {
    const double inf = std::numeric_limits<double>::infinity();
    const double y2 = t.y[0] != 0.0 ? t.y[1] / t.y[0] : inf;
    const double z2 = t.z[0] != 0.0 ? t.z[1] / t.z[0] : inf;
    return {y2, z2};
}

} // namespace

BestRank1Result best_rank1_222(const Tensor222& x, const BestRank1Options& opt) {
    BestRank1Result out;
    const double nx2 = frobenius_norm_sq(x);
    const StationarySet primary = stationary_points_222(x);
    out.all_points = primary.points;
    out.n_complex = primary.n_complex_roots;
    if (nx2 == 0.0) {
        out.term = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
        out.psi = 0.0;
        out.minimizers = {out.term};
        return out;
    }

    std::vector<Candidate> cands;
    double degenerate_min = std::numeric_limits<double>::infinity();
    for (const auto& p : primary.points) {
        if (p.degenerate) {
            degenerate_min = std::min(degenerate_min, p.psi);
            continue;
        }
        cands.push_back({p.term(), p.psi, p.y2, p.z2, 1});
    }
    for (Candidate& c : edge_candidates(x, std::sqrt(nx2))) {
        std::tie(c.y2, c.z2) = chart_coords(c.term);
        cands.push_back(c);
    }
    // A second chart, rotated in modes 2 and 3, reaches optima with y1 = 0 or
    // z1 = 0 that the first chart cannot represent.
    const Matrix r2 = rotation(0.5), r3 = rotation(0.9);
    const Tensor222 xr = multilinear_transform(x, Matrix::identity(2), r2, r3);
    const StationarySet rotated = stationary_points_222(xr);
    const Matrix r2t = r2.transposed(), r3t = r3.transposed();
    for (const auto& p : rotated.points) {
        if (p.degenerate)
            continue;
        const Rank1Term tr = p.term();
        Rank1Term t{tr.x, r2t * std::span<const double>(tr.y), r3t * std::span<const double>(tr.z)};
        double pt = psi(x, t);
        // Points near the chart edge lose accuracy in the rotation; a few ALS
        // sweeps from there restore it.
        HopmOptions po;
        po.max_iter = 100;
        const HopmRun pr = hopm_single(TensorPxPx2(x), t.y, t.z, po, nx2);
        if (pr.psi <= pt) {
            t = pr.term;
            pt = pr.psi;
        }
        const auto [y2, z2] = chart_coords(t);
        cands.push_back({t, pt, y2, z2, 2});
    }
    std::string diag;
    if (cands.empty())
        diag = "no real non-degenerate stationary point; hopm fallback";
    if (primary.system_degenerate)
        diag += std::string(diag.empty() ? "" : "; ") + "stationarity polynomial vanished";
    if (opt.hopm_crosscheck || cands.empty()) {
        HopmOptions ho;
        ho.restarts = std::max(1, opt.crosscheck_restarts);
        ho.max_iter = 2000;
        const BestRank1Result h = hopm(TensorPxPx2(x), ho);
        const double best_enum = cands.empty()
                                     ? std::numeric_limits<double>::infinity()
                                     : std::min_element(cands.begin(), cands.end(),
                                                        [](const Candidate& l, const Candidate& r) {
                                                            return l.psi < r.psi;
                                                        })->psi;
        if (h.psi < best_enum - 1e-9 * nx2) {
            if (!cands.empty())
                diag += std::string(diag.empty() ? "" : "; ") +
                        "enumeration missed the optimum found by hopm";
            const auto [y2, z2] = chart_coords(h.term);
            cands.push_back({h.term, h.psi, y2, z2, 3});
            out.converged = h.converged;
            out.iterations = h.iterations;
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cands)
        best = std::min(best, c.psi);
    const double band = 1e-9 * best + 1e-12 * nx2;
    std::vector<Candidate> near;
    for (const auto& c : cands)
        if (c.psi <= best + band)
            near.push_back(c);
    std::stable_sort(near.begin(), near.end(),
                     [](const Candidate& l, const Candidate& r) { return l.priority < r.priority; });
    // Flat optima are located only to about eps^(1/4) by the root solver, so
    // near-duplicates merge at a loose distance and keep the exact source.
    std::vector<Candidate> winners;
    for (const auto& c : near) {
        const Tensor222 tc = c.term.evaluate222();
        bool dup = false;
        for (const auto& w : winners)
            if (frobenius_norm_sq(tc - w.term.evaluate222()) <= 1e-6 * nx2) {
                dup = true;
                break;
            }
        if (!dup)
            winners.push_back(c);
    }
    std::sort(winners.begin(), winners.end(), [](const Candidate& l, const Candidate& r) {
        return std::make_pair(l.y2, l.z2) < std::make_pair(r.y2, r.z2);
    });
    out.term = winners.front().term;
    out.psi = winners.front().psi;
    out.multiplicity = static_cast<int>(winners.size());
    for (const auto& w : winners)
        out.minimizers.push_back(w.term);
    if (degenerate_min <= best + band)
        diag += std::string(diag.empty() ? "" : "; ") + "degenerate stationary pair attains the minimum";
    // Tensors whose stationarity system vanishes (rank 1, for instance) still
    // report the optimum as a table row when it lies in the chart.
    if (out.all_points.empty() && std::isfinite(winners.front().y2) && std::isfinite(winners.front().z2)) {
        const Rank1Term& t = out.term;
        StationaryPoint p;
        p.y2 = winners.front().y2;
        p.z2 = winners.front().z2;
        const double s = t.y[0] * t.z[0];
        p.x = {t.x[0] * s, t.x[1] * s};
        p.psi = out.psi;
        p.delta_residual = hyperdet(x - t.evaluate222());
        p.hessian_pd = hessian_pd(x, p.y2, p.z2);
        out.all_points.push_back(p);
    }
    out.diagnostic = diag;
    return out;
}

namespace {

// Gradient of the symmetric criterion up to a factor: |y|^4 y - X.y.y
std::array<double, 2> sym_gradient(const SymTensor222& s, double y1, double y2) {
    const double n2 = y1 * y1 + y2 * y2;
    const double g1 = s.a * y1 * y1 + 2.0 * s.b * y1 * y2 + s.c * y2 * y2;
    const double g2 = s.b * y1 * y1 + 2.0 * s.c * y1 * y2 + s.d * y2 * y2;
    return {n2 * n2 * y1 - g1, n2 * n2 * y2 - g2};
}

void sym_polish(const SymTensor222& s, double& y1, double& y2) {
    for (int it = 0; it < 30; ++it) {
        const auto g = sym_gradient(s, y1, y2);
        const double n2 = y1 * y1 + y2 * y2;
        const double j11 = n2 * n2 + 4.0 * n2 * y1 * y1 - (2.0 * s.a * y1 + 2.0 * s.b * y2);
        const double j12 = 4.0 * n2 * y1 * y2 - (2.0 * s.b * y1 + 2.0 * s.c * y2);
        const double j21 = 4.0 * n2 * y1 * y2 - (2.0 * s.b * y1 + 2.0 * s.c * y2);
        const double j22 = n2 * n2 + 4.0 * n2 * y2 * y2 - (2.0 * s.c * y1 + 2.0 * s.d * y2);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det))
            return;
        const double d1 = (g[0] * j22 - g[1] * j12) / det;
        const double d2 = (j11 * g[1] - j21 * g[0]) / det;
        const double n1 = y1 - d1, n2b = y2 - d2;
        const auto gn = sym_gradient(s, n1, n2b);
        if (std::hypot(gn[0], gn[1]) > std::hypot(g[0], g[1]))
            return;
        y1 = n1;
        y2 = n2b;
        if (std::abs(d1) + std::abs(d2) <= 1e-16 * (1.0 + std::abs(y1) + std::abs(y2)))
            return;
    }
}

SymStationaryPoint make_sym_point(const SymTensor222& s, double z, double y1, double y2) {
    SymStationaryPoint p;
    p.z = z;
    p.y = {y1, y2};
    const Tensor222 full = s.to_full();
    const Rank1Term t{p.y, p.y, p.y};
    p.psi = psi(full, t);
    p.delta_residual = hyperdet(full - t.evaluate222());
    const auto g = sym_gradient(s, y1, y2);
    p.gradient_residual = std::hypot(g[0], g[1]);
    return p;
}

} // namespace

std::vector<SymStationaryPoint> stationary_points_sym(const SymTensor222& s) {
    std::vector<SymStationaryPoint> out;
    const double sc = s.max_abs();
    if (sc == 0.0)
        return out;
    const Polynomial cubic{s.c, 2.0 * s.b - s.d, s.a - 2.0 * s.c, -s.b};
    std::vector<double> zs;
    if (cubic.degree(1e-14) >= 1)
        zs = real_roots(cubic, 1e-14);
    auto add = [&](double z, double y1, double y2) {
        sym_polish(s, y1, y2);
        if (std::hypot(y1, y2) <= 1e-12 * std::cbrt(sc))
            return;
        for (const auto& q : out)
            if (std::abs(q.y[0] - y1) + std::abs(q.y[1] - y2) <= 1e-9 * (1.0 + std::abs(y1) + std::abs(y2)))
                return;
        const double zz = y2 != 0.0 ? y1 / y2 : z;
        out.push_back(make_sym_point(s, zz, y1, y2));
    };
    for (double z : zs) {
        const double w = 1.0 + z * z;
        const double y2 = std::cbrt((s.b * z * z + 2.0 * s.c * z + s.d) / (w * w));
        add(z, z * y2, y2);
    }
    if (cubic.degree(1e-14) < 3) {
        // The ratio y1/y2 is unbounded: y2 = 0 and y1^3 = a.
        add(std::numeric_limits<double>::infinity(), std::cbrt(s.a), 0.0);
    }
    std::sort(out.begin(), out.end(),
              [](const SymStationaryPoint& l, const SymStationaryPoint& r) { return l.psi < r.psi; });
    return out;
}

BestRank1Result best_rank1_sym(const SymTensor222& s) {
    BestRank1Result out;
    out.sym_points = stationary_points_sym(s);
    const Tensor222 full = s.to_full();
    const double nx2 = frobenius_norm_sq(full);
    if (nx2 == 0.0) {
        out.term = {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
        out.minimizers = {out.term};
        return out;
    }
    std::vector<SymStationaryPoint> cands = out.sym_points;
    if (cands.empty()) {
        // Grid over directions u(theta): optimum scale gives Psi = |X|^2 - p(u)^2.
        out.diagnostic = "no real stationary point from the cubic; grid-search fallback";
        double best_val = -1.0, best_t = 0.0;
        for (int k = 0; k < 3600; ++k) {
            const double t = std::numbers::pi * k / 3600.0;
            const double u1 = std::cos(t), u2 = std::sin(t);
            const double pu = s.a * u1 * u1 * u1 + 3.0 * s.b * u1 * u1 * u2 +
                              3.0 * s.c * u1 * u2 * u2 + s.d * u2 * u2 * u2;
            if (pu * pu > best_val) {
                best_val = pu * pu;
                best_t = t;
            }
        }
        const double u1 = std::cos(best_t), u2 = std::sin(best_t);
        const double pu = s.a * u1 * u1 * u1 + 3.0 * s.b * u1 * u1 * u2 + 3.0 * s.c * u1 * u2 * u2 +
                          s.d * u2 * u2 * u2;
        double y1 = std::cbrt(pu) * u1, y2 = std::cbrt(pu) * u2;
        sym_polish(s, y1, y2);
        cands.push_back(make_sym_point(s, y2 != 0.0 ? y1 / y2 : 0.0, y1, y2));
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cands)
        best = std::min(best, c.psi);
    const double band = 1e-9 * best + 1e-12 * nx2;
    for (const auto& c : cands)
        if (c.psi <= best + band)
            out.minimizers.push_back({c.y, c.y, c.y});
    out.multiplicity = static_cast<int>(out.minimizers.size());
    out.term = out.minimizers.front();
    out.psi = psi(full, out.term);
    return out;
}

namespace {

// M^T M proportional to I for every combination of the two matrices, with a
// positive definite induced quadratic form.
bool orthogonal_pencil(const Matrix& m1, const Matrix& m2, double tol, double scale) {
    const Matrix g11 = m1.transposed() * m1;
    const Matrix g22 = m2.transposed() * m2;
    const Matrix g12 = m1.transposed() * m2 + m2.transposed() * m1;
    auto is_scalar = [&](const Matrix& g, double& s) {
        s = 0.5 * (g(0, 0) + g(1, 1));
        return std::abs(g(0, 0) - g(1, 1)) <= tol * scale && std::abs(g(0, 1)) <= tol * scale &&
               std::abs(g(1, 0)) <= tol * scale;
    };
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    if (!is_scalar(g11, s11) || !is_scalar(g22, s22) || !is_scalar(g12, s12))
        return false;
    // s11 u^2 + s12 u v + s22 v^2 > 0 for (u, v) != 0
    return s11 > tol * scale && 4.0 * s11 * s22 - s12 * s12 > tol * scale * scale;
}

} // namespace

bool detect_infinite_best(const Tensor222& x, double tol) {
    const double scale = frobenius_norm_sq(x);
    if (scale == 0.0)
        return false;
    const Matrix x1 = x.slab(0), x2 = x.slab(1);
    const double e1[2] = {1.0, 0.0}, e2[2] = {0.0, 1.0};
    const Matrix n1 = contract_mode(x, e1, 2), n2 = contract_mode(x, e2, 2);
    return orthogonal_pencil(x1, x2, tol, scale) && orthogonal_pencil(n1, n2, tol, scale);
}

} // namespace tensorbit
