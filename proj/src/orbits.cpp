#include "tensorbit/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tensorbit/errors.hpp"

namespace tensorbit {

const char* to_string(Orbit o) {
    switch (o) {
    case Orbit::D0: return "D0";
    case Orbit::D1: return "D1";
    case Orbit::D2: return "D2";
    case Orbit::D2p: return "D2p";
    case Orbit::D2pp: return "D2pp";
    case Orbit::G2: return "G2";
    case Orbit::D3: return "D3";
    case Orbit::G3: return "G3";
    }
    return "?";
}

std::optional<Orbit> orbit_from_string(std::string_view s) {
    for (Orbit o : {Orbit::D0, Orbit::D1, Orbit::D2, Orbit::D2p, Orbit::D2pp, Orbit::G2,
                    Orbit::D3, Orbit::G3})
        if (s == to_string(o))
            return o;
    return std::nullopt;
}

int orbit_rank(Orbit o) {
    switch (o) {
    case Orbit::D0: return 0;
    case Orbit::D1: return 1;
    case Orbit::D2:
    case Orbit::D2p:
    case Orbit::D2pp:
    case Orbit::G2: return 2;
    case Orbit::D3:
    case Orbit::G3: return 3;
    }
    return -1;
}

const char* to_string(SlabOrder o) {
    return o == SlabOrder::X2X1inv ? "X2*inv(X1)" : "X1*inv(X2)";
}

Tensor222 SymTensor222::to_full() const { return Tensor222({a, b, b, c, b, c, c, d}); }

double SymTensor222::max_abs() const {
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

std::optional<SymTensor222> SymTensor222::from_full(const Tensor222& x, double tol) {
    SymTensor222 s{x.a(), x.b(), x.d(), x.h()};
    const Tensor222 back = s.to_full();
    const double thr = tol * std::max(1.0, tensorbit::max_abs(x));
    for (std::size_t n = 0; n < 8; ++n)
        if (std::abs(back.entries()[n] - x.entries()[n]) > thr)
            return std::nullopt;
    return s;
}

Tensor222 canonical_tensor(Orbit o) {
    switch (o) {
    case Orbit::D0: return Tensor222({0, 0, 0, 0, 0, 0, 0, 0});
    case Orbit::D1: return Tensor222({1, 0, 0, 0, 0, 0, 0, 0});
    case Orbit::D2: return Tensor222({1, 0, 0, 1, 0, 0, 0, 0});
    case Orbit::D2p: return Tensor222({1, 0, 0, 0, 0, 1, 0, 0});
    case Orbit::D2pp: return Tensor222({1, 0, 0, 0, 0, 0, 1, 0});
    case Orbit::G2: return Tensor222({1, 0, 0, 0, 0, 0, 0, 1});
    case Orbit::D3: return Tensor222({0, 1, 1, 0, 1, 0, 0, 0});
    case Orbit::G3: return Tensor222({-1, 0, 0, 1, 0, 1, 1, 0});
    }
    throw std::invalid_argument("canonical_tensor: unknown orbit");
}

double hyperdet(const Tensor222& x) {
    const double a = x.a(), b = x.b(), c = x.c(), d = x.d();
    const double e = x.e(), f = x.f(), g = x.g(), h = x.h();
    const double t = a * h - b * g + d * e - c * f;
    return t * t - 4.0 * (a * d - b * c) * (e * h - f * g);
}

double hyperdet(const SymTensor222& x) {
    const double t = x.b * x.c - x.a * x.d;
    return t * t - 4.0 * (x.b * x.d - x.c * x.c) * (x.a * x.c - x.b * x.b);
}

namespace {

struct RankInfo {
    MultilinearRank rank;
    double margin = std::numeric_limits<double>::infinity();
};

RankInfo rank_with_margin(const Tensor222& x, double tol) {
    RankInfo info;
    int r[3] = {0, 0, 0};
    for (int mode = 1; mode <= 3; ++mode) {
        const Vector sv = singular_values(unfold(x, mode));
        if (sv.front() == 0.0)
            continue;
        for (double s : sv)
            if (s > tol * sv.front())
                ++r[mode - 1];
        info.margin = std::min(info.margin, std::abs(sv.back() / sv.front() - tol));
    }
    info.rank = {r[0], r[1], r[2]};
    return info;
}

} // namespace

OrbitLabel classify(const Tensor222& x, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("classify: tol must be positive");
    OrbitTolerances t;
    t.delta_band = tol;
    t.rank_tol = tol;
    return classify(x, t);
}

OrbitLabel classify(const Tensor222& x, const OrbitTolerances& tol) {
    if (!(tol.delta_band > 0.0) || !(tol.rank_tol > 0.0))
        throw std::invalid_argument("classify: tolerances must be positive");
    const RankInfo ri = rank_with_margin(x, tol.rank_tol);
    const MultilinearRank& r = ri.rank;
    OrbitLabel out;
    out.boundary_margin = ri.margin;
    const int ones = (r.r1 <= 1) + (r.r2 <= 1) + (r.r3 <= 1);
    if (r.r1 == 0 && r.r2 == 0 && r.r3 == 0) {
        out.orbit = Orbit::D0;
        return out;
    }
    if (ones >= 2) {
        out.orbit = Orbit::D1;
        return out;
    }
    if (ones == 1) {
        out.orbit = r.r3 <= 1 ? Orbit::D2 : r.r1 <= 1 ? Orbit::D2p : Orbit::D2pp;
        return out;
    }
    const double scale = std::pow(max_abs(x), 4);
    const double rel = hyperdet(x) / scale;
    out.boundary_margin = std::min(out.boundary_margin, std::abs(std::abs(rel) - tol.delta_band));
    if (rel > tol.delta_band)
        out.orbit = Orbit::G2;
    else if (rel < -tol.delta_band)
        out.orbit = Orbit::G3;
    else
        out.orbit = Orbit::D3;
    return out;
}

Matrix pencil_matrix(const Tensor222& x, SlabOrder order) {
    const Matrix x1 = x.slab(0), x2 = x.slab(1);
    const Matrix& inv_slab = order == SlabOrder::X2X1inv ? x1 : x2;
    const Matrix& other = order == SlabOrder::X2X1inv ? x2 : x1;
    if (condition_number(inv_slab) > kSlabConditionCap)
        throw SingularSlabError(std::string("pencil: slab ") +
                                (order == SlabOrder::X2X1inv ? "X1" : "X2") +
                                " is numerically singular; use the other slab order");
    return other * inverse2(inv_slab);
}

EigenPair2 pencil_eigs(const Tensor222& x, SlabOrder order, double coincidence_tol) {
    return eig2(pencil_matrix(x, order), coincidence_tol);
}

std::optional<PencilReport> pencil_eigs_auto(const Tensor222& x, double coincidence_tol) {
    for (SlabOrder order : {SlabOrder::X2X1inv, SlabOrder::X1X2inv}) {
        try {
            PencilReport rep;
            rep.order = order;
            rep.quotient = pencil_matrix(x, order);
            rep.eig = eig2(rep.quotient, coincidence_tol);
            return rep;
        } catch (const SingularSlabError&) {
        }
    }
    return std::nullopt;
}

OrbitLabel classify_sym(const SymTensor222& xs, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("classify_sym: tol must be positive");
    const Tensor222 x = xs.to_full();
    const RankInfo ri = rank_with_margin(x, tol);
    OrbitLabel out;
    out.boundary_margin = ri.margin;
    if (ri.rank.r1 == 0) {
        out.orbit = Orbit::D0;
        return out;
    }
    if (ri.rank.r1 <= 1 || ri.rank.r2 <= 1 || ri.rank.r3 <= 1) {
        out.orbit = Orbit::D1;
        return out;
    }
    // The eigenvalue split of the pencil scales like sqrt(Delta), so the
    // coincidence threshold is the square root of the Delta band.
    const double gap_tol = std::sqrt(tol);
    if (auto rep = pencil_eigs_auto(x, gap_tol)) {
        out.boundary_margin = std::min(out.boundary_margin, std::abs(rep->eig.relative_gap - gap_tol));
        switch (rep->eig.kind) {
        case EigenKind::DistinctReal: out.orbit = Orbit::G2; break;
        case EigenKind::ComplexPair: out.orbit = Orbit::G3; break;
        default: out.orbit = Orbit::D3; break;
        }
        return out;
    }
    const double rel = hyperdet(xs) / std::pow(xs.max_abs(), 4);
    out.boundary_margin = std::min(out.boundary_margin, std::abs(std::abs(rel) - tol));
    out.orbit = rel > tol ? Orbit::G2 : rel < -tol ? Orbit::G3 : Orbit::D3;
    return out;
}

OrbitReport analyze(const Tensor222& x, const OrbitTolerances& tol) {
    OrbitReport rep;
    rep.label = classify(x, tol);
    rep.delta = hyperdet(x);
    rep.scale = std::pow(max_abs(x), 4);
    rep.mlrank = multilinear_rank(x, tol.rank_tol);
    if (rep.label.orbit != Orbit::D0)
        rep.pencil = pencil_eigs_auto(x, tol.coincidence_tol);
    rep.d3_confirmed = rep.label.orbit == Orbit::D3 && rep.pencil &&
                       rep.pencil->eig.kind == EigenKind::DoubleRealDefective;
    return rep;
}

} // namespace tensorbit
