#include "tensorbit/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "tensorbit/decomp.hpp"
#include "tensorbit/deflation.hpp"
#include "tensorbit/errors.hpp"
#include "tensorbit/rank1.hpp"

namespace tensorbit {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(DocKind k) {
    switch (k) {
    case DocKind::Full222: return "full222";
    case DocKind::Sym222: return "sym222";
    case DocKind::PxPx2: return "pxpx2";
    }
    return "?";
}

std::optional<DocKind> doc_kind_from_string(std::string_view s) {
    for (DocKind k : {DocKind::Full222, DocKind::Sym222, DocKind::PxPx2})
        if (s == to_string(k))
            return k;
    return std::nullopt;
}

namespace {

void validate(const TensorDocument& d) {
    for (double v : d.data)
        if (!std::isfinite(v))
            throw InputError("document: non-finite value in data");
    switch (d.kind) {
    case DocKind::Full222:
        if (d.data.size() != 8)
            throw InputError("document: full222 needs 8 values, got " + std::to_string(d.data.size()));
        break;
    case DocKind::Sym222:
        if (d.data.size() != 4)
            throw InputError("document: sym222 needs 4 values, got " + std::to_string(d.data.size()));
        break;
    case DocKind::PxPx2: {
        if (d.data.empty())
            throw InputError("document: pxpx2 data must start with p");
        const double pv = d.data[0];
        if (pv != std::floor(pv) || pv < 2 || pv > 64)
            throw InputError("document: pxpx2 p must be an integer between 2 and 64");
        const std::size_t p = static_cast<std::size_t>(pv);
        if (d.data.size() != 1 + 2 * p * p)
            throw InputError("document: pxpx2 with p=" + std::to_string(p) + " needs " +
                             std::to_string(1 + 2 * p * p) + " values, got " + std::to_string(d.data.size()));
        break;
    }
    }
}

} // namespace

int TensorDocument::p() const { return kind == DocKind::PxPx2 ? static_cast<int>(data.at(0)) : 2; }

Tensor222 TensorDocument::full() const {
    switch (kind) {
    case DocKind::Full222: return Tensor222::from_span(data);
    case DocKind::Sym222: return SymTensor222{data[0], data[1], data[2], data[3]}.to_full();
    case DocKind::PxPx2:
        if (p() != 2)
            throw InputError("command needs a 2x2x2 tensor, got p=" + std::to_string(p()));
        return TensorPxPx2(2, std::span<const double>(data).subspan(1)).to_222();
    }
    throw InputError("document: unknown kind");
}

SymTensor222 TensorDocument::sym() const {
    if (kind == DocKind::Sym222)
        return {data[0], data[1], data[2], data[3]};
    const auto s = SymTensor222::from_full(full(), 1e-12);
    if (!s)
        throw InputError("command needs a symmetric tensor");
    return *s;
}

TensorPxPx2 TensorDocument::pxpx2() const {
    if (kind == DocKind::PxPx2)
        return TensorPxPx2(p(), std::span<const double>(data).subspan(1));
    return TensorPxPx2(full());
}

TensorDocument parse_document(const json& j) {
    if (!j.is_object())
        throw InputError("document: expected a JSON object");
    TensorDocument d;
    if (!j.contains("kind") || !j["kind"].is_string())
        throw InputError("document: missing string field \"kind\"");
    const auto k = doc_kind_from_string(j["kind"].get<std::string>());
    if (!k)
        throw InputError("document: unknown kind \"" + j["kind"].get<std::string>() + "\"");
    d.kind = *k;
    if (!j.contains("data") || !j["data"].is_array())
        throw InputError("document: missing array field \"data\"");
    for (const auto& v : j["data"]) {
        if (!v.is_number())
            throw InputError("document: data entries must be numbers");
        d.data.push_back(v.get<double>());
    }
    if (j.contains("label")) {
        if (!j["label"].is_string())
            throw InputError("document: \"label\" must be a string");
        d.label = j["label"].get<std::string>();
    }
    validate(d);
    return d;
}

TensorDocument parse_document_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("document: ") + e.what());
    }
    return parse_document(j);
}

TensorDocument parse_inline(std::string_view csv, std::optional<DocKind> kind) {
    TensorDocument d;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t end = csv.find(',', pos);
        if (end == std::string_view::npos)
            end = csv.size();
        std::string_view tok = csv.substr(pos, end - pos);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front())))
            tok.remove_prefix(1);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back())))
            tok.remove_suffix(1);
        if (tok.empty())
            throw InputError("--data: empty value");
        if (tok.front() == '+')
            tok.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw InputError("--data: cannot parse \"" + std::string(tok) + "\"");
        d.data.push_back(v);
        pos = end + 1;
    }
    if (kind)
        d.kind = *kind;
    else if (d.data.size() == 8)
        d.kind = DocKind::Full222;
    else if (d.data.size() == 4)
        d.kind = DocKind::Sym222;
    else
        d.kind = DocKind::PxPx2;
    validate(d);
    return d;
}

ordered_json to_json(const TensorDocument& doc) {
    ordered_json j;
    j["kind"] = to_string(doc.kind);
    j["data"] = doc.data;
    if (!doc.label.empty())
        j["label"] = doc.label;
    return j;
}

namespace {

void dump_value(const ordered_json& j, bool full, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case ordered_json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ",\n";
            first = false;
            out += pad + ordered_json(it.key()).dump() + ": ";
            dump_value(it.value(), full, indent + 2, out);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case ordered_json::value_t::array: {
        bool scalar = true;
        for (const auto& v : j)
            scalar = scalar && !v.is_structured();
        if (j.empty()) {
            out += "[]";
            return;
        }
        if (scalar) {
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first)
                    out += ", ";
                first = false;
                dump_value(v, full, indent, out);
            }
            out += "]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& v : j) {
            if (!first)
                out += ",\n";
            first = false;
            out += pad;
            dump_value(v, full, indent + 2, out);
        }
        out += "\n" + close_pad + "]";
        return;
    }
    case ordered_json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
        } else if (full) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
        } else {
            out += j.dump();
        }
        return;
    }
    default: out += j.dump(); return;
    }
}

} // namespace

std::string dump_json(const ordered_json& j, bool full_precision) {
    std::string out;
    dump_value(j, full_precision, 0, out);
    out += "\n";
    return out;
}

namespace {

struct Options {
    std::string input;
    std::string data;
    std::string kind;
    double tol = 1e-9;
    std::string seed_text;
    std::size_t trials = 1000;
    int steps = 1;
    std::string method = "enumerate";
    int p = 3;
    bool json_full = false;
    bool table = false;
    std::string csv;
    unsigned threads = 0;
    std::string rank = "auto";
    std::string experiment_kind;
    double delta_band = 1e-6;
    double gap_tol = 1e-4;
};

TensorDocument load_input(const Options& o) {
    std::optional<DocKind> kind;
    if (!o.kind.empty()) {
        kind = doc_kind_from_string(o.kind);
        if (!kind)
            throw InputError("--kind: expected full222, sym222 or pxpx2");
    }
    if (!o.data.empty() && !o.input.empty())
        throw InputError("give either a document file or --data, not both");
    if (!o.data.empty())
        return parse_inline(o.data, kind);
    if (o.input.empty())
        throw InputError("missing input: document file or --data");
    std::ifstream in(o.input);
    if (!in)
        throw InputError("cannot open " + o.input);
    std::stringstream ss;
    ss << in.rdbuf();
    TensorDocument d = parse_document_text(ss.str());
    if (kind && *kind != d.kind)
        throw InputError("--kind disagrees with the document kind");
    return d;
}

std::uint64_t resolve_seed(const Options& o) {
    std::string text = o.seed_text;
    const char* what = "--seed";
    if (text.empty()) {
        if (const char* env = std::getenv("TENSORBIT_SEED")) {
            text = env;
            what = "TENSORBIT_SEED";
        }
    }
    if (text.empty())
        return 0;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InputError(std::string(what) + ": expected a non-negative 64-bit integer");
    return v;
}

ordered_json vec_json(const Vector& v) { return ordered_json(std::vector<double>(v.begin(), v.end())); }

ordered_json term_json(const Rank1Term& t) {
    return {{"x", vec_json(t.x)}, {"y", vec_json(t.y)}, {"z", vec_json(t.z)}};
}

ordered_json mlrank_json(const MultilinearRank& r) { return {r.r1, r.r2, r.r3}; }

ordered_json cmd_classify(const Options& o) {
    const TensorDocument doc = load_input(o);
    if (!(o.tol > 0.0))
        throw InputError("--tol must be positive");
    ordered_json j;
    if (doc.kind == DocKind::PxPx2 && doc.p() != 2) {
        const TensorPxPx2 x = doc.pxpx2();
        j["kind"] = "pxpx2";
        j["p"] = doc.p();
        j["mlrank"] = mlrank_json(multilinear_rank(x, o.tol));
        const auto sp = pencil_spectrum(x);
        j["pencil_spectrum"] = sp ? to_json(*sp) : ordered_json(nullptr);
        return j;
    }
    OrbitTolerances t;
    t.delta_band = o.tol;
    t.rank_tol = o.tol;
    const Tensor222 x = doc.full();
    const OrbitReport rep = analyze(x, t);
    j["orbit"] = to_string(rep.label.orbit);
    j["rank"] = orbit_rank(rep.label.orbit);
    j["delta"] = rep.delta;
    j["scale"] = rep.scale;
    j["boundary_margin"] = rep.label.boundary_margin;
    j["mlrank"] = mlrank_json(rep.mlrank);
    j["pencil"] = rep.pencil ? to_json(*rep.pencil) : ordered_json(nullptr);
    j["d3_confirmed"] = rep.d3_confirmed;
    if (doc.kind == DocKind::Sym222) {
        j["orbit_sym"] = to_string(classify_sym(doc.sym(), o.tol).orbit);
    }
    return j;
}

std::string table_text(const std::vector<StationaryPoint>& pts) {
    std::ostringstream ss;
    ss << std::setw(14) << "y2" << std::setw(14) << "z2" << std::setw(14) << "Psi" << std::setw(14)
       << "Delta(X-Y)" << std::setw(12) << "Hessian-PD" << std::setw(12) << "degenerate" << "\n";
    ss << std::fixed;
    for (const auto& p : pts) {
        ss << std::setprecision(6) << std::setw(14) << p.y2 << std::setw(14) << p.z2 << std::setw(14) << p.psi
           << std::scientific << std::setprecision(3) << std::setw(14) << p.delta_residual << std::fixed
           << std::setw(12) << (p.hessian_pd ? "yes" : "no") << std::setw(12) << (p.degenerate ? "yes" : "no")
           << "\n";
    }
    return ss.str();
}

ordered_json cmd_rank1(const Options& o, std::string& text_out) {
    const TensorDocument doc = load_input(o);
    ordered_json j;
    j["method"] = o.method;
    if (o.method == "hopm") {
        HopmOptions ho;
        ho.seed = resolve_seed(o);
        const BestRank1Result h = hopm(doc.pxpx2(), ho);
        j["psi"] = h.psi;
        j["term"] = term_json(h.term);
        j["iterations"] = h.iterations;
        j["converged"] = h.converged;
        j["diagnostic"] = h.diagnostic;
        return j;
    }
    if (o.method != "enumerate")
        throw InputError("--method: expected enumerate or hopm");
    const Tensor222 x = doc.full();
    const BestRank1Result b = best_rank1_222(x);
    j["psi"] = b.psi;
    j["term"] = term_json(b.term);
    j["multiplicity"] = b.multiplicity;
    j["infinite_best"] = detect_infinite_best(x);
    j["n_complex"] = b.n_complex;
    j["diagnostic"] = b.diagnostic;
    ordered_json rows = ordered_json::array();
    for (const auto& p : b.all_points)
        rows.push_back({{"y2", p.y2},
                        {"z2", p.z2},
                        {"psi", p.psi},
                        {"delta_residual", p.delta_residual},
                        {"hessian_pd", p.hessian_pd},
                        {"degenerate", p.degenerate}});
    j["points"] = rows;
    if (doc.kind == DocKind::Sym222) {
        const BestRank1Result s = best_rank1_sym(doc.sym());
        ordered_json sp = ordered_json::array();
        for (const auto& p : s.sym_points)
            sp.push_back({{"y", vec_json(p.y)}, {"psi", p.psi}, {"delta_residual", p.delta_residual}});
        j["symmetric_psi"] = s.psi;
        j["symmetric_points"] = sp;
    }
    if (o.table)
        text_out = table_text(b.all_points);
    return j;
}

ordered_json cmd_deflate(const Options& o) {
    const TensorDocument doc = load_input(o);
    if (o.steps < 1)
        throw InputError("--steps must be at least 1");
    ordered_json steps = ordered_json::array();
    bool stopped_early = false;
    auto add_step = [&](int k, const DeflationReport& rep, const std::vector<double>& residual) {
        ordered_json s;
        s["step"] = k;
        s["report"] = to_json(rep);
        s["orbit_rank_after"] = orbit_rank(rep.orbit_after.orbit);
        s["residual"] = residual;
        steps.push_back(s);
    };
    auto small = [](const std::vector<double>& v) {
        double n2 = 0.0;
        for (double c : v)
            n2 += c * c;
        return std::sqrt(n2) < 1e-12;
    };
    if (doc.kind == DocKind::Sym222) {
        SymTensor222 x = doc.sym();
        for (int k = 1; k <= o.steps; ++k) {
            const auto d = deflate_once(x, {});
            x = d.residual;
            const std::vector<double> r{x.a, x.b, x.c, x.d};
            add_step(k, d.report, r);
            if (small(r) && k < o.steps) {
                stopped_early = true;
                break;
            }
        }
    } else if (doc.kind == DocKind::PxPx2 && doc.p() != 2) {
        TensorPxPx2 x = doc.pxpx2();
        HopmOptions ho;
        ho.seed = resolve_seed(o);
        for (int k = 1; k <= o.steps; ++k) {
            const auto d = deflate_once(x, ho, {});
            x = d.residual;
            const auto e = x.entries();
            const std::vector<double> r(e.begin(), e.end());
            add_step(k, d.report, r);
            if (small(r) && k < o.steps) {
                stopped_early = true;
                break;
            }
        }
    } else {
        Tensor222 x = doc.full();
        for (int k = 1; k <= o.steps; ++k) {
            const auto d = deflate_once(x, {});
            x = d.residual;
            const auto e = x.entries();
            const std::vector<double> r(e.begin(), e.end());
            add_step(k, d.report, r);
            if (small(r) && k < o.steps) {
                stopped_early = true;
                break;
            }
        }
    }
    ordered_json j;
    j["steps"] = steps;
    j["stopped_early"] = stopped_early;
    return j;
}

ordered_json cmd_decompose(const Options& o) {
    const TensorDocument doc = load_input(o);
    const SymTensor222 xs = doc.sym();
    int requested = 0;
    if (o.rank == "auto")
        requested = 0;
    else if (o.rank == "1" || o.rank == "2" || o.rank == "3")
        requested = o.rank[0] - '0';
    else
        throw InputError("--rank: expected auto, 1, 2 or 3");
    const SylvesterResult sr = sylvester_rank(xs, o.tol);
    if (requested != 0 && requested != sr.rank)
        throw InfeasibleError("requested rank " + std::to_string(requested) + " but the symmetric rank is " +
                              std::to_string(sr.rank));
    if (!sr.decomposition)
        throw NumericalError("decompose: no decomposition found for rank " + std::to_string(sr.rank), 0);
    const SymDecomposition& dec = *sr.decomposition;
    ordered_json j;
    j["rank"] = sr.rank;
    j["orbit"] = to_string(classify_sym(xs, o.tol).orbit);
    j["sylvester"] = {{"g", {sr.g[0], sr.g[1], sr.g[2]}}, {"discriminant", sr.discriminant}};
    ordered_json vs = ordered_json::array();
    for (const Vector& v : dec.vectors)
        vs.push_back(vec_json(v));
    j["vectors"] = vs;
    j["reconstruction_error"] = dec.reconstruction_error;
    if (sr.rank == 2)
        j["pencil_relation_residuals"] = {dec.pencil_relation_residuals[0], dec.pencil_relation_residuals[1]};
    if (sr.rank == 3) {
        try {
            const CanonicalTransform t = transform_from_canonical(xs);
            j["canonical_transform"] = {{"orbit", to_string(t.orbit)},
                                        {"s", {{t.s(0, 0), t.s(0, 1)}, {t.s(1, 0), t.s(1, 1)}}},
                                        {"residual", t.residual}};
        } catch (const std::exception& e) {
            j["canonical_transform"] = {{"error", e.what()}};
        }
    }
    return j;
}

ordered_json cmd_experiment(const Options& o) {
    if (o.trials < 1)
        throw InputError("--trials must be at least 1");
    ExperimentTolerances t;
    t.delta_band = o.delta_band;
    t.coincidence_tol = o.gap_tol;
    t.threads = o.threads;
    if (!(t.delta_band > 0.0) || !(t.coincidence_tol > 0.0))
        throw InputError("tolerances must be positive");
    const std::uint64_t seed = resolve_seed(o);
    ExperimentStats s;
    try {
        if (o.experiment_kind == "generic")
            s = experiment_generic(o.trials, seed, t);
        else if (o.experiment_kind == "symmetric")
            s = experiment_symmetric(o.trials, seed, t);
        else if (o.experiment_kind == "d3")
            s = experiment_d3_closure(o.trials, seed, t);
        else if (o.experiment_kind == "pxp2")
            s = experiment_pxpx2(o.p, o.trials, seed, t);
        else
            throw InputError("experiment kind must be generic, symmetric, d3 or pxp2");
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    if (!o.csv.empty()) {
        std::ofstream f(o.csv);
        if (!f)
            throw InputError("cannot write " + o.csv);
        write_csv(s, f);
    }
    return to_json(s);
}

} // namespace

int run_cli(int argc, const char* const argv[], std::ostream& out, std::ostream& err) {
    CLI::App app{"Orbit classification, best rank-1 approximation and deflation of 2x2x2 tensors", "tensorbit"};
    app.require_subcommand(1);
    Options o;

    auto add_input = [&](CLI::App* c) {
        c->add_option("input", o.input, "JSON tensor document");
        c->add_option("--data", o.data, "Inline values a,b,c,... (8: full222, 4: sym222, else pxpx2)");
        c->add_option("--kind", o.kind, "full222, sym222 or pxpx2");
        c->add_option("--tol", o.tol, "Classification tolerance")->capture_default_str();
        c->add_flag("--json", o.json_full, "Print floats with 17 significant digits");
        c->add_option("--seed", o.seed_text, "Seed (default: TENSORBIT_SEED or 0)");
        c->add_option("--threads", o.threads, "Worker cap (0: all cores)");
    };
    CLI::App* classify_cmd = app.add_subcommand("classify", "Orbit, hyperdeterminant and pencil report");
    add_input(classify_cmd);
    CLI::App* rank1_cmd = app.add_subcommand("rank1", "Best rank-1 approximation with stationary points");
    add_input(rank1_cmd);
    rank1_cmd->add_option("--method", o.method, "enumerate or hopm")->capture_default_str();
    rank1_cmd->add_flag("--table", o.table, "Print the stationary-point table before the JSON");
    CLI::App* deflate_cmd = app.add_subcommand("deflate", "Repeated best rank-1 deflation");
    add_input(deflate_cmd);
    deflate_cmd->add_option("--steps", o.steps, "Number of deflation steps")->capture_default_str();
    CLI::App* decompose_cmd = app.add_subcommand("decompose", "Symmetric rank decomposition");
    add_input(decompose_cmd);
    decompose_cmd->add_option("--rank", o.rank, "auto, 1, 2 or 3")->capture_default_str();
    CLI::App* experiment_cmd = app.add_subcommand("experiment", "Seeded Monte Carlo deflation experiments");
    experiment_cmd->add_option("kind", o.experiment_kind, "generic, symmetric, d3 or pxp2")->required();
    experiment_cmd->add_option("--trials", o.trials, "Number of trials")->capture_default_str();
    experiment_cmd->add_option("--seed", o.seed_text, "Seed (default: TENSORBIT_SEED or 0)");
    experiment_cmd->add_option("--p", o.p, "Slab size for pxp2")->capture_default_str();
    experiment_cmd->add_option("--csv", o.csv, "Per-trial CSV output path");
    experiment_cmd->add_option("--threads", o.threads, "Worker cap (0: all cores)");
    experiment_cmd->add_option("--delta-band", o.delta_band, "Relative Delta band")->capture_default_str();
    experiment_cmd->add_option("--gap-tol", o.gap_tol, "Eigenvalue coincidence tolerance")->capture_default_str();
    experiment_cmd->add_flag("--json", o.json_full, "Print floats with 17 significant digits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        ordered_json result;
        std::string text;
        if (*classify_cmd)
            result = cmd_classify(o);
        else if (*rank1_cmd)
            result = cmd_rank1(o, text);
        else if (*deflate_cmd)
            result = cmd_deflate(o);
        else if (*decompose_cmd)
            result = cmd_decompose(o);
        else
            result = cmd_experiment(o);
        out << text << dump_json(result, o.json_full);
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace tensorbit
