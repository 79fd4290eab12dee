// glueforge command-line front end.

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "glueforge/certificate.hpp"
#include "glueforge/error.hpp"
#include "glueforge/hypgraph.hpp"
#include "glueforge/model.hpp"
#include "glueforge/transforms.hpp"

using namespace glueforge;
using gluing::json;

namespace {

enum Exit { ok = 0, verdict_fail = 1, parse_error = 2, invariant_error = 3, fibered_case = 4 };

struct RunConfig {
    std::string command, input, out, format = "json";
    std::optional<std::int64_t> R, D, h, samples, denom_bound, seed;
    std::optional<double> eps0;
    bool emit_correspondence = false;
    // hyplab
    std::string subset, path, pair;
    std::optional<std::int64_t> window;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::parse, "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

// flags override the file's params block
gluing::Params resolve(const RunConfig& c, const gluing::Params& file) {
    gluing::Params p = file;
    auto take = [](auto& dst, const auto& src) {
        if (src) dst = src;
    };
    take(p.R, c.R);
    take(p.D, c.D);
    take(p.h, c.h);
    take(p.eps0, c.eps0);
    take(p.samples, c.samples);
    take(p.denom_bound, c.denom_bound);
    take(p.seed, c.seed);
    if (!p.D) p.D = 0;
    if (!p.h) p.h = 0;
    if (!p.eps0) p.eps0 = 0.1;
    if (!p.samples) p.samples = 9;
    if (!p.denom_bound) p.denom_bound = torus::kDefaultDenominatorBound;
    if (!p.seed) p.seed = 0;
    if (p.R && *p.R < 1) fail(ErrorKind::domain, "--R must be positive");
    if (*p.D < 0 || *p.h < 0) fail(ErrorKind::domain, "--D and --h must be non-negative");
    if (!(*p.eps0 > 0)) fail(ErrorKind::domain, "--eps0 must be positive");
    if (*p.samples < 2) fail(ErrorKind::domain, "--samples must be at least 2");
    if (*p.denom_bound < 2) fail(ErrorKind::domain, "--denom-bound must be at least 2");
    return p;
}

std::int64_t need_R(const gluing::Params& p) {
    if (!p.R) fail(ErrorKind::domain, "no R given (use --R or params.R)");
    return *p.R;
}

struct Loaded {
    std::string text, hash;
    gluing::GluingGraph X;
    gluing::Params params;
};

Loaded load(const RunConfig& c) {
    Loaded l;
    l.text = read_file(c.input);
    l.hash = sha256_hex(l.text);
    json j;
    try {
        j = json::parse(l.text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::parse, c.input + ": " + e.what());
    }
    l.X = gluing::validate_gluing(j);
    l.params = resolve(c, l.X.params);
    return l;
}

json stamp(const std::string& command, const std::string& hash, const json& params) {
    return json{{"command", command}, {"input_sha256", hash}, {"params", params}};
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.out, std::ios::binary);
    if (!out) fail(ErrorKind::parse, "cannot write " + c.out);
    out << text;
}

void emit(const RunConfig& c, const json& j) { emit(c, j.dump(2) + "\n"); }

int cmd_validate(const RunConfig& c) {
    auto l = load(c);
    std::size_t buried = 0;
    for (const auto& s : l.X.slots()) buried += l.X.buried(s);
    json out = stamp("validate", l.hash, gluing::params_to_json(l.params));
    out["valid"] = true;
    out["pieces"] = l.X.pieces.size();
    out["identifications"] = l.X.identifications.size();
    out["buried_slots"] = buried;
    out["unburied_slots"] = l.X.slots().size() - buried;
    out["stacks"] = l.X.stacks().size();
    out["fibered"] = l.X.fibered();
    emit(c, out);
    return ok;
}

int cmd_report(const RunConfig& c) {
    auto l = load(c);
    const auto R = need_R(l.params);
    auto cert = gluing::check_bounded_combinatorics(l.X, R, *l.params.D, *l.params.denom_bound);
    json out = stamp("report", l.hash, gluing::params_to_json(l.params));
    const auto table = gluing::induced_markings(l.X);
    json induced = json::array();
    for (const auto& e : table.entries)
        induced.push_back({{"slot", e.slot.to_string()}, {"nu", e.nu ? e.nu->to_json() : json(nullptr)}});
    out["induced_markings"] = induced;
    out["certificate"] = cert.to_json();
    out["pass"] = cert.pass();
    emit(c, out);
    return cert.pass() ? ok : verdict_fail;
}

int cmd_collapse(const RunConfig& c) {
    auto l = load(c);
    const auto R = need_R(l.params);
    auto r = transforms::collapse_ibundles(l.X, R, *l.params.h, *l.params.denom_bound);
    json out = stamp("collapse", l.hash, gluing::params_to_json(l.params));
    out["result"] = r.to_json(c.emit_correspondence);
    emit(c, out);
    if (r.fibered) return fibered_case;
    for (const auto& s : r.slots)
        if (!s.lower_bound_holds) return verdict_fail;
    return ok;
}

int cmd_decompose(const RunConfig& c) {
    auto l = load(c);
    json out = stamp("decompose", l.hash, gluing::params_to_json(l.params));
    if (l.X.fibered()) {
        out["fibered"] = true;
        out["stacks"] = l.X.stacks().size();
        emit(c, out);
        return fibered_case;
    }
    auto d = transforms::full_and_maximal_decomposition(l.X);
    transforms::reglue(l.X, d);  // partition check
    out["result"] = d.to_json();
    emit(c, out);
    return ok;
}

int cmd_model(const RunConfig& c) {
    auto l = load(c);
    auto s = model::build_skeleton(l.X, static_cast<int>(*l.params.samples));
    auto th = model::verify_thickness(s, *l.params.eps0);
    const auto params = gluing::params_to_json(l.params);
    if (c.format == "obj") {
        std::string text = "# command model\n# input_sha256 " + l.hash + "\n# params " + params.dump() + "\n";
        text += model::export_skeleton(s, "obj");
        emit(c, text);
    } else if (c.format == "json") {
        json out = stamp("model", l.hash, params);
        out["skeleton"] = s.to_json();
        out["thickness"] = th.to_json();
        emit(c, out);
    } else {
        fail(ErrorKind::domain, "unknown --format `" + c.format + "` (json|obj)");
    }
    return th.pass ? ok : verdict_fail;
}

std::vector<hyp::Vertex> vertex_list(const std::string& s, std::size_t n, const std::string& what) {
    std::vector<hyp::Vertex> out;
    std::stringstream in(s);
    for (std::string tok; std::getline(in, tok, ',');) {
        try {
            std::size_t used = 0;
            const long v = std::stol(tok, &used);
            if (used != tok.size() || v < 0 || static_cast<std::size_t>(v) >= n) throw std::out_of_range(tok);
            out.push_back(static_cast<hyp::Vertex>(v));
        } catch (const std::logic_error&) {
            fail(ErrorKind::parse, what + ": bad vertex `" + tok + "`");
        }
    }
    return out;
}

int cmd_hyplab(const RunConfig& c) {
    const auto text = read_file(c.input);
    const auto hash = sha256_hex(text);
    const auto g = hyp::FiniteGraph::parse_edge_list(text);
    const auto d = hyp::all_pairs_distances(g);
    const std::size_t n = g.vertex_count();
    json params{{"seed", c.seed.value_or(0)}};
    if (c.R) params["r"] = *c.R;
    if (!c.subset.empty()) params["subset"] = c.subset;
    if (!c.path.empty()) params["path"] = c.path;
    if (!c.pair.empty()) params["pair"] = c.pair;
    if (c.window) params["window"] = *c.window;
    json out = stamp("hyplab", hash, params);
    out["vertices"] = n;
    out["edges"] = g.edges().size();
    const auto fp = hyp::four_point_delta(d);
    out["delta"] = {{"value", fp.delta_string()}, {"witness", fp.witness}};
    if (!c.subset.empty()) {
        const auto C = vertex_list(c.subset, n, "--subset");
        const auto q = hyp::quasiconvexity_constant(d, C);
        out["quasiconvexity"] = {{"constant", q.constant}, {"witness", q.witness}};
        const auto r = static_cast<std::int32_t>(c.R.value_or(1));
        const auto st = hyp::check_qconvex_stability(d, C, r);
        json rows = json::array();
        for (const auto& row : st.table) rows.push_back({{"h0", row.h0}, {"r_prime", row.r_prime}});
        out["stability"] = {{"r", r}, {"table", rows}, {"monotone", st.monotone()}, {"degenerate", st.degenerate},
                            {"configurations", st.configurations}};
    }
    if (!c.path.empty()) {
        hyp::PathWitness w{vertex_list(c.path, n, "--path"), hyp::PathClaim::quasigeodesic};
        const auto L = static_cast<std::size_t>(c.window.value_or(static_cast<std::int64_t>(w.vertices.size())));
        const auto rep = hyp::local_to_global_report(d, w, L);
        auto ratio = [](const hyp::Ratio& x) { return json{{"num", x.num}, {"den", x.den}, {"value", x.value()}}; };
        out["path"] = {{"window", rep.window}, {"local_K", ratio(rep.local_k)}, {"global_K", ratio(rep.global_k)},
                       {"quasigeodesic", rep.quasigeodesic}};
    }
    if (!c.pair.empty()) {
        const auto xy = vertex_list(c.pair, n, "--pair");
        if (xy.size() != 2) fail(ErrorKind::parse, "--pair takes two vertices");
        const auto e = hyp::enumerate_geodesics(d, xy[0], xy[1], 1000, static_cast<std::uint64_t>(c.seed.value_or(0)));
        out["geodesics"] = {{"total", e.total}, {"sampled", e.sampled}, {"paths", e.paths}};
    }
    emit(c, out);
    return ok;
}

int exit_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::parse:
        case ErrorKind::domain: return parse_error;
        case ErrorKind::invariant:
        case ErrorKind::backend_mismatch:
        case ErrorKind::unsupported: return invariant_error;
    }
    return invariant_error;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glueforge: gluing certificates, collapses, decompositions and model skeletons"};
    app.set_help_flag("--help", "print help");  // -h would clash with --h
    app.require_subcommand(1);
    RunConfig c;
    auto common = [&](CLI::App* s) {
        s->add_option("--input", c.input, "input file")->required()->check(CLI::ExistingFile);
        s->add_option("--out", c.out, "output path (default stdout)");
        s->add_option("--seed", c.seed, "seed for sampled sub-procedures");
    };
    auto gluing_opts = [&](CLI::App* s) {
        common(s);
        s->add_option("--R", c.R, "combinatorics bound");
        s->add_option("--D", c.D, "height lower bound");
        s->add_option("--h", c.h, "stack height threshold");
        s->add_option("--eps0", c.eps0, "thickness threshold");
        s->add_option("--samples", c.samples, "samples per tube");
        s->add_option("--denom-bound", c.denom_bound, "annulus denominator bound");
        s->add_option("--format", c.format, "json|obj")->check(CLI::IsMember({"json", "obj"}));
    };
    auto* validate = app.add_subcommand("validate", "check a gluing spec");
    auto* report = app.add_subcommand("report", "induced markings, heights and the combinatorics certificate");
    auto* collapse = app.add_subcommand("collapse", "collapse I-bundle stacks");
    auto* decompose = app.add_subcommand("decompose", "full and maximal-compression decomposition");
    auto* model = app.add_subcommand("model", "model skeleton and thickness");
    auto* hyplab = app.add_subcommand("hyplab", "hyperbolicity lab on an edge-list graph");
    for (auto* s : {validate, report, collapse, decompose, model}) gluing_opts(s);
    collapse->add_flag("--emit-correspondence", c.emit_correspondence, "include the block map");
    common(hyplab);
    hyplab->add_option("--R", c.R, "r for the stability table");
    hyplab->add_option("--subset", c.subset, "comma-separated vertex subset");
    hyplab->add_option("--path", c.path, "comma-separated path");
    hyplab->add_option("--window", c.window, "local window for --path");
    hyplab->add_option("--pair", c.pair, "x,y: enumerate geodesics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : parse_error;
    }
    try {
        if (*validate) return cmd_validate(c);
        if (*report) return cmd_report(c);
        if (*collapse) return cmd_collapse(c);
        if (*decompose) return cmd_decompose(c);
        if (*model) return cmd_model(c);
        if (*hyplab) return cmd_hyplab(c);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_for(e.kind());
    }
    return parse_error;
}
