// Command-line front end: enumeration, contributions, projections, identity
// checks, and calculator-script emission with machine-readable output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "tautring/emit.hpp"
#include "tautring/excess.hpp"
#include "tautring/invariants.hpp"
#include "tautring/lambda_ring.hpp"
#include "tautring/stargraphs.hpp"
#include "tautring/trees.hpp"
#include "tautring/version.hpp"

using namespace tautring;
using nlohmann::json;

namespace {

Partition parse_partition(const std::string& s) {
    std::vector<int> parts;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (cur.empty()) throw Error("Usage", "empty partition part");
            parts.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return Partition(parts);
}

json tree_to_json(const ColoredTree& t) {
    json out;
    out["vertices"] = json::array();
    for (int v = 0; v < t.n(); ++v) {
        json vtx;
        vtx["genus"] = t.genus[v];
        if (t.color[v] == 0) vtx["color"] = nullptr;
        else vtx["color"] = t.color[v];
        out["vertices"].push_back(vtx);
    }
    out["edges"] = json::array();
    for (auto& e : t.edges) out["edges"].push_back({e[0], e[1]});
    out["encoding"] = canonical_encode(t);
    return out;
}

ColoredTree tree_from_json(const json& j) {
    ColoredTree t;
    for (auto& v : j.at("vertices")) {
        t.genus.push_back(v.at("genus").get<int>());
        t.color.push_back(v.at("color").is_null() ? 0 : v.at("color").get<int>());
    }
    for (auto& e : j.at("edges")) t.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    return t;
}

json star_to_json(const StarGraph& S) {
    json out;
    out["r"] = S.r;
    out["g0"] = S.g0;
    out["legs"] = json::array();
    for (auto& l : S.legs) {
        json leg;
        leg["g"] = l.h;
        leg["mu"] = l.mu;
        out["legs"].push_back(leg);
    }
    return out;
}

std::string star_text(const StarGraph& S) {
    std::string s = "[g0=" + std::to_string(S.g0) + ";";
    for (auto& l : S.legs) {
        s += " (" + std::to_string(l.h) + ",(";
        for (std::size_t i = 0; i < l.mu.size(); ++i)
            s += (i ? "," : "") + std::to_string(l.mu[i]);
        s += "))";
    }
    return s + "]";
}

// Optional enumeration cache keyed by TORELLI_CACHE_DIR; versioned and
// invalidated on mismatch.
std::vector<ColoredTree> enumerate_cached(const Partition& mu, std::optional<int> max_edges) {
    const char* dir = std::getenv("TORELLI_CACHE_DIR");
    if (!dir || !*dir) return enumerate_trees(mu, max_edges);
    int me = max_edges.value_or(mu.codim());
    std::filesystem::path path(dir);
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    std::string mus = mu.str();
    for (auto& c : mus)
        if (c == ',') c = '_';
    path /= "trees_" + mus + "_me" + std::to_string(me) + ".json";
    if (std::filesystem::exists(path)) {
        try {
            std::ifstream in(path);
            json j = json::parse(in);
            if (j.at("version").get<std::string>() == kVersion) {
                std::vector<ColoredTree> out;
                for (auto& tj : j.at("trees")) out.push_back(tree_from_json(tj));
                return out;
            }
        } catch (...) {
            // fall through to recompute
        }
    }
    auto trees = enumerate_trees(mu, max_edges);
    json j;
    j["version"] = kVersion;
    j["trees"] = json::array();
    for (auto& t : trees) j["trees"].push_back(tree_to_json(t));
    std::ofstream out(path);
    out << j.dump();
    return trees;
}

// Minimal parser for lambda polynomials: sums of [coeff*]l<i>[^k] products.
MPoly parse_lambda_expr(const std::string& input) {
    MPoly out;
    std::size_t pos = 0;
    auto skip = [&]() {
        while (pos < input.size() && isspace(static_cast<unsigned char>(input[pos]))) ++pos;
    };
    int sign = 1;
    skip();
    while (pos < input.size()) {
        MPoly term = MPoly::one();
        bool any = false;
        for (;;) {
            skip();
            if (pos < input.size() && (isdigit(static_cast<unsigned char>(input[pos])))) {
                std::size_t start = pos;
                while (pos < input.size() &&
                       (isdigit(static_cast<unsigned char>(input[pos])) || input[pos] == '/'))
                    ++pos;
                term = term * Rat(input.substr(start, pos - start));
                any = true;
            } else if (pos < input.size() && input[pos] == 'l') {
                ++pos;
                std::size_t start = pos;
                while (pos < input.size() && isdigit(static_cast<unsigned char>(input[pos])))
                    ++pos;
                if (start == pos) throw Error("Usage", "expected index after 'l'");
                int idx = std::stoi(input.substr(start, pos - start));
                int power = 1;
                if (pos < input.size() && input[pos] == '^') {
                    ++pos;
                    std::size_t ps = pos;
                    while (pos < input.size() && isdigit(static_cast<unsigned char>(input[pos])))
                        ++pos;
                    power = std::stoi(input.substr(ps, pos - ps));
                }
                term = term * MPoly::var(lambda_name(idx), idx).pow(power);
                any = true;
            } else {
                throw Error("Usage", "unexpected character in expression");
            }
            skip();
            if (pos < input.size() && input[pos] == '*') {
                ++pos;
                continue;
            }
            break;
        }
        if (!any) throw Error("Usage", "empty term");
        out += Rat(sign) * term;
        skip();
        if (pos == input.size()) break;
        if (input[pos] == '+') sign = 1;
        else if (input[pos] == '-') sign = -1;
        else throw Error("Usage", "expected '+' or '-'");
        ++pos;
        skip();
    }
    return out;
}

// Monomial grammar for the invariant ring: products of t<i> and e<i><j>
// factors with optional ^k, e.g. "t1^2*e12".
MPoly parse_inv_monomial(const std::string& input, int s) {
    MPoly out = MPoly::one();
    std::size_t pos = 0;
    while (pos < input.size()) {
        char kind = input[pos];
        if (kind != 't' && kind != 'e') throw Error("Usage", "expected t<i> or e<i><j>");
        ++pos;
        std::size_t start = pos;
        while (pos < input.size() && isdigit(static_cast<unsigned char>(input[pos]))) ++pos;
        std::string digits = input.substr(start, pos - start);
        int power = 1;
        if (pos < input.size() && input[pos] == '^') {
            ++pos;
            std::size_t ps = pos;
            while (pos < input.size() && isdigit(static_cast<unsigned char>(input[pos]))) ++pos;
            power = std::stoi(input.substr(ps, pos - ps));
        }
        Sym2Index I = [&]() {
            if (kind == 't') {
                if (digits.size() != 1) throw Error("Usage", "theta index must be one digit");
                return Sym2Index(digits[0] - '0', digits[0] - '0');
            }
            if (digits.size() != 2) throw Error("Usage", "eta needs two one-digit indices");
            return Sym2Index(digits[0] - '0', digits[1] - '0');
        }();
        if (I.i < 1 || I.j > s) throw Error("Usage", "index outside 1..s");
        out = out * MPoly::var(I.var_name()).pow(power);
        if (pos < input.size()) {
            if (input[pos] != '*') throw Error("Usage", "expected '*'");
            ++pos;
        }
    }
    return out;
}

std::string matrix_str(const QMatrix& M) {
    std::string s;
    for (std::size_t i = 0; i < M.rows(); ++i) {
        s += "[";
        for (std::size_t j = 0; j < M.cols(); ++j) s += (j ? " " : "") + M.at(i, j).str();
        s += "]\n";
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tautring: colored-tree enumeration, excess contributions, invariant-ring "
                 "projections, wall-crossing catalogs and calculator-script emission"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--threads", threads, "worker threads (output is canonical regardless)");

    std::string partition, format = "text", treeSel, emitPath, dialect = "v1", expr, monomial,
                muStr, outPath;
    int g = 0, s = 1, k = 0, r = 2, h = 0, dmax = 50, nIdx = 0;
    std::optional<int> maxEdges;
    bool chernForm = false;

    // trees
    auto* trees = app.add_subcommand("trees", "colored extremal trees");
    auto* treesEnum = trees->add_subcommand("enumerate", "list all trees");
    treesEnum->add_option("--partition", partition)->required();
    treesEnum->add_option("--max-edges", maxEdges);
    treesEnum->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    auto* treesCount = trees->add_subcommand("count", "count trees");
    treesCount->add_option("--partition", partition)->required();
    treesCount->add_option("--max-edges", maxEdges);

    // excess
    auto* excess = app.add_subcommand("excess", "excess-intersection contributions");
    auto* excessCont = excess->add_subcommand("cont", "contribution of one tree");
    excessCont->add_option("--partition", partition)->required();
    excessCont->add_option("--tree", treeSel, "index or canonical encoding")->required();
    excessCont->add_flag("--chern-form", chernForm, "pretty print with c_i(N) symbols");
    auto* excessPull = excess->add_subcommand("pullback", "assemble the full pullback script");
    excessPull->add_option("--partition", partition)->required();
    excessPull->add_option("--emit", emitPath, "output script path")->required();
    excessPull->add_option("--dialect", dialect);

    // lambda
    auto* lambda = app.add_subcommand("lambda", "tautological ring of the moduli of ppavs");
    auto* lambdaDims = lambda->add_subcommand("dims", "per-degree dimensions");
    lambdaDims->add_option("--g", g)->required();
    auto* lambdaPair = lambda->add_subcommand("pairing", "pairing matrix at a degree");
    lambdaPair->add_option("--g", g)->required();
    lambdaPair->add_option("--k", k)->required();
    auto* lambdaEval = lambda->add_subcommand("eval", "normal form / socle evaluation");
    lambdaEval->add_option("--g", g)->required();
    lambdaEval->add_option("--expr", expr)->required();

    // inv
    auto* inv = app.add_subcommand("inv", "invariant ring of theta/eta classes");
    auto* invInt = inv->add_subcommand("integrate", "integrate a degree-gs monomial");
    invInt->add_option("--g", g)->required();
    invInt->add_option("--s", s)->required();
    invInt->add_option("--monomial", monomial)->required();
    auto* invProj = inv->add_subcommand("project-pr", "projected product locus");
    invProj->add_option("--g", g)->required();
    invProj->add_option("--s", s)->required();
    auto* invCap = inv->add_subcommand("capelli", "symbolic determinant-derivative identity");
    invCap->add_option("--g", g)->required();
    invCap->add_option("--s", s)->required();
    auto* invPair = inv->add_subcommand("pairing", "gram matrix at a degree");
    invPair->add_option("--g", g)->required();
    invPair->add_option("--s", s)->required();
    invPair->add_option("--k", k)->required();

    // stars
    auto* stars = app.add_subcommand("stars", "wall-crossing star graphs");
    auto* starsEnum = stars->add_subcommand("enumerate", "catalog for (g, r)");
    starsEnum->add_option("--g", g)->required();
    starsEnum->add_option("--r", r)->required();
    starsEnum->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    auto* starsIfun = stars->add_subcommand("ifun", "leg series");
    starsIfun->set_help_flag("--help", "print help");
    starsIfun->add_option("--h", h)->required();
    starsIfun->add_option("--mu", muStr)->required();
    starsIfun->add_option("--r", r)->required();
    auto* starsAsm = stars->add_subcommand("assemble", "wall-crossing term bundles");
    starsAsm->add_option("--g", g)->required();
    starsAsm->add_option("--r", r)->required();
    starsAsm->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    // check
    auto* check = app.add_subcommand("check", "identity checks");
    auto* chkEis = check->add_subcommand("eisenstein", "divisor-sum identity");
    chkEis->add_option("--g", g)->required();
    chkEis->add_option("--dmax", dmax);
    auto* chkVan = check->add_subcommand("vanishing", "codimension vanishing");
    chkVan->add_option("--partition", partition)->required();
    auto* chkCap = check->add_subcommand("capelli", "same as inv capelli");
    chkCap->add_option("--g", g)->required();
    chkCap->add_option("--s", s)->required();

    // const
    auto* cst = app.add_subcommand("const", "stored and derived constants");
    auto* cstBer = cst->add_subcommand("bernoulli", "Bernoulli number B_n");
    cstBer->add_option("--n", nIdx)->required();
    auto* cstGam = cst->add_subcommand("gamma", "socle evaluation constant");
    cstGam->add_option("--g", g)->required();
    auto* cstJg = cst->add_subcommand("jg", "projected Torelli cycle table");
    cstJg->add_option("--g", g)->required();
    auto* cstTp = cst->add_subcommand("taut-product", "projected product cycle");
    cstTp->add_option("--partition", partition)->required();

    // emit
    auto* emitCmd = app.add_subcommand("emit", "calculator scripts");
    auto* emitDelta = emitCmd->add_subcommand("delta", "kernel-class verification script");
    emitDelta->add_option("--g", g)->required();
    emitDelta->add_option("--out", outPath);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (treesEnum->parsed()) {
            auto ts = enumerate_cached(parse_partition(partition), maxEdges);
            if (format == "json") {
                json out = json::array();
                for (auto& t : ts) out.push_back(tree_to_json(t));
                std::cout << out.dump(2) << "\n";
            } else {
                for (std::size_t i = 0; i < ts.size(); ++i) {
                    std::cout << i << ": n=" << ts[i].n() << " m=" << ts[i].m()
                              << " aut=" << automorphism_order(ts[i])
                              << " enc=" << canonical_encode(ts[i]) << "\n";
                }
            }
        } else if (treesCount->parsed()) {
            std::cout << enumerate_cached(parse_partition(partition), maxEdges).size() << "\n";
        } else if (excessCont->parsed()) {
            Partition mu = parse_partition(partition);
            auto ts = enumerate_cached(mu, std::nullopt);
            const ColoredTree* chosen = nullptr;
            if (!treeSel.empty() && treeSel.find('(') == std::string::npos) {
                std::size_t idx = std::stoul(treeSel);
                if (idx >= ts.size()) throw Error("OutOfRange", "tree index out of range");
                chosen = &ts[idx];
            } else {
                for (auto& t : ts)
                    if (canonical_encode(t) == treeSel) chosen = &t;
                if (!chosen) throw Error("OutOfRange", "no tree with that encoding");
            }
            ContEngine engine(mu);
            const ContPoly& c = engine.contribution(*chosen);
            if (chernForm) std::cout << cont_pretty(c, mu.codim()) << "\n";
            else std::cout << c.expr.str() << "\n";
        } else if (excessPull->parsed()) {
            Partition mu = parse_partition(partition);
            TautExpr pb = torelli_pullback(mu, 49, threads);
            std::string cmp, note;
            try {
                TautProductFormula f = taut_product_formula(mu);
                // target: coeff * lambda poly as an admcycles expression
                std::string lam;
                bool first = true;
                std::vector<std::pair<MPoly::Expo, Rat>> ts(f.lambda_poly.terms().begin(),
                                                            f.lambda_poly.terms().end());
                for (auto& [e, c0] : ts) {
                    std::string mono;
                    for (std::size_t vi = 0; vi < f.lambda_poly.vars().size(); ++vi) {
                        for (int q = 0; q < e[vi]; ++q) {
                            if (!mono.empty()) mono += " * ";
                            mono += "lambdaclass(" +
                                    f.lambda_poly.vars()[vi].substr(1) + ", g, n)";
                        }
                    }
                    Rat cc = c0 * f.coeff;
                    lam += (first ? "" : " + ") + std::string("Fraction(") +
                           cc.num().get_str() + ", " + cc.den().get_str() + ") * " + mono;
                    first = false;
                }
                cmp = lam;
                note = "comparison against the closed-form projected product class";
            } catch (const Error&) {
                // no stored formula; emit without a comparison target
            }
            std::ofstream out(emitPath, std::ios::binary);
            if (!out) throw Error("IO", "cannot open " + emitPath);
            out << emit_script(pb, dialect, cmp, note);
            std::cout << "wrote " << emitPath << " (" << pb.terms.size() << " terms)\n";
        } else if (lambdaDims->parsed()) {
            LambdaBasis b(g);
            auto d = b.dims();
            for (std::size_t i = 0; i < d.size(); ++i) std::cout << (i ? "," : "") << d[i];
            std::cout << "\ntotal " << b.total_dim() << "\n";
        } else if (lambdaPair->parsed()) {
            LambdaBasis b(g);
            QMatrix M = pairing_matrix(b, k);
            std::cout << matrix_str(M);
            std::cout << (M.is_square_nonsingular() ? "nonsingular" : "SINGULAR") << "\n";
        } else if (lambdaEval->parsed()) {
            LambdaBasis b(g);
            MPoly p = parse_lambda_expr(expr).remapped(b.var_names(), b.var_weights());
            if (!p.is_homogeneous()) throw Error("WrongDegree", "expression must be homogeneous");
            int deg = p.degree();
            if (p.is_zero() || deg == b.socle_degree()) {
                std::cout << "socle coefficient " << socle_eval(p, b).str() << ", evaluation "
                          << ab_evaluate(p, b).str() << "\n";
            } else {
                auto c = b.normal_form(p, deg);
                std::cout << "normal form:";
                bool all0 = true;
                for (std::size_t i = 0; i < c.size(); ++i) {
                    if (c[i].is_zero()) continue;
                    std::cout << " + " << c[i].str() << "*" << b.basis_monomial(deg, i).str();
                    all0 = false;
                }
                if (all0) std::cout << " 0";
                std::cout << "\n";
            }
        } else if (invInt->parsed()) {
            InvRing R(g, s);
            MPoly m = parse_inv_monomial(monomial, s);
            std::cout << R.integrate(InvClass{g, s, m}).str() << "\n";
        } else if (invProj->parsed()) {
            InvClass f = project_pr_formula(g, s);
            InvClass sv = project_pr_solve(g, s);
            InvRing R(g, s);
            bool agree = R.normal_form(f, s) == R.normal_form(sv, s);
            std::cout << f.expr.str() << "\n";
            std::cout << (agree ? "solver agrees" : "SOLVER DISAGREES") << "\n";
        } else if (invCap->parsed() || chkCap->parsed()) {
            bool ok = capelli_check(g, s);
            if (ok) std::cout << "ok κ=" << kappa_constant(g, s).str() << "\n";
            else std::cout << "mismatch\n";
            if (!ok) return 1;
        } else if (invPair->parsed()) {
            InvRing R(g, s);
            QMatrix M = R.gram_matrix(k);
            std::cout << matrix_str(M);
            std::cout << (M.is_square_nonsingular() ? "nonsingular" : "SINGULAR") << "\n";
        } else if (starsEnum->parsed()) {
            auto cat = enumerate_stars(g, r);
            if (format == "json") {
                json out = json::array();
                for (auto& S : cat) out.push_back(star_to_json(S));
                std::cout << out.dump(2) << "\n";
            } else {
                for (auto& S : cat)
                    std::cout << star_text(S) << " aut=" << aut_order_star(S)
                              << (star_has_exceptional(S) ? " exceptional" : "") << "\n";
            }
        } else if (starsIfun->parsed()) {
            std::vector<int> mu;
            for (auto& p : parse_partition(muStr).parts) mu.push_back(p);
            auto I = i_function(h, mu, r);
            std::cout << "z-degree " << z_degree(h, mu, r) << "\n";
            if (I.coeffs.empty()) std::cout << "0\n";
            for (int j = I.top_power(); j >= 0; --j)
                std::cout << "z^" << j << ": " << I.coeffs[j].str() << "\n";
        } else if (starsAsm->parsed()) {
            auto terms = wallcross_assemble(g, r);
            if (format == "json") {
                json out = json::array();
                for (auto& t : terms) {
                    json jt;
                    jt["graph"] = star_to_json(t.graph);
                    jt["aut_inverse"] = t.aut_inverse.str();
                    jt["space"] = t.space;
                    jt["exceptional"] = t.exceptional;
                    jt["psi_rules"] = t.psi_rules;
                    json series = json::array();
                    for (auto& I : t.leg_series) {
                        json js;
                        js["z_degree"] = z_degree(I.h, I.mu, I.r);
                        json cs = json::array();
                        for (auto& c : I.coeffs) cs.push_back(c.str());
                        js["coeffs"] = cs;
                        series.push_back(js);
                    }
                    jt["legs"] = series;
                    out.push_back(jt);
                }
                std::cout << out.dump(2) << "\n";
            } else {
                for (auto& t : terms) {
                    std::cout << star_text(t.graph) << " 1/aut=" << t.aut_inverse.str() << " "
                              << t.space << (t.exceptional ? " [exceptional]" : "") << "\n";
                    for (auto& rule : t.psi_rules) std::cout << "    " << rule << "\n";
                }
            }
        } else if (chkEis->parsed()) {
            bool ok = eisenstein_identity_check(g, dmax);
            std::cout << (ok ? "ok" : "FAIL") << " (g=" << g << ", d <= " << dmax << ")\n";
            if (!ok) return 1;
        } else if (chkVan->parsed()) {
            Partition mu = parse_partition(partition);
            int cod = mu.codim(), bound = 2 * mu.total() - 3;
            if (vanishing_predicate(mu))
                std::cout << "vanishes (cod " << cod << " > 2g−3 = " << bound << ")\n";
            else
                std::cout << "does not vanish for degree reasons (cod " << cod
                          << " ≤ 2g−3 = " << bound << ")\n";
        } else if (cstBer->parsed()) {
            std::cout << bernoulli(nIdx).str() << "\n";
        } else if (cstGam->parsed()) {
            std::cout << gamma_constant(g).str() << "\n";
        } else if (cstJg->parsed()) {
            std::cout << jg_table(g).str() << "\n";
        } else if (cstTp->parsed()) {
            auto f = taut_product_formula(parse_partition(partition));
            std::cout << f.coeff.str() << " * (" << f.lambda_poly.str() << ")\n";
        } else if (emitDelta->parsed()) {
            std::string script = delta_emit(g);
            if (outPath.empty()) {
                std::cout << script;
            } else {
                std::ofstream out(outPath, std::ios::binary);
                if (!out) throw Error("IO", "cannot open " + outPath);
                out << script;
                std::cout << "wrote " << outPath << "\n";
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
