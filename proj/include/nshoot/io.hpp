#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nshoot/lemma_checks.hpp"
#include "nshoot/shooting.hpp"
#include "nshoot/thresholds.hpp"
#include "nshoot/transforms.hpp"

namespace nshoot {

using Json = nlohmann::ordered_json;

// Fixed 17-significant-digit formatting: CSV numbers round-trip exactly.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------- weight ----------

inline Json weight_to_json(const WeightSpec& w) {
    Json j;
    if (w.start() != 0.0) j["start"] = w.start();
    j["horizon"] = w.horizon();
    Json pieces = Json::array();
    for (const auto& p : w.pieces()) {
        Json jp;
        jp["from"] = p.from;
        jp["to"] = p.to;
        switch (p.kind) {
            case PieceKind::Constant:
                jp["kind"] = "constant";
                jp["data"] = p.poly.c.empty() ? 0.0 : p.poly.c[0];
                break;
            case PieceKind::Polynomial:
                jp["kind"] = "poly";
                jp["data"] = p.poly.c;
                break;
            case PieceKind::Samples:
                jp["kind"] = "samples";
                jp["data"] = Json{{"ts", p.ts}, {"values", p.vs}};
                break;
        }
        pieces.push_back(std::move(jp));
    }
    j["pieces"] = std::move(pieces);
    return j;
}

inline WeightSpec weight_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("horizon") || !j.contains("pieces"))
        throw schema_error("weight: expected an object with 'horizon' and 'pieces'");
    const double start = j.value("start", 0.0);
    const double horizon = j.at("horizon").get<double>();
    if (!j.at("pieces").is_array() || j.at("pieces").empty())
        throw schema_error("weight: 'pieces' must be a non-empty array");
    std::vector<WeightPiece> pieces;
    for (const auto& jp : j.at("pieces")) {
        if (!jp.contains("from") || !jp.contains("to") || !jp.contains("kind") ||
            !jp.contains("data"))
            throw schema_error("weight piece: needs 'from', 'to', 'kind', 'data'");
        WeightPiece p;
        p.from = jp.at("from").get<double>();
        p.to = jp.at("to").get<double>();
        const std::string kind = jp.at("kind").get<std::string>();
        if (kind == "constant") {
            p.kind = PieceKind::Constant;
            p.poly.c = {jp.at("data").get<double>()};
        } else if (kind == "poly") {
            p.kind = PieceKind::Polynomial;
            p.poly.c = jp.at("data").get<std::vector<double>>();
            if (p.poly.c.empty()) throw schema_error("weight piece: empty polynomial");
        } else if (kind == "samples") {
            p.kind = PieceKind::Samples;
            const auto& d = jp.at("data");
            if (!d.contains("ts") || !d.contains("values"))
                throw schema_error("weight piece: sampled data needs 'ts' and 'values'");
            p.ts = d.at("ts").get<std::vector<double>>();
            p.vs = d.at("values").get<std::vector<double>>();
        } else {
            throw schema_error("weight piece: unknown kind '" + kind + "'");
        }
        pieces.push_back(std::move(p));
    }
    try {
        return WeightSpec(std::move(pieces), horizon, start);
    } catch (const domain_error& e) {
        throw schema_error(std::string("weight: ") + e.what());
    }
}

// ---------- nonlinearity ----------

inline Json nonlinearity_to_json(const Nonlinearity& g) {
    Json j;
    switch (g.kind()) {
        case NonlinKind::Logistic2: j["kind"] = "logistic2"; break;
        case NonlinKind::Logistic: j["kind"] = "logistic"; break;
        case NonlinKind::Samples:
            j["kind"] = "samples";
            j["data"] = Json{{"s", g.sample_nodes()}, {"g", g.sample_values()}};
            break;
        case NonlinKind::Custom:
            throw domain_error("nonlinearity_to_json: custom profiles are not serializable");
    }
    j["lipschitz"] = g.lipschitz_bound();
    return j;
}

inline Nonlinearity nonlinearity_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw schema_error("nonlinearity: expected an object with 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "logistic2") return Nonlinearity::logistic2();
    if (kind == "logistic") return Nonlinearity::logistic();
    if (kind == "samples") {
        if (!j.contains("data") || !j.at("data").contains("s") || !j.at("data").contains("g"))
            throw schema_error("nonlinearity: sampled profile needs data.s and data.g");
        try {
            return Nonlinearity::from_samples(j.at("data").at("s").get<std::vector<double>>(),
                                              j.at("data").at("g").get<std::vector<double>>(),
                                              j.value("lipschitz", 0.0));
        } catch (const domain_error& e) {
            throw schema_error(std::string("nonlinearity: ") + e.what());
        }
    }
    throw schema_error("nonlinearity: unknown kind '" + kind + "'");
}

// ---------- problem ----------

inline Json problem_to_json(const ProblemDef& p) {
    Json j;
    j["weight"] = weight_to_json(p.weight);
    j["nonlinearity"] = nonlinearity_to_json(p.g);
    j["lambda"] = p.lambda;
    j["mu"] = p.mu;
    return j;
}

inline ProblemDef problem_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("weight") || !j.contains("nonlinearity"))
        throw schema_error("problem: expected 'weight' and 'nonlinearity'");
    const double lambda = j.value("lambda", 1.0);
    const double mu = j.value("mu", 1.0);
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw schema_error("problem: lambda and mu must be positive");
    return make_problem(weight_from_json(j.at("weight")), nonlinearity_from_json(j.at("nonlinearity")),
                        lambda, mu);
}

// ---------- radial ----------

inline Json radial_to_json(const RadialSpec& rs) {
    Json j;
    j["N"] = rs.dimension;
    j["R_i"] = rs.r_inner;
    j["R_e"] = rs.r_outer;
    j["weight"] = weight_to_json(rs.weight);
    return j;
}

inline RadialSpec radial_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("N") || !j.contains("R_i") || !j.contains("R_e") ||
        !j.contains("weight"))
        throw schema_error("radial: expected 'N', 'R_i', 'R_e', 'weight'");
    RadialSpec rs;
    rs.dimension = j.at("N").get<int>();
    rs.r_inner = j.at("R_i").get<double>();
    rs.r_outer = j.at("R_e").get<double>();
    rs.weight = weight_from_json(j.at("weight"));
    const double scale = std::max(1.0, std::abs(rs.r_outer));
    if (std::abs(rs.weight.start() - rs.r_inner) > 1e-9 * scale ||
        std::abs(rs.weight.horizon() - rs.r_outer) > 1e-9 * scale)
        throw schema_error("radial: weight must span [R_i, R_e] (set its 'start' to R_i)");
    return rs;
}

// ---------- thresholds ----------

inline Json threshold_report_to_json(const ThresholdReport& r) {
    Json j;
    j["sigma"] = r.sigma;
    j["tau"] = r.tau;
    j["t0"] = r.t0;
    j["tT"] = r.tT;
    j["T"] = r.T;
    j["auto_mode"] = r.auto_mode;
    j["params"] = Json{{"kappa0", r.params.kappa0}, {"kappa1", r.params.kappa1},
                       {"t1", r.params.t1},         {"kappa3", r.params.kappa3},
                       {"kappaT", r.params.kappaT}, {"t3", r.params.t3},
                       {"nu", r.params.nu},         {"p1", r.params.p1},
                       {"p2", r.params.p2},         {"kappa2_1", r.params.kappa2_1},
                       {"kappa2_2", r.params.kappa2_2}};
    j["lambda_star_left"] = r.lambda_star_left;
    j["lambda_star_right"] = r.lambda_star_right;
    j["lambda_star"] = r.lambda_star;
    j["gamma1"] = r.gamma1;
    j["gamma3"] = r.gamma3;
    j["lambda_eval"] = r.lambda_eval;
    j["omega_sigma"] = r.omega_sigma;
    j["r1"] = r.r1;
    j["l1"] = r.l1;
    for (int i = 0; i < 2; ++i) {
        Json c;
        c["kappa_sigma"] = r.kappa_sigma[i];
        c["y_sigma"] = r.y_sigma[i];
        c["omega_cap"] = r.omega_cap[i];
        c["kappa2"] = r.kappa2[i];
        c["t2"] = r.t2[i];
        c["omega"] = r.omega[i];
        c["mu_component"] = r.mu_components[i];
        j["components"].push_back(std::move(c));
    }
    j["mu_star"] = r.mu_star;
    j["epsilon_hat"] = r.epsilon_hat;
    j["delta_eps"] = r.delta_eps;
    j["delta_eps_heuristic"] = r.delta_eps_heuristic;
    j["feasible"] = r.feasible;
    j["flags"] = r.flags;
    return j;
}

// ---------- lemma verdicts ----------

inline Json lemma_suite_to_json(const LemmaSuiteResult& res, std::uint64_t seed) {
    Json j;
    j["seed"] = seed;
    j["total"] = res.total;
    j["failures"] = res.failures;
    Json suites = Json::array();
    for (const auto& id : all_lemma_ids()) {
        const auto it = res.cases.find(id);
        if (it == res.cases.end()) continue;
        Json s;
        s["lemma"] = id;
        s["trials"] = it->second.size();
        std::size_t fails = 0;
        Json cases = Json::array();
        for (const auto& c : it->second) {
            if (!c.pass) ++fails;
            Json jc;
            jc["trial"] = c.trial;
            jc["pass"] = c.pass;
            jc["margin"] = c.margin;
            Json draws = Json::object();
            for (const auto& [k, v] : c.draws) draws[k] = v;
            jc["draws"] = std::move(draws);
            jc["witness"] = Json{{"x", c.witness.x}, {"y", c.witness.y}};
            cases.push_back(std::move(jc));
        }
        s["failures"] = fails;
        s["cases"] = std::move(cases);
        suites.push_back(std::move(s));
    }
    j["suites"] = std::move(suites);
    return j;
}

// ---------- CSV exports ----------

inline std::string solutions_to_csv(const std::vector<Solution>& sols, const ProblemDef& p,
                                    std::size_t samples_per_solution = 2000) {
    std::string out = "solution,t,u,du\n";
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const Trajectory& tr = sols[i].trajectory;
        for (std::size_t k = 0; k <= samples_per_solution; ++k) {
            const double t = p.t_begin() + (p.t_end() - p.t_begin()) * static_cast<double>(k) /
                                               static_cast<double>(samples_per_solution);
            const PlanarState s = tr.eval(t);
            out += std::to_string(i);
            out += ',';
            out += fmt_double(t);
            out += ',';
            out += fmt_double(s.x);
            out += ',';
            out += fmt_double(s.y);
            out += '\n';
        }
    }
    return out;
}

inline std::string trajectory_to_csv(const Trajectory& tr, std::size_t samples = 2000) {
    std::string out = "t,x,y\n";
    const double a = tr.t_front(), b = tr.t_back();
    for (std::size_t k = 0; k <= samples; ++k) {
        const double t = a + (b - a) * static_cast<double>(k) / static_cast<double>(samples);
        const PlanarState s = tr.eval(t);
        out += fmt_double(t);
        out += ',';
        out += fmt_double(s.x);
        out += ',';
        out += fmt_double(s.y);
        out += '\n';
    }
    return out;
}

inline std::string continua_to_csv(const Continuum& fwd, const Continuum& bwd) {
    std::string out = "direction,xi,x,y\n";
    const auto dump = [&out](const Continuum& c, const char* name) {
        for (const auto& n : c.nodes) {
            out += name;
            out += ',';
            out += fmt_double(n.xi);
            out += ',';
            out += fmt_double(n.image.x);
            out += ',';
            out += fmt_double(n.image.y);
            out += '\n';
        }
    };
    dump(fwd, "forward");
    dump(bwd, "backward");
    return out;
}

inline std::string sweep_to_csv(const SweepResult& res) {
    std::string out = "lambda,mu,count,status\n";
    for (const auto& c : res.cells) {
        out += fmt_double(c.lambda);
        out += ',';
        out += fmt_double(c.mu);
        out += ',';
        out += std::to_string(c.count);
        out += ',';
        out += c.status;
        out += '\n';
    }
    return out;
}

inline Json intersections_to_json(const std::vector<IntersectionPoint>& pts) {
    Json j;
    Json arr = Json::array();
    for (const auto& ip : pts) {
        arr.push_back(Json{{"xi_forward", ip.xi_forward},
                           {"xi_backward", ip.xi_backward},
                           {"x", ip.point.x},
                           {"y", ip.point.y},
                           {"residual", ip.residual}});
    }
    j["points"] = std::move(arr);
    return j;
}

// ---------- CSV round-trip parsing ----------

// Parse a CSV produced by the exporters back into cells (header included).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw schema_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write file: " + path);
    out << content;
}

inline Json load_json(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(std::string("invalid JSON in ") + path + ": " + e.what());
    }
}

} // namespace nshoot
