#include "blenderlab/json_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace blenderlab {

using nlohmann::json;

namespace {

// Monomial keys: "1", "x", "y", "a", "x^2", "x*y", "x^2*y", ...
std::array<int, 3> parse_monomial(const std::string& key) {
    std::array<int, 3> e{0, 0, 0};
    if (key == "1") return e;
    size_t pos = 0;
    while (pos < key.size()) {
        const char v = key[pos];
        int slot;
        if (v == 'x') slot = 0;
        else if (v == 'y') slot = 1;
        else if (v == 'a') slot = 2;
        else throw ConfigError("bad monomial key: " + key);
        ++pos;
        int exp = 1;
        if (pos < key.size() && key[pos] == '^') {
            ++pos;
            size_t end = pos;
            while (end < key.size() && std::isdigit(static_cast<unsigned char>(key[end]))) ++end;
            if (end == pos) throw ConfigError("bad exponent in monomial key: " + key);
            exp = std::stoi(key.substr(pos, end - pos));
            pos = end;
        }
        e[slot] += exp;
        if (pos < key.size()) {
            if (key[pos] != '*') throw ConfigError("bad monomial key: " + key);
            ++pos;
        }
    }
    return e;
}

std::string monomial_key(const std::array<int, 3>& e) {
    if (e[0] == 0 && e[1] == 0 && e[2] == 0) return "1";
    std::string out;
    const char* names = "xya";
    for (int v = 0; v < 3; ++v) {
        if (e[v] == 0) continue;
        if (!out.empty()) out += "*";
        out += names[v];
        if (e[v] > 1) out += "^" + std::to_string(e[v]);
    }
    return out;
}

MonomialTable parse_table(const json& j) {
    MonomialTable t;
    for (auto it = j.begin(); it != j.end(); ++it)
        t[parse_monomial(it.key())] = it.value().get<double>();
    return t;
}

json table_json(const MonomialTable& t) {
    json j = json::object();
    for (const auto& [e, c] : t)
        if (c != 0.0) j[monomial_key(e)] = c;
    return j;
}

TransitionSpec parse_transition(const json& j) {
    TransitionSpec spec;
    spec.X = parse_table(j.at("X"));
    spec.Y = parse_table(j.at("Y"));
    // Constant entries inside the tables are hoisted to the spec constants.
    auto hoist = [](MonomialTable& t, double& c) {
        auto it = t.find({0, 0, 0});
        if (it != t.end()) {
            c = it->second;
            t.erase(it);
        }
    };
    hoist(spec.X, spec.const_x);
    hoist(spec.Y, spec.const_y);
    return spec;
}

json transition_json(const TransitionSpec& spec, bool include_consts) {
    MonomialTable x = spec.X, y = spec.Y;
    if (include_consts) {
        if (spec.const_x != 0.0) x[{0, 0, 0}] = spec.const_x;
        if (spec.const_y != 0.0) y[{0, 0, 0}] = spec.const_y;
    }
    return json{{"X", table_json(x)}, {"Y", table_json(y)}};
}

json box_json(const Box2& b) {
    return json::array({json::array({b.x.lo, b.x.hi}), json::array({b.y.lo, b.y.hi})});
}

Box2 parse_box(const json& j) {
    return Box2(Interval(j.at(0).at(0).get<double>(), j.at(0).at(1).get<double>()),
                Interval(j.at(1).at(0).get<double>(), j.at(1).at(1).get<double>()));
}

json jet1_json(const JetD& j) {
    json arr = json::array();
    for (double c : j.c) arr.push_back(c);
    return arr;
}

}  // namespace

HeteroModelConfig parse_model_config(const std::string& json_text) {
    json j = json::parse(json_text);
    HeteroModelConfig cfg;
    const json& eig = j.at("eigenvalues");
    cfg.sigma = eig.at("sigma").get<double>();
    cfg.lambda = eig.at("lambda").get<double>();
    cfg.sigma_u = eig.at("sigma_u").get<double>();
    cfg.sigma_uu = eig.at("sigma_uu").get<double>();
    const json& cst = j.at("constants");
    cfg.s_x = cst.at("s_x").get<double>();
    cfg.s_y = cst.at("s_y").get<double>();
    cfg.q_x = cst.value("q_x", 0.0);
    cfg.q_y = cst.value("q_y", 0.0);
    cfg.h = cst.value("h", 0.5);
    const json& tr = j.at("transitions");
    cfg.T_S = parse_transition(tr.at("T_S"));
    if (tr.contains("T_Q")) cfg.T_Q = parse_transition(tr.at("T_Q"));
    if (tr.contains("T_H")) cfg.T_H = parse_transition(tr.at("T_H"));
    if (j.contains("boxes")) {
        const json& bx = j.at("boxes");
        auto grab = [&](const char* name, std::optional<Box2>& slot) {
            if (bx.contains(name)) slot = parse_box(bx.at(name));
        };
        grab("V_S", cfg.V_S);
        grab("V_S_prime", cfg.V_Sp);
        grab("V_S_second", cfg.V_Spp);
        grab("V_Q", cfg.V_Q);
        grab("V_Q_prime", cfg.V_Qp);
        grab("V_Q_second", cfg.V_Qpp);
        grab("V_H", cfg.V_H);
    }
    return cfg;
}

std::string serialize_model_config(const HeteroModelConfig& cfg) {
    json j;
    j["eigenvalues"] = {{"sigma", cfg.sigma},
                        {"lambda", cfg.lambda},
                        {"sigma_u", cfg.sigma_u},
                        {"sigma_uu", cfg.sigma_uu}};
    j["constants"] = {{"s_x", cfg.s_x}, {"s_y", cfg.s_y}, {"q_x", cfg.q_x},
                      {"q_y", cfg.q_y}, {"h", cfg.h}};
    j["transitions"] = json::object();
    j["transitions"]["T_S"] = transition_json(cfg.T_S, false);
    if (cfg.T_Q) j["transitions"]["T_Q"] = transition_json(*cfg.T_Q, false);
    if (cfg.T_H) j["transitions"]["T_H"] = transition_json(*cfg.T_H, true);
    json bx = json::object();
    auto put = [&](const char* name, const std::optional<Box2>& slot) {
        if (slot) bx[name] = box_json(*slot);
    };
    put("V_S", cfg.V_S);
    put("V_S_prime", cfg.V_Sp);
    put("V_S_second", cfg.V_Spp);
    put("V_Q", cfg.V_Q);
    put("V_Q_prime", cfg.V_Qp);
    put("V_Q_second", cfg.V_Qpp);
    put("V_H", cfg.V_H);
    if (!bx.empty()) j["boxes"] = bx;
    return j.dump(2);
}

ChainModel parse_chain_model(const std::string& json_text) {
    json j = json::parse(json_text);
    ChainModel c;
    c.sigma2 = j.at("saddle").at("sigma").get<double>();
    c.lambda2 = j.at("saddle").at("lambda").get<double>();
    c.sigma_u = j.at("source").at("sigma_u").get<double>();
    c.sigma_uu = j.at("source").at("sigma_uu").get<double>();
    c.h = j.value("h", 0.5);
    c.d = j.value("d", 0);
    c.order = j.value("order", 5);
    c.T_X = parse_table(j.at("transition").at("X"));
    c.T_Y = parse_table(j.at("transition").at("Y"));
    const JetLayout* L1 = JetLayout::get(1, c.order);
    const JetLayout* L2 = JetLayout::get(2, c.order);
    auto jet1 = [&](const json& arr) {
        JetD out(L1);
        for (size_t k = 0; k < arr.size() && static_cast<int>(k) <= c.order; ++k)
            out.c[k] = arr.at(k).get<double>();
        return out;
    };
    c.y_a = jet1(j.at("y_a"));
    c.x_a = jet1(j.at("x_a"));
    c.gamma = JetD(L2);
    for (auto& [e, coeff] : parse_table(j.at("gamma"))) {
        if (e[1] != 0) throw ConfigError("gamma table uses keys in x and a only");
        const int idx = L2->index(e[0], e[2], 0);
        if (idx < 0) throw ConfigError("gamma monomial exceeds chain jet order");
        c.gamma.c[idx] = coeff;
    }
    c.validate();
    return c;
}

std::string serialize_chain_model(const ChainModel& c) {
    json j;
    j["saddle"] = {{"sigma", c.sigma2}, {"lambda", c.lambda2}};
    j["source"] = {{"sigma_u", c.sigma_u}, {"sigma_uu", c.sigma_uu}};
    j["h"] = c.h;
    j["d"] = c.d;
    j["order"] = c.order;
    j["transition"] = json{{"X", table_json(c.T_X)}, {"Y", table_json(c.T_Y)}};
    j["y_a"] = jet1_json(c.y_a);
    j["x_a"] = jet1_json(c.x_a);
    MonomialTable g;
    for (int idx = 0; idx < c.gamma.size(); ++idx) {
        const auto& e = c.gamma.L->exps[idx];
        if (c.gamma.c[idx] != 0.0) g[{e[0], 0, e[1]}] = c.gamma.c[idx];
    }
    j["gamma"] = table_json(g);
    return j.dump(2);
}

std::string serialize_plan(const RenormPlan& p) {
    json j;
    j["n_minus"] = p.n_minus;
    j["m_minus"] = p.m_minus;
    j["n_plus"] = p.n_plus;
    j["m_plus"] = p.m_plus;
    j["eps"] = p.eps;
    j["Delta"] = p.Delta;
    j["Delta_plus"] = p.Delta_plus;
    j["Delta_requested"] = p.Delta_requested;
    j["d"] = p.d;
    j["order"] = p.order;
    j["s_y_tuned"] = p.s_y_tuned;
    j["q_y_tuned"] = p.q_y_tuned;
    j["H_scale"] = p.H_scale;
    j["printed_hypo2_satisfiable"] = p.printed_hypo2_satisfiable;
    return j.dump(2);
}

RenormPlan parse_plan(const std::string& json_text) {
    json j = json::parse(json_text);
    RenormPlan p;
    p.n_minus = j.at("n_minus").get<int>();
    p.m_minus = j.at("m_minus").get<int>();
    p.n_plus = j.at("n_plus").get<int>();
    p.m_plus = j.at("m_plus").get<int>();
    p.eps = j.at("eps").get<double>();
    p.Delta = j.at("Delta").get<double>();
    p.Delta_plus = j.at("Delta_plus").get<double>();
    p.Delta_requested = j.at("Delta_requested").get<double>();
    p.d = j.at("d").get<double>();
    p.order = j.at("order").get<int>();
    p.s_y_tuned = j.at("s_y_tuned").get<double>();
    p.q_y_tuned = j.at("q_y_tuned").get<double>();
    p.H_scale = j.at("H_scale").get<double>();
    p.printed_hypo2_satisfiable = j.at("printed_hypo2_satisfiable").get<bool>();
    return p;
}

namespace {

json covering_json(const Covering1D& c) {
    json j;
    j["covered"] = c.covered;
    j["margin"] = c.margin;
    j["overlap"] = c.overlap;
    j["eta"] = c.eta;
    j["delta"] = c.delta;
    j["robust"] = c.robust;
    j["robust_requirement"] = c.robust_requirement;
    j["target"] = json::array({c.target_lo, c.target_hi});
    if (c.gap_witness) j["gap_witness"] = *c.gap_witness;
    json pieces = json::array();
    for (const PieceInterval& p : c.pieces)
        pieces.push_back(json{{"branch", p.branch}, {"lo", p.lo}, {"hi", p.hi}});
    j["pieces"] = pieces;
    return j;
}

}  // namespace

std::string serialize_covering(const Covering1D& c) { return covering_json(c).dump(2); }

std::string serialize_covering2d(const Covering2D& c) {
    json j;
    j["covered"] = c.covered;
    j["robust"] = c.robust;
    j["delta_measured"] = c.delta_measured;
    j["lip_x"] = c.lip_x;
    j["reduction_slack"] = c.reduction_slack;
    j["y_covering"] = covering_json(c.y_covering);
    return j.dump(2);
}

std::string serialize_jet_covering(const JetCoveringCertificate& c) {
    json j;
    j["covered"] = c.covered;
    j["margin"] = c.margin;
    j["order0_overlap"] = c.order0_overlap;
    j["order_slack"] = c.order_slack;
    j["delta"] = c.delta;
    j["robust"] = c.robust;
    j["Delta"] = c.Delta;
    j["box_A"] = c.box.A;
    j["box_B"] = c.box.B;
    if (c.gap_witness) j["gap_witness"] = *c.gap_witness;
    return j.dump(2);
}

std::string serialize_cr_report(const CrDistanceReport& r) {
    json j;
    j["order"] = r.order;
    j["grid"] = r.grid;
    j["sup_per_order"] = r.sup_per_order;
    j["overall"] = r.overall;
    j["sup_dx_y"] = r.sup_dx_y;
    return j.dump(2);
}

std::string serialize_cone(const ConeCertificate& c) {
    json j;
    j["certified"] = c.certified;
    j["eta"] = c.eta;
    j["contraction_ratio"] = c.contraction_ratio;
    j["expansion_lower_bound"] = c.expansion_lower_bound;
    j["box"] = box_json(c.box);
    if (c.witness) {
        j["witness"] = {{"point", json::array({c.witness->point.x, c.witness->point.y})},
                        {"direction", json::array({c.witness->direction.x, c.witness->direction.y})},
                        {"achieved_ratio", c.witness->achieved_ratio}};
    }
    return j.dump(2);
}

std::string serialize_horseshoe(const HorseshoeReport& r) {
    json j;
    j["threshold"] = r.threshold;
    j["B"] = box_json(r.B);
    j["image"] = box_json(r.image);
    j["margin_x"] = r.margin_x;
    j["margin_y"] = r.margin_y;
    j["saddle_point"] = json::array({r.saddle.points[0].x, r.saddle.points[0].y});
    j["saddle_mu"] = json::array({r.saddle.mu1.real(), r.saddle.mu2.real()});
    j["saddle_kind"] = to_string(r.saddle.kind);
    j["vertical_multiplier"] = r.vertical_multiplier;
    j["expected_vertical"] = r.expected_vertical;
    return j.dump(2);
}

std::string serialize_cantor(const CantorPair& p) {
    json j;
    j["W"] = box_json(p.W);
    j["image1"] = box_json(p.image1);
    j["image2"] = box_json(p.image2);
    j["disjointness_margin"] = p.disjointness_margin;
    j["shifted_s_y"] = p.shifted_s_y;
    j["word1"] = p.word1.str(p.model.system);
    j["word2"] = p.word2.str(p.model.system);
    return j.dump(2);
}

std::string serialize_flatness(const FlatnessReport& r) {
    json j;
    j["n"] = r.n;
    j["m"] = r.m;
    j["m_odd"] = r.m_odd;
    j["log_distance"] = r.log_distance;
    j["eta_before"] = jet1_json(r.eta_before);
    j["eta_after"] = jet1_json(r.eta_after);
    j["achieved_order"] = r.achieved_order;
    return j.dump(2);
}

std::string serialize_misiurewicz(const MisiurewiczReport& r) {
    json j;
    j["a"] = r.a;
    j["landed"] = r.landed;
    j["misiurewicz"] = r.misiurewicz;
    j["landing_time"] = r.landing_time;
    j["period"] = r.period;
    j["periodic_point"] = r.periodic_point;
    j["multiplier"] = r.multiplier;
    j["landing_distance"] = r.landing_distance;
    return j.dump(2);
}

std::string serialize_tangencies(const TangencyScan& scan) {
    json arr = json::array();
    for (const TangencyRecord& r : scan.records) {
        arr.push_back(json{{"a_star", r.a_star},
                           {"point", json::array({r.point.x, r.point.y})},
                           {"contact_order", r.contact_order},
                           {"clearance", r.clearance},
                           {"curves", r.curves}});
    }
    json j;
    j["records"] = arr;
    j["skipped_parameters"] = scan.skipped_parameters;
    return j.dump(2);
}

std::string covering_pieces_csv(const Covering1D& cert) {
    std::string out = "lo,hi,branch\n";
    char buf[128];
    for (const PieceInterval& p : cert.pieces) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", p.lo, p.hi, p.branch);
        out += buf;
    }
    return out;
}

std::string box_corners_csv(const Box2& B, const Box2& image) {
    std::string out = "box,x,y\n";
    char buf[128];
    auto corners = [&out, &buf](const char* name, const Box2& b) {
        const double xs[2] = {b.x.lo, b.x.hi}, ys[2] = {b.y.lo, b.y.hi};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", name, xs[i], ys[j ^ i]);
                out += buf;
            }
    };
    corners("B", B);
    corners("G2B", image);
    return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp + " for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("atomic rename failed for " + path);
}

}  // namespace blenderlab
