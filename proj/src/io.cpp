#include "vlc/io.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "json.hpp"

namespace vlc {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<const char*, Vec3>, 3> kPresets{{
    {"balanced", {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}},
    {"unbalanced", {4.0 / 9.0, 3.0 / 9.0, 2.0 / 9.0}},
    {"very_unbalanced", {0.7, 0.15, 0.15}},
}};

Vec3 vec3_from(const json& j, const char* what) {
    if (j.is_string()) {
        if (auto p = s_avg_preset(j.get<std::string>())) return *p;
        throw std::invalid_argument(std::string(what) + ": unknown preset '" + j.get<std::string>() + "'");
    }
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument(std::string(what) + ": expected 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

void require_known(const json& section, const std::string& name, std::initializer_list<std::string_view> keys) {
    if (!section.is_object()) throw std::invalid_argument(name + ": must be an object");
    for (auto it = section.begin(); it != section.end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw std::invalid_argument(name + ": unknown key '" + it.key() + "'");
}

void read_design_section(const json& d, DesignSpec& spec) {
    require_known(d, "design",
                  {"K", "Nc", "Po", "s_avg", "I_U", "Ts", "No", "epsilon", "constraint_mode", "beta", "restarts",
                   "seed", "sca_tol", "sca_max_iter", "lp_dump"});
    if (d.contains("K")) spec.K = d["K"].get<int>();
    if (d.contains("Nc")) spec.Nc = d["Nc"].get<int>();
    if (d.contains("Po")) spec.Po = d["Po"].get<double>();
    if (d.contains("s_avg")) spec.s_avg = vec3_from(d["s_avg"], "s_avg");
    if (d.contains("I_U")) spec.I_U = d["I_U"].get<double>();
    if (d.contains("Ts")) spec.Ts = d["Ts"].get<double>();
    if (d.contains("No")) spec.No = d["No"].get<int>();
    if (d.contains("epsilon")) spec.epsilon = d["epsilon"].get<double>();
    if (d.contains("constraint_mode"))
        spec.constraint_mode = constraint_mode_from_string(d["constraint_mode"].get<std::string>());
    if (d.contains("beta")) {
        spec.beta = d["beta"].is_number() ? Vec3{d["beta"].get<double>(), d["beta"].get<double>(), d["beta"].get<double>()}
                                          : vec3_from(d["beta"], "beta");
    }
    if (d.contains("restarts")) spec.restarts = d["restarts"].get<int>();
    if (d.contains("seed")) spec.rng_seed = d["seed"].get<std::uint64_t>();
    if (d.contains("sca_tol")) spec.sca_tol = d["sca_tol"].get<double>();
    if (d.contains("sca_max_iter")) spec.sca_max_iter = d["sca_max_iter"].get<int>();
    if (d.contains("lp_dump")) spec.lp_dump_path = d["lp_dump"].get<std::string>();
}

json spec_json(const DesignSpec& s) {
    return {{"K", s.K},
            {"Nc", s.Nc},
            {"Po", s.Po},
            {"s_avg", vec3_json(s.s_avg)},
            {"I_U", s.I_U},
            {"Ts", s.Ts},
            {"No", s.No},
            {"epsilon", s.epsilon},
            {"constraint_mode", std::string(to_string(s.constraint_mode))},
            {"beta", vec3_json(s.beta)},
            {"restarts", s.restarts},
            {"seed", s.rng_seed},
            {"sca_tol", s.sca_tol},
            {"sca_max_iter", s.sca_max_iter}};
}

json result_body(const DesignResult& r) {
    const Constellation& c = r.constellation;
    json points = json::array();
    for (int i = 0; i < c.size(); ++i) {
        const auto p = c.point(i);
        points.push_back(std::vector<double>(p.begin(), p.end()));
    }
    json traces = json::array();
    for (const auto& t : r.traces) {
        std::size_t lp_iters = 0;
        for (auto k : t.lp_iterations) lp_iters += k;
        traces.push_back({{"d_min", t.d_min}, {"lp_iterations_total", lp_iters}});
    }
    json individual = json::array();
    for (const auto& v : r.papr.individual) individual.push_back(json::array({v[0], v[1], v[2]}));
    json first_individual = json::array();
    for (const auto& v : r.papr_first_round.individual) first_individual.push_back(json::array({v[0], v[1], v[2]}));
    return {{"d_min", r.d_min},
            {"status", std::string(to_string(r.status))},
            {"restart_scores", r.restart_scores},
            {"iterations", r.iterations},
            {"failures", r.failures},
            {"post_dc_bias", vec3_json(r.post_dc_bias)},
            {"power_deviation", vec3_json(r.power_deviation)},
            {"papr", {{"long_term", vec3_json(r.papr.long_term)}, {"individual", individual}}},
            {"papr_first_round",
             {{"long_term", vec3_json(r.papr_first_round.long_term)}, {"individual", first_individual}}},
            {"beta_used", vec3_json(r.beta_used)},
            {"backoff_rounds", r.backoff_rounds},
            {"trace", traces},
            {"constellation",
             {{"mode", c.mode() == ConstellationMode::joint ? "joint" : "per_color"},
              {"color", std::string(to_string(c.color()))},
              {"K", c.K()},
              {"Nc", c.size()},
              {"D", c.dimension()},
              {"points", points}}}};
}

Color color_from(const std::string& name) {
    if (name == "red") return Color::red;
    if (name == "green") return Color::green;
    if (name == "blue") return Color::blue;
    throw std::invalid_argument("unknown color '" + name + "'");
}

Vec3 read_vec3(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

PaprReport read_papr(const json& j) {
    PaprReport p;
    p.long_term = read_vec3(j.at("long_term"));
    for (const auto& v : j.at("individual")) p.individual.push_back(read_vec3(v));
    return p;
}

LoadedDesign read_design(const json& spec_j, const json& body) {
    LoadedDesign out;
    read_design_section(spec_j, out.spec);
    out.spec = validate_spec(out.spec);
    DesignResult& r = out.result;
    r.d_min = body.at("d_min").get<double>();
    const auto status = body.at("status").get<std::string>();
    r.status = status == "converged" ? DesignStatus::converged
               : status == "iteration_cap" ? DesignStatus::iteration_cap
                                           : DesignStatus::infeasible;
    r.restart_scores = body.at("restart_scores").get<std::vector<double>>();
    r.iterations = body.at("iterations").get<std::vector<int>>();
    r.failures = body.at("failures").get<std::vector<std::string>>();
    r.post_dc_bias = read_vec3(body.at("post_dc_bias"));
    r.power_deviation = read_vec3(body.at("power_deviation"));
    r.papr = read_papr(body.at("papr"));
    r.papr_first_round = read_papr(body.at("papr_first_round"));
    r.beta_used = read_vec3(body.at("beta_used"));
    r.backoff_rounds = body.at("backoff_rounds").get<int>();
    for (const auto& t : body.at("trace")) {
        ScaTrace tr;
        tr.d_min = t.at("d_min").get<std::vector<double>>();
        r.traces.push_back(std::move(tr));
    }
    const json& c = body.at("constellation");
    const int K = c.at("K").get<int>();
    const int Nc = c.at("Nc").get<int>();
    const int D = c.at("D").get<int>();
    const bool joint = c.at("mode").get<std::string>() == "joint";
    if (D != (joint ? 3 : 1) * (2 * K + 1)) throw std::invalid_argument("result: dimension does not match K");
    const auto& points = c.at("points");
    if (points.size() != static_cast<std::size_t>(Nc)) throw std::invalid_argument("result: wrong point count");
    std::vector<double> stacked;
    stacked.reserve(static_cast<std::size_t>(Nc) * D);
    for (const auto& p : points) {
        if (p.size() != static_cast<std::size_t>(D)) throw std::invalid_argument("result: wrong point dimension");
        for (const auto& v : p) stacked.push_back(v.get<double>());
    }
    r.constellation = Constellation::from_stacked(joint ? ConstellationMode::joint : ConstellationMode::per_color,
                                                  color_from(c.at("color").get<std::string>()), K, Nc,
                                                  std::move(stacked));
    return out;
}

}  // namespace

std::vector<double> SnrGrid::values() const {
    if (!(step > 0.0) || !(stop >= start)) throw std::invalid_argument("snr grid needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

SnrGrid parse_snr_grid(const std::string& text) {
    std::istringstream in(text);
    SnrGrid g;
    char c1 = 0;
    char c2 = 0;
    if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
        throw std::invalid_argument("snr grid must look like a:b:step, got '" + text + "'");
    (void)g.values();
    return g;
}

std::optional<Vec3> s_avg_preset(const std::string& name) {
    for (const auto& [n, v] : kPresets)
        if (name == n) return v;
    return std::nullopt;
}

std::string scenario_name(const Vec3& s_avg) {
    for (const auto& [n, v] : kPresets) {
        bool same = true;
        for (int k = 0; k < 3; ++k) same = same && std::abs(v[k] - s_avg[k]) < 1e-9;
        if (same) return n;
    }
    return "custom";
}

ExperimentConfig parse_config(const std::string& json_text) {
    const json doc = json::parse(json_text);
    if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
    ExperimentConfig cfg;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const auto& k = it.key();
        if (k != "design" && k != "sweep" && k != "simulate" && k != "export" && k != "out")
            throw std::invalid_argument("config: unknown section '" + k + "'");
    }
    if (doc.contains("design")) read_design_section(doc["design"], cfg.spec);
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        require_known(s, "sweep", {"epsilon", "K", "s_avg"});
        if (s.contains("epsilon")) cfg.sweep_epsilon = s["epsilon"].get<std::vector<double>>();
        if (s.contains("K")) cfg.sweep_K = s["K"].get<std::vector<int>>();
        if (s.contains("s_avg"))
            for (const auto& v : s["s_avg"]) cfg.sweep_s_avg.push_back(vec3_from(v, "sweep.s_avg"));
    }
    if (doc.contains("simulate")) {
        const json& s = doc["simulate"];
        require_known(s, "simulate", {"snr_grid", "symbols", "joint_result", "decoupled_result"});
        if (s.contains("snr_grid")) cfg.snr_grid = parse_snr_grid(s["snr_grid"].get<std::string>());
        if (s.contains("symbols")) cfg.symbols = s["symbols"].get<std::uint64_t>();
        if (s.contains("joint_result")) cfg.joint_result = s["joint_result"].get<std::string>();
        if (s.contains("decoupled_result")) cfg.decoupled_result = s["decoupled_result"].get<std::string>();
    }
    if (doc.contains("export")) {
        require_known(doc["export"], "export", {"display_samples"});
        if (doc["export"].contains("display_samples"))
            cfg.display_samples = doc["export"]["display_samples"].get<int>();
    }
    if (doc.contains("out")) cfg.out_dir = doc["out"].get<std::string>();

    // Every sweep value must describe a valid spec on its own.
    cfg.spec = validate_spec(cfg.spec);
    for (double e : cfg.sweep_epsilon) {
        DesignSpec s = cfg.spec;
        s.epsilon = e;
        (void)validate_spec(s);
    }
    for (int K : cfg.sweep_K) {
        DesignSpec s = cfg.spec;
        s.K = K;
        (void)validate_spec(s);
    }
    for (const Vec3& v : cfg.sweep_s_avg) {
        DesignSpec s = cfg.spec;
        s.s_avg = v;
        (void)validate_spec(s);
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string design_result_json(const DesignSpec& spec, const DesignResult& result) {
    json doc = {{"scheme", "joint"}, {"scenario", scenario_name(spec.s_avg)}, {"spec", spec_json(spec)},
                {"result", result_body(result)}};
    return doc.dump(1) + "\n";
}

std::string decoupled_result_json(const DesignSpec& spec, const std::array<DesignResult, 3>& results) {
    json colors = json::array();
    for (const auto& r : results) colors.push_back(result_body(r));
    json doc = {{"scheme", "decoupled"}, {"scenario", scenario_name(spec.s_avg)}, {"spec", spec_json(spec)},
                {"colors", colors}};
    return doc.dump(1) + "\n";
}

LoadedDesign parse_design_result(const std::string& json_text) {
    const json doc = json::parse(json_text);
    if (doc.at("scheme").get<std::string>() != "joint") throw std::invalid_argument("result: not a joint design");
    return read_design(doc.at("spec"), doc.at("result"));
}

std::array<LoadedDesign, 3> parse_decoupled_result(const std::string& json_text) {
    const json doc = json::parse(json_text);
    if (doc.at("scheme").get<std::string>() != "decoupled")
        throw std::invalid_argument("result: not a decoupled design");
    const auto& colors = doc.at("colors");
    if (colors.size() != 3) throw std::invalid_argument("result: decoupled design needs three colors");
    return {read_design(doc.at("spec"), colors[0]), read_design(doc.at("spec"), colors[1]),
            read_design(doc.at("spec"), colors[2])};
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("csv: wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    return *this;
}

std::string CsvWriter::num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace vlc
