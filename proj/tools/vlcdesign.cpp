// Command-line front end: designs, sweeps, link simulation, waveform export
// and union bounds. Exit status 0 on success, 1 on usage errors, 2 when a
// design or simulation fails.

#include <cmath>
#include <cstdio>
#include <optional>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vlc/basis.hpp"
#include "vlc/channel.hpp"
#include "vlc/constraints.hpp"
#include "vlc/evaluation.hpp"
#include "vlc/io.hpp"
#include "vlc/optimizer.hpp"
#include "vlc/simd.hpp"

namespace fs = std::filesystem;
using namespace vlc;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> restarts;
    std::optional<std::uint64_t> symbols;
    std::string snr_grid;
    std::string joint_result;
    std::string decoupled_result;
    std::string lp_dump;
};

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig cfg;
    if (!o.config.empty()) {
        if (!fs::exists(o.config)) throw UsageError("config file not found: " + o.config);
        try {
            cfg = load_config(o.config);
        } catch (const std::exception& e) {
            throw UsageError(std::string("invalid config: ") + e.what());
        }
    }
    if (o.seed) cfg.spec.rng_seed = *o.seed;
    if (o.restarts) cfg.spec.restarts = *o.restarts;
    if (o.symbols) cfg.symbols = *o.symbols;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.joint_result.empty()) cfg.joint_result = o.joint_result;
    if (!o.decoupled_result.empty()) cfg.decoupled_result = o.decoupled_result;
    if (!o.lp_dump.empty()) cfg.spec.lp_dump_path = o.lp_dump;
    try {
        if (!o.snr_grid.empty()) cfg.snr_grid = parse_snr_grid(o.snr_grid);
        cfg.spec = validate_spec(cfg.spec);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (cfg.spec.restarts < 1) throw UsageError("restarts must be >= 1");
    return cfg;
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string title_case(std::string s) {
    for (auto& ch : s)
        if (ch == '_') ch = ' ';
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string joint_row(const DesignSpec& spec, const DesignResult& r) {
    std::ostringstream os;
    os << title_case(scenario_name(spec.s_avg)) << ", K=" << spec.K;
    if (spec.epsilon > 0.0) os << ", epsilon=" << spec.epsilon;
    os << ", d_min = " << fixed(r.d_min, 3);
    return os.str();
}

std::string decoupled_row(const DesignSpec& spec, const std::array<DesignResult, 3>& r) {
    return title_case(scenario_name(spec.s_avg)) + ", K=" + std::to_string(spec.K) + ", [" + fixed(r[0].d_min, 2) +
           "," + fixed(r[1].d_min, 2) + "," + fixed(r[2].d_min, 2) + "]";
}

void report_failures(const DesignResult& r) {
    for (const auto& f : r.failures) std::cerr << "warning: " << f << "\n";
}

DesignResult run_joint(const ExperimentConfig& cfg, const DesignSpec& spec, const std::string& tag) {
    DesignResult r = design_joint(spec);
    report_failures(r);
    write_text(cfg.out_dir / ("design_" + tag + ".json"), design_result_json(spec, r));
    return r;
}

std::array<DesignResult, 3> run_decoupled(const ExperimentConfig& cfg, const DesignSpec& spec,
                                          const std::string& tag) {
    auto r = design_decoupled(spec);
    for (const auto& x : r) report_failures(x);
    write_text(cfg.out_dir / ("decoupled_" + tag + ".json"), decoupled_result_json(spec, r));
    return r;
}

std::string tag_for(const DesignSpec& s) {
    std::ostringstream os;
    os << scenario_name(s.s_avg) << "_K" << s.K;
    if (s.epsilon > 0.0) os << "_eps" << s.epsilon;
    return os.str();
}

int cmd_design(const ExperimentConfig& cfg) {
    const DesignResult r = run_joint(cfg, cfg.spec, tag_for(cfg.spec));
    const std::string row = joint_row(cfg.spec, r);
    write_text(cfg.out_dir / "table.txt", row + "\n");
    std::cout << row << "\n";
    return 0;
}

int cmd_design_decoupled(const ExperimentConfig& cfg) {
    const auto r = run_decoupled(cfg, cfg.spec, tag_for(cfg.spec));
    const std::string row = decoupled_row(cfg.spec, r);
    write_text(cfg.out_dir / "table_decoupled.txt", row + "\n");
    std::cout << row << "\n";
    return 0;
}

std::vector<Vec3> scenarios(const ExperimentConfig& cfg) {
    return cfg.sweep_s_avg.empty() ? std::vector<Vec3>{cfg.spec.s_avg} : cfg.sweep_s_avg;
}

int cmd_sweep_epsilon(const ExperimentConfig& cfg) {
    CsvWriter csv({"scenario", "epsilon", "d_min"});
    for (const Vec3& s_avg : scenarios(cfg)) {
        for (double eps : cfg.sweep_epsilon) {
            DesignSpec spec = cfg.spec;
            spec.s_avg = s_avg;
            spec.epsilon = eps;
            const DesignResult r = run_joint(cfg, spec, tag_for(spec));
            csv.row({scenario_name(s_avg), CsvWriter::num(eps), CsvWriter::num(r.d_min)});
            std::cout << joint_row(spec, r) << "\n";
        }
    }
    write_text(cfg.out_dir / "sweep_epsilon.csv", csv.str());
    return 0;
}

int cmd_sweep_k(const ExperimentConfig& cfg) {
    CsvWriter csv({"scenario", "K", "joint_d_min", "decoupled_red", "decoupled_green", "decoupled_blue"});
    for (const Vec3& s_avg : scenarios(cfg)) {
        for (int K : cfg.sweep_K) {
            DesignSpec spec = cfg.spec;
            spec.s_avg = s_avg;
            spec.K = K;
            spec = validate_spec(spec);
            const DesignResult j = run_joint(cfg, spec, tag_for(spec));
            std::array<double, 3> dec{NAN, NAN, NAN};
            if (spec.epsilon == 0.0 && spec.Nb % 3 == 0) {
                const auto d = run_decoupled(cfg, spec, tag_for(spec));
                for (int x = 0; x < 3; ++x) dec[x] = d[x].d_min;
                std::cout << decoupled_row(spec, d) << "\n";
            }
            csv.row({scenario_name(s_avg), std::to_string(K), CsvWriter::num(j.d_min), CsvWriter::num(dec[0]),
                     CsvWriter::num(dec[1]), CsvWriter::num(dec[2])});
            std::cout << joint_row(spec, j) << "\n";
        }
    }
    write_text(cfg.out_dir / "sweep_k.csv", csv.str());
    return 0;
}

LoadedDesign joint_design(const ExperimentConfig& cfg) {
    if (!cfg.joint_result.empty()) return parse_design_result(read_text(cfg.joint_result));
    return {cfg.spec, run_joint(cfg, cfg.spec, tag_for(cfg.spec))};
}

std::array<LoadedDesign, 3> decoupled_design(const ExperimentConfig& cfg) {
    if (!cfg.decoupled_result.empty()) return parse_decoupled_result(read_text(cfg.decoupled_result));
    DesignSpec spec = cfg.spec;
    spec.epsilon = 0.0;
    const auto r = run_decoupled(cfg, spec, tag_for(spec));
    return {LoadedDesign{spec, r[0]}, LoadedDesign{spec, r[1]}, LoadedDesign{spec, r[2]}};
}

int cmd_simulate(const ExperimentConfig& cfg) {
    if (cfg.symbols == 0) throw UsageError("symbol budget must be positive");
    const LoadedDesign joint = joint_design(cfg);
    const auto dec = decoupled_design(cfg);
    const Constellation& cj = joint.result.constellation;
    const std::array<Constellation, 3> cd{dec[0].result.constellation, dec[1].result.constellation,
                                          dec[2].result.constellation};
    std::optional<CrosstalkChannel> channel;
    if (joint.spec.epsilon > 0.0) channel = build_channel(joint.spec.epsilon, joint.spec.K);

    CsvWriter jcsv({"snr_db", "ber_measured", "ber_union_bound", "wilson_halfwidth"});
    CsvWriter dcsv({"snr_db", "ber_measured", "ber_union_bound", "wilson_halfwidth"});
    const double dec_energy = decoupled_energy(cd);
    std::uint64_t seed = cfg.spec.rng_seed;
    for (double snr : cfg.snr_grid.values()) {
        const double n0j = n0_for_snr(cj, snr);
        auto rng = restart_rng(seed, 1000);
        const BitMapping mj = bsa_optimize(cj, 2.0 * n0j, rng);
        const LinkStats sj = simulate_link(cj, mj, channel ? &*channel : nullptr, n0j, cfg.symbols, seed);
        const double bj = union_bound_ber(union_bound_ser_variance(cj, n0j), mj.lambda, mj.Nb);
        jcsv.row({CsvWriter::num(snr), CsvWriter::num(sj.ber), CsvWriter::num(bj), CsvWriter::num(sj.ber_halfwidth)});

        const double n0d = dec_energy / std::pow(10.0, snr / 10.0);
        std::array<BitMapping, 3> md;
        double bd = 0.0;
        int nb = 0;
        for (int x = 0; x < 3; ++x) {
            md[x] = bsa_optimize(cd[x], 2.0 * n0d, rng);
            bd += md[x].lambda * union_bound_ser_variance(cd[x], n0d);
            nb += md[x].Nb;
        }
        bd /= nb;
        const LinkStats sd = simulate_decoupled(cd, md, n0d, cfg.symbols, seed + 1);
        dcsv.row({CsvWriter::num(snr), CsvWriter::num(sd.ber), CsvWriter::num(bd), CsvWriter::num(sd.ber_halfwidth)});
        std::cout << "snr " << fixed(snr, 2) << " dB: joint ber " << sj.ber << ", decoupled ber " << sd.ber << "\n";
    }
    write_text(cfg.out_dir / "ber_joint.csv", jcsv.str());
    write_text(cfg.out_dir / "ber_decoupled.csv", dcsv.str());
    return 0;
}

int cmd_export_waveforms(const ExperimentConfig& cfg) {
    if (cfg.display_samples < 2) throw UsageError("display_samples must be >= 2");
    const LoadedDesign d = joint_design(cfg);
    const DesignSpec& spec = d.spec;
    const Mat3 precoder = spec.epsilon > 0.0 ? build_channel(spec.epsilon, spec.K).precoder : identity3();
    const Geometry geom = joint_geometry(spec, precoder);
    // An oversampling factor giving at least display_samples intervals.
    const int per_symbol = std::max(1, (cfg.display_samples + 2 * spec.K - 1) / std::max(1, 2 * spec.K));
    const SampleGrid grid = build_grid(spec.K, spec.Ts, per_symbol);
    const auto stacked = d.result.constellation.stacked();
    for (int x = 0; x < 3; ++x) {
        CsvWriter csv({"color", "point_index", "t", "amplitude"});
        const std::string name(to_string(kColors[x]));
        for (int i = 0; i < spec.Nc; ++i) {
            const auto wave = transmit_waveform(geom, grid, stacked, i, x);
            for (std::size_t n = 0; n < wave.size(); ++n)
                csv.row({name, std::to_string(i), CsvWriter::num(grid.times[n]), CsvWriter::num(wave[n])});
        }
        write_text(cfg.out_dir / ("waveforms_" + name + ".csv"), csv.str());
    }
    std::cout << "wrote 3 waveform files with " << spec.Nc << " waveforms each to " << cfg.out_dir.string() << "\n";
    return 0;
}

int cmd_bound(const ExperimentConfig& cfg) {
    const LoadedDesign d = joint_design(cfg);
    const Constellation& c = d.result.constellation;
    CsvWriter csv({"snr_db", "N0", "ser_union_bound", "ber_union_bound", "lambda"});
    auto rng = restart_rng(cfg.spec.rng_seed, 1000);
    for (double snr : cfg.snr_grid.values()) {
        const double n0 = n0_for_snr(c, snr);
        const BitMapping m = bsa_optimize(c, n0, rng);
        const double ser = union_bound_ser(c, n0);
        csv.row({CsvWriter::num(snr), CsvWriter::num(n0), CsvWriter::num(ser),
                 CsvWriter::num(union_bound_ber(ser, m.lambda, m.Nb)), CsvWriter::num(m.lambda)});
    }
    write_text(cfg.out_dir / "bound.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint color-frequency constellation design for RGB LED links"};
    app.require_subcommand(1);
    Overrides o;
    std::uint64_t seed = 0;
    int restarts = 0;
    std::uint64_t symbols = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON experiment config");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--restarts", restarts, "multi-start restarts")->check(CLI::PositiveNumber);
        sub->add_option("--symbols", symbols, "Monte Carlo symbols per SNR point");
        sub->add_option("--snr-grid", o.snr_grid, "SNR sweep a:b:step in dB");
        sub->add_option("--design", o.joint_result, "reuse a joint design result file");
        sub->add_option("--decoupled", o.decoupled_result, "reuse a decoupled design result file");
        sub->add_option("--lp-dump", o.lp_dump, "write the first LP of restart 0 in CPLEX LP format");
    };
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const ExperimentConfig&);
    };
    const Command commands[] = {
        {"design", "joint design", cmd_design},
        {"design-decoupled", "three per-color designs", cmd_design_decoupled},
        {"sweep-epsilon", "joint designs over cross-talk levels", cmd_sweep_epsilon},
        {"sweep-k", "joint and decoupled designs over subcarrier counts", cmd_sweep_k},
        {"simulate", "BER curves, joint vs decoupled", cmd_simulate},
        {"export-waveforms", "sampled transmit waveforms per color", cmd_export_waveforms},
        {"bound", "union bounds over the SNR grid", cmd_bound},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        subs.push_back(app.add_subcommand(c.name, c.help));
        add_common(subs.back());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (std::size_t k = 0; k < subs.size(); ++k) {
        if (!subs[k]->parsed()) continue;
        const CLI::App* sub = subs[k];
        if (sub->count("--seed") > 0) o.seed = seed;
        if (sub->count("--restarts") > 0) o.restarts = restarts;
        if (sub->count("--symbols") > 0) o.symbols = symbols;
        try {
            const ExperimentConfig cfg = resolve(o);
            return commands[k].run(cfg);
        } catch (const UsageError& e) {
            std::cerr << "usage error: " << e.what() << "\n";
            return 1;
        } catch (const SpecError& e) {
            std::cerr << "usage error: " << e.what() << "\n";
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 1;
}
