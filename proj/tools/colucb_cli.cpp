// Command-line front end for the grouped-bandit laboratory.  All domain work
// goes through the shared library's C interface (colucb.h); this file only
// parses flags, assembles option JSON, writes CLI-side manifests, and prints.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "colucb.h"

namespace {

using json = nlohmann::ordered_json;

// Exit codes: 0 ok, 1 invalid argument/usage, 2 data error, 3 internal error.

int report_failure(int code) {
    std::fprintf(stderr, "error: %s\n", colucb_last_error());
    return code;
}

std::string default_out_dir() {
    const char* env = std::getenv("COLUCB_OUT_DIR");
    return env && *env ? env : "colucb_out";
}

/// Returns 0 on success; on failure prints the message and returns 2.
int write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), (std::streamsize)content.size());
    if (!out) {
        std::fprintf(stderr, "error: cannot write '%s'\n", path.c_str());
        return 2;
    }
    return 0;
}

int write_manifest(const std::string& out_dir, const std::string& command,
                   const json& options, const std::vector<std::string>& outputs) {
    json m;
    m["format"] = "colucb-manifest";
    m["version"] = 1;
    m["command"] = command;
    m["options"] = options;
    m["outputs"] = outputs;
    return write_file((std::filesystem::path(out_dir) / "manifest.json").string(),
                      m.dump(2) + "\n");
}

struct FreeString {
    char* s = nullptr;
    ~FreeString() { colucb_string_free(s); }
};

struct FreeInstance {
    colucb_instance* p = nullptr;
    ~FreeInstance() { colucb_instance_free(p); }
};

void print_simulate_summary(const std::string& report_json) {
    const json r = json::parse(report_json);
    std::printf("horizon %llu | seeds %llu | burn-in %llu rounds | %.2fs\n",
                (unsigned long long)r["config"]["horizon"].get<std::uint64_t>(),
                (unsigned long long)r["config"]["num_seeds"].get<std::uint64_t>(),
                (unsigned long long)r["burnin_length"].get<std::uint64_t>(),
                r["wall_seconds"].get<double>());
    std::printf("%-16s %14s %12s\n", "policy", "mean_regret", "stderr");
    for (const json& p : r["policies"]) {
        const json& se = p["stderr_regret"];
        std::printf("%-16s %14.4f %12s\n", p["policy"].get<std::string>().c_str(),
                    p["mean_regret"].get<double>(),
                    se.is_null() ? "NA" : std::to_string(se.get<double>()).c_str());
    }
    for (const json& c : r["comparisons"]) {
        const json& z = c["z_score"];
        std::printf("%s - %s: delta %.4f, z %s\n", c["policy_a"].get<std::string>().c_str(),
                    c["policy_b"].get<std::string>().c_str(), c["delta"].get<double>(),
                    z.is_null() ? "NA" : std::to_string(z.get<double>()).c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grouped multi-armed-bandit laboratory: coordinated-exploration "
                 "simulation, structural analysis, burn-in schedules, and "
                 "perturbation-adversary construction."};
    app.require_subcommand(1);
    app.set_version_flag("--version", colucb_version());

    // ------------------------------------------------------------- simulate
    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment file");
    std::string sim_config;
    std::string sim_out = default_out_dir();
    std::uint64_t sim_horizon = 0, sim_base_seed = 0;
    std::uint32_t sim_seeds = 0;
    unsigned sim_jobs = 0, sim_dump = 0;
    double sim_scale = 0.0;
    bool sim_no_svg = false, sim_repro = false, sim_uncoupled = false;
    sim->add_option("config", sim_config, "colucb-experiment JSON file")->required();
    sim->add_option("--out", sim_out, "output directory (default $COLUCB_OUT_DIR)");
    sim->add_option("--horizon", sim_horizon, "override horizon T");
    sim->add_option("--seeds", sim_seeds, "override the number of seeds");
    sim->add_option("--base-seed", sim_base_seed, "override the base seed");
    sim->add_option("--const-scale", sim_scale, "override the confidence-width scale");
    sim->add_option("--jobs", sim_jobs, "worker threads (0 = hardware)");
    sim->add_option("--dump-trajectories", sim_dump,
                    "write per-round CSVs for the first N seeds of each policy");
    sim->add_flag("--no-svg", sim_no_svg, "skip the curves.svg plot");
    sim->add_flag("--reproducible", sim_repro,
                  "byte-stable outputs (no timestamps)");
    sim->add_flag("--uncoupled-streams", sim_uncoupled,
                  "give each policy its own reward noise");

    // -------------------------------------------------------------- analyze
    auto* ana = app.add_subcommand("analyze", "Structural / instance analysis report");
    std::string ana_instance;
    std::string ana_out = default_out_dir();
    std::uint64_t ana_horizon = 0;
    double ana_scale = 1.0, ana_sigma = 1.0, ana_c1 = 0.0, ana_alpha = 0.0,
           ana_imp_alpha = 1.0;
    unsigned ana_grid = 32;
    bool ana_force = false, ana_print = false;
    ana->add_option("instance", ana_instance, "colucb-instance JSON file")->required();
    ana->add_option("--out", ana_out, "output directory (default $COLUCB_OUT_DIR)");
    ana->add_option("--horizon", ana_horizon, "horizon for T-dependent quantities");
    ana->add_option("--const-scale", ana_scale, "confidence-width scale");
    ana->add_option("--sigma", ana_sigma, "noise scale of the integral functionals");
    ana->add_option("--grid-points", ana_grid, "eps grid size for the scale table");
    ana->add_flag("--force", ana_force, "allow exponential subset enumeration");
    auto* ana_c1_opt = ana->add_option("--c1", ana_c1, "regularity-condition constant");
    auto* ana_alpha_opt = ana->add_option("--alpha", ana_alpha, "regularity-condition power");
    ana->add_option("--improvement-alpha", ana_imp_alpha,
                    "threshold constant of the improvement test");
    ana->add_flag("--print", ana_print, "also print the report to stdout");

    // ------------------------------------------------------------- schedule
    auto* sch = app.add_subcommand("schedule", "Burn-in schedule and its length");
    std::string sch_instance;
    std::string sch_out = default_out_dir();
    std::uint64_t sch_n0 = 0;
    sch->add_option("instance", sch_instance, "colucb-instance JSON file")->required();
    sch->add_option("--n0", sch_n0, "per-arm pull quota (>= 1)")->required();
    sch->add_option("--out", sch_out, "output directory (default $COLUCB_OUT_DIR)");

    // ----------------------------------------------------------- lowerbound
    auto* low = app.add_subcommand("lowerbound", "Hard-instance construction");
    low->require_subcommand(1);

    auto* adv = low->add_subcommand("adversary",
                                    "Perturbation pair (means moved +/- z_T)");
    std::string adv_instance;
    std::string adv_out = default_out_dir();
    std::uint64_t adv_horizon = 0, adv_base_seed = 1;
    double adv_scale = 1.0;
    unsigned adv_pilots = 20;
    adv->add_option("instance", adv_instance, "base colucb-instance JSON file")->required();
    adv->add_option("--horizon", adv_horizon, "horizon T")->required();
    adv->add_option("--const-scale", adv_scale, "confidence-width scale");
    adv->add_option("--base-seed", adv_base_seed, "seed of the pilot runs");
    adv->add_option("--pilot-seeds", adv_pilots, "number of pilot runs");
    adv->add_option("--out", adv_out, "output directory (default $COLUCB_OUT_DIR)");

    auto* mmx = low->add_subcommand("minimax", "Three-level hard instance family");
    std::string mmx_instance, mmx_kind = "gaussian";
    std::string mmx_out = default_out_dir();
    std::uint64_t mmx_horizon = 0;
    bool mmx_force = false;
    mmx->add_option("structure", mmx_instance, "colucb-instance JSON file")->required();
    mmx->add_option("--horizon", mmx_horizon, "horizon T")->required();
    mmx->add_option("--kind", mmx_kind, "reward kind: gaussian | bernoulli");
    mmx->add_flag("--force", mmx_force, "allow exponential subset enumeration");
    mmx->add_option("--out", mmx_out, "output directory (default $COLUCB_OUT_DIR)");

    // ------------------------------------------------------------- selftest
    auto* self = app.add_subcommand("selftest",
                                    "Cross-check the solvers against brute-force oracles");
    std::uint64_t self_seed = 0;
    double self_tol = -1.0;
    auto* self_seed_opt = self->add_option("--seed", self_seed, "suite RNG seed");
    self->add_option("--lp-tolerance-override", self_tol,
                     "failure-injection hook: force this LP tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    // ------------------------------------------------------------- dispatch
    if (sim->parsed()) {
        json ov;
        ov["out_dir"] = sim_out;
        if (sim->count("--horizon")) ov["horizon"] = sim_horizon;
        if (sim->count("--seeds")) ov["num_seeds"] = sim_seeds;
        if (sim->count("--base-seed")) ov["base_seed"] = sim_base_seed;
        if (sim->count("--const-scale")) ov["const_scale"] = sim_scale;
        if (sim->count("--jobs")) ov["jobs"] = sim_jobs;
        if (sim->count("--dump-trajectories")) ov["dump_trajectories"] = sim_dump;
        if (sim_no_svg) ov["write_svg"] = false;
        if (sim_repro) ov["reproducible"] = true;
        if (sim_uncoupled) ov["coupled_streams"] = false;

        FreeString report;
        const int rc = colucb_simulate(sim_config.c_str(), ov.dump().c_str(), &report.s);
        if (rc != COLUCB_OK) return report_failure(rc);
        print_simulate_summary(report.s);
        std::printf("outputs: %s\n", sim_out.c_str());
        return 0;
    }

    if (ana->parsed()) {
        json opt;
        if (ana->count("--horizon")) opt["horizon"] = ana_horizon;
        opt["const_scale"] = ana_scale;
        opt["sigma"] = ana_sigma;
        opt["grid_points"] = ana_grid;
        opt["force"] = ana_force;
        if (ana_c1_opt->count()) opt["c1"] = ana_c1;
        if (ana_alpha_opt->count()) opt["alpha"] = ana_alpha;
        opt["improvement_alpha"] = ana_imp_alpha;

        FreeInstance inst;
        int rc = colucb_instance_load(ana_instance.c_str(), &inst.p);
        if (rc != COLUCB_OK) return report_failure(rc);
        FreeString report;
        rc = colucb_analyze(inst.p, opt.dump().c_str(), &report.s);
        if (rc != COLUCB_OK) return report_failure(rc);

        std::filesystem::create_directories(ana_out);
        const std::string out_path =
            (std::filesystem::path(ana_out) / "analysis.json").string();
        if (int wrc = write_file(out_path, report.s)) return wrc;
        opt["instance"] = ana_instance;
        if (int wrc = write_manifest(ana_out, "analyze", opt, {"analysis.json"})) return wrc;
        if (ana_print) std::fputs(report.s, stdout);
        std::printf("analysis: %s\n", out_path.c_str());
        return 0;
    }

    if (sch->parsed()) {
        FreeInstance inst;
        int rc = colucb_instance_load(sch_instance.c_str(), &inst.p);
        if (rc != COLUCB_OK) return report_failure(rc);
        double t0 = 0.0;
        std::int64_t num = 0, den = 1;
        rc = colucb_t0(inst.p, &t0, &num, &den);
        if (rc != COLUCB_OK) return report_failure(rc);
        std::uint64_t t_min = 0;
        rc = colucb_t_min(inst.p, sch_n0, &t_min);
        if (rc != COLUCB_OK) return report_failure(rc);

        std::filesystem::create_directories(sch_out);
        const std::string csv_path =
            (std::filesystem::path(sch_out) / "schedule.csv").string();
        rc = colucb_schedule_write_csv(inst.p, sch_n0, csv_path.c_str());
        if (rc != COLUCB_OK) return report_failure(rc);
        json opt;
        opt["instance"] = sch_instance;
        opt["n0"] = sch_n0;
        opt["t0"] = {{"num", num}, {"den", den}, {"value", t0}};
        opt["t_min"] = t_min;
        if (int wrc = write_manifest(sch_out, "schedule", opt, {"schedule.csv"})) return wrc;
        std::printf("t0 = %lld/%lld (= %.12g), n0 = %llu, t_min = %llu\nschedule: %s\n",
                    (long long)num, (long long)den, t0, (unsigned long long)sch_n0,
                    (unsigned long long)t_min, csv_path.c_str());
        return 0;
    }

    if (adv->parsed()) {
        json opt;
        opt["horizon"] = adv_horizon;
        opt["const_scale"] = adv_scale;
        opt["base_seed"] = adv_base_seed;
        opt["pilot_seeds"] = adv_pilots;

        FreeInstance base, plus, minus;
        int rc = colucb_instance_load(adv_instance.c_str(), &base.p);
        if (rc != COLUCB_OK) return report_failure(rc);
        FreeString meta;
        rc = colucb_adversary(base.p, opt.dump().c_str(), &plus.p, &minus.p, &meta.s);
        if (rc != COLUCB_OK) return report_failure(rc);

        std::filesystem::create_directories(adv_out);
        const auto path = [&](const char* name) {
            return (std::filesystem::path(adv_out) / name).string();
        };
        rc = colucb_instance_save(plus.p, path("j_plus.json").c_str());
        if (rc != COLUCB_OK) return report_failure(rc);
        rc = colucb_instance_save(minus.p, path("j_minus.json").c_str());
        if (rc != COLUCB_OK) return report_failure(rc);
        if (int wrc = write_file(path("adversary_meta.json"), meta.s)) return wrc;
        opt["instance"] = adv_instance;
        if (int wrc = write_manifest(adv_out, "lowerbound adversary", opt,
                                     {"j_plus.json", "j_minus.json", "adversary_meta.json"}))
            return wrc;
        std::fputs(meta.s, stdout);
        std::printf("outputs: %s\n", adv_out.c_str());
        return 0;
    }

    if (mmx->parsed()) {
        json opt;
        opt["horizon"] = mmx_horizon;
        opt["kind"] = mmx_kind;
        opt["force"] = mmx_force;

        FreeInstance st, fam;
        int rc = colucb_instance_load(mmx_instance.c_str(), &st.p);
        if (rc != COLUCB_OK) return report_failure(rc);
        FreeString meta;
        rc = colucb_minimax_instance(st.p, opt.dump().c_str(), &fam.p, &meta.s);
        if (rc != COLUCB_OK) return report_failure(rc);

        std::filesystem::create_directories(mmx_out);
        const auto path = [&](const char* name) {
            return (std::filesystem::path(mmx_out) / name).string();
        };
        rc = colucb_instance_save(fam.p, path("minimax_instance.json").c_str());
        if (rc != COLUCB_OK) return report_failure(rc);
        if (int wrc = write_file(path("minimax_meta.json"), meta.s)) return wrc;
        opt["structure"] = mmx_instance;
        if (int wrc = write_manifest(mmx_out, "lowerbound minimax", opt,
                                     {"minimax_instance.json", "minimax_meta.json"}))
            return wrc;
        std::fputs(meta.s, stdout);
        std::printf("outputs: %s\n", mmx_out.c_str());
        return 0;
    }

    if (self->parsed()) {
        json opt = json::object();
        if (self_seed_opt->count()) opt["seed"] = self_seed;
        if (self->count("--lp-tolerance-override")) opt["lp_tolerance_override"] = self_tol;
        FreeString log;
        const int rc = colucb_selftest(opt.dump().c_str(), &log.s);
        if (log.s) std::fputs(log.s, stdout);
        if (rc != COLUCB_OK) return report_failure(rc);
        std::puts("selftest: all suites passed");
        return 0;
    }

    return 1;   // unreachable: require_subcommand guarantees a branch above
}
