#include "colucb.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "colucb/analysis.hpp"
#include "colucb/io.hpp"
#include "colucb/lowerbound.hpp"
#include "colucb/oracle.hpp"

using json = nlohmann::json;
using namespace colucb;

struct colucb_instance_s {
    LoadedInstance data;
};

namespace {

thread_local std::string g_last_error;

int fail_code(int code, const std::string& message) {
    g_last_error = message;
    return code;
}

/// Maps the exception taxonomy onto the C status codes.
template <typename Fn>
int wrap(Fn&& fn) {
    try {
        fn();
        return COLUCB_OK;
    } catch (const InvalidArgument& e) {
        return fail_code(COLUCB_EINVAL, e.what());
    } catch (const DataError& e) {
        return fail_code(COLUCB_EDATA, e.what());
    } catch (const InternalError& e) {
        return fail_code(COLUCB_EINTERNAL, e.what());
    } catch (const std::exception& e) {
        return fail_code(COLUCB_EINTERNAL, std::string("unexpected: ") + e.what());
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("null argument: ") + what);
}

char* dup_string(const std::string& s) {
    char* out = (char*)std::malloc(s.size() + 1);
    if (!out) throw InternalError("out of memory");
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

json parse_options(const char* text, const char* what) {
    if (!text || !*text) return json::object();
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw InvalidArgument(std::string(what) + ": options must be a JSON object");
    return j;
}

void check_option_keys(const json& j, std::initializer_list<const char*> allowed,
                       const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok)
            throw InvalidArgument(std::string(what) + ": unknown option '" + it.key() + "'");
    }
}

std::uint64_t opt_uint(const json& j, const char* key, std::uint64_t fallback,
                       const char* what) {
    if (!j.contains(key)) return fallback;
    const json& v = j[key];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw InvalidArgument(std::string(what) + ": option '" + key +
                              "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

double opt_double(const json& j, const char* key, double fallback, const char* what) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw InvalidArgument(std::string(what) + ": option '" + key + "' must be a number");
    return j[key].get<double>();
}

bool opt_bool(const json& j, const char* key, bool fallback, const char* what) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean())
        throw InvalidArgument(std::string(what) + ": option '" + key + "' must be a boolean");
    return j[key].get<bool>();
}

std::string opt_string(const json& j, const char* key, const std::string& fallback,
                       const char* what) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string())
        throw InvalidArgument(std::string(what) + ": option '" + key + "' must be a string");
    return j[key].get<std::string>();
}

} // namespace

extern "C" {

const char* colucb_version(void) { return "1.0.0"; }

const char* colucb_strerror(int code) {
    switch (code) {
        case COLUCB_OK: return "ok";
        case COLUCB_EINVAL: return "invalid argument";
        case COLUCB_EDATA: return "data error";
        case COLUCB_EINTERNAL: return "internal error";
    }
    return "unknown error code";
}

const char* colucb_last_error(void) { return g_last_error.c_str(); }

void colucb_string_free(char* s) { std::free(s); }

int colucb_instance_load(const char* path, colucb_instance** out) {
    return wrap([&] {
        require(path, "path");
        require(out, "out");
        *out = new colucb_instance_s{load_instance_file(path)};
    });
}

int colucb_instance_parse(const char* json_text, colucb_instance** out) {
    return wrap([&] {
        require(json_text, "json_text");
        require(out, "out");
        *out = new colucb_instance_s{parse_instance_json(json_text, "<memory>")};
    });
}

int colucb_instance_save(const colucb_instance* inst, const char* path) {
    return wrap([&] {
        require(inst, "inst");
        require(path, "path");
        if (inst->data.instance)
            write_text_file(path, instance_to_json(*inst->data.instance));
        else
            write_text_file(path, structure_to_json(inst->data.structure));
    });
}

int colucb_instance_to_json(const colucb_instance* inst, char** json_out) {
    return wrap([&] {
        require(inst, "inst");
        require(json_out, "json_out");
        *json_out = dup_string(inst->data.instance
                                   ? instance_to_json(*inst->data.instance)
                                   : structure_to_json(inst->data.structure));
    });
}

void colucb_instance_free(colucb_instance* inst) { delete inst; }

int colucb_instance_info(const colucb_instance* inst, uint32_t* num_arms,
                         uint32_t* num_groups, int* has_rewards) {
    return wrap([&] {
        require(inst, "inst");
        if (num_arms) *num_arms = inst->data.structure.num_arms;
        if (num_groups) *num_groups = inst->data.structure.num_groups();
        if (has_rewards) *has_rewards = inst->data.instance.has_value() ? 1 : 0;
    });
}

int colucb_instance_gap(const colucb_instance* inst, uint32_t group, uint32_t arm,
                        double* gap_out) {
    return wrap([&] {
        require(inst, "inst");
        require(gap_out, "gap_out");
        const Instance& full = inst->data.require_rewards("gap");
        if (group >= full.num_groups())
            throw InvalidArgument("gap: group id " + std::to_string(group) + " out of range");
        if (arm >= full.num_arms())
            throw InvalidArgument("gap: arm id " + std::to_string(arm) + " out of range");
        if (!full.structure.groups[group].test(arm))
            throw InvalidArgument("gap: arm " + std::to_string(arm) +
                                  " is not in group " + std::to_string(group));
        *gap_out = full.gap[group][arm];
    });
}

int colucb_t0(const colucb_instance* inst, double* t0_out,
              int64_t* num_out, int64_t* den_out) {
    return wrap([&] {
        require(inst, "inst");
        const Rational r = t0_rational(inst->data.structure);
        if (t0_out) *t0_out = r.to_double();
        if (num_out) *num_out = r.num;
        if (den_out) *den_out = r.den;
    });
}

int colucb_t_min(const colucb_instance* inst, uint64_t n0, uint64_t* t_min_out) {
    return wrap([&] {
        require(inst, "inst");
        require(t_min_out, "t_min_out");
        *t_min_out = burn_in_schedule(inst->data.structure, n0).length;
    });
}

int colucb_schedule_write_csv(const colucb_instance* inst, uint64_t n0, const char* path) {
    return wrap([&] {
        require(inst, "inst");
        require(path, "path");
        write_text_file(path, schedule_to_csv(burn_in_schedule(inst->data.structure, n0)));
    });
}

int colucb_analyze(const colucb_instance* inst, const char* options_json,
                   char** report_json_out) {
    return wrap([&] {
        require(inst, "inst");
        require(report_json_out, "report_json_out");
        const json j = parse_options(options_json, "analyze");
        check_option_keys(j,
                          {"horizon", "const_scale", "sigma", "grid_points", "force", "c1",
                           "alpha", "improvement_alpha"},
                          "analyze");
        AnalyzeOptions opt;
        opt.horizon = opt_uint(j, "horizon", 0, "analyze");
        opt.const_scale = opt_double(j, "const_scale", 1.0, "analyze");
        opt.sigma = opt_double(j, "sigma", 1.0, "analyze");
        opt.grid_points = (unsigned)opt_uint(j, "grid_points", 32, "analyze");
        opt.force = opt_bool(j, "force", false, "analyze");
        if (j.contains("c1")) opt.c1 = opt_double(j, "c1", 0.0, "analyze");
        if (j.contains("alpha")) opt.alpha = opt_double(j, "alpha", 0.0, "analyze");
        opt.improvement_alpha = opt_double(j, "improvement_alpha", 1.0, "analyze");
        *report_json_out = dup_string(analyze_to_json(inst->data, opt));
    });
}

int colucb_simulate(const char* config_path, const char* overrides_json,
                    char** report_json_out) {
    return wrap([&] {
        require(config_path, "config_path");
        const json j = parse_options(overrides_json, "simulate");
        check_option_keys(j,
                          {"horizon", "num_seeds", "base_seed", "const_scale", "jobs",
                           "out_dir", "write_svg", "reproducible", "dump_trajectories",
                           "coupled_streams"},
                          "simulate");

        ExperimentConfig cfg = load_experiment_file(config_path);
        cfg.horizon = opt_uint(j, "horizon", cfg.horizon, "simulate");
        cfg.num_seeds = (std::uint32_t)opt_uint(j, "num_seeds", cfg.num_seeds, "simulate");
        cfg.base_seed = opt_uint(j, "base_seed", cfg.base_seed, "simulate");
        cfg.const_scale = opt_double(j, "const_scale", cfg.const_scale, "simulate");
        cfg.jobs = (unsigned)opt_uint(j, "jobs", cfg.jobs, "simulate");
        cfg.coupled_streams = opt_bool(j, "coupled_streams", cfg.coupled_streams, "simulate");
        cfg.validate();

        SimulateOptions opt;
        opt.out_dir = opt_string(j, "out_dir", "", "simulate");
        if (opt.out_dir.empty())
            throw InvalidArgument("simulate: option 'out_dir' is required");
        opt.write_svg = opt_bool(j, "write_svg", true, "simulate");
        opt.reproducible = opt_bool(j, "reproducible", false, "simulate");
        opt.dump_trajectories =
            (unsigned)opt_uint(j, "dump_trajectories", 0, "simulate");

        const ExperimentReport report = simulate_to_dir(cfg, opt);
        if (report_json_out) *report_json_out = dup_string(report_to_json(report));
    });
}

int colucb_adversary(const colucb_instance* base, const char* options_json,
                     colucb_instance** j_plus, colucb_instance** j_minus,
                     char** meta_json_out) {
    return wrap([&] {
        require(base, "base");
        require(j_plus, "j_plus");
        require(j_minus, "j_minus");
        const json j = parse_options(options_json, "adversary");
        check_option_keys(j, {"horizon", "const_scale", "base_seed", "pilot_seeds"},
                          "adversary");
        const std::uint64_t horizon = opt_uint(j, "horizon", 0, "adversary");
        if (horizon == 0) throw InvalidArgument("adversary: option 'horizon' is required");
        const double const_scale = opt_double(j, "const_scale", 1.0, "adversary");
        const std::uint64_t base_seed = opt_uint(j, "base_seed", 1, "adversary");
        const unsigned pilot_seeds =
            (unsigned)opt_uint(j, "pilot_seeds", 20, "adversary");

        const Instance& inst = base->data.require_rewards("adversary");
        const AlgoConfig cfg = make_config(inst.structure, horizon, const_scale);
        AdversaryResult res = theorem4_adversary(inst, cfg, base_seed, pilot_seeds);

        *j_plus = new colucb_instance_s{
            LoadedInstance{res.j_plus.structure, std::move(res.j_plus)}};
        *j_minus = new colucb_instance_s{
            LoadedInstance{res.j_minus.structure, std::move(res.j_minus)}};
        if (meta_json_out) {
            json meta;
            meta["z"] = res.z;
            meta["a0"] = res.a0;
            meta["g0"] = res.g0;
            meta["nu"] = res.nu;
            meta["pilot_pulls"] = res.pilot_pulls;
            *meta_json_out = dup_string(meta.dump(2) + "\n");
        }
    });
}

int colucb_minimax_instance(const colucb_instance* structure, const char* options_json,
                            colucb_instance** family_out, char** meta_json_out) {
    return wrap([&] {
        require(structure, "structure");
        require(family_out, "family_out");
        const json j = parse_options(options_json, "minimax");
        check_option_keys(j, {"horizon", "kind", "force"}, "minimax");
        const std::uint64_t horizon = opt_uint(j, "horizon", 0, "minimax");
        if (horizon == 0) throw InvalidArgument("minimax: option 'horizon' is required");
        const std::string kind_s = opt_string(j, "kind", "gaussian", "minimax");
        const bool force = opt_bool(j, "force", false, "minimax");

        const GroupStructure& st = structure->data.structure;
        const BarHtResult bar = bar_ht(st, horizon, force);
        const Bits64 S = bar.argmin_plus;
        const Bits64 cover = h2_plus(st, S).cover;
        Instance inst = minimax_family(st, S, cover, reward_kind_from_string(kind_s));

        *family_out = new colucb_instance_s{LoadedInstance{st, std::move(inst)}};
        if (meta_json_out) {
            json meta;
            meta["subset"] = json::array();
            for (unsigned a : S) meta["subset"].push_back(a);
            meta["cover_groups"] = json::array();
            for (unsigned g : cover) meta["cover_groups"].push_back(g);
            meta["bar_ht_plus"] = bar.plus;
            *meta_json_out = dup_string(meta.dump(2) + "\n");
        }
    });
}

int colucb_perturb(const colucb_instance* base, uint32_t a0, uint32_t g0,
                   double eps, int sign, int clamp_quarter, colucb_instance** out) {
    return wrap([&] {
        require(base, "base");
        require(out, "out");
        const Instance& inst = base->data.require_rewards("perturb");
        Instance moved = perturb_second_best(inst, a0, g0, eps, sign, clamp_quarter != 0);
        *out = new colucb_instance_s{LoadedInstance{moved.structure, std::move(moved)}};
    });
}

int colucb_selftest(const char* options_json, char** log_out) {
    return wrap([&] {
        const json j = parse_options(options_json, "selftest");
        check_option_keys(j, {"seed", "lp_tolerance_override"}, "selftest");
        SelftestOptions opt;
        opt.seed = opt_uint(j, "seed", opt.seed, "selftest");
        opt.lp_tolerance_override =
            opt_double(j, "lp_tolerance_override", opt.lp_tolerance_override, "selftest");
        const SelftestResult res = run_selftest(opt);
        if (log_out) *log_out = dup_string(res.log);
        if (!res.passed) throw InternalError("selftest: at least one suite failed");
    });
}

} /* extern "C" */
