#include "colucb/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "colucb/lowerbound.hpp"

namespace colucb {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw DataError(origin + ": " + what);
}

json parse_json_text(const std::string& text, const std::string& origin) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) fail(origin, "not valid JSON");
    return j;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& origin, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) fail(origin, where + ": unknown field '" + it.key() + "'");
    }
}

const json& need(const json& obj, const char* key, const std::string& origin) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(origin, std::string("missing field '") + key + "'");
    return *it;
}

std::uint64_t need_uint(const json& obj, const char* key, const std::string& origin) {
    const json& v = need(obj, key, origin);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(origin, std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

double need_double(const json& obj, const char* key, const std::string& origin) {
    const json& v = need(obj, key, origin);
    if (!v.is_number()) fail(origin, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::string need_string(const json& obj, const char* key, const std::string& origin) {
    const json& v = need(obj, key, origin);
    if (!v.is_string()) fail(origin, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

void check_header(const json& j, const char* format, const std::string& origin) {
    if (!j.is_object()) fail(origin, "top level must be an object");
    if (need_string(j, "format", origin) != format)
        fail(origin, std::string("expected format '") + format + "', got '" +
                         j["format"].get<std::string>() + "'");
    if (need_uint(j, "version", origin) != 1)
        fail(origin, "unsupported version " + j["version"].dump() + " (expected 1)");
}

json arm_set_to_json(Bits64 s) {
    json out = json::array();
    for (unsigned a : s) out.push_back(a);
    return out;
}

json structure_json_obj(const GroupStructure& st) {
    json j;
    j["format"] = "colucb-instance";
    j["version"] = 1;
    j["num_arms"] = st.num_arms;
    json groups = json::array();
    for (const Bits64& g : st.groups) groups.push_back(arm_set_to_json(g));
    j["groups"] = std::move(groups);
    return j;
}

json instance_json_obj(const Instance& inst) {
    json j = structure_json_obj(inst.structure);
    json rewards = json::array();
    for (const RewardModel& r : inst.rewards) {
        json one;
        one["kind"] = to_string(r.kind);
        one["mean"] = r.mean;
        if (r.kind == RewardKind::Gaussian) one["variance"] = r.variance;
        rewards.push_back(std::move(one));
    }
    j["rewards"] = std::move(rewards);
    return j;
}

LoadedInstance instance_from_json(const json& j, const std::string& origin) {
    check_header(j, "colucb-instance", origin);
    check_keys(j, {"format", "version", "num_arms", "groups", "rewards"}, origin, "instance");

    GroupStructure st;
    const std::uint64_t n = need_uint(j, "num_arms", origin);
    if (n == 0 || n > kMaxArms)
        fail(origin, "num_arms must be in [1, " + std::to_string(kMaxArms) + "]");
    st.num_arms = (unsigned)n;

    const json& groups = need(j, "groups", origin);
    if (!groups.is_array() || groups.empty()) fail(origin, "'groups' must be a nonempty array");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const json& ga = groups[g];
        if (!ga.is_array() || ga.empty())
            fail(origin, "group " + std::to_string(g) + " must be a nonempty array of arm ids");
        Bits64 s;
        for (const json& v : ga) {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() >= n)
                fail(origin, "group " + std::to_string(g) + ": arm id " + v.dump() +
                                 " out of range [0, " + std::to_string(n - 1) + "]");
            const unsigned a = v.get<unsigned>();
            if (s.test(a))
                fail(origin, "group " + std::to_string(g) + ": duplicate arm " +
                                 std::to_string(a));
            s.set(a);
        }
        st.groups.push_back(s);
    }
    try {
        st.validate();
    } catch (const DataError& e) {
        fail(origin, e.what());
    }

    LoadedInstance out;
    out.structure = st;
    if (j.contains("rewards")) {
        const json& rewards = j["rewards"];
        if (!rewards.is_array() || rewards.size() != n)
            fail(origin, "'rewards' must be an array with one entry per arm (" +
                             std::to_string(n) + ")");
        std::vector<RewardModel> models;
        for (std::size_t a = 0; a < rewards.size(); ++a) {
            const json& r = rewards[a];
            const std::string where = "rewards[" + std::to_string(a) + "]";
            if (!r.is_object()) fail(origin, where + " must be an object");
            check_keys(r, {"kind", "mean", "variance"}, origin, where);
            RewardModel m;
            try {
                m.kind = reward_kind_from_string(need_string(r, "kind", origin));
            } catch (const DataError& e) {
                fail(origin, where + ": " + e.what());
            }
            m.mean = need_double(r, "mean", origin);
            if (r.contains("variance")) {
                if (m.kind == RewardKind::Bernoulli)
                    fail(origin, where + ": Bernoulli arms take no variance");
                m.variance = need_double(r, "variance", origin);
            }
            models.push_back(m);
        }
        try {
            out.instance = build_instance(st, std::move(models));
        } catch (const DataError& e) {
            fail(origin, e.what());
        }
    }
    return out;
}

json experiment_json_obj(const ExperimentConfig& cfg) {
    json j;
    j["format"] = "colucb-experiment";
    j["version"] = 1;
    j["instance"] = instance_json_obj(cfg.instance);
    json pols = json::array();
    for (PolicyKind p : cfg.policies) pols.push_back(to_string(p));
    j["policies"] = std::move(pols);
    j["horizon"] = cfg.horizon;
    j["num_seeds"] = cfg.num_seeds;
    j["base_seed"] = cfg.base_seed;
    j["const_scale"] = cfg.const_scale;
    j["default_arm"] = to_string(cfg.default_arm);
    j["coupled_streams"] = cfg.coupled_streams;
    j["downsample_points"] = cfg.downsample_points;
    return j;
}

std::string csv_cell(double v) {
    if (std::isnan(v)) return "NA";
    return format_double(v);
}

std::string dump_doc(const json& j) { return j.dump(2) + "\n"; }

// ------------------------------------------------------------------- SVG

struct SvgMap {
    double x0, x1, y0, y1;           // data ranges (x in log10(t))
    double px0, px1, py0, py1;       // pixel ranges (py0 = bottom)
    double x(double lx) const { return px0 + (lx - x0) / (x1 - x0) * (px1 - px0); }
    double y(double v) const { return py0 - (v - y0) / (y1 - y0) * (py0 - py1); }
};

std::string num2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out.write(content.data(), (std::streamsize)content.size());
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw DataError("read failed for '" + path + "'");
    return ss.str();
}

const Instance& LoadedInstance::require_rewards(const std::string& context) const {
    if (!instance)
        throw DataError(context + ": the instance file carries no rewards "
                                  "(structure-only files cannot be simulated)");
    return *instance;
}

LoadedInstance load_instance_file(const std::string& path) {
    return parse_instance_json(read_text_file(path), path);
}

LoadedInstance parse_instance_json(const std::string& text, const std::string& origin) {
    return instance_from_json(parse_json_text(text, origin), origin);
}

std::string instance_to_json(const Instance& instance) {
    return dump_doc(instance_json_obj(instance));
}

std::string structure_to_json(const GroupStructure& structure) {
    return dump_doc(structure_json_obj(structure));
}

void save_instance_file(const Instance& instance, const std::string& path) {
    write_text_file(path, instance_to_json(instance));
}

ExperimentConfig load_experiment_file(const std::string& path) {
    const std::string base = std::filesystem::path(path).parent_path().string();
    return parse_experiment_json(read_text_file(path), base, path);
}

ExperimentConfig parse_experiment_json(const std::string& text, const std::string& base_dir,
                                       const std::string& origin) {
    const json j = parse_json_text(text, origin);
    check_header(j, "colucb-experiment", origin);
    check_keys(j,
               {"format", "version", "instance", "policies", "horizon", "num_seeds",
                "base_seed", "const_scale", "default_arm", "coupled_streams",
                "downsample_points", "jobs"},
               origin, "experiment");

    ExperimentConfig cfg;
    const json& inst = need(j, "instance", origin);
    if (inst.is_string()) {
        std::filesystem::path p(inst.get<std::string>());
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        cfg.instance = load_instance_file(p.string()).require_rewards(origin);
    } else if (inst.is_object()) {
        cfg.instance =
            instance_from_json(inst, origin + " (inline instance)").require_rewards(origin);
    } else {
        fail(origin, "'instance' must be a path or an inline instance object");
    }

    const json& pols = need(j, "policies", origin);
    if (!pols.is_array() || pols.empty()) fail(origin, "'policies' must be a nonempty array");
    for (const json& p : pols) {
        if (!p.is_string()) fail(origin, "'policies' entries must be strings");
        try {
            cfg.policies.push_back(policy_kind_from_string(p.get<std::string>()));
        } catch (const DataError& e) {
            fail(origin, e.what());
        }
    }

    cfg.horizon = need_uint(j, "horizon", origin);
    cfg.num_seeds = (std::uint32_t)need_uint(j, "num_seeds", origin);
    if (j.contains("base_seed")) cfg.base_seed = need_uint(j, "base_seed", origin);
    if (j.contains("const_scale")) cfg.const_scale = need_double(j, "const_scale", origin);
    if (j.contains("default_arm")) {
        try {
            cfg.default_arm = default_arm_from_string(need_string(j, "default_arm", origin));
        } catch (const DataError& e) {
            fail(origin, e.what());
        }
    }
    if (j.contains("coupled_streams")) {
        const json& v = j["coupled_streams"];
        if (!v.is_boolean()) fail(origin, "'coupled_streams' must be a boolean");
        cfg.coupled_streams = v.get<bool>();
    }
    if (j.contains("downsample_points"))
        cfg.downsample_points = (unsigned)need_uint(j, "downsample_points", origin);
    if (j.contains("jobs")) cfg.jobs = (unsigned)need_uint(j, "jobs", origin);

    try {
        cfg.validate();
    } catch (const DataError& e) {
        fail(origin, e.what());
    }
    return cfg;
}

std::string experiment_to_json(const ExperimentConfig& config) {
    return dump_doc(experiment_json_obj(config));
}

// ----------------------------------------------------------------- reports

std::string report_to_json(const ExperimentReport& report) {
    json j;
    j["format"] = "colucb-report";
    j["version"] = 1;
    j["config"] = experiment_json_obj(report.config);
    j["config"]["jobs"] = report.config.jobs;
    j["burnin_length"] = report.burnin_length;
    j["wall_seconds"] = report.wall_seconds;

    json pols = json::array();
    for (const PolicyReport& pr : report.policies) {
        json p;
        p["policy"] = to_string(pr.policy);
        p["mean_regret"] = pr.mean_regret;
        p["stderr_regret"] = pr.stderr_regret;   // NaN serializes as null
        p["mean_group_regret"] = pr.mean_group_regret;
        p["per_seed_final"] = pr.per_seed_final;
        p["per_seed_mid"] = pr.per_seed_mid;
        json curve = json::array();
        for (const CurvePoint& cp : pr.curve) {
            json c;
            c["t"] = cp.t;
            c["mean_regret"] = cp.mean_regret;
            c["stderr_regret"] = cp.stderr_regret;
            c["mean_contention"] = cp.mean_contention;
            c["mean_q"] = cp.mean_q;
            curve.push_back(std::move(c));
        }
        p["curve"] = std::move(curve);
        json epochs = json::array();
        for (const EpochDiagnostic& ed : pr.epochs) {
            json e;
            e["epoch"] = ed.epoch;
            e["rounds"] = ed.rounds;
            e["mean_q"] = ed.mean_q;
            e["mean_contention"] = ed.mean_contention;
            epochs.push_back(std::move(e));
        }
        p["epochs"] = std::move(epochs);
        pols.push_back(std::move(p));
    }
    j["policies"] = std::move(pols);

    json cmps = json::array();
    for (const PairedComparison& c : report.comparisons) {
        json e;
        e["policy_a"] = to_string(c.policy_a);
        e["policy_b"] = to_string(c.policy_b);
        e["delta"] = c.delta;
        e["z_score"] = c.z_score;
        cmps.push_back(std::move(e));
    }
    j["comparisons"] = std::move(cmps);
    return dump_doc(j);
}

std::string report_summary_text(const ExperimentReport& report) {
    std::ostringstream out;
    const ExperimentConfig& cfg = report.config;
    out << "instance: " << cfg.instance.num_arms() << " arms, " << cfg.instance.num_groups()
        << " groups | horizon " << cfg.horizon << " | seeds " << cfg.num_seeds
        << " | base_seed " << cfg.base_seed << " | const_scale " << cfg.const_scale << "\n";
    if (report.burnin_length) out << "burn-in length: " << report.burnin_length << " rounds\n";

    char line[256];
    std::snprintf(line, sizeof line, "%-16s %14s %12s %14s\n", "policy", "mean_regret",
                  "stderr", "mid_regret");
    out << line;
    for (const PolicyReport& pr : report.policies) {
        const std::string se =
            std::isnan(pr.stderr_regret) ? "NA" : tick_label(pr.stderr_regret);
        double mid_mean = 0;
        for (double v : pr.per_seed_mid) mid_mean += v;
        mid_mean /= pr.per_seed_mid.empty() ? 1.0 : (double)pr.per_seed_mid.size();
        std::snprintf(line, sizeof line, "%-16s %14.4f %12s %14.4f\n",
                      to_string(pr.policy).c_str(), pr.mean_regret, se.c_str(), mid_mean);
        out << line;
    }
    for (const PairedComparison& c : report.comparisons) {
        std::snprintf(line, sizeof line, "%s - %s: delta %.4f, ratio %.4f, z %s\n",
                      to_string(c.policy_a).c_str(), to_string(c.policy_b).c_str(), c.delta,
                      [&] {
                          for (const PolicyReport& pa : report.policies)
                              for (const PolicyReport& pb : report.policies)
                                  if (pa.policy == c.policy_a && pb.policy == c.policy_b &&
                                      pb.mean_regret != 0)
                                      return pa.mean_regret / pb.mean_regret;
                          return kNaN;
                      }(),
                      std::isnan(c.z_score) ? "NA" : tick_label(c.z_score).c_str());
        out << line;
    }
    return out.str();
}

std::string curves_to_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "policy,t,mean_regret,stderr_regret,mean_contention,mean_q\n";
    for (const PolicyReport& pr : report.policies)
        for (const CurvePoint& cp : pr.curve)
            out << to_string(pr.policy) << ',' << cp.t << ',' << csv_cell(cp.mean_regret)
                << ',' << csv_cell(cp.stderr_regret) << ',' << csv_cell(cp.mean_contention)
                << ',' << csv_cell(cp.mean_q) << '\n';
    return out.str();
}

std::string trajectory_to_csv(const Instance& instance, const Trajectory& trajectory) {
    std::ostringstream out;
    out << "t,group,action,regret_increment,contention_size,q_value,eps_t\n";
    const unsigned G = instance.num_groups();
    for (std::size_t t = 1; t <= trajectory.rows.size(); ++t) {
        const TrajectoryRow& row = trajectory.rows[t - 1];
        for (unsigned g = 0; g < G; ++g)
            out << t << ',' << g << ',' << (unsigned)row.action[g] << ','
                << csv_cell(row.regret_increment[g]) << ',' << (unsigned)row.contention_size
                << ',' << csv_cell(row.q_value) << ',' << csv_cell(row.eps_t) << '\n';
    }
    return out.str();
}

std::string schedule_to_csv(const BurninSchedule& schedule) {
    std::ostringstream out;
    out << "round,group,arm\n";
    for (std::size_t r = 0; r < schedule.pulls.size(); ++r)
        for (std::size_t g = 0; g < schedule.pulls[r].size(); ++g)
            out << (r + 1) << ',' << g << ',' << (unsigned)schedule.pulls[r][g] << '\n';
    return out.str();
}

std::string report_to_svg(const ExperimentReport& report, bool reproducible) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};
    const double W = 880, H = 520;
    SvgMap m;
    m.px0 = 70;
    m.px1 = W - 24;
    m.py0 = H - 52;
    m.py1 = 28;
    m.x0 = 0.0;
    m.x1 = std::max(1.0, std::log10((double)std::max<std::uint64_t>(report.config.horizon, 2)));
    m.y0 = 0.0;
    m.y1 = 1e-9;
    for (const PolicyReport& pr : report.policies)
        for (const CurvePoint& cp : pr.curve) {
            double hi = cp.mean_regret;
            if (std::isfinite(cp.stderr_regret)) hi += 2 * cp.stderr_regret;
            m.y1 = std::max(m.y1, hi);
        }
    m.y1 *= 1.05;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    if (!reproducible) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char ts[64];
        std::strftime(ts, sizeof ts, "%Y-%m-%d %H:%M:%S", std::gmtime(&now));
        svg << "<!-- generated " << ts << " UTC -->\n";
    }
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    // Axes.
    svg << "<line x1=\"" << m.px0 << "\" y1=\"" << m.py0 << "\" x2=\"" << m.px1 << "\" y2=\""
        << m.py0 << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << m.px0 << "\" y1=\"" << m.py0 << "\" x2=\"" << m.px0 << "\" y2=\""
        << m.py1 << "\" stroke=\"black\"/>\n";
    for (int e = 0;; ++e) {
        const double lx = (double)e;
        if (lx > m.x1) break;
        const double px = m.x(lx);
        svg << "<line x1=\"" << num2(px) << "\" y1=\"" << m.py0 << "\" x2=\"" << num2(px)
            << "\" y2=\"" << m.py0 + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << num2(px) << "\" y=\"" << m.py0 + 20
            << "\" font-size=\"12\" text-anchor=\"middle\">" << tick_label(std::pow(10.0, lx))
            << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double v = m.y0 + (m.y1 - m.y0) * i / 5.0;
        const double py = m.y(v);
        svg << "<line x1=\"" << m.px0 - 5 << "\" y1=\"" << num2(py) << "\" x2=\"" << m.px0
            << "\" y2=\"" << num2(py) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << m.px0 - 8 << "\" y=\"" << num2(py + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    }
    svg << "<text x=\"" << (m.px0 + m.px1) / 2 << "\" y=\"" << H - 14
        << "\" font-size=\"13\" text-anchor=\"middle\">round t (log scale)</text>\n";
    svg << "<text x=\"16\" y=\"" << (m.py0 + m.py1) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (m.py0 + m.py1) / 2 << ")\">max-group regret</text>\n";

    for (std::size_t pi = 0; pi < report.policies.size(); ++pi) {
        const PolicyReport& pr = report.policies[pi];
        const char* color = kPalette[pi % (sizeof kPalette / sizeof *kPalette)];
        bool bands = !pr.curve.empty();
        for (const CurvePoint& cp : pr.curve) bands = bands && std::isfinite(cp.stderr_regret);
        if (bands) {
            std::ostringstream pts;
            for (const CurvePoint& cp : pr.curve)
                pts << num2(m.x(std::log10((double)cp.t))) << ','
                    << num2(m.y(cp.mean_regret + 2 * cp.stderr_regret)) << ' ';
            for (auto it = pr.curve.rbegin(); it != pr.curve.rend(); ++it)
                pts << num2(m.x(std::log10((double)it->t))) << ','
                    << num2(m.y(std::max(0.0, it->mean_regret - 2 * it->stderr_regret)))
                    << ' ';
            svg << "<polygon points=\"" << pts.str() << "\" fill=\"" << color
                << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        }
        std::ostringstream pts;
        for (const CurvePoint& cp : pr.curve)
            pts << num2(m.x(std::log10((double)cp.t))) << ',' << num2(m.y(cp.mean_regret))
                << ' ';
        svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"/>\n";

        const double ly = m.py1 + 16 + 18 * (double)pi;
        svg << "<line x1=\"" << m.px0 + 10 << "\" y1=\"" << ly << "\" x2=\"" << m.px0 + 38
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << m.px0 + 44 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
            << to_string(pr.policy) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

// --------------------------------------------------------------- workflows

ExperimentReport simulate_to_dir(const ExperimentConfig& config, const SimulateOptions& opt) {
    if (opt.out_dir.empty()) throw InvalidArgument("simulate: output directory required");
    std::filesystem::create_directories(opt.out_dir);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(opt.out_dir) / name).string();
    };

    const ExperimentReport report = run_experiment(config);

    std::vector<std::string> outputs = {"manifest.json", "report.json", "curves.csv"};
    write_text_file(path("report.json"), report_to_json(report));
    write_text_file(path("curves.csv"), curves_to_csv(report));
    if (opt.write_svg) {
        write_text_file(path("curves.svg"), report_to_svg(report, opt.reproducible));
        outputs.push_back("curves.svg");
    }

    if (opt.dump_trajectories > 0) {
        const AlgoConfig algo_cfg = make_config(config.instance.structure, config.horizon,
                                                config.const_scale, config.default_arm);
        for (PolicyKind p : config.policies)
            for (unsigned s = 0; s < std::min<unsigned>(opt.dump_trajectories,
                                                        config.num_seeds); ++s) {
                const Trajectory traj = run_policy(p, config.instance, algo_cfg,
                                                   config.base_seed, s, config.coupled_streams);
                const std::string name =
                    "trajectory_" + to_string(p) + "_seed" + std::to_string(s) + ".csv";
                write_text_file(path(name.c_str()), trajectory_to_csv(config.instance, traj));
                outputs.push_back(name);
            }
    }

    json manifest;
    manifest["format"] = "colucb-manifest";
    manifest["version"] = 1;
    manifest["command"] = "simulate";
    manifest["config"] = experiment_json_obj(config);
    manifest["config"]["jobs"] = config.jobs;
    json mo;
    mo["out_dir"] = opt.out_dir;
    mo["write_svg"] = opt.write_svg;
    mo["reproducible"] = opt.reproducible;
    mo["dump_trajectories"] = opt.dump_trajectories;
    manifest["options"] = std::move(mo);
    manifest["outputs"] = outputs;
    write_text_file(path("manifest.json"), dump_doc(manifest));

    return report;
}

std::string analyze_to_json(const LoadedInstance& loaded, const AnalyzeOptions& opt) {
    const GroupStructure& st = loaded.structure;
    if (st.num_arms > kEnumerationCap && !opt.force)
        throw InvalidArgument(
            "analyze: " + std::to_string(st.num_arms) +
            " arms exceed the subset-enumeration cap of " + std::to_string(kEnumerationCap) +
            "; pass force to accept the exponential-time search");
    if (opt.grid_points < 2) throw InvalidArgument("analyze: grid_points must be >= 2");
    if (!(opt.sigma > 0)) throw InvalidArgument("analyze: sigma must be > 0");

    json j;
    j["format"] = "colucb-analysis";
    j["version"] = 1;

    json stj;
    stj["num_arms"] = st.num_arms;
    stj["num_groups"] = st.num_groups();
    json sizes = json::array();
    for (const Bits64& g : st.groups) sizes.push_back(g.count());
    stj["group_sizes"] = std::move(sizes);
    stj["max_group_size"] = st.max_group_size();
    j["structure"] = std::move(stj);

    const Rational t0 = t0_rational(st);
    json t0j;
    t0j["value"] = t0.to_double();
    t0j["num"] = t0.num;
    t0j["den"] = t0.den;
    t0j["lp_value"] = compute_t0(st);
    j["t0"] = std::move(t0j);

    if (opt.horizon > 0) {
        const AlgoConfig cfg = make_config(st, opt.horizon, opt.const_scale);
        json cj;
        cj["horizon"] = cfg.horizon;
        cj["const_scale"] = cfg.const_scale;
        cj["log_ratio"] = cfg.log_ratio;
        cj["conf_const"] = cfg.conf_const;
        cj["burnin_pulls"] = cfg.burnin_pulls;
        cj["burnin_length"] = burn_in_schedule(st, cfg.burnin_pulls).length;
        j["config"] = std::move(cj);
    }

    const Bits64 all = st.all_arms();
    json share;
    share["h1_all_arms"] = h1(st, all);
    const CoverResult h2m = h2_minus(st, all);
    const CoverResult h2p = h2_plus(st, all);
    json h2mj, h2pj;
    h2mj["value"] = h2m.value;
    h2mj["count"] = h2m.count;
    h2mj["cover_groups"] = arm_set_to_json(h2m.cover);
    h2pj["value"] = h2p.value;
    h2pj["count"] = h2p.count;
    h2pj["cover_groups"] = arm_set_to_json(h2p.cover);
    share["h2_minus_all_arms"] = std::move(h2mj);
    share["h2_plus_all_arms"] = std::move(h2pj);
    if (opt.horizon > 0) {
        const HtPair ht = ht_bounds(st, all, opt.horizon);
        share["ht_minus_all_arms"] = ht.minus;
        share["ht_plus_all_arms"] = ht.plus;
        const BarHtResult bar = bar_ht(st, opt.horizon, opt.force);
        json barj;
        barj["minus"] = bar.minus;
        barj["plus"] = bar.plus;
        barj["argmin_minus"] = arm_set_to_json(bar.argmin_minus);
        barj["argmin_plus"] = arm_set_to_json(bar.argmin_plus);
        share["bar_ht"] = std::move(barj);
        const double t23 = std::pow((double)opt.horizon, 2.0 / 3.0);
        json env;
        env["lower"] = t23 / std::cbrt(bar.plus);
        env["upper"] = t23 * std::log((double)opt.horizon) / std::cbrt(bar.minus);
        share["minimax_envelope"] = std::move(env);
    }
    j["sharing"] = std::move(share);

    json phij = json::array();
    for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
        json e;
        e["eps"] = eps;
        e["phi"] = phi(st, eps, opt.force);
        phij.push_back(std::move(e));
    }
    j["phi"] = std::move(phij);

    if (opt.horizon > 0) {
        const ImprovementReport imp =
            sufficient_improvement(st, opt.horizon, opt.improvement_alpha, opt.force);
        json ij;
        ij["alpha"] = opt.improvement_alpha;
        ij["improves"] = imp.improves;
        ij["min_h1"] = imp.lhs;
        ij["threshold"] = imp.rhs;
        j["improvement"] = std::move(ij);
    }

    if (loaded.instance) {
        const Instance& inst = *loaded.instance;
        json instj;
        instj["means"] = inst.mean;
        instj["gap_min"] = inst.gap_min;   // +inf serializes as null
        instj["gap_max"] = inst.gap_max;
        instj["gap_breakpoints"] = gap_breakpoints(inst);

        std::vector<double> grid;
        for (unsigned i = 0; i < opt.grid_points; ++i) {
            const double f = (double)i / (opt.grid_points - 1);
            grid.push_back(std::pow(10.0, -3.0 * (1.0 - f)));   // 1e-3 .. 1
        }
        for (double b : gap_breakpoints(inst))
            if (b >= grid.front() && b <= 1.0) grid.push_back(b);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

        json table = json::array();
        for (double eps : grid) {
            json row;
            row["eps"] = eps;
            row["contention"] = arm_set_to_json(contention_star(inst, eps));
            row["m"] = m_eps(inst, eps);   // +inf -> null
            const Functionals f = t_r_functionals(inst, eps, opt.sigma);
            row["t_value"] = f.t_value;
            row["r_value"] = f.r_value;
            table.push_back(std::move(row));
        }
        instj["scale_table"] = std::move(table);

        if (opt.horizon > 0) {
            const double et = eps_t(inst, (double)opt.horizon, opt.sigma);
            const Functionals fe = t_r_functionals(inst, et, opt.sigma);
            json ej;
            ej["value"] = et;
            ej["m"] = m_eps(inst, et);
            ej["t_value"] = fe.t_value;
            ej["r_value"] = fe.r_value;
            instj["eps_t"] = std::move(ej);
            instj["eps_star"] = eps_star(inst, opt.horizon);
            const ZtResult zt = z_t(inst, opt.horizon);
            json zj;
            zj["value"] = zt.z;
            zj["eps_t"] = zt.eps_t;
            zj["objective"] = zt.objective;
            instj["z_t"] = std::move(zj);
        }

        if (opt.c1 && opt.alpha) {
            const ConditionReport cr =
                condition_check(inst, *opt.c1, *opt.alpha, std::max(opt.grid_points, 8u));
            json cj;
            cj["c1"] = *opt.c1;
            cj["alpha"] = *opt.alpha;
            cj["holds"] = cr.holds;
            cj["worst_ratio"] = cr.worst_ratio;
            cj["worst_z1"] = cr.worst_z1;
            cj["worst_z2"] = cr.worst_z2;
            j["condition"] = std::move(cj);
        } else if (opt.c1 || opt.alpha) {
            throw InvalidArgument("analyze: condition check needs both c1 and alpha");
        }
        j["instance"] = std::move(instj);
    } else if (opt.c1 || opt.alpha) {
        throw DataError("analyze: the condition check needs an instance with rewards");
    }

    return dump_doc(j);
}

} // namespace colucb
