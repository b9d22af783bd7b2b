#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "colucb/io.hpp"
#include "doctest.h"

using namespace colucb;
namespace fs = std::filesystem;

namespace {

GroupStructure chain3() {
    GroupStructure s;
    s.num_arms = 3;
    s.groups = {Bits64{0b011}, Bits64{0b110}};
    return s;
}

/// Fresh scratch directory per test run.
struct TempDir {
    fs::path dir;
    explicit TempDir(const char* tag) {
        dir = fs::temp_directory_path() / (std::string("colucb_io_") + tag);
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const char* name) const { return (dir / name).string(); }
};

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("doubles survive a serialization round trip") {
    const std::vector<double> means = {0.1, 1.0 / 3.0, 0.7000000000000001};
    Instance inst = make_gaussian_instance(chain3(), means);
    inst.rewards[2].variance = 1e-17;
    const std::string text = instance_to_json(inst);
    const LoadedInstance back = parse_instance_json(text, "test");
    REQUIRE(back.instance.has_value());
    for (unsigned a = 0; a < 3; ++a) {
        CHECK(back.instance->mean[a] == means[a]);   // bitwise
        CHECK(back.instance->rewards[a].variance == inst.rewards[a].variance);
    }
    // Serialization is a fixed point after one round trip.
    CHECK(instance_to_json(*back.instance) == text);
}

TEST_CASE("structure-only files") {
    const std::string text = structure_to_json(chain3());
    const LoadedInstance li = parse_instance_json(text, "test");
    CHECK_FALSE(li.instance.has_value());
    CHECK(li.structure.num_arms == 3);
    CHECK_THROWS_WITH_AS(li.require_rewards("the adversary command"),
                         doctest::Contains("the adversary command"), DataError);
}

TEST_CASE("instance schema violations carry the origin") {
    const auto fails = [](const std::string& text) {
        CHECK_THROWS_WITH_AS(parse_instance_json(text, "myfile.json"),
                             doctest::Contains("myfile.json"), DataError);
    };
    fails("not json at all");
    fails(R"({"format":"colucb-report","version":1,"num_arms":1,"groups":[[0]]})");
    fails(R"({"format":"colucb-instance","version":2,"num_arms":1,"groups":[[0]]})");
    fails(R"({"format":"colucb-instance","version":1,"num_arms":1})");
    fails(R"({"format":"colucb-instance","version":1,"num_arms":1,"groups":[]})");
    fails(R"({"format":"colucb-instance","version":1,"num_arms":2,"groups":[[0,0],[1]]})");
    fails(R"({"format":"colucb-instance","version":1,"num_arms":2,"groups":[[0,2]]})");
    fails(R"({"format":"colucb-instance","version":1,"num_arms":1,"groups":[[0]],"extra":1})");
    fails(R"({"format":"colucb-instance","version":1,"num_arms":2,"groups":[[0,1]],)"
          R"("rewards":[{"kind":"gaussian","mean":0.5}]})");
    // Bernoulli arms have no variance knob.
    fails(R"({"format":"colucb-instance","version":1,"num_arms":1,"groups":[[0]],)"
          R"("rewards":[{"kind":"bernoulli","mean":0.5,"variance":2.0}]})");
    fails(R"({"format":"colucb-instance","version":1,"num_arms":1,"groups":[[0]],)"
          R"("rewards":[{"kind":"poisson","mean":0.5}]})");
}

TEST_CASE("missing files name the path") {
    CHECK_THROWS_WITH_AS(load_instance_file("/nonexistent/inst.json"),
                         doctest::Contains("/nonexistent/inst.json"), DataError);
}

TEST_CASE("experiment files") {
    TempDir tmp("experiment");
    SUBCASE("inline instance") {
        const std::string text = R"({
            "format": "colucb-experiment", "version": 1,
            "instance": {"format": "colucb-instance", "version": 1,
                         "num_arms": 2, "groups": [[0, 1]],
                         "rewards": [{"kind": "gaussian", "mean": 0.9},
                                     {"kind": "gaussian", "mean": 0.1}]},
            "policies": ["col_ucb", "independent_ucb"],
            "horizon": 100, "num_seeds": 2})";
        const ExperimentConfig cfg = parse_experiment_json(text, ".", "inline");
        CHECK(cfg.horizon == 100);
        CHECK(cfg.num_seeds == 2);
        CHECK(cfg.policies == std::vector<PolicyKind>{PolicyKind::ColUcb,
                                                      PolicyKind::IndependentUcb});
        // Defaults fill in.
        CHECK(cfg.base_seed == 1);
        CHECK(cfg.const_scale == 1.0);
        CHECK(cfg.coupled_streams);
    }
    SUBCASE("instance path resolves against the experiment's directory") {
        save_instance_file(make_gaussian_instance(chain3(), {0.9, 0.6, 0.7}),
                           tmp.file("inst.json"));
        write_text_file(tmp.file("exp.json"), R"({
            "format": "colucb-experiment", "version": 1,
            "instance": "inst.json",
            "policies": ["col_ucb"], "horizon": 50, "num_seeds": 1})");
        const ExperimentConfig cfg = load_experiment_file(tmp.file("exp.json"));
        CHECK(cfg.instance.num_arms() == 3);
        CHECK(cfg.instance.mean[0] == 0.9);
    }
    SUBCASE("schema violations") {
        CHECK_THROWS_AS(parse_experiment_json(
                            R"({"format":"colucb-experiment","version":1,)"
                            R"("instance":{"format":"colucb-instance","version":1,)"
                            R"("num_arms":1,"groups":[[0]],)"
                            R"("rewards":[{"kind":"gaussian","mean":0.5}]},)"
                            R"("policies":["warp_drive"],"horizon":100,"num_seeds":1})",
                            ".", "x"),
                        DataError);
        CHECK_THROWS_AS(parse_experiment_json(
                            R"({"format":"colucb-experiment","version":1,)"
                            R"("instance":"nope.json",)"
                            R"("policies":["col_ucb"],"horizon":100,"num_seeds":1})",
                            "/nonexistent_dir", "x"),
                        DataError);
    }
}

TEST_CASE("double formatting") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    // 17 significant digits round-trip every double.
    for (const double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.30000000000000004}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

namespace {

ExperimentReport tiny_report() {
    ExperimentConfig cfg;
    cfg.instance = make_gaussian_instance(chain3(), {0.9, 0.6, 0.7});
    cfg.policies = {PolicyKind::ColUcb, PolicyKind::IndependentUcb};
    cfg.horizon = 120;
    cfg.num_seeds = 2;
    cfg.base_seed = 3;
    cfg.const_scale = 0.01;
    cfg.jobs = 1;
    return run_experiment(cfg);
}

} // namespace

TEST_CASE("report serializations") {
    const ExperimentReport rep = tiny_report();
    SUBCASE("json carries the headline numbers") {
        const std::string j = report_to_json(rep);
        CHECK(contains(j, "\"colucb-report\""));
        CHECK(contains(j, "\"col_ucb\""));
        CHECK(contains(j, "\"independent_ucb\""));
        CHECK(contains(j, "\"comparisons\""));
        CHECK(contains(j, "\"burnin_length\""));
    }
    SUBCASE("csv shape") {
        const std::string csv = curves_to_csv(rep);
        CHECK(csv.rfind("policy,t,mean_regret,stderr_regret,mean_contention,mean_q\n", 0) == 0);
        // One line per (policy, curve point) plus the header.
        std::size_t lines = 0;
        for (const char c : csv)
            if (c == '\n') ++lines;
        CHECK(lines == 1 + rep.policies[0].curve.size() + rep.policies[1].curve.size());
        CHECK(curves_to_csv(rep) == csv);   // deterministic
    }
    SUBCASE("summary text") {
        const std::string sum = report_summary_text(rep);
        CHECK(contains(sum, "col_ucb"));
        CHECK(contains(sum, "independent_ucb"));
    }
    SUBCASE("single-seed summary prints NA") {
        ExperimentConfig cfg = rep.config;
        cfg.num_seeds = 1;
        cfg.policies = {PolicyKind::ColUcb};
        const std::string sum = report_summary_text(run_experiment(cfg));
        CHECK(contains(sum, "NA"));
    }
    SUBCASE("svg reproducibility switch") {
        const std::string stamped = report_to_svg(rep, false);
        const std::string repro = report_to_svg(rep, true);
        CHECK(contains(stamped, "<svg"));
        CHECK(contains(stamped, "generated"));
        CHECK_FALSE(contains(repro, "generated"));
        CHECK(report_to_svg(rep, true) == repro);   // deterministic
    }
}

TEST_CASE("trajectory and schedule csv") {
    const Instance inst = make_gaussian_instance(chain3(), {0.9, 0.6, 0.7});
    const AlgoConfig cfg = make_config(inst.structure, 50, 0.01);
    const Trajectory traj = run_policy(PolicyKind::ColUcb, inst, cfg, 1);
    const std::string tcsv = trajectory_to_csv(inst, traj);
    CHECK(tcsv.rfind("t,group,action,regret_increment,contention_size,q_value,eps_t\n", 0) ==
          0);
    std::size_t lines = 0;
    for (const char c : tcsv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 50 * 2);   // header + horizon x groups

    const std::string scsv = schedule_to_csv(burn_in_schedule(inst.structure, 2));
    CHECK(scsv.rfind("round,group,arm\n", 0) == 0);
    lines = 0;
    for (const char c : scsv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 3 * 2);   // header + t_min x groups
}

TEST_CASE("simulation workflow writes a consistent directory") {
    TempDir tmp("simdir");
    ExperimentConfig cfg;
    cfg.instance = make_gaussian_instance(chain3(), {0.9, 0.6, 0.7});
    cfg.policies = {PolicyKind::ColUcb};
    cfg.horizon = 80;
    cfg.num_seeds = 2;
    cfg.const_scale = 0.01;
    cfg.jobs = 1;
    SimulateOptions opt;
    opt.out_dir = tmp.file("out");
    opt.reproducible = true;
    opt.dump_trajectories = 1;
    const ExperimentReport rep = simulate_to_dir(cfg, opt);
    CHECK(rep.policies.size() == 1);
    for (const char* name : {"manifest.json", "report.json", "curves.csv", "curves.svg",
                             "trajectory_col_ucb_seed0.csv"})
        CHECK(fs::exists(fs::path(opt.out_dir) / name));
    const std::string manifest = read_text_file(opt.out_dir + "/manifest.json");
    CHECK(contains(manifest, "\"colucb-manifest\""));
    CHECK(contains(manifest, "\"trajectory_col_ucb_seed0.csv\""));

    // A rerun into a second directory reproduces the artifacts byte for byte.
    SimulateOptions opt2 = opt;
    opt2.out_dir = tmp.file("out2");
    simulate_to_dir(cfg, opt2);
    CHECK(read_text_file(opt.out_dir + "/curves.csv") ==
          read_text_file(opt2.out_dir + "/curves.csv"));
    CHECK(read_text_file(opt.out_dir + "/curves.svg") ==
          read_text_file(opt2.out_dir + "/curves.svg"));
    // report.json embeds the wall-clock time; everything else must agree.
    const auto strip_wall = [](std::string text) {
        const std::size_t at = text.find("\"wall_seconds\"");
        REQUIRE(at != std::string::npos);
        const std::size_t end = text.find('\n', at);
        text.erase(at, end - at);
        return text;
    };
    CHECK(strip_wall(read_text_file(opt.out_dir + "/report.json")) ==
          strip_wall(read_text_file(opt2.out_dir + "/report.json")));
}

TEST_CASE("analysis document") {
    LoadedInstance li;
    li.structure = chain3();
    li.instance = make_gaussian_instance(chain3(), {0.9, 0.6, 0.7});
    SUBCASE("frozen headline quantities") {
        AnalyzeOptions opt;
        opt.horizon = 3000;
        opt.grid_points = 4;
        const std::string doc = analyze_to_json(li, opt);
        CHECK(contains(doc, "\"colucb-analysis\""));
        CHECK(contains(doc, "\"num\": 3"));
        CHECK(contains(doc, "\"den\": 2"));
        CHECK(contains(doc, "20.364916731037088"));
        CHECK(contains(doc, "\"instance\""));
        CHECK(contains(doc, "\"eps_star\": 0.09999999999999998"));
    }
    SUBCASE("structure-only stays structural") {
        LoadedInstance bare;
        bare.structure = chain3();
        AnalyzeOptions opt;
        const std::string doc = analyze_to_json(bare, opt);
        CHECK_FALSE(contains(doc, "\"instance\""));
        CHECK_FALSE(contains(doc, "\"config\""));   // no horizon given
        CHECK(contains(doc, "\"sharing\""));
    }
    SUBCASE("condition needs both parameters") {
        AnalyzeOptions opt;
        opt.c1 = 1.1;
        CHECK_THROWS_AS(analyze_to_json(li, opt), InvalidArgument);
    }
    SUBCASE("condition on a bare structure is a data error") {
        LoadedInstance bare;
        bare.structure = chain3();
        AnalyzeOptions opt;
        opt.c1 = 1.1;
        opt.alpha = 1.0;
        CHECK_THROWS_AS(analyze_to_json(bare, opt), DataError);
    }
    SUBCASE("wide structures need force") {
        LoadedInstance wide;
        wide.structure = all_shared_structure(2, 30);
        AnalyzeOptions opt;
        CHECK_THROWS_WITH_AS(analyze_to_json(wide, opt), doctest::Contains("force"),
                             InvalidArgument);
    }
}
