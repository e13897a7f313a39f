#include "qsteer/cli.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "qsteer/io.hpp"
#include "qsteer/pulse.hpp"
#include "qsteer/rng.hpp"

namespace qsteer::cli {

namespace {

namespace fs = std::filesystem;
using model::ModelSpec;
using model::QuantumState;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

const json& need(const json& j, const char* field) {
    if (!j.contains(field))
        throw UsageError(std::string("config: missing field '") + field + "'");
    return j.at(field);
}

ModelSpec model_of(const json& config) {
    return io::model_from_json(need(config, "model"));
}

std::uint64_t seed_of(const json& config, const RunOptions& opts) {
    if (opts.seed) return *opts.seed;
    return config.value("seed", std::uint64_t{1});
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    out << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

json task_simulate(const json& config, const RunOptions& opts,
                   const fs::path& dir, int& exit_code) {
    const ModelSpec spec = model_of(config);
    const QuantumState psi0 = io::state_from_json(need(config, "psi0"));
    engine::ControlSchedule sched;
    const json& sj = need(config, "schedule");
    sched = sj.contains("file")
                ? io::schedule_from_json(
                      io::read_json(dir.parent_path() / sj.at("file").get<std::string>()))
                : io::schedule_from_json(sj);
    int trunc = config.value("truncation", psi0.top_level() + 8);
    if (opts.verify_truncation) trunc = *opts.verify_truncation;

    const auto pair = model::galerkin(spec, trunc);
    const auto res = engine::propagate(pair, sched, psi0);

    json rep{{"final_state", io::to_json(res.final_state)},
             {"truncation", res.truncation},
             {"unitarity_defect", res.unitarity_defect},
             {"step_count", res.step_count},
             {"total_time", sched.total_duration()},
             {"l1_norm", sched.l1_norm()}};
    exit_code = res.unitarity_defect <= 1e-9 ? 0 : 1;
    if (opts.emit_schedule)
        io::write_json(dir / "schedule.json", io::to_json(sched));
    return rep;
}

json task_pulse(const json& config, const RunOptions& opts,
                const fs::path& dir, int& exit_code) {
    const ModelSpec spec = model_of(config);
    const int j = need(config, "j").get<int>();
    const int k = need(config, "k").get<int>();
    const int trunc = config.value("truncation", std::max(j, k) + 2);
    model::Complex a{1.0, 0.0}, b{0.0, 0.0};
    if (config.contains("state2")) {
        const auto& s2 = config.at("state2");
        a = {s2[0][0].get<double>(), s2[0][1].get<double>()};
        b = {s2[1][0].get<double>(), s2[1][1].get<double>()};
    }

    auto measure = [&](const pulse::TransitionPulse& p) {
        const auto pair = model::galerkin(spec, trunc);
        const Eigen::MatrixXcd x = engine::propagator_matrix(pair, p.schedule);
        const Eigen::MatrixXcd target = pulse::certified_target(pair, p);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x - target);
        return svd.singularValues()(0);
    };

    json rep;
    exit_code = 0;
    if (config.contains("n_list")) {
        std::vector<std::vector<std::string>> rows;
        json pulses = json::array();
        for (const double n : config.at("n_list").get<std::vector<double>>()) {
            const auto p =
                pulse::synthesize_with_divisor(spec, trunc, j, k, a, b, n);
            const double dev = measure(p);
            if (dev > p.bound) exit_code = 1;
            rows.push_back({io::format_double(n), io::format_double(dev),
                            io::format_double(p.bound)});
            pulses.push_back(json{{"n", n},
                                  {"deviation", dev},
                                  {"bound", p.bound},
                                  {"K", p.K},
                                  {"tau", p.tau}});
        }
        write_csv(dir / "error_vs_n.csv", "n,deviation,bound", rows);
        rep["pulses"] = std::move(pulses);
    } else {
        const double eta = config.value("eta", 0.05);
        const auto p = pulse::synthesize_transition(spec, trunc, j, k, a, b, eta);
        rep["certificate"] = json{{"j", p.j},
                                  {"k", p.k},
                                  {"phase", p.phase},
                                  {"n", p.divisor},
                                  {"tau", p.tau},
                                  {"K", p.K},
                                  {"C", p.C},
                                  {"b_norm", p.b_norm},
                                  {"bound", p.bound},
                                  {"eta", p.eta}};
        if (config.value("verify", true)) {
            const double dev = measure(p);
            rep["measured_deviation"] = dev;
            if (dev > p.bound) exit_code = 1;
        }
        if (opts.emit_schedule)
            io::write_json(dir / "schedule.json", io::to_json(p.schedule));
    }
    return rep;
}

json task_steer(const json& config, const RunOptions& opts,
                const fs::path& dir, int& exit_code) {
    const ModelSpec spec = model_of(config);
    const double eps = need(config, "eps").get<double>();
    exit_code = 0;

    if (config.contains("random_pairs")) {
        const auto& rp = config.at("random_pairs");
        const int count = need(rp, "count").get<int>();
        const auto window = need(rp, "window").get<std::vector<int>>();
        if (window.size() != 2 || window[0] < 1 || window[1] <= window[0])
            throw UsageError("config: random_pairs.window must be [lo, hi]");
        Rng rng(seed_of(config, opts));
        const int dim = window[1] - window[0] + 1;

        json trials = json::array();
        std::vector<std::vector<std::string>> rows;
        double min_fid = 1.0;
        for (int t = 0; t < count; ++t) {
            const QuantumState psi0(window[0], rng.unit_vector(dim));
            const QuantumState psi1(window[0], rng.unit_vector(dim));
            const auto res = ladder::steer_in_window(spec, psi0, psi1, eps);
            min_fid = std::min(min_fid, res.report.fidelity);
            if (res.report.fidelity < 1.0 - eps) exit_code = 1;
            trials.push_back(io::to_json(res.report));
            rows.push_back({std::to_string(t),
                            io::format_double(res.report.fidelity),
                            io::format_double(res.report.distance),
                            io::format_double(res.report.total_time),
                            io::format_double(res.report.bound_time)});
        }
        write_csv(dir / "steer_trials.csv",
                  "trial,fidelity,distance,total_time,bound_time", rows);
        return json{{"trials", std::move(trials)},
                    {"min_fidelity", min_fid},
                    {"seed", seed_of(config, opts)}};
    }

    const QuantumState psi0 = io::state_from_json(need(config, "psi0"));
    const QuantumState psi1 = io::state_from_json(need(config, "psi1"));
    const auto res = ladder::steer_in_window(spec, psi0, psi1, eps);
    if (res.report.fidelity < 1.0 - eps) exit_code = 1;
    if (opts.emit_schedule)
        io::write_json(dir / "schedule.json", io::to_json(res.schedule));
    return io::to_json(res.report);
}

pipeline::PlanOptions plan_options_of(const json& config) {
    pipeline::PlanOptions po;
    po.k_max = config.value("k_max", po.k_max);
    po.grid = config.value("grid", po.grid);
    po.n0_cap = config.value("n0_cap", po.n0_cap);
    po.p_cap = config.value("p_cap", po.p_cap);
    return po;
}

json task_small_time(const json& config, const RunOptions& opts,
                     const fs::path& dir, int& exit_code) {
    const ModelSpec spec = model_of(config);
    const QuantumState psi0 = io::state_from_json(need(config, "psi0"));
    const QuantumState psi1 = io::state_from_json(need(config, "psi1"));
    const double eps = need(config, "eps").get<double>();
    const double T = need(config, "T").get<double>();

    const auto plan =
        pipeline::plan_small_time(spec, psi0, psi1, eps, T, plan_options_of(config));
    json rep{{"plan", io::to_json(plan)}};
    if (!plan.feasible) {
        exit_code = 1;
        return rep;
    }
    const auto run = pipeline::execute_and_verify(spec, plan, psi0, psi1);
    rep["verification"] = io::to_json(run);
    exit_code = run.verdict == "verified" ? 0 : 1;
    if (opts.emit_schedule)
        io::write_json(dir / "schedule.json", io::to_json(plan.schedule));
    return rep;
}

json task_diameter_sweep(const json& config, const RunOptions& opts,
                         const fs::path& dir, int& exit_code) {
    const ModelSpec spec = model_of(config);
    const QuantumState psi0 = io::state_from_json(need(config, "psi0"));
    const QuantumState psi1 = io::state_from_json(need(config, "psi1"));
    const double eps = need(config, "eps").get<double>();
    const auto t_list = need(config, "T_list").get<std::vector<double>>();
    if (t_list.empty()) throw UsageError("config: T_list must be nonempty");

    const auto res = pipeline::diameter_sweep(spec, psi0, psi1, eps, t_list,
                                              plan_options_of(config));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : res.rows)
        rows.push_back({io::format_double(r.T), r.feasible ? "1" : "0",
                        r.verdict, io::format_double(r.total_time),
                        io::format_double(r.distance), std::to_string(r.n0),
                        std::to_string(r.p)});
    write_csv(dir / "diameter_sweep.csv",
              "T,feasible,verdict,total_time,distance,n0,p", rows);
    (void)opts;
    exit_code = res.any_verified ? 0 : 1;
    return io::to_json(res);
}

json task_dispersal_curve(const json& config, const RunOptions& opts,
                          const fs::path& dir, int& exit_code) {
    const ModelSpec spec = model_of(config);
    const QuantumState psi = io::state_from_json(need(config, "psi"));
    const int n0 = need(config, "n0").get<int>();
    const double eps = need(config, "eps").get<double>();
    const double k_max = config.value("k_max", 8.0 * psi.top_level());
    const int grid = config.value("grid", 10000);

    const auto res = disperse::find_dispersal(spec, psi, n0, eps, k_max, grid);
    const auto curve =
        disperse::low_mass_curve(spec, psi, n0, k_max,
                                 std::min(grid, config.value("curve_points", 2000)));
    std::vector<std::vector<std::string>> rows;
    for (const auto& pt : curve)
        rows.push_back({io::format_double(pt.K), io::format_double(pt.low_mass)});
    write_csv(dir / "dispersal_curve.csv", "K,low_mass", rows);
    (void)opts;
    exit_code = 0;  // a not-found scan is a legitimate, reported outcome
    return io::to_json(res);
}

json task_findim(const json& config, const RunOptions& opts,
                 const fs::path& dir, int& exit_code) {
    (void)opts;
    (void)dir;
    const auto pair = io::matrix_pair_from_json(need(config, "pair"));
    const auto rank = findim::lie_rank_report(pair);
    json rep{{"rank", rank.rank},
             {"full_dimension", rank.full},
             {"controllable_lift", rank.controllable_lift}};

    const double scale = config.value("killing_scale", 2.0 * pair.n);
    rep["killing_norm_A"] =
        findim::killing_norm(findim::normalize_traceless(pair.A), scale);
    rep["killing_norm_B"] =
        findim::killing_norm(findim::normalize_traceless(pair.B), scale);

    if (config.contains("psi0") && config.contains("psi1")) {
        auto vec = [&](const char* fld) {
            const auto& arr = need(config, fld);
            Eigen::VectorXcd v(arr.size());
            for (std::size_t i = 0; i < arr.size(); ++i)
                v(static_cast<int>(i)) = {arr[i][0].get<double>(),
                                          arr[i][1].get<double>()};
            return v;
        };
        const auto bound = findim::rho_lower_bound(
            pair, vec("psi0"), vec("psi1"), config.value("k_max", 32.0),
            config.value("grid", 4096));
        rep["orbit_distance"] = bound.orbit_distance;
        rep["a_norm"] = bound.a_norm;
        rep["rho_lower_bound"] = bound.value;
        rep["rho_lower_bound_eigenvector"] = bound.eigenvector_value;
    }
    exit_code = 0;
    std::cout << rep.dump(2) << "\n";
    return rep;
}

}  // namespace

RunResult run_task(const json& config, const RunOptions& opts) {
    RunResult out;
    fs::create_directories(opts.out_dir);
    const std::string task = config.value("task", "simulate");
    try {
        int code = 0;
        if (task == "simulate")
            out.report = task_simulate(config, opts, opts.out_dir, code);
        else if (task == "pulse")
            out.report = task_pulse(config, opts, opts.out_dir, code);
        else if (task == "steer-window")
            out.report = task_steer(config, opts, opts.out_dir, code);
        else if (task == "small-time")
            out.report = task_small_time(config, opts, opts.out_dir, code);
        else if (task == "diameter-sweep")
            out.report = task_diameter_sweep(config, opts, opts.out_dir, code);
        else if (task == "dispersal-curve")
            out.report = task_dispersal_curve(config, opts, opts.out_dir, code);
        else if (task == "findim")
            out.report = task_findim(config, opts, opts.out_dir, code);
        else
            throw UsageError("config: unknown task '" + task + "'");
        out.exit_code = code;
        out.report["task"] = task;
        out.report["status"] = code == 0 ? "ok" : "invariants-failed";
        io::write_json(opts.out_dir / "report.json", out.report);
        if (code != 0) {
            std::ofstream marker(opts.out_dir / "FAILED");
            marker << "task invariants failed\n";
        }
    } catch (const UsageError& e) {
        out.exit_code = 2;
        out.report = json{{"task", task}, {"status", "usage-error"},
                          {"error", e.what()}};
        std::cerr << "usage error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.report = json{{"task", task}, {"status", "error"},
                          {"error", e.what()}};
        io::write_json(opts.out_dir / "report.json", out.report);
        std::ofstream marker(opts.out_dir / "FAILED");
        marker << e.what() << "\n";
    }
    return out;
}

RunResult run_sweep(const json& config, const RunOptions& opts) {
    std::vector<json> runs;
    if (config.contains("runs")) {
        for (const auto& r : config.at("runs")) runs.push_back(r);
    } else if (config.contains("base") && config.contains("vary")) {
        runs.push_back(config.at("base"));
        for (const auto& [path, values] : config.at("vary").items()) {
            std::vector<json> grown;
            for (const auto& base : runs)
                for (const auto& v : values) {
                    json c = base;
                    c[json::json_pointer("/" + path)] = v;
                    grown.push_back(std::move(c));
                }
            runs = std::move(grown);
        }
    } else {
        RunResult bad;
        bad.exit_code = 2;
        std::cerr << "usage error: sweep config needs 'runs' or 'base'+'vary'\n";
        return bad;
    }

    fs::create_directories(opts.out_dir);
    std::vector<std::future<RunResult>> futures;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        RunOptions sub = opts;
        sub.out_dir = opts.out_dir / ("run_" + std::to_string(i));
        futures.push_back(std::async(std::launch::async, [cfg = runs[i], sub] {
            return run_task(cfg, sub);
        }));
    }

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        const RunResult r = futures[i].get();
        const auto& rep = r.report;
        auto metric = [&](const char* fld) {
            return rep.contains(fld) && rep.at(fld).is_number()
                       ? io::format_double(rep.at(fld).get<double>())
                       : std::string{};
        };
        rows.push_back({std::to_string(i), runs[i].value("task", "simulate"),
                        rep.value("status", "error"),
                        std::to_string(r.exit_code), metric("min_fidelity"),
                        metric("fidelity"), metric("distance"),
                        metric("total_time"), metric("bound_time")});
    }
    write_csv(opts.out_dir / "sweep.csv",
              "index,task,status,exit_code,min_fidelity,fidelity,distance,"
              "total_time,bound_time",
              rows);

    RunResult out;
    out.exit_code = 0;  // per-run failures are rows, never a sweep abort
    out.report = json{{"task", "sweep"}, {"runs", runs.size()}};
    return out;
}

int dispatch(const std::string& forced_task, const json& config_in,
             const RunOptions& opts) {
    json config = config_in;
    if (!forced_task.empty() && forced_task != "run") {
        if (forced_task == "small-time" && config.contains("T_list"))
            config["task"] = "diameter-sweep";
        else
            config["task"] = forced_task;
    }
    if (config.value("task", "") == "sweep")
        return run_sweep(config, opts).exit_code;
    return run_task(config, opts).exit_code;
}

}  // namespace qsteer::cli
