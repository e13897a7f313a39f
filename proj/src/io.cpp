#include "qsteer/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qsteer::io {

namespace {

json complex_to_json(const std::complex<double>& z) {
    return json::array({z.real(), z.imag()});
}

std::complex<double> complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex values must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json to_json(const model::ModelSpec& spec) {
    json j;
    if (spec.mode == model::ModelSpec::Mode::ToyTorus) {
        j["mode"] = "toy-torus";
        j["alpha"] = spec.alpha;
    } else {
        j["mode"] = "explicit-table";
        j["lambda"] = spec.lambda;
        json rows = json::array();
        for (const auto& row : spec.coupling) {
            json r = json::array();
            for (const auto& z : row) r.push_back(complex_to_json(z));
            rows.push_back(std::move(r));
        }
        j["coupling"] = std::move(rows);
    }
    return j;
}

model::ModelSpec model_from_json(const json& j) {
    if (!j.contains("mode"))
        throw std::invalid_argument("model: missing field 'mode'");
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "toy-torus") {
        if (!j.contains("alpha"))
            throw std::invalid_argument("model: missing field 'alpha'");
        return model::ModelSpec::toy(j.at("alpha").get<double>());
    }
    if (mode != "explicit-table")
        throw std::invalid_argument("model: unknown mode '" + mode + "'");
    if (!j.contains("lambda"))
        throw std::invalid_argument("model: missing field 'lambda'");
    if (!j.contains("coupling"))
        throw std::invalid_argument("model: missing field 'coupling'");
    std::vector<double> lambda = j.at("lambda").get<std::vector<double>>();
    std::vector<std::vector<model::Complex>> coupling;
    for (const auto& row : j.at("coupling")) {
        std::vector<model::Complex> r;
        for (const auto& z : row) r.push_back(complex_from_json(z));
        coupling.push_back(std::move(r));
    }
    return model::ModelSpec::table(std::move(lambda), std::move(coupling));
}

json to_json(const model::QuantumState& psi) {
    json j;
    j["offset"] = psi.offset;
    json c = json::array();
    for (int i = 0; i < psi.size(); ++i) c.push_back(complex_to_json(psi.coeffs(i)));
    j["coeffs"] = std::move(c);
    return j;
}

model::QuantumState state_from_json(const json& j) {
    if (!j.contains("coeffs"))
        throw std::invalid_argument("state: missing field 'coeffs'");
    const int offset = j.value("offset", 1);
    const auto& arr = j.at("coeffs");
    Eigen::VectorXcd c(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        c(static_cast<int>(i)) = complex_from_json(arr[i]);
    return model::QuantumState(offset, std::move(c));
}

json to_json(const engine::ControlSchedule& sched) {
    json j;
    j["label"] = sched.label;
    json blocks = json::array();
    for (const auto& b : sched.blocks) {
        json pattern = json::array();
        for (const auto& s : b.pattern)
            pattern.push_back(json{{"u", s.u}, {"dt", s.dt}});
        blocks.push_back(json{{"repeat", b.repeat},
                              {"segments", std::move(pattern)}});
    }
    j["blocks"] = std::move(blocks);
    return j;
}

engine::ControlSchedule schedule_from_json(const json& j) {
    engine::ControlSchedule sched;
    sched.label = j.value("label", std::string{});
    auto read_segments = [](const json& arr) {
        std::vector<engine::Segment> segs;
        for (const auto& s : arr)
            segs.push_back({s.at("u").get<double>(), s.at("dt").get<double>()});
        return segs;
    };
    if (j.contains("blocks")) {
        for (const auto& b : j.at("blocks"))
            sched.append_block(read_segments(b.at("segments")),
                               b.value("repeat", std::uint64_t{1}));
    } else if (j.contains("segments")) {
        auto segs = read_segments(j.at("segments"));
        if (!segs.empty()) sched.append_block(std::move(segs), 1);
    } else {
        throw std::invalid_argument("schedule: missing 'blocks' or 'segments'");
    }
    return sched;
}

json to_json(const ladder::SteeringReport& rep) {
    json stages = json::array();
    for (const auto& s : rep.stages)
        stages.push_back(json{{"name", s.name},
                              {"duration", s.duration},
                              {"K", s.K},
                              {"eta", s.eta},
                              {"measured_error", s.measured_error}});
    json plan = json::array();
    for (const auto& r : rep.plan)
        plan.push_back(json{{"level", r.level},
                            {"theta", r.theta},
                            {"phi", r.phi},
                            {"K", r.K},
                            {"C", r.C},
                            {"eta", r.eta},
                            {"n", r.n},
                            {"tau", r.tau},
                            {"out_mass", r.out_mass},
                            {"skipped", r.skipped}});
    return json{{"fidelity", rep.fidelity},
                {"distance", rep.distance},
                {"total_time", rep.total_time},
                {"bound_time", rep.bound_time},
                {"stages", std::move(stages)},
                {"plan", std::move(plan)},
                {"truncation", rep.truncation},
                {"verification_truncation", rep.verification_truncation},
                {"window", json::array({rep.window_lo, rep.window_hi})},
                {"budget_ok", rep.budget_ok}};
}

json to_json(const disperse::DispersalResult& res) {
    return json{{"found", res.found},
                {"K", res.K},
                {"low_mass", res.low_mass},
                {"best_K", res.best_K},
                {"best_low_mass", res.best_low_mass},
                {"tail_cut", res.tail_cut},
                {"tail_mass", res.tail_mass},
                {"scan_truncation", res.scan_truncation},
                {"dispersed", to_json(res.dispersed)}};
}

json to_json(const pipeline::SmallTimePlan& plan) {
    auto imp = [](const pipeline::ImpulseStage& st) {
        return json{{"K", st.K},
                    {"eta", st.eta},
                    {"gap", st.gap},
                    {"truncation", st.truncation}};
    };
    json j{{"feasible", plan.feasible},
           {"eps", plan.eps},
           {"T", plan.T},
           {"n0", plan.n0},
           {"p", plan.p},
           {"paper_n0", plan.paper_n0},
           {"paper_bound", plan.paper_bound},
           {"total_time", plan.total_time},
           {"synthesis_truncation", plan.synthesis_truncation},
           {"impulse_in", imp(plan.imp_in)},
           {"impulse_out", imp(plan.imp_out)},
           {"window_norms", json::array({plan.window_norm0, plan.window_norm1})},
           {"notes", plan.notes}};
    if (!plan.feasible) {
        j["infeasible_reason"] = plan.infeasible_reason;
    } else {
        j["dispersal_in"] = to_json(plan.dispersal0);
        j["dispersal_out"] = to_json(plan.dispersal1);
        j["window_report"] = to_json(plan.window_report);
    }
    return j;
}

json to_json(const pipeline::VerifiedRun& run) {
    return json{{"verdict", run.verdict},
                {"distance", run.distance},
                {"fidelity", run.fidelity},
                {"total_time", run.total_time},
                {"verification_truncation", run.verification_truncation},
                {"cross_check_truncation", run.cross_check_truncation},
                {"truncation_disagreement", run.truncation_disagreement},
                {"certificate_sum", run.certificate_sum},
                {"within_certificates", run.within_certificates},
                {"unitarity_defect", run.unitarity_defect}};
}

json to_json(const pipeline::DiameterSweepResult& res) {
    json rows = json::array();
    for (const auto& r : res.rows)
        rows.push_back(json{{"T", r.T},
                            {"feasible", r.feasible},
                            {"verdict", r.verdict},
                            {"total_time", r.total_time},
                            {"distance", r.distance},
                            {"n0", r.n0},
                            {"p", r.p},
                            {"K0", r.K0},
                            {"K1", r.K1},
                            {"reason", r.reason}});
    return json{{"rows", std::move(rows)},
                {"any_verified", res.any_verified},
                {"smallest_verified_time", res.smallest_verified_time}};
}

json to_json(const model::BNormReport& rep) {
    return json{{"values", rep.values},
                {"reference_sqrt2_over_2", rep.reference},
                {"discrepancy_flagged", rep.discrepancy_flagged},
                {"note", rep.note}};
}

json to_json(const findim::MatrixPair& pair) {
    auto mat = [](const Eigen::MatrixXcd& m) {
        json rows = json::array();
        for (int i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < m.cols(); ++j)
                row.push_back(complex_to_json(m(i, j)));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    return json{{"n", pair.n}, {"A", mat(pair.A)}, {"B", mat(pair.B)}};
}

findim::MatrixPair matrix_pair_from_json(const json& j) {
    auto mat = [](const json& rows) {
        const auto n = rows.size();
        Eigen::MatrixXcd m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n)
                throw std::invalid_argument("matrix rows must be square");
            for (std::size_t k = 0; k < n; ++k)
                m(static_cast<int>(i), static_cast<int>(k)) =
                    complex_from_json(rows[i][k]);
        }
        return m;
    };
    if (!j.contains("A")) throw std::invalid_argument("pair: missing field 'A'");
    if (!j.contains("B")) throw std::invalid_argument("pair: missing field 'B'");
    return findim::MatrixPair(mat(j.at("A")), mat(j.at("B")));
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace qsteer::io
