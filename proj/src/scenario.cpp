#include "coneflow/scenario.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "coneflow/certify.hpp"
#include "coneflow/flow.hpp"
#include "coneflow/mollify.hpp"
#include "coneflow/registry.hpp"
#include "coneflow/variational.hpp"

namespace coneflow {

using nlohmann::json;

namespace {

json witness_json(const Witness& w) {
    json out;
    out["t"] = w.t;
    out["points"] = w.points;
    if (!w.functional.empty()) out["functional"] = w.functional;
    out["violation"] = w.violation;
    if (w.lambda >= 0.0) out["lambda"] = w.lambda;
    out["note"] = w.note;
    return out;
}

json report_json(const std::string& command, const CertReport& rep, json metrics) {
    json out;
    out["schema_version"] = kReportSchemaVersion;
    out["command"] = command;
    out["verdict"] = verdict_name(rep.verdict);
    out["witnesses"] = json::array();
    if (rep.witness) out["witnesses"].push_back(witness_json(*rep.witness));
    metrics["samples_tested"] = rep.samples_tested;
    metrics["skipped"] = rep.skipped;
    metrics["tolerance"] = rep.tolerance;
    if (!rep.detail.empty()) metrics["detail"] = rep.detail;
    out["metrics"] = metrics;
    out["versions"] = {{"cone-flow", kVersion}};
    return out;
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Pass: return 0;
        case Verdict::Fail: return 1;
        case Verdict::Inconclusive: return 2;
    }
    return 3;
}

SamplerSpec parse_sampler(const json& j, std::uint64_t seed, std::size_t dim) {
    SamplerSpec s;
    s.count = j.value("count", 1000L);
    s.seed = seed;
    s.lo = j.at("region").at("lo").get<Vec>();
    s.hi = j.at("region").at("hi").get<Vec>();
    s.t_max = j.value("t_max", 1.0);
    if (s.lo.size() != dim || s.hi.size() != dim)
        throw std::invalid_argument("sampler region dimension mismatch");
    return s;
}

IntegrateOptions parse_opts(const json& scenario) {
    IntegrateOptions o;
    if (scenario.contains("tolerances")) {
        const auto& t = scenario.at("tolerances");
        o.rtol = t.value("rtol", o.rtol);
        o.atol = t.value("atol", o.atol);
    }
    return o;
}

}  // namespace

int run_scenario(const json& scenario, std::ostream& out, const std::string& dump_dir,
                 std::optional<std::uint64_t> seed_override) {
    json report;
    try {
        const json& cmd = scenario.at("command");
        std::string name = cmd.at("name").get<std::string>();
        std::uint64_t seed = seed_override.value_or(scenario.value("seed", 0ULL));
        double cone_tol = scenario.contains("tolerances")
                              ? scenario.at("tolerances").value("cone_tol", 1e-7)
                              : 1e-7;
        IntegrateOptions opts = parse_opts(scenario);

        // the riccati command carries its own parameter block
        if (name == "riccati") {
            std::string action = cmd.at("action").get<std::string>();
            AffineParams params = parse_affine_params(cmd.at("params"));
            if (action == "validate") {
                CertReport rep = validate(params);
                report = report_json("riccati validate", rep, {});
                out << report.dump(2) << "\n";
                return verdict_exit(rep.verdict);
            }
            if (action == "eval") {
                Vec x = cmd.at("x").get<Vec>();
                Vec fx = eval_f(params, x);
                CertReport rep;
                rep.verdict = Verdict::Pass;
                json metrics;
                metrics["f"] = json::array();
                for (double v : fx)
                    metrics["f"].push_back(std::isfinite(v) ? json(v) : json("infinite"));
                report = report_json("riccati eval", rep, metrics);
                out << report.dump(2) << "\n";
                return 0;
            }
            if (action == "flow") {
                VectorField field = as_vector_field(params);
                Vec x0 = cmd.at("x").get<Vec>();
                double t = cmd.at("t").get<double>();
                Trajectory traj = integrate(field, x0, t, opts);
                CertReport rep;
                rep.verdict = traj.status == TrajStatus::ReachedTarget ? Verdict::Pass
                                                                       : Verdict::Inconclusive;
                json metrics;
                metrics["status"] = int(traj.status);
                metrics["value"] = traj.eval(traj.t_end);
                metrics["t_end"] = traj.t_end;
                if (!dump_dir.empty())
                    write_trajectory_csv(traj, field.dim, dump_dir + "/trajectory.csv",
                                         cmd.value("sample_grid", 0));
                report = report_json("riccati flow", rep, metrics);
                out << report.dump(2) << "\n";
                return verdict_exit(rep.verdict);
            }
            throw std::invalid_argument("riccati: unknown action " + action);
        }

        const json& fj = scenario.at("field");
        std::string field_name = fj.at("name").get<std::string>();
        OrderCone cone = scenario.contains("cone")
                             ? parse_cone(scenario.at("cone"))
                             : OrderCone::orthant(fj.value("dimension", 1));
        VectorField field = make_field(field_name, fj, cone);

        if (name == "certify") {
            std::string check = cmd.value("check", "both");
            SamplerSpec s = parse_sampler(cmd.at("sampler"), seed, field.dim);
            double tol = cmd.value("tol", cone_tol);
            CertReport conv, qm;
            bool did_conv = false, did_qm = false;
            if (check == "convexity" || check == "both") {
                conv = check_convexity(field, s, tol);
                did_conv = true;
            }
            if (check == "quasimonotone" || check == "both") {
                qm = check_quasimonotone(field, s, tol);
                did_qm = true;
            }
            CertReport rep;
            rep.tolerance = tol;
            rep.verdict = Verdict::Pass;
            json metrics;
            if (did_conv) {
                metrics["convexity"] = verdict_name(conv.verdict);
                rep.samples_tested += conv.samples_tested;
                if (conv.verdict != Verdict::Pass) {
                    rep.verdict = conv.verdict;
                    rep.witness = conv.witness;
                }
            }
            if (did_qm) {
                metrics["quasimonotone"] = verdict_name(qm.verdict);
                rep.samples_tested += qm.samples_tested;
                if (qm.verdict == Verdict::Fail ||
                    (qm.verdict == Verdict::Inconclusive && rep.verdict == Verdict::Pass)) {
                    rep.verdict = qm.verdict;
                    if (!rep.witness) rep.witness = qm.witness;
                }
            }
            report = report_json("certify", rep, metrics);
            out << report.dump(2) << "\n";
            return verdict_exit(rep.verdict);
        }
        if (name == "flow") {
            Vec x0 = cmd.at("x0").get<Vec>();
            double t = cmd.at("t").get<double>();
            Trajectory traj = integrate(field, x0, t, opts);
            CertReport rep;
            rep.verdict =
                traj.status == TrajStatus::ReachedTarget ? Verdict::Pass : Verdict::Inconclusive;
            json metrics;
            metrics["value"] = traj.eval(traj.t_end);
            metrics["t_end"] = traj.t_end;
            metrics["steps_accepted"] = traj.stats.accepted;
            metrics["rhs_evals"] = traj.stats.rhs_evals;
            if (!dump_dir.empty())
                write_trajectory_csv(traj, field.dim, dump_dir + "/trajectory.csv",
                                     cmd.value("sample_grid", 0));
            report = report_json("flow", rep, metrics);
            out << report.dump(2) << "\n";
            return verdict_exit(rep.verdict);
        }
        if (name == "escape-time") {
            Vec x0 = cmd.at("x0").get<Vec>();
            double t_max = cmd.value("t_max", -1.0);
            EscapeBracket b = escape_time(field, x0, opts, t_max);
            CertReport rep;
            rep.verdict = Verdict::Pass;
            json metrics;
            metrics["theta_lo"] = b.lo;
            metrics["theta_hi"] = b.hi;
            metrics["global"] = b.global;
            report = report_json("escape-time", rep, metrics);
            out << report.dump(2) << "\n";
            return 0;
        }
        if (name == "convexity") {
            Vec x = cmd.at("x").get<Vec>(), y = cmd.at("y").get<Vec>();
            std::vector<double> lambdas = cmd.at("lambdas").get<std::vector<double>>();
            double t = cmd.at("t").get<double>();
            double tol = cmd.value("tol", cone_tol);
            CertReport rep = flow_convexity_check(field, x, y, lambdas, t, tol, opts);
            json metrics;
            if (cmd.value("check_domain", false)) {
                CertReport dom = domain_convexity_check(field, x, y, lambdas,
                                                        cmd.value("time_tol", 1e-6), opts);
                metrics["domain_convexity"] = verdict_name(dom.verdict);
                if (dom.verdict == Verdict::Fail) rep = dom;
            }
            report = report_json("convexity", rep, metrics);
            out << report.dump(2) << "\n";
            return verdict_exit(rep.verdict);
        }
        if (name == "sandwich") {
            Vec x = cmd.at("x").get<Vec>(), y = cmd.at("y").get<Vec>();
            double t = cmd.at("t").get<double>();
            CertReport rep = sandwich_check(field, x, y, t, cmd.value("tol", cone_tol), opts);
            report = report_json("sandwich", rep, {});
            out << report.dump(2) << "\n";
            return verdict_exit(rep.verdict);
        }
        if (name == "bound") {
            Vec x = cmd.at("x").get<Vec>(), y = cmd.at("y").get<Vec>();
            double lambda = cmd.at("lambda").get<double>();
            double t = cmd.at("t").get<double>();
            Vec klo = cmd.at("K").at("lo").get<Vec>(), khi = cmd.at("K").at("hi").get<Vec>();
            CertReport rep =
                explicit_bound_check(field, x, y, lambda, t, klo, khi, cmd.value("tol", cone_tol),
                                     opts);
            report = report_json("bound", rep, {});
            out << report.dump(2) << "\n";
            return verdict_exit(rep.verdict);
        }
        if (name == "comparison") {
            Vec x0 = cmd.at("x0").get<Vec>(), y0 = cmd.at("y0").get<Vec>();
            double t = cmd.at("t").get<double>();
            int grid_n = cmd.value("grid_n", 21);
            double tol = cmd.value("tol", cone_tol);
            double premise_tol = cmd.value("premise_tol", 1e-4);
            Trajectory tlo = integrate(field, x0, t, opts);
            Trajectory thi = integrate(field, y0, t, opts);
            if (tlo.status != TrajStatus::ReachedTarget || thi.status != TrajStatus::ReachedTarget)
                throw std::invalid_argument("comparison: trajectory escapes before t");
            Curve lower = [&tlo](double tau) { return tlo.eval(tau); };
            double shift = cmd.value("mode", std::string("solutions")) == "violating"
                               ? cmd.value("shift_rate", 1.0)
                               : 0.0;
            Curve upper = [&thi, shift](double tau) {
                Vec v = thi.eval(tau);
                for (double& c : v) c -= shift * tau;
                return v;
            };
            std::vector<double> grid(grid_n);
            for (int i = 0; i < grid_n; ++i) grid[i] = t * double(i) / double(grid_n - 1);
            CertReport rep = comparison_check(field, lower, upper, grid, tol, premise_tol);
            report = report_json("comparison", rep, {});
            out << report.dump(2) << "\n";
            return verdict_exit(rep.verdict);
        }
        if (name == "mollify-convergence") {
            Vec x0 = cmd.at("x0").get<Vec>();
            double t = cmd.at("t").get<double>();
            std::vector<double> eps = cmd.value("epsilons", std::vector<double>{0.2, 0.1, 0.05, 0.025});
            double conv_tol = cmd.value("convergence_tol", 1e-3);
            int grid_n = cmd.value("grid_n", 21);
            MollifySpec mspec;
            mspec.nodes_per_axis = cmd.value("nodes_per_axis", 40);
            // base solution
            Trajectory base = integrate(field, x0, t, opts);
            if (base.status != TrajStatus::ReachedTarget)
                throw std::invalid_argument("mollify-convergence: base escapes before t");
            CertReport rep;
            rep.tolerance = conv_tol;
            json metrics;
            std::vector<double> errs;
            for (double e : eps) {
                VectorField fe = mollify(field, e, mspec);
                if (!fe.domain.contains(x0))
                    throw std::invalid_argument("mollify-convergence: x0 not in shrunken domain");
                Trajectory te = integrate(fe, x0, t, opts);
                double worst = 0.0;
                for (int i = 0; i < grid_n; ++i) {
                    double tau = t * double(i) / double(grid_n - 1);
                    worst = std::max(worst,
                                     field.cone.norm_of(vsub(te.eval(tau), base.eval(tau))));
                }
                errs.push_back(worst);
            }
            metrics["epsilons"] = eps;
            metrics["errors"] = errs;
            rep.samples_tested = long(errs.size());
            rep.verdict = Verdict::Pass;
            for (std::size_t i = 1; i < errs.size(); ++i) {
                if (errs[i] > errs[i - 1] * 1.10 + 1e-12) {
                    rep.verdict = Verdict::Fail;
                    rep.detail = "error ladder not nonincreasing";
                }
            }
            if (errs.back() > conv_tol) {
                rep.verdict = Verdict::Fail;
                rep.detail = "final error above convergence_tol";
            }
            report = report_json("mollify-convergence", rep, metrics);
            out << report.dump(2) << "\n";
            return verdict_exit(rep.verdict);
        }
        throw std::invalid_argument("unknown command: " + name);
    } catch (const std::exception& e) {
        json err;
        err["schema_version"] = kReportSchemaVersion;
        err["verdict"] = "config-error";
        err["error"] = e.what();
        err["versions"] = {{"cone-flow", kVersion}};
        out << err.dump(2) << "\n";
        return 3;
    }
}

int run_scenario_file(const std::string& path, std::ostream& out, const std::string& dump_dir,
                      std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) {
        out << "{\"verdict\":\"config-error\",\"error\":\"cannot open " << path << "\"}\n";
        return 3;
    }
    json scenario;
    try {
        scenario = json::parse(in);
    } catch (const std::exception& e) {
        json err;
        err["schema_version"] = kReportSchemaVersion;
        err["verdict"] = "config-error";
        err["error"] = e.what();
        out << err.dump(2) << "\n";
        return 3;
    }
    return run_scenario(scenario, out, dump_dir, seed_override);
}

}  // namespace coneflow
