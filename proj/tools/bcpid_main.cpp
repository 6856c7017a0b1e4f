// Command-line front end: decomposition, channel bounds, and code checks,
// with machine-readable JSON on stdout and a short summary on stderr.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bcpid/io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

struct Common {
    double gap_tol = 1e-9;
    bool gap_tol_set = false;
    int max_iters = 100000;
    std::string units = "bits";
    std::uint64_t seed = 0;
    std::string out_path;

    double unit_scale() const { return units == "nats" ? bcpid::kLn2 : 1.0; }
};

int emit(const Common& c, const std::string& json, const std::string& summary, bool converged) {
    std::cout << json;
    std::cerr << summary << "\n";
    if (!c.out_path.empty()) bcpid::io::write_file(c.out_path, json);
    return converged ? kOk : kNotConverged;
}

int run_pid_discrete(const Common& c, const std::string& file) {
    const bcpid::JointPMF p = bcpid::io::load_distribution(file);
    bcpid::SolverOptions opts;
    opts.gap_tol = c.gap_tol;
    opts.max_iters = c.max_iters;
    opts.seed = c.seed;
    const bcpid::PIDResult r = bcpid::decompose(p, opts);
    std::string summary = "synergy " + std::to_string(r.synergy.bits * c.unit_scale()) + " " +
                          c.units + (r.converged ? "" : " (not converged)");
    return emit(c, bcpid::io::pid_report_json(r, c.unit_scale()), summary, r.converged);
}

int run_pid_gaussian(const Common& c, const std::string& file) {
    const bcpid::GaussianJoint g = bcpid::io::load_gaussian(file);
    bcpid::LfnOptions opts;
    if (c.gap_tol_set) opts.grad_tol = c.gap_tol;
    opts.max_iters = c.max_iters;
    const bcpid::GaussianPIDResult r = bcpid::gaussian_decompose(g, opts);
    std::string summary = "synergy " + std::to_string(r.pid.synergy.bits * c.unit_scale()) + " " +
                          c.units + (r.boundary ? ", boundary optimum" : "") +
                          (r.pid.converged ? "" : " (not converged)");
    return emit(c, bcpid::io::gaussian_report_json(r, c.unit_scale()), summary, r.pid.converged);
}

int run_sato(const Common& c, const std::string& channel_file, const std::string& pt_file,
             bool capacity, bool gain_required) {
    const bcpid::BroadcastChannel ch = bcpid::io::load_channel(channel_file);
    std::vector<double> p_t(ch.t.size(), 1.0 / ch.t.size());
    if (!pt_file.empty()) p_t = bcpid::io::load_pt(pt_file, ch.t.size());

    bcpid::SatoOptions opts;
    opts.inner.gap_tol = c.gap_tol;
    opts.inner.max_iters = c.max_iters;
    opts.inner.seed = c.seed;

    if (gain_required && !ch.pxy_given_t)
        throw bcpid::io::ParseError(channel_file +
                                    ": cooperative gain requested but the file has no pxy_given_t");

    bcpid::SatoReport rep;
    if (ch.pxy_given_t) {
        rep = bcpid::cooperative_gain(ch, p_t, opts);
    } else {
        rep.r_pt = bcpid::r_pt(ch, p_t, opts);
    }
    if (capacity) {
        const bcpid::SatoReport cap = bcpid::sato_sum_capacity(ch, opts);
        rep.c_sato = cap.c_sato;
        rep.p_t_star = cap.p_t_star;
        rep.converged = cap.converged;
    }
    std::string summary = "r_pt " + std::to_string(rep.r_pt * c.unit_scale()) + " " + c.units;
    if (rep.coop_gain)
        summary += ", cooperative gain " + std::to_string(*rep.coop_gain * c.unit_scale());
    if (rep.c_sato) summary += ", c_sato " + std::to_string(*rep.c_sato * c.unit_scale());
    return emit(c, bcpid::io::sato_report_json(rep, c.unit_scale()), summary, rep.converged);
}

int run_verify(const Common& c, const std::string& code_file, const std::string& channel_file,
               int couplings) {
    const bcpid::BroadcastChannel ch = bcpid::io::load_channel(channel_file);
    const bcpid::BroadcastCode code = bcpid::io::load_code(code_file, ch);
    const bcpid::ErrorReport rep = bcpid::coupling_invariance_check(code, ch, couplings, c.seed);
    std::string summary = "p_err " + std::to_string(rep.base.joint) + ", receiver spread " +
                          std::to_string(std::max(rep.spread_rx1, rep.spread_rx2));
    return emit(c, bcpid::io::error_report_json(rep), summary, rep.invariant());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial information decomposition with broadcast-channel bound checks"};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--gap-tol", common.gap_tol, "solver tolerance (bits)")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-iters", common.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    app.add_option("--units", common.units, "report units")
        ->check(CLI::IsMember({"bits", "nats"}));
    app.add_option("--seed", common.seed, "seed for sampled couplings");
    app.add_option("--out", common.out_path, "also write the JSON report to this path");

    auto* pid = app.add_subcommand("pid", "decompose a joint distribution");
    pid->require_subcommand(1);
    pid->fallthrough();
    std::string dist_file, gauss_file;
    auto* pid_discrete = pid->add_subcommand("discrete", "finite-alphabet distribution file");
    pid_discrete->fallthrough();
    pid_discrete->add_option("file", dist_file, "distribution JSON")->required();
    auto* pid_gaussian = pid->add_subcommand("gaussian", "joint covariance file");
    pid_gaussian->fallthrough();
    pid_gaussian->add_option("file", gauss_file, "covariance JSON")->required();

    std::string channel_file, pt_file;
    bool capacity = false, gain_required = false;
    auto* sato = app.add_subcommand("sato", "channel bound quantities");
    sato->fallthrough();
    sato->add_option("channel", channel_file, "channel JSON")->required();
    sato->add_option("--pt", pt_file, "input distribution JSON (default uniform)");
    sato->add_flag("--capacity", capacity, "also maximize over input distributions");
    sato->add_flag("--gain", gain_required, "require the cooperative gain (fails without a coupling)");

    std::string verify_code_file, verify_channel_file;
    int couplings = 10;
    auto* verify = app.add_subcommand("verify", "exact code-error coupling invariance");
    verify->fallthrough();
    verify->add_option("code", verify_code_file, "code JSON")->required();
    verify->add_option("channel", verify_channel_file, "channel JSON")->required();
    verify->add_option("--couplings", couplings, "number of sampled couplings")
        ->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);
    common.gap_tol_set = app.count("--gap-tol") > 0;

    try {
        if (pid_discrete->parsed()) return run_pid_discrete(common, dist_file);
        if (pid_gaussian->parsed()) return run_pid_gaussian(common, gauss_file);
        if (sato->parsed())
            return run_sato(common, channel_file, pt_file, capacity, gain_required);
        if (verify->parsed())
            return run_verify(common, verify_code_file, verify_channel_file, couplings);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
