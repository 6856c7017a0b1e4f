#pragma once
// Broadcast-channel bound quantities: the worst-coupling cooperative rate at
// a fixed input distribution, the cooperative gain against the channel's own
// coupling, and the sum-rate bound maximized over input distributions.

#include <optional>

#include "bcpid/broja.hpp"

namespace bcpid {

struct BroadcastChannel {
    Alphabet t, x, y;
    std::vector<double> px_given_t;                 // |T| x |X|, row-stochastic
    std::vector<double> py_given_t;                 // |T| x |Y|
    std::optional<std::vector<double>> pxy_given_t;  // |T| x |X| x |Y|, t-major

    double px(int ti, int xi) const { return px_given_t[ti * x.size() + xi]; }
    double py(int ti, int yi) const { return py_given_t[ti * y.size() + yi]; }
    double pxy(int ti, int xi, int yi) const {
        return (*pxy_given_t)[(ti * x.size() + xi) * y.size() + yi];
    }
};

void check_valid(const BroadcastChannel& ch);

struct SatoOptions {
    SolverOptions inner;
    int ascent_iters = 2000;
    double ascent_step = 0.5;  // c in c/sqrt(k)
    int polish_iters = 200;    // vertex-direction refinement after the ascent
    double polish_gap_tol = 1e-6;
    bool cross_check = true;   // simplex grid comparison when |T| <= 3
    double cross_check_step = 0.02;
    double cross_check_tol = 1e-3;
    Execution exec = Execution::OpenMP;
};

struct SatoReport {
    double r_pt = 0.0;  // bits
    std::optional<double> coop_rate;
    std::optional<double> coop_gain;
    std::optional<double> c_sato;
    std::optional<std::vector<double>> p_t_star;
    bool converged = true;
};

// Joint over (T,X,Y) induced by p_t and either the channel's own coupling or
// the per-t product of the conditionals.
JointPMF channel_joint(const BroadcastChannel& ch, const std::vector<double>& p_t,
                       bool use_true_coupling);

// min over marginal-preserving couplings of I(T;X,Y) at fixed p_t.
double r_pt(const BroadcastChannel& ch, const std::vector<double>& p_t,
            const SatoOptions& opts = {});

SatoReport cooperative_gain(const BroadcastChannel& ch, const std::vector<double>& p_t,
                            const SatoOptions& opts = {});

// max over p_t of r_pt, by projected supergradient ascent plus a
// vertex-direction polish; grid cross-checked for |T| <= 3.
SatoReport sato_sum_capacity(const BroadcastChannel& ch, const SatoOptions& opts = {});

std::vector<double> project_to_simplex(std::vector<double> v);

}  // namespace bcpid
