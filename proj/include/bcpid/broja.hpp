#pragma once
// Minimum mutual information over the pair-marginal-preserving coupling
// polytope, via Frank-Wolfe with exact per-slice transportation LPs, and the
// four-way information decomposition assembled from it.

#include <cstdint>
#include <vector>

#include "bcpid/info.hpp"
#include "bcpid/parallel.hpp"

namespace bcpid {

enum class LineSearch { Exact, Harmonic };

struct SolverOptions {
    double gap_tol = 1e-9;  // bits
    int max_iters = 100000;
    LineSearch line_search = LineSearch::Exact;
    std::uint64_t seed = 0;  // tie audits only
    bool collect_trace = false;
};

struct MinMISolution {
    CouplingFamily q_star;
    InfoValue value;      // minimized I_Q(T;X,Y)
    double fw_gap = 0.0;  // bits; upper-bounds value - true minimum
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // objective per iteration when requested
};

struct PIDResult {
    InfoValue total;    // I_P(T;X,Y)
    InfoValue min_mi;
    InfoValue synergy;
    InfoValue unique_x;
    InfoValue unique_y;
    InfoValue redundancy;
    double fw_gap = 0.0;
    int iterations = 0;
    bool converged = false;
};

// I_Q(T;X,Y) of a coupling, with T-mass read from the base marginals.
double coupling_objective(const CouplingFamily& q);

// d I_Q / d q(t,x,y) = log2 q - log2 q_T - log2 q_XY on the optimization
// support (both base marginals positive), zero elsewhere.
std::vector<double> objective_gradient(const CouplingFamily& q);

// Exact vertex of {Q >= 0 : row sums = row_marg, col sums = col_marg}
// minimizing <cost, Q>. Deterministic under the lexicographic pivot rule.
std::vector<double> transportation_lp(const std::vector<double>& cost,
                                      const std::vector<double>& row_marg,
                                      const std::vector<double>& col_marg);

MinMISolution min_mutual_information(const JointPMF& p, const SolverOptions& opts = {});

PIDResult decompose(const JointPMF& p, const SolverOptions& opts = {});

// Exhaustive grid oracle for binary X, Y: each per-t slice is a segment, the
// product of segments is scanned with grid_n points per axis.
double brute_force_min_mi(const JointPMF& p, int grid_n, Execution exec = Execution::OpenMP);

}  // namespace bcpid
