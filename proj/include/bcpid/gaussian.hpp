#pragma once
// Gaussian decomposition: log-det mutual information, whitening reductions,
// and the least-favorable-noise program over the noise cross-covariance.

#include <Eigen/Dense>

#include "bcpid/broja.hpp"

namespace bcpid {

// Zero-mean joint covariance of (T, X, Y), stored as one symmetric matrix
// with blocks ordered T, X, Y.
struct GaussianJoint {
    int dt = 0, dx = 0, dy = 0;
    Eigen::MatrixXd cov;

    int dim() const { return dt + dx + dy; }
    Eigen::Block<const Eigen::MatrixXd> block(Axis a, Axis b) const;
};

// Throws std::invalid_argument unless cov is symmetric (1e-12) and PSD
// (min eigenvalue >= -1e-8).
void check_valid(const GaussianJoint& g);

InfoValue gaussian_mi(const GaussianJoint& g, const std::vector<Axis>& group_a,
                      const std::vector<Axis>& group_b);

// Channel form X = H_X t + n_X, Y = H_Y t + n_Y in coordinates where the
// input covariance and both noise covariances are identity.
struct WhitenedModel {
    Eigen::MatrixXd hx, hy;
    Eigen::MatrixXd t_sqrt, nx_sqrt, ny_sqrt;  // un-whitening records
    bool regularized = false;                  // rank-deficient input/noise blocks ridged

    Eigen::MatrixXd stacked() const;  // [hx; hy]
};

WhitenedModel whiten(const GaussianJoint& g);

// Cooperative rate (bits) at noise cross-covariance n_cross:
//   1/2 log2 det(H H' + S_n) - 1/2 log2 det(S_n),  S_n = [[I, N], [N', I]].
// Rejects n_cross with spectral norm >= 1.
double lfn_objective(const WhitenedModel& w, const Eigen::MatrixXd& n_cross);

Eigen::MatrixXd lfn_gradient(const WhitenedModel& w, const Eigen::MatrixXd& n_cross);

struct LfnOptions {
    double grad_tol = 1e-8;  // gradient-mapping norm
    int max_iters = 50000;
    double armijo = 1e-4;
};

struct LFNSolution {
    Eigen::MatrixXd n_cross;
    double objective = 0.0;  // bits
    double grad_map_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool boundary = false;     // optimum sits on the spectral-norm clamp
    bool regularized = false;  // singular H H' ridged inside the first determinant
};

LFNSolution solve_lfn(const WhitenedModel& w, const LfnOptions& opts = {});

struct GaussianPIDResult {
    PIDResult pid;  // fw_gap carries the gradient-mapping norm
    bool boundary = false;
    double grad_map_norm = 0.0;
    bool regularized = false;
};

GaussianPIDResult gaussian_decompose(const GaussianJoint& g, const LfnOptions& opts = {});

}  // namespace bcpid
