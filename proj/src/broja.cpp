#include "bcpid/broja.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "bcpid/fastmath.hpp"

namespace bcpid {

namespace {

constexpr double kTinyProb = 1e-300;  // log floor for gradient at zeroed cells

double xlog2(double v) { return v > 0.0 ? v * std::log2(v) : 0.0; }

}  // namespace

double coupling_objective(const CouplingFamily& c) {
    const int nx = c.nx(), ny = c.ny();
    const auto pt = c.pt();
    std::vector<double> qxy(static_cast<std::size_t>(nx) * ny, 0.0);
    double cell_term = 0.0;
    for (int t = 0; t < c.nt(); ++t)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                const double v = c.at(t, x, y);
                cell_term += xlog2(v);
                qxy[static_cast<std::size_t>(x) * ny + y] += v;
            }
    double xy_term = 0.0;
    for (double v : qxy) xy_term += xlog2(v);
    double t_term = 0.0;
    for (double v : pt) t_term += xlog2(v);
    double mi = cell_term - xy_term - t_term;
    if (mi < 0.0) {
        if (mi < -1e-9) throw std::domain_error("coupling objective negative beyond tolerance");
        mi = 0.0;
    }
    return mi;
}

std::vector<double> objective_gradient(const CouplingFamily& c) {
    const int nt = c.nt(), nx = c.nx(), ny = c.ny();
    const auto pt = c.pt();
    std::vector<double> qxy(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int t = 0; t < nt; ++t)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) qxy[static_cast<std::size_t>(x) * ny + y] += c.at(t, x, y);

    std::vector<double> g(c.q.size(), 0.0);
    for (int t = 0; t < nt; ++t) {
        if (pt[t] <= 0.0) continue;
        const double lpt = std::log2(pt[t]);
        for (int x = 0; x < nx; ++x) {
            if (c.tx.at(t, x) <= 0.0) continue;
            for (int y = 0; y < ny; ++y) {
                if (c.ty.at(t, y) <= 0.0) continue;
                const double q = std::max(c.at(t, x, y), kTinyProb);
                const double m = std::max(qxy[static_cast<std::size_t>(x) * ny + y], kTinyProb);
                g[(static_cast<std::size_t>(t) * nx + x) * ny + y] =
                    std::log2(q) - lpt - std::log2(m);
            }
        }
    }
    return g;
}

std::vector<double> transportation_lp(const std::vector<double>& cost,
                                      const std::vector<double>& row_marg,
                                      const std::vector<double>& col_marg) {
    const int m = static_cast<int>(row_marg.size());
    const int n = static_cast<int>(col_marg.size());
    if (m == 0 || n == 0) throw std::invalid_argument("transportation_lp: empty marginals");
    if (cost.size() != static_cast<std::size_t>(m) * n)
        throw std::invalid_argument("transportation_lp: cost shape mismatch");
    double sr = 0.0, sc = 0.0;
    for (double v : row_marg) {
        if (v < 0.0) throw std::invalid_argument("transportation_lp: negative row marginal");
        sr += v;
    }
    for (double v : col_marg) {
        if (v < 0.0) throw std::invalid_argument("transportation_lp: negative column marginal");
        sc += v;
    }
    if (std::abs(sr - sc) > kProbTol)
        throw std::invalid_argument("transportation_lp: infeasible marginals (sum mismatch)");
    for (double v : cost)
        if (!std::isfinite(v)) throw std::invalid_argument("transportation_lp: non-finite cost");

    auto id = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };

    std::vector<double> alloc(static_cast<std::size_t>(m) * n, 0.0);
    std::vector<char> basic(static_cast<std::size_t>(m) * n, 0);

    // Northwest-corner start: exactly m+n-1 basic cells forming a spanning tree.
    {
        int i = 0, j = 0;
        double ri = row_marg[0], cj = col_marg[0];
        while (true) {
            basic[id(i, j)] = 1;
            const double a = std::min(ri, cj);
            alloc[id(i, j)] = a;
            ri -= a;
            cj -= a;
            if (i == m - 1 && j == n - 1) break;
            if (ri <= cj && i < m - 1) {
                ++i;
                ri = row_marg[i];
            } else if (j < n - 1) {
                ++j;
                cj = col_marg[j];
            } else {
                ++i;
                ri = row_marg[i];
            }
        }
    }

    double scale = 1.0;
    for (double v : cost) scale = std::max(scale, std::abs(v));
    const double enter_tol = 1e-12 * scale;

    std::vector<double> u(m), v(n);
    std::vector<char> known_u(m), known_v(n);
    std::vector<int> stack;
    // nodes: rows 0..m-1, cols m..m+n-1
    std::vector<int> parent(m + n);
    std::vector<int> bfs;

    const long max_pivots = 200L * (m + n) * (m + n) + 1000;
    for (long pivot = 0; pivot < max_pivots; ++pivot) {
        // duals from the basis tree
        std::fill(known_u.begin(), known_u.end(), 0);
        std::fill(known_v.begin(), known_v.end(), 0);
        u[0] = 0.0;
        known_u[0] = 1;
        stack.assign(1, 0);  // row nodes as i, col nodes as m+j
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            if (node < m) {
                for (int j = 0; j < n; ++j)
                    if (basic[id(node, j)] && !known_v[j]) {
                        v[j] = cost[id(node, j)] - u[node];
                        known_v[j] = 1;
                        stack.push_back(m + j);
                    }
            } else {
                const int j = node - m;
                for (int i = 0; i < m; ++i)
                    if (basic[id(i, j)] && !known_u[i]) {
                        u[i] = cost[id(i, j)] - v[j];
                        known_u[i] = 1;
                        stack.push_back(i);
                    }
            }
        }

        // Bland entering rule: first cell in lexicographic order
        int ei = -1, ej = -1;
        for (int i = 0; i < m && ei < 0; ++i)
            for (int j = 0; j < n; ++j) {
                if (basic[id(i, j)]) continue;
                if (cost[id(i, j)] - u[i] - v[j] < -enter_tol) {
                    ei = i;
                    ej = j;
                    break;
                }
            }
        if (ei < 0) break;  // optimal

        // unique tree path from col ej back to row ei
        std::fill(parent.begin(), parent.end(), -2);
        parent[m + ej] = -1;
        bfs.assign(1, m + ej);
        for (std::size_t h = 0; h < bfs.size(); ++h) {
            const int node = bfs[h];
            if (node == ei) break;
            if (node < m) {
                for (int j = 0; j < n; ++j)
                    if (basic[id(node, j)] && parent[m + j] == -2) {
                        parent[m + j] = node;
                        bfs.push_back(m + j);
                    }
            } else {
                const int j = node - m;
                for (int i = 0; i < m; ++i)
                    if (basic[id(i, j)] && parent[i] == -2) {
                        parent[i] = m + j;
                        bfs.push_back(i);
                    }
            }
        }
        if (parent[ei] == -2) throw std::runtime_error("transportation_lp: basis lost connectivity");

        // path cells from the entering column to the entering row; signs
        // alternate starting at -1 (they share the entering column first)
        std::vector<std::pair<int, int>> minus_cells, plus_cells;
        {
            int node = ei;
            // walk ei -> ... -> col ej, collecting edges; signs from the ej
            // side alternate -,+,-,...; parity from path length
            std::vector<int> path;
            while (node != -1) {
                path.push_back(node);
                node = parent[node];
            }
            // path = [ei, ..., m+ej]; edges between consecutive nodes
            const int edges = static_cast<int>(path.size()) - 1;
            for (int e = 0; e < edges; ++e) {
                const int a = path[e], b = path[e + 1];
                const int i = (a < m) ? a : b;
                const int j = ((a < m) ? b : a) - m;
                // distance of this edge from the col-ej end decides the sign
                const int from_end = edges - 1 - e;
                const int sign = (from_end % 2 == 0) ? -1 : +1;
                (sign < 0 ? minus_cells : plus_cells).emplace_back(i, j);
            }
        }

        double theta = std::numeric_limits<double>::infinity();
        for (auto [i, j] : minus_cells) theta = std::min(theta, alloc[id(i, j)]);
        std::pair<int, int> leave{-1, -1};
        for (auto [i, j] : minus_cells)
            if (alloc[id(i, j)] <= theta &&
                (leave.first < 0 || std::pair{i, j} < leave))
                leave = {i, j};

        alloc[id(ei, ej)] = theta;
        basic[id(ei, ej)] = 1;
        for (auto [i, j] : plus_cells) alloc[id(i, j)] += theta;
        for (auto [i, j] : minus_cells) alloc[id(i, j)] -= theta;
        alloc[id(leave.first, leave.second)] = 0.0;
        basic[id(leave.first, leave.second)] = 0;
        if (pivot == max_pivots - 1)
            throw std::runtime_error("transportation_lp: pivot limit exceeded");
    }

    for (double& a : alloc)
        if (a < 0.0) a = 0.0;  // rounding dust from cycle updates
    return alloc;
}

namespace {

// One Frank-Wolfe linear-minimization step: per-t transportation LPs on the
// gradient slices. Slices with zero T-mass stay zero.
void lmo_vertex(const CouplingFamily& q, const std::vector<double>& grad,
                const std::vector<double>& pt, std::vector<double>& s) {
    const int nt = q.nt(), nx = q.nx(), ny = q.ny();
    const std::size_t slice = static_cast<std::size_t>(nx) * ny;
    std::fill(s.begin(), s.end(), 0.0);
    std::vector<double> cost(slice), rows(nx), cols(ny);
    for (int t = 0; t < nt; ++t) {
        if (pt[t] <= 0.0) continue;
        for (int x = 0; x < nx; ++x) rows[x] = q.tx.at(t, x);
        for (int y = 0; y < ny; ++y) cols[y] = q.ty.at(t, y);
        std::copy_n(grad.begin() + static_cast<std::ptrdiff_t>(t) * slice, slice, cost.begin());
        const auto vert = transportation_lp(cost, rows, cols);
        std::copy(vert.begin(), vert.end(), s.begin() + static_cast<std::ptrdiff_t>(t) * slice);
    }
}

// Alternating scaling in log2 space, for optima on quasi-faces of the
// polytope. The minimizer can place cells at 2^-1000 scale, far below what
// vertex steps reach in double arithmetic; here each slice is refit against
// the evolving (X,Y) mixture by row/column scaling, so cells move freely
// across exponent scales while the iterate keeps the separable structure
// the certificate needs: the gradient is row/column constants per slice up
// to the fit residual, any transportation vertex prices the same, and the
// Frank-Wolfe gap collapses with the residual.
struct LogPolish {
    static constexpr double kNeg = -1.0e100;  // log2 of an empty cell

    const CouplingFamily base;
    std::vector<double> pt;
    int nt, nx, ny;
    std::size_t nxy;
    std::vector<double> cell_log;  // log2 q(t,x,y), t-major
    std::vector<double> mix_log;   // log2 qxy(x,y)

    explicit LogPolish(CouplingFamily start)
        : base(std::move(start)),
          pt(base.pt()),
          nt(base.nt()),
          nx(base.nx()),
          ny(base.ny()),
          nxy(static_cast<std::size_t>(nx) * ny),
          cell_log(base.q.size(), kNeg),
          mix_log(nxy, kNeg) {
        for (std::size_t i = 0; i < base.q.size(); ++i)
            if (base.q[i] > 0.0) cell_log[i] = std::log2(base.q[i]);
        refresh_mix();
    }

    void refresh_mix() {
        for (std::size_t c = 0; c < nxy; ++c) {
            double m = kNeg;
            for (int t = 0; t < nt; ++t) m = std::max(m, cell_log[t * nxy + c]);
            if (m <= kNeg) {
                mix_log[c] = kNeg;
                continue;
            }
            double sum = 0.0;
            for (int t = 0; t < nt; ++t) {
                const double l = cell_log[t * nxy + c];
                if (l > kNeg) sum += std::exp2(l - m);
            }
            mix_log[c] = m + std::log2(sum);
        }
    }

    // I-projection of the current mixture onto slice t's transportation
    // polytope: the slice becomes mix + row const + col const.
    void fit_slice(int t) {
        std::vector<double> u(nx, 0.0), v(ny, 0.0);
        for (int x = 0; x < nx; ++x)
            if (base.tx.at(t, x) <= 0.0) u[x] = kNeg;
        for (int y = 0; y < ny; ++y)
            if (base.ty.at(t, y) <= 0.0) v[y] = kNeg;

        for (int sweep = 0; sweep < 500; ++sweep) {
            for (int x = 0; x < nx; ++x) {
                if (u[x] <= kNeg) continue;
                double m = kNeg;
                for (int y = 0; y < ny; ++y)
                    if (v[y] > kNeg) m = std::max(m, mix_log[static_cast<std::size_t>(x) * ny + y] + v[y]);
                if (m <= kNeg) continue;  // row has no admissible cells
                double sum = 0.0;
                for (int y = 0; y < ny; ++y)
                    if (v[y] > kNeg && mix_log[static_cast<std::size_t>(x) * ny + y] > kNeg)
                        sum += std::exp2(mix_log[static_cast<std::size_t>(x) * ny + y] + v[y] - m);
                u[x] = std::log2(base.tx.at(t, x)) - (m + std::log2(sum));
            }
            double col_err = 0.0;
            for (int y = 0; y < ny; ++y) {
                if (v[y] <= kNeg) continue;
                double m = kNeg;
                for (int x = 0; x < nx; ++x)
                    if (u[x] > kNeg) m = std::max(m, mix_log[static_cast<std::size_t>(x) * ny + y] + u[x]);
                if (m <= kNeg) continue;
                double sum = 0.0;
                for (int x = 0; x < nx; ++x)
                    if (u[x] > kNeg && mix_log[static_cast<std::size_t>(x) * ny + y] > kNeg)
                        sum += std::exp2(mix_log[static_cast<std::size_t>(x) * ny + y] + u[x] - m);
                const double have = m + std::log2(sum);
                const double want = std::log2(base.ty.at(t, y));
                col_err = std::max(col_err, std::abs(std::exp2(have + v[y] - want) - 1.0));
                v[y] = want - have;
            }
            if (col_err <= 1e-14) break;  // rows exact by the last row pass
        }
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                const std::size_t c = static_cast<std::size_t>(x) * ny + y;
                cell_log[t * nxy + c] =
                    (u[x] > kNeg && v[y] > kNeg && mix_log[c] > kNeg) ? mix_log[c] + u[x] + v[y]
                                                                      : kNeg;
            }
    }

    void round() {
        refresh_mix();
        for (int t = 0; t < nt; ++t)
            if (pt[t] > 0.0) fit_slice(t);
    }

    // finite gradient straight from the logs; faithful where the linear
    // cells underflow
    std::vector<double> gradient() const {
        std::vector<double> g(cell_log.size(), 0.0);
        std::vector<double> cur(nxy, kNeg);
        for (std::size_t c = 0; c < nxy; ++c) {
            double m = kNeg;
            for (int t = 0; t < nt; ++t) m = std::max(m, cell_log[t * nxy + c]);
            if (m <= kNeg) continue;
            double sum = 0.0;
            for (int t = 0; t < nt; ++t)
                if (cell_log[t * nxy + c] > kNeg) sum += std::exp2(cell_log[t * nxy + c] - m);
            cur[c] = m + std::log2(sum);
        }
        for (int t = 0; t < nt; ++t) {
            if (pt[t] <= 0.0) continue;
            const double lpt = std::log2(pt[t]);
            for (std::size_t c = 0; c < nxy; ++c) {
                const double l = cell_log[t * nxy + c];
                if (l > kNeg && cur[c] > kNeg) g[t * nxy + c] = l - lpt - cur[c];
            }
        }
        return g;
    }

    std::vector<double> linear_table() const {
        std::vector<double> q(cell_log.size(), 0.0);
        for (std::size_t i = 0; i < cell_log.size(); ++i)
            if (cell_log[i] > kNeg) q[i] = std::exp2(cell_log[i]);
        return q;
    }
};

}  // namespace

MinMISolution min_mutual_information(const JointPMF& p, const SolverOptions& opts) {
    if (!(opts.gap_tol > 0.0)) throw std::invalid_argument("gap_tol must be positive");
    if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (const auto rep = validate(p); !rep.ok())
        throw std::invalid_argument("invalid distribution: " + rep.to_string());

    CouplingFamily q = product_coupling(p);
    const auto pt = q.pt();
    const int nx = q.nx(), ny = q.ny();
    const std::size_t cells = q.q.size();
    const std::size_t nxy = static_cast<std::size_t>(nx) * ny;

    double t_term = 0.0;
    for (double v : pt) t_term += xlog2(v);

    auto objective = [&](const std::vector<double>& table) {
        double cell_term = 0.0;
        std::vector<double> qxy(nxy, 0.0);
        for (std::size_t i = 0; i < cells; ++i) {
            cell_term += xlog2(table[i]);
            qxy[i % nxy] += table[i];
        }
        double xy_term = 0.0;
        for (double v : qxy) xy_term += xlog2(v);
        return cell_term - xy_term - t_term;
    };

    std::vector<double> s(cells), grad;
    auto certificate_gap = [&]() {
        grad = objective_gradient(q);
        lmo_vertex(q, grad, pt, s);
        double gap = 0.0;
        for (std::size_t i = 0; i < cells; ++i) gap += grad[i] * (q.q[i] - s[i]);
        return gap;
    };

    double f_cur = objective(q.q);
    MinMISolution out;
    if (opts.collect_trace) out.trace.push_back(f_cur);

    // Active atoms: the iterate stays an explicit convex combination of
    // feasible points, so marginal feasibility is exact by construction.
    // Away steps over this set restore a linear rate where plain
    // Frank-Wolfe zigzags sublinearly and misses tight gap targets.
    struct Atom {
        std::vector<double> table;
        double weight;
    };
    const std::vector<double> start = q.q;  // strictly positive on the support
    std::vector<Atom> atoms;
    atoms.push_back({start, 1.0});

    double gap = std::numeric_limits<double>::infinity();
    std::vector<double> dir(cells), dir_xy(nxy), q_xy(nxy), endpoint(cells), trial(cells);
    int iters = 0;
    // vertex steps first; the alternating-scaling stage below finishes the
    // quasi-face instances they cannot certify
    const int fw_cap = std::min(opts.max_iters, 1500);
    for (int k = 0; k < fw_cap; ++k) {
        gap = certificate_gap();
        if (gap <= opts.gap_tol) {
            out.converged = true;
            break;
        }

        if (opts.line_search == LineSearch::Harmonic) {
            const double gamma = 2.0 / (k + 2.0);
            for (std::size_t i = 0; i < cells; ++i)
                trial[i] = std::max(q.q[i] + gamma * (s[i] - q.q[i]), 0.0);
            const double f_new = objective(trial);
            if (f_new > f_cur) break;  // open-loop step stopped descending
            q.q.swap(trial);
            f_cur = f_new;
            iters = k + 1;
            if (opts.collect_trace) out.trace.push_back(f_cur);
            continue;
        }

        // pick the forward vertex or an away step on the worst active atom
        double q_dot = 0.0;
        for (std::size_t i = 0; i < cells; ++i) q_dot += grad[i] * q.q[i];
        std::size_t away_idx = 0;
        double away_dot = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            double dot = 0.0;
            for (std::size_t i = 0; i < cells; ++i) dot += grad[i] * atoms[a].table[i];
            if (dot > away_dot) {
                away_dot = dot;
                away_idx = a;
            }
        }
        const double gap_away = away_dot - q_dot;
        bool away = gap_away > gap && atoms.size() > 1 && atoms[away_idx].weight < 1.0;

        double gamma_max;
        if (away) {
            const auto& v = atoms[away_idx].table;
            const double w = atoms[away_idx].weight;
            gamma_max = w / (1.0 - w);
            for (std::size_t i = 0; i < cells; ++i) dir[i] = q.q[i] - v[i];
            // the segment end with this atom removed; exact zeros survive
            std::fill(endpoint.begin(), endpoint.end(), 0.0);
            for (std::size_t a = 0; a < atoms.size(); ++a) {
                if (a == away_idx) continue;
                const double wa = atoms[a].weight / (1.0 - w);
                for (std::size_t i = 0; i < cells; ++i) endpoint[i] += wa * atoms[a].table[i];
            }
        } else {
            gamma_max = 1.0;
            for (std::size_t i = 0; i < cells; ++i) dir[i] = s[i] - q.q[i];
            endpoint = s;
        }

        std::fill(q_xy.begin(), q_xy.end(), 0.0);
        std::fill(dir_xy.begin(), dir_xy.end(), 0.0);
        for (std::size_t i = 0; i < cells; ++i) {
            q_xy[i % nxy] += q.q[i];
            dir_xy[i % nxy] += dir[i];
        }

        // directional derivative of the convex restriction; the per-slice
        // constants cancel because the direction has zero slice mass
        auto dphi = [&](double gamma) {
            double cell_term = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                if (dir[i] == 0.0) continue;
                const double v = std::max(q.q[i] + gamma * dir[i], kTinyProb);
                cell_term += dir[i] * std::log2(v);
            }
            double xy_term = 0.0;
            for (std::size_t i = 0; i < nxy; ++i) {
                if (dir_xy[i] == 0.0) continue;
                const double w = std::max(q_xy[i] + gamma * dir_xy[i], kTinyProb);
                xy_term += dir_xy[i] * std::log2(w);
            }
            return cell_term - xy_term;
        };

        // One-sided derivative limit at the segment end. The log-divergences
        // of the cell term and the marginal term cancel exactly when the mass
        // zeroed in cells equals the mass zeroed in the (X,Y) marginal; the
        // finite parts then decide, and a clamped dphi(gamma_max) would get
        // their sign wrong.
        auto dphi_at_end = [&]() {
            double zero_cell_mass = 0.0, zero_xy_mass = 0.0, val = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                if (dir[i] == 0.0) continue;
                if (endpoint[i] > 0.0)
                    val += dir[i] * std::log2(endpoint[i]);
                else {
                    zero_cell_mass -= dir[i];
                    val += dir[i] * std::log2(std::max(q.q[i], kTinyProb));
                }
            }
            std::vector<double> end_xy(nxy, 0.0);
            for (std::size_t i = 0; i < cells; ++i) end_xy[i % nxy] += endpoint[i];
            for (std::size_t i = 0; i < nxy; ++i) {
                if (dir_xy[i] == 0.0) continue;
                if (end_xy[i] > 0.0)
                    val -= dir_xy[i] * std::log2(end_xy[i]);
                else {
                    zero_xy_mass -= dir_xy[i];
                    val -= dir_xy[i] * std::log2(std::max(q_xy[i], kTinyProb));
                }
            }
            if (zero_cell_mass > zero_xy_mass + 1e-14)
                return std::numeric_limits<double>::infinity();
            return val;
        };

        // dphi(0) = -(chosen gap) < 0; bisect on the sign. A value-based
        // search cannot certify tight gaps: near the optimum the descent per
        // step drops below the objective's rounding noise. The minimizer can
        // sit many decades below gamma_max (a nearly-zeroed cell re-grows
        // only geometrically), so bracket by powers of two first.
        auto run_search = [&](bool* hit_end) {
            if (dphi_at_end() <= 0.0) {
                *hit_end = true;
                return gamma_max;
            }
            *hit_end = false;
            double lo = 0.0, hi = gamma_max;
            for (int j = 1; j <= 120; ++j) {
                const double probe = std::ldexp(gamma_max, -j);
                if (probe <= 0.0) break;
                if (dphi(probe) < 0.0) {
                    lo = probe;
                    break;
                }
                hi = probe;
            }
            for (int it = 0; lo > 0.0 && it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (dphi(mid) < 0.0 ? lo : hi) = mid;
            }
            return lo;  // descent side of the bracket
        };

        bool dropped = false;
        bool to_interior = false;
        double gamma = run_search(&dropped);
        if (gamma <= 0.0 && q.q != start) {
            // Vertex directions cannot re-grow a cell stuck at exact zero:
            // the x*log(x) descent is weaker than any bundled rearrangement
            // cost. The segment toward the strictly positive start point
            // re-seeds such cells and still descends monotonically.
            to_interior = true;
            away = false;
            gamma_max = 1.0;
            for (std::size_t i = 0; i < cells; ++i) dir[i] = start[i] - q.q[i];
            endpoint = start;
            std::fill(dir_xy.begin(), dir_xy.end(), 0.0);
            for (std::size_t i = 0; i < cells; ++i) dir_xy[i % nxy] += dir[i];
            gamma = run_search(&dropped);
        }
        if (gamma <= 0.0) break;  // no representable descent step; gap is the certificate

        if (away) {
            for (auto& a : atoms) a.weight *= 1.0 + gamma;
            atoms[away_idx].weight -= gamma;
            if (dropped) atoms[away_idx].weight = 0.0;
        } else {
            const std::vector<double>& target = to_interior ? start : s;
            for (auto& a : atoms) a.weight *= 1.0 - gamma;
            bool merged = false;
            for (auto& a : atoms)
                if (a.table == target) {
                    a.weight += gamma;
                    merged = true;
                    break;
                }
            if (!merged) atoms.push_back({target, gamma});
        }
        std::erase_if(atoms, [](const Atom& a) { return a.weight <= 0.0; });
        double total_w = 0.0;
        for (const auto& a : atoms) total_w += a.weight;
        for (auto& a : atoms) a.weight /= total_w;

        std::fill(q.q.begin(), q.q.end(), 0.0);
        for (const auto& a : atoms)
            for (std::size_t i = 0; i < cells; ++i) q.q[i] += a.weight * a.table[i];

        f_cur = objective(q.q);
        iters = k + 1;
        if (opts.collect_trace) out.trace.push_back(f_cur);
    }
    if (!out.converged) gap = certificate_gap();

    if (!out.converged && opts.line_search == LineSearch::Exact) {
        LogPolish polish(product_coupling(p));
        const int round_cap = std::clamp(opts.max_iters - iters, 0, 60000);
        for (int r = 0; r < round_cap; ++r) {
            polish.round();
            ++iters;
            if (r % 20 != 19 && r != round_cap - 1) continue;

            const auto g2 = polish.gradient();
            auto q2 = polish.linear_table();
            const CouplingFamily probe{q.tx, q.ty, q2};
            lmo_vertex(probe, g2, pt, s);
            double gap2 = 0.0;
            for (std::size_t i = 0; i < cells; ++i) gap2 += g2[i] * (q2[i] - s[i]);
            const double f2 = objective(q2);

            // a certified point is within gap_tol of the optimum, so adopting
            // it never gives up more than the tolerance
            if (gap2 <= opts.gap_tol || f2 < f_cur) {
                q.q = std::move(q2);
                f_cur = f2;
                gap = gap2;
                if (opts.collect_trace) out.trace.push_back(f_cur);
                if (gap2 <= opts.gap_tol) {
                    out.converged = true;
                    break;
                }
            }
        }
    }

    // P itself is feasible, so the reported value never exceeds I_P(T;X,Y).
    const double total = mutual_information(p, {Axis::T}, {Axis::X, Axis::Y}).bits;
    if (f_cur > total) {
        q = coupling_from_table(p, p.data());
        f_cur = total;
        gap = certificate_gap();
        out.converged = gap <= opts.gap_tol;
    }

    out.q_star = std::move(q);
    out.value = InfoValue{std::max(f_cur, 0.0)};
    out.fw_gap = gap;
    out.iterations = iters;
    return out;
}

PIDResult decompose(const JointPMF& p, const SolverOptions& opts) {
    const InfoValue total = mutual_information(p, {Axis::T}, {Axis::X, Axis::Y});
    const InfoValue itx = mutual_information(p, {Axis::T}, {Axis::X});
    const InfoValue ity = mutual_information(p, {Axis::T}, {Axis::Y});
    MinMISolution sol = min_mutual_information(p, opts);
    const double m = sol.value.bits;

    double comp[4] = {
        total.bits - m,            // synergy
        m - ity.bits,              // unique in X
        m - itx.bits,              // unique in Y
        itx.bits + ity.bits - m,   // redundancy
    };
    for (double& v : comp) {
        if (v < -1e-7) throw std::runtime_error("decomposition identity violated beyond tolerance");
        v = std::max(v, 0.0);
    }

    PIDResult r;
    r.total = total;
    r.min_mi = sol.value;
    r.synergy = InfoValue{comp[0]};
    r.unique_x = InfoValue{comp[1]};
    r.unique_y = InfoValue{comp[2]};
    r.redundancy = InfoValue{comp[3]};
    r.fw_gap = sol.fw_gap;
    r.iterations = sol.iterations;
    r.converged = sol.converged;
    return r;
}

double brute_force_min_mi(const JointPMF& p, int grid_n, Execution exec) {
    if (p.nx() != 2 || p.ny() != 2)
        throw std::invalid_argument("brute_force_min_mi requires binary X and Y");
    if (grid_n < 2) throw std::invalid_argument("brute_force_min_mi: grid_n must be >= 2");
    if (const auto rep = validate(p); !rep.ok())
        throw std::invalid_argument("invalid distribution: " + rep.to_string());

    const PairMarginal tx = marginalize(p, Axis::T, Axis::X);
    const PairMarginal ty = marginalize(p, Axis::T, Axis::Y);
    std::vector<int> active;
    std::vector<double> pt(p.nt(), 0.0);
    for (int t = 0; t < p.nt(); ++t) {
        pt[t] = tx.at(t, 0) + tx.at(t, 1);
        if (pt[t] > 0.0) active.push_back(t);
    }
    const int k = static_cast<int>(active.size());

    double combos = 1.0;
    for (int i = 0; i < k; ++i) combos *= grid_n;
    if (combos > 1e9) throw std::invalid_argument("brute_force_min_mi: grid too large");

    // per-slice grids: 4 cells and the slice's sum q*log2(q), per grid point
    std::vector<std::vector<double>> cells(k), ent(k);
    for (int a = 0; a < k; ++a) {
        const int t = active[a];
        const double r0 = tx.at(t, 0), r1 = tx.at(t, 1);
        const double c0 = ty.at(t, 0);
        const double lo = std::max(0.0, c0 - r1);
        const double hi = std::min(r0, c0);
        cells[a].resize(static_cast<std::size_t>(grid_n) * 4);
        ent[a].resize(grid_n);
        for (int i = 0; i < grid_n; ++i) {
            const double th = lo + (hi - lo) * static_cast<double>(i) / (grid_n - 1);
            double c4[4] = {th, r0 - th, c0 - th, (r1 - c0) + th};
            double e = 0.0;
            for (int c = 0; c < 4; ++c) {
                c4[c] = std::max(c4[c], 0.0);
                e += xlog2(c4[c]);
            }
            std::copy_n(c4, 4, cells[a].begin() + static_cast<std::size_t>(i) * 4);
            ent[a][i] = e;
        }
    }

    double t_term = 0.0;
    for (int t = 0; t < p.nt(); ++t) t_term += xlog2(pt[t]);

    const std::int64_t total = static_cast<std::int64_t>(combos);
    const std::int64_t outer = total / grid_n;
    const double* last_cells = cells[k - 1].data();
    const double* last_ent = ent[k - 1].data();
    const bool par = exec == Execution::OpenMP;

    double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : best) schedule(static) if (par)
    for (std::int64_t o = 0; o < outer; ++o) {
        double base[4] = {0.0, 0.0, 0.0, 0.0};
        double acc = -t_term;
        std::int64_t r = o;
        for (int a = k - 2; a >= 0; --a) {
            const int i = static_cast<int>(r % grid_n);
            r /= grid_n;
            const double* sc = cells[a].data() + static_cast<std::size_t>(i) * 4;
            base[0] += sc[0];
            base[1] += sc[1];
            base[2] += sc[2];
            base[3] += sc[3];
            acc += ent[a][i];
        }
        double local = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid_n; ++i) {
            const double* sc = last_cells + static_cast<std::size_t>(i) * 4;
            const double v = acc + last_ent[i] - fast_xlog2x(base[0] + sc[0]) -
                             fast_xlog2x(base[1] + sc[1]) - fast_xlog2x(base[2] + sc[2]) -
                             fast_xlog2x(base[3] + sc[3]);
            local = std::min(local, v);
        }
        best = std::min(best, local);
    }

    if (best < 0.0) {
        if (best < -1e-9) throw std::domain_error("grid oracle produced a negative value");
        best = 0.0;
    }
    return best;
}

}  // namespace bcpid
