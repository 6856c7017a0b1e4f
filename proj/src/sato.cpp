#include "bcpid/sato.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bcpid {

namespace {

void check_pt(const std::vector<double>& p_t, int nt) {
    if (static_cast<int>(p_t.size()) != nt)
        throw std::invalid_argument("p_t length does not match the T alphabet");
    double s = 0.0;
    for (double v : p_t) {
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("p_t has invalid entries");
        s += v;
    }
    if (std::abs(s - 1.0) > kMassTol) throw std::invalid_argument("p_t does not sum to 1");
}

// Supergradient of p_t -> min_Q I(T;X,Y) at the inner optimum: per-symbol
// KL divergence of the optimal conditional coupling row from its (X,Y) mixture.
std::vector<double> r_supergradient(const CouplingFamily& q_star) {
    const int nt = q_star.nt(), nx = q_star.nx(), ny = q_star.ny();
    const auto pt = q_star.pt();
    std::vector<double> qxy(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int t = 0; t < nt; ++t)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) qxy[static_cast<std::size_t>(x) * ny + y] += q_star.at(t, x, y);

    std::vector<double> g(nt, 0.0);
    for (int t = 0; t < nt; ++t) {
        if (pt[t] <= 0.0) continue;
        double d = 0.0;
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                const double row = q_star.at(t, x, y) / pt[t];
                if (row > 0.0) d += row * std::log2(row / qxy[static_cast<std::size_t>(x) * ny + y]);
            }
        g[t] = d;
    }
    return g;
}

}  // namespace

void check_valid(const BroadcastChannel& ch) {
    const int nt = ch.t.size(), nx = ch.x.size(), ny = ch.y.size();
    if (ch.px_given_t.size() != static_cast<std::size_t>(nt) * nx ||
        ch.py_given_t.size() != static_cast<std::size_t>(nt) * ny)
        throw std::invalid_argument("channel conditional shape mismatch");
    auto check_rows = [&](const std::vector<double>& table, int cols, const char* name) {
        for (int t = 0; t < nt; ++t) {
            double s = 0.0;
            for (int c = 0; c < cols; ++c) {
                const double v = table[static_cast<std::size_t>(t) * cols + c];
                if (v < 0.0 || !std::isfinite(v)) {
                    std::ostringstream os;
                    os << name << " row " << ch.t.label(t) << " has an invalid entry";
                    throw std::invalid_argument(os.str());
                }
                s += v;
            }
            if (std::abs(s - 1.0) > kMassTol) {
                std::ostringstream os;
                os << name << " row " << ch.t.label(t) << " sums to " << s;
                throw std::invalid_argument(os.str());
            }
        }
    };
    check_rows(ch.px_given_t, nx, "px_given_t");
    check_rows(ch.py_given_t, ny, "py_given_t");
    if (ch.pxy_given_t) {
        if (ch.pxy_given_t->size() != static_cast<std::size_t>(nt) * nx * ny)
            throw std::invalid_argument("pxy_given_t shape mismatch");
        for (int t = 0; t < nt; ++t) {
            for (int x = 0; x < nx; ++x) {
                double s = 0.0;
                for (int y = 0; y < ny; ++y) s += ch.pxy(t, x, y);
                if (std::abs(s - ch.px(t, x)) > kProbTol)
                    throw std::invalid_argument("pxy_given_t does not marginalize to px_given_t");
            }
            for (int y = 0; y < ny; ++y) {
                double s = 0.0;
                for (int x = 0; x < nx; ++x) s += ch.pxy(t, x, y);
                if (std::abs(s - ch.py(t, y)) > kProbTol)
                    throw std::invalid_argument("pxy_given_t does not marginalize to py_given_t");
            }
        }
    }
}

JointPMF channel_joint(const BroadcastChannel& ch, const std::vector<double>& p_t,
                       bool use_true_coupling) {
    check_valid(ch);
    check_pt(p_t, ch.t.size());
    if (use_true_coupling && !ch.pxy_given_t)
        throw std::invalid_argument("channel file has no pxy_given_t coupling");
    const int nt = ch.t.size(), nx = ch.x.size(), ny = ch.y.size();
    std::vector<double> prob(static_cast<std::size_t>(nt) * nx * ny, 0.0);
    for (int t = 0; t < nt; ++t)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                prob[(static_cast<std::size_t>(t) * nx + x) * ny + y] =
                    p_t[t] * (use_true_coupling ? ch.pxy(t, x, y) : ch.px(t, x) * ch.py(t, y));
    return JointPMF(ch.t, ch.x, ch.y, std::move(prob));
}

double r_pt(const BroadcastChannel& ch, const std::vector<double>& p_t, const SatoOptions& opts) {
    const JointPMF joint = channel_joint(ch, p_t, false);
    return min_mutual_information(joint, opts.inner).value.bits;
}

SatoReport cooperative_gain(const BroadcastChannel& ch, const std::vector<double>& p_t,
                            const SatoOptions& opts) {
    const JointPMF joint = channel_joint(ch, p_t, true);  // rejects missing coupling
    SatoReport rep;
    rep.r_pt = r_pt(ch, p_t, opts);
    rep.coop_rate = mutual_information(joint, {Axis::T}, {Axis::X, Axis::Y}).bits;
    rep.coop_gain = *rep.coop_rate - rep.r_pt;
    return rep;
}

std::vector<double> project_to_simplex(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, tau = 0.0;
    int rho = 0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        const double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0.0) {
            rho = i + 1;
            tau = t;
        }
    }
    (void)rho;
    for (double& x : v) x = std::max(x - tau, 0.0);
    return v;
}

namespace {

struct Ascent {
    std::vector<double> best_p;
    double best_val = -1.0;
};

Ascent supergradient_ascent(const BroadcastChannel& ch, const SatoOptions& opts) {
    const int nt = ch.t.size();
    std::vector<double> p(nt, 1.0 / nt);
    Ascent a;
    for (int k = 1; k <= opts.ascent_iters; ++k) {
        const JointPMF joint = channel_joint(ch, p, false);
        const MinMISolution sol = min_mutual_information(joint, opts.inner);
        if (sol.value.bits > a.best_val) {
            a.best_val = sol.value.bits;
            a.best_p = p;
        }
        const auto g = r_supergradient(sol.q_star);
        const double step = opts.ascent_step / std::sqrt(static_cast<double>(k));
        for (int t = 0; t < nt; ++t) p[t] += step * g[t];
        p = project_to_simplex(std::move(p));
    }
    return a;
}

// Vertex-direction refinement: move toward the best simplex corner under the
// supergradient with an exact concave line search; certified by the linear gap.
void vertex_polish(const BroadcastChannel& ch, const SatoOptions& opts, Ascent& a,
                   double* final_gap) {
    const int nt = ch.t.size();
    std::vector<double> p = a.best_p;
    double val = a.best_val;
    double gap = std::numeric_limits<double>::infinity();
    auto eval = [&](const std::vector<double>& point) {
        return min_mutual_information(channel_joint(ch, point, false), opts.inner);
    };
    for (int it = 0; it < opts.polish_iters; ++it) {
        const MinMISolution sol = eval(p);
        if (sol.value.bits > val) {
            val = sol.value.bits;
            a.best_p = p;
        }
        const auto g = r_supergradient(sol.q_star);
        int vtx = 0;
        for (int t = 1; t < nt; ++t)
            if (g[t] > g[vtx]) vtx = t;
        double inner = 0.0;
        for (int t = 0; t < nt; ++t) inner += g[t] * p[t];
        gap = g[vtx] - inner;
        if (gap <= opts.polish_gap_tol) break;

        auto phi = [&](double gamma) {
            std::vector<double> trial = p;
            for (int t = 0; t < nt; ++t) trial[t] *= (1.0 - gamma);
            trial[vtx] += gamma;
            return -eval(trial).value.bits;  // minimize the negative
        };
        constexpr double invphi = 0.61803398874989484820;
        double lo = 0.0, hi = 1.0;
        double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
        double fc = phi(c), fd = phi(d);
        while (hi - lo > 1e-4) {
            if (fc < fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - invphi * (hi - lo);
                fc = phi(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + invphi * (hi - lo);
                fd = phi(d);
            }
        }
        const double gamma = 0.5 * (lo + hi);
        if (gamma <= 1e-12) break;
        for (int t = 0; t < nt; ++t) p[t] *= (1.0 - gamma);
        p[vtx] += gamma;
    }
    const MinMISolution last = eval(p);
    if (last.value.bits > val) {
        val = last.value.bits;
        a.best_p = p;
    }
    a.best_val = std::max(a.best_val, val);
    if (final_gap) *final_gap = gap;
}

// All grid points of the probability simplex with the given step count.
std::vector<std::vector<double>> simplex_grid(int dims, int steps) {
    std::vector<std::vector<double>> points;
    std::vector<int> comp(dims, 0);
    comp[0] = steps;
    // odometer over compositions
    while (true) {
        std::vector<double> pt(dims);
        for (int i = 0; i < dims; ++i) pt[i] = static_cast<double>(comp[i]) / steps;
        points.push_back(std::move(pt));
        int i = dims - 2;
        while (i >= 0 && comp[i] == 0) --i;
        if (i < 0) break;
        --comp[i];
        int tail = steps;
        for (int j = 0; j <= i; ++j) tail -= comp[j];
        comp[i + 1] = tail;
        for (int j = i + 2; j < dims; ++j) comp[j] = 0;
    }
    return points;
}

}  // namespace

SatoReport sato_sum_capacity(const BroadcastChannel& ch, const SatoOptions& opts) {
    check_valid(ch);
    const int nt = ch.t.size();

    Ascent a = supergradient_ascent(ch, opts);
    double polish_gap = 0.0;
    vertex_polish(ch, opts, a, &polish_gap);

    SatoReport rep;
    rep.converged = polish_gap <= 10 * opts.polish_gap_tol;

    if (opts.cross_check && nt <= 3) {
        const int steps = std::max(2, static_cast<int>(std::lround(1.0 / opts.cross_check_step)));
        const auto points = simplex_grid(nt, steps);
        std::vector<double> vals(points.size());
        const bool par = opts.exec == Execution::OpenMP;
#pragma omp parallel for schedule(dynamic) if (par)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(points.size()); ++i) {
            const JointPMF joint = channel_joint(ch, points[i], false);
            vals[i] = min_mutual_information(joint, opts.inner).value.bits;
        }
        std::size_t arg = 0;
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (vals[i] > vals[arg]) arg = i;
        if (vals[arg] > a.best_val + opts.cross_check_tol) rep.converged = false;
        if (vals[arg] > a.best_val) {
            // refine from the better grid point
            Ascent b;
            b.best_p = points[arg];
            b.best_val = vals[arg];
            double gap2 = 0.0;
            vertex_polish(ch, opts, b, &gap2);
            if (b.best_val > a.best_val) a = b;
        }
    }

    rep.r_pt = a.best_val;
    rep.c_sato = a.best_val;
    rep.p_t_star = a.best_p;
    return rep;
}

}  // namespace bcpid
