#pragma once
// Shared test utilities: seeded instance generators and the independent
// oracles (plain summation in extended precision, finite differences, grids).

#include <cmath>
#include <string>
#include <vector>

#include "bcpid/bc.hpp"
#include "bcpid/broja.hpp"
#include "bcpid/gaussian.hpp"
#include "bcpid/rng.hpp"
#include "bcpid/sato.hpp"

namespace testutil {

inline bcpid::Alphabet digits_alphabet(int n) {
    std::vector<std::string> l;
    for (int i = 0; i < n; ++i) l.push_back(std::to_string(i));
    return bcpid::Alphabet(l);
}

inline bcpid::JointPMF random_joint(int nt, int nx, int ny, bcpid::Rng& rng,
                                    double zero_fraction = 0.0) {
    std::vector<double> p(static_cast<std::size_t>(nt) * nx * ny);
    double s = 0.0;
    for (double& v : p) {
        v = rng.exponential();
        if (zero_fraction > 0.0 && rng.uniform() < zero_fraction) v = 0.0;
        s += v;
    }
    if (s <= 0.0) {
        p[0] = 1.0;
        s = 1.0;
    }
    for (double& v : p) v /= s;
    return bcpid::JointPMF(digits_alphabet(nt), digits_alphabet(nx), digits_alphabet(ny),
                           std::move(p));
}

inline bcpid::BroadcastChannel random_channel(int nt, int nx, int ny, bcpid::Rng& rng,
                                              bool with_coupling = false) {
    bcpid::BroadcastChannel ch{digits_alphabet(nt), digits_alphabet(nx), digits_alphabet(ny),
                               {}, {}, std::nullopt};
    auto stochastic = [&](int cols) {
        std::vector<double> m(static_cast<std::size_t>(nt) * cols);
        for (int t = 0; t < nt; ++t) {
            double s = 0.0;
            for (int c = 0; c < cols; ++c) {
                m[static_cast<std::size_t>(t) * cols + c] = rng.exponential();
                s += m[static_cast<std::size_t>(t) * cols + c];
            }
            for (int c = 0; c < cols; ++c) m[static_cast<std::size_t>(t) * cols + c] /= s;
        }
        return m;
    };
    if (with_coupling) {
        // draw the joint first so the conditionals are consistent with it
        std::vector<double> joint(static_cast<std::size_t>(nt) * nx * ny);
        ch.px_given_t.assign(static_cast<std::size_t>(nt) * nx, 0.0);
        ch.py_given_t.assign(static_cast<std::size_t>(nt) * ny, 0.0);
        for (int t = 0; t < nt; ++t) {
            double s = 0.0;
            for (int x = 0; x < nx; ++x)
                for (int y = 0; y < ny; ++y) {
                    const double v = rng.exponential();
                    joint[(static_cast<std::size_t>(t) * nx + x) * ny + y] = v;
                    s += v;
                }
            for (int x = 0; x < nx; ++x)
                for (int y = 0; y < ny; ++y) {
                    double& v = joint[(static_cast<std::size_t>(t) * nx + x) * ny + y];
                    v /= s;
                    ch.px_given_t[static_cast<std::size_t>(t) * nx + x] += v;
                    ch.py_given_t[static_cast<std::size_t>(t) * ny + y] += v;
                }
        }
        ch.pxy_given_t = std::move(joint);
    } else {
        ch.px_given_t = stochastic(nx);
        ch.py_given_t = stochastic(ny);
    }
    return ch;
}

inline bcpid::BroadcastCode random_code(const bcpid::BroadcastChannel& ch, int n, int m1, int m2,
                                        bcpid::Rng& rng) {
    bcpid::BroadcastCode code;
    code.n = n;
    code.m1 = m1;
    code.m2 = m2;
    for (int i = 0; i < m1 * m2 * n; ++i) code.encoder.push_back(rng.uniform_int(ch.t.size()));
    int nxp = 1, nyp = 1;
    for (int i = 0; i < n; ++i) {
        nxp *= ch.x.size();
        nyp *= ch.y.size();
    }
    for (int i = 0; i < nxp; ++i) code.decoder1.push_back(rng.uniform_int(m1));
    for (int i = 0; i < nyp; ++i) code.decoder2.push_back(rng.uniform_int(m2));
    return code;
}

inline bcpid::JointPMF xor_joint() {
    std::vector<double> p(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) p[((x ^ y) * 2 + x) * 2 + y] = 0.25;
    return bcpid::JointPMF(digits_alphabet(2), digits_alphabet(2), digits_alphabet(2),
                           std::move(p));
}

inline bcpid::JointPMF copy_joint() {
    std::vector<double> p(8, 0.0);
    p[0] = 0.5;
    p[7] = 0.5;
    return bcpid::JointPMF(digits_alphabet(2), digits_alphabet(2), digits_alphabet(2),
                           std::move(p));
}

inline bcpid::JointPMF componentwise_joint() {
    std::vector<double> p(8 * 4 * 4, 0.0);
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int y1 = 0; y1 < 2; ++y1)
                for (int y2 = 0; y2 < 2; ++y2) {
                    const int t = (x1 << 2) | (y1 << 1) | (x2 ^ y2);
                    const int x = (x1 << 1) | x2;
                    const int y = (y1 << 1) | y2;
                    p[(t * 4 + x) * 4 + y] = 1.0 / 16.0;
                }
    return bcpid::JointPMF(digits_alphabet(8), digits_alphabet(4), digits_alphabet(4),
                           std::move(p));
}

inline bcpid::BroadcastChannel copy_channel() {
    bcpid::BroadcastChannel ch{digits_alphabet(2), digits_alphabet(2), digits_alphabet(2),
                               {1, 0, 0, 1}, {1, 0, 0, 1}, std::nullopt};
    std::vector<double> joint(8, 0.0);
    joint[0] = 1.0;                  // t=0: (x,y)=(0,0)
    joint[(1 * 2 + 1) * 2 + 1] = 1.0;  // t=1: (1,1)
    ch.pxy_given_t = std::move(joint);
    return ch;
}

inline bcpid::BroadcastChannel xor_channel() {
    bcpid::BroadcastChannel ch{digits_alphabet(2), digits_alphabet(2), digits_alphabet(2),
                               {0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5}, std::nullopt};
    std::vector<double> joint(8, 0.0);
    for (int t = 0; t < 2; ++t)
        for (int x = 0; x < 2; ++x) joint[(t * 2 + x) * 2 + (x ^ t)] = 0.5;
    ch.pxy_given_t = std::move(joint);
    return ch;
}

inline bcpid::BroadcastChannel componentwise_channel() {
    bcpid::BroadcastChannel ch{digits_alphabet(8), digits_alphabet(4), digits_alphabet(4),
                               {}, {}, std::nullopt};
    ch.px_given_t.assign(8 * 4, 0.0);
    ch.py_given_t.assign(8 * 4, 0.0);
    std::vector<double> joint(8 * 4 * 4, 0.0);
    for (int t = 0; t < 8; ++t) {
        const int a = (t >> 2) & 1, b = (t >> 1) & 1, c = t & 1;
        for (int x2 = 0; x2 < 2; ++x2) {
            const int x = (a << 1) | x2;
            const int y = (b << 1) | (x2 ^ c);
            ch.px_given_t[t * 4 + x] += 0.5;
            joint[(t * 4 + x) * 4 + y] = 0.5;
        }
        for (int y2 = 0; y2 < 2; ++y2) ch.py_given_t[t * 4 + ((b << 1) | y2)] += 0.5;
    }
    ch.pxy_given_t = std::move(joint);
    return ch;
}

// Plain long-double summation over explicit marginals; deliberately a
// different route than the library's accumulation.
inline double entropy_oracle_bits(const std::vector<double>& p) {
    long double h = 0.0L;
    for (double v : p)
        if (v > 0.0) h -= static_cast<long double>(v) * std::log(static_cast<long double>(v));
    return static_cast<double>(h / std::log(2.0L));
}

inline double mi_oracle_bits(const bcpid::JointPMF& p, const std::vector<bcpid::Axis>& ga,
                             const std::vector<bcpid::Axis>& gb) {
    const int sizes[3] = {p.nt(), p.nx(), p.ny()};
    auto gsize = [&](const std::vector<bcpid::Axis>& g) {
        int s = 1;
        for (auto a : g) s *= sizes[static_cast<int>(a)];
        return s;
    };
    auto gindex = [&](const std::vector<bcpid::Axis>& g, const int idx[3]) {
        int out = 0;
        for (auto a : g) out = out * sizes[static_cast<int>(a)] + idx[static_cast<int>(a)];
        return out;
    };
    const int na = gsize(ga), nb = gsize(gb);
    std::vector<long double> joint(static_cast<std::size_t>(na) * nb, 0.0L), ma(na, 0.0L),
        mb(nb, 0.0L);
    for (int t = 0; t < p.nt(); ++t)
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y) {
                const int idx[3] = {t, x, y};
                const long double v = p.at(t, x, y);
                joint[static_cast<std::size_t>(gindex(ga, idx)) * nb + gindex(gb, idx)] += v;
                ma[gindex(ga, idx)] += v;
                mb[gindex(gb, idx)] += v;
            }
    long double mi = 0.0L;
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b) {
            const long double j = joint[static_cast<std::size_t>(a) * nb + b];
            if (j > 0.0L) mi += j * std::log(j / (ma[a] * mb[b]));
        }
    return static_cast<double>(mi / std::log(2.0L));
}

// Strictly interior coupling: a convex mix of the product coupling with
// vertex mixtures keeps every on-support cell positive.
inline bcpid::CouplingFamily random_interior_coupling(const bcpid::JointPMF& p, bcpid::Rng& rng) {
    bcpid::CouplingFamily c = bcpid::product_coupling(p);
    const int nt = c.nt(), nx = c.nx(), ny = c.ny();
    const std::size_t slice = static_cast<std::size_t>(nx) * ny;
    const auto pt = c.pt();
    const double mix = 0.25 + 0.5 * rng.uniform();
    for (int t = 0; t < nt; ++t) {
        if (pt[t] <= 0.0) continue;
        std::vector<double> rows(nx), cols(ny), cost(slice);
        for (int x = 0; x < nx; ++x) rows[x] = c.tx.at(t, x);
        for (int y = 0; y < ny; ++y) cols[y] = c.ty.at(t, y);
        for (double& v : cost) v = rng.normal();
        const auto vert = bcpid::transportation_lp(cost, rows, cols);
        for (std::size_t i = 0; i < slice; ++i) {
            double& q = c.q[t * slice + i];
            q = mix * q + (1.0 - mix) * vert[i];
        }
    }
    return c;
}

// Random direction in the tangent space of the coupling polytope: per-slice
// double-centered noise, restricted to the support.
inline std::vector<double> random_feasible_direction(const bcpid::CouplingFamily& c,
                                                     bcpid::Rng& rng) {
    const int nt = c.nt(), nx = c.nx(), ny = c.ny();
    std::vector<double> d(c.q.size(), 0.0);
    const auto pt = c.pt();
    for (int t = 0; t < nt; ++t) {
        if (pt[t] <= 0.0) continue;
        std::vector<double> m(static_cast<std::size_t>(nx) * ny);
        for (double& v : m) v = rng.normal();
        std::vector<double> rmean(nx, 0.0), cmean(ny, 0.0);
        double total = 0.0;
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                rmean[x] += m[static_cast<std::size_t>(x) * ny + y] / ny;
                cmean[y] += m[static_cast<std::size_t>(x) * ny + y] / nx;
                total += m[static_cast<std::size_t>(x) * ny + y] / (nx * ny);
            }
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                d[(static_cast<std::size_t>(t) * nx + x) * ny + y] =
                    m[static_cast<std::size_t>(x) * ny + y] - rmean[x] - cmean[y] + total;
    }
    return d;
}

inline double objective_at(const bcpid::CouplingFamily& base, const std::vector<double>& table) {
    bcpid::CouplingFamily c{base.tx, base.ty, table};
    return bcpid::coupling_objective(c);
}

inline double fd_directional(const bcpid::CouplingFamily& c, const std::vector<double>& d,
                             double h) {
    std::vector<double> plus = c.q, minus = c.q;
    for (std::size_t i = 0; i < d.size(); ++i) {
        plus[i] += h * d[i];
        minus[i] -= h * d[i];
    }
    return (objective_at(c, plus) - objective_at(c, minus)) / (2.0 * h);
}

// min over a coupling grid of max over p_t, for binary-everything channels;
// the independent evaluation of the min-max order.
inline double minmax_grid_value(const bcpid::BroadcastChannel& ch, int steps) {
    const int nt = 2, nx = 2, ny = 2;
    if (ch.t.size() != nt || ch.x.size() != nx || ch.y.size() != ny)
        throw std::invalid_argument("minmax_grid_value expects a 2x2x2 channel");

    // per-t segment bounds for q(x=0,y=0|t)
    double lo[2], hi[2];
    for (int t = 0; t < nt; ++t) {
        const double r0 = ch.px(t, 0), r1 = ch.px(t, 1), c0 = ch.py(t, 0);
        lo[t] = std::max(0.0, c0 - r1);
        hi[t] = std::min(r0, c0);
    }

    auto capacity_at = [&](double th0, double th1) {
        // joint rows over (x,y) given t
        double row[2][4];
        const double th[2] = {th0, th1};
        for (int t = 0; t < nt; ++t) {
            const double r0 = ch.px(t, 0), r1 = ch.px(t, 1);
            const double c0 = ch.py(t, 0);
            row[t][0] = th[t];
            row[t][1] = r0 - th[t];
            row[t][2] = c0 - th[t];
            row[t][3] = (r1 - c0) + th[t];
            for (double& v : row[t]) v = std::max(v, 0.0);
        }
        auto mi_at = [&](double p0) {
            const double p[2] = {p0, 1.0 - p0};
            double mix[4] = {0, 0, 0, 0};
            for (int t = 0; t < nt; ++t)
                for (int z = 0; z < 4; ++z) mix[z] += p[t] * row[t][z];
            double mi = 0.0;
            for (int t = 0; t < nt; ++t) {
                if (p[t] <= 0.0) continue;
                for (int z = 0; z < 4; ++z)
                    if (row[t][z] > 0.0) mi += p[t] * row[t][z] * std::log2(row[t][z] / mix[z]);
            }
            return mi;
        };
        // concave in p0: golden-section maximum
        constexpr double invphi = 0.61803398874989484820;
        double a = 0.0, b = 1.0;
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        double fc = mi_at(c), fd = mi_at(d);
        while (b - a > 1e-10) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = mi_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = mi_at(d);
            }
        }
        return mi_at(0.5 * (a + b));
    };

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; j <= steps; ++j) {
            const double th0 = lo[0] + (hi[0] - lo[0]) * i / steps;
            const double th1 = lo[1] + (hi[1] - lo[1]) * j / steps;
            best = std::min(best, capacity_at(th0, th1));
        }
    return best;
}

}  // namespace testutil
