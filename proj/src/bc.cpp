#include "bcpid/bc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bcpid/rng.hpp"

namespace bcpid {

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (1LL << 40)) return 1LL << 62;  // saturate, callers only compare against guards
        r *= base;
    }
    return r;
}

// big-endian digit expansion of all sequence indices
std::vector<int> digit_table(int count, int base, int n) {
    std::vector<int> d(static_cast<std::size_t>(count) * n);
    for (int s = 0; s < count; ++s) {
        int r = s;
        for (int i = n - 1; i >= 0; --i) {
            d[static_cast<std::size_t>(s) * n + i] = r % base;
            r /= base;
        }
    }
    return d;
}

}  // namespace

void check_valid(const BroadcastCode& code, const BroadcastChannel& ch) {
    check_valid(ch);
    if (code.n < 1 || code.m1 < 1 || code.m2 < 1)
        throw std::invalid_argument("code: n, m1, m2 must be positive");
    const std::int64_t pairs = static_cast<std::int64_t>(code.m1) * code.m2;
    if (code.encoder.size() != static_cast<std::size_t>(pairs) * code.n)
        throw std::invalid_argument("code: encoder table is not total on the message pairs");
    for (int s : code.encoder)
        if (s < 0 || s >= ch.t.size()) throw std::invalid_argument("code: encoder symbol out of range");
    const std::int64_t nxp = ipow(ch.x.size(), code.n);
    const std::int64_t nyp = ipow(ch.y.size(), code.n);
    if (code.decoder1.size() != static_cast<std::size_t>(nxp))
        throw std::invalid_argument("code: decoder1 table is not total on X^n");
    if (code.decoder2.size() != static_cast<std::size_t>(nyp))
        throw std::invalid_argument("code: decoder2 table is not total on Y^n");
    for (int m : code.decoder1)
        if (m < 0 || m >= code.m1) throw std::invalid_argument("code: decoder1 message out of range");
    for (int m : code.decoder2)
        if (m < 0 || m >= code.m2) throw std::invalid_argument("code: decoder2 message out of range");
}

Coupling product_coupling(const BroadcastChannel& ch) {
    const int nt = ch.t.size(), nx = ch.x.size(), ny = ch.y.size();
    Coupling q(static_cast<std::size_t>(nt) * nx * ny);
    for (int t = 0; t < nt; ++t)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                q[(static_cast<std::size_t>(t) * nx + x) * ny + y] = ch.px(t, x) * ch.py(t, y);
    return q;
}

std::vector<Coupling> sample_couplings(const BroadcastChannel& ch, int k, std::uint64_t seed) {
    check_valid(ch);
    const int nt = ch.t.size(), nx = ch.x.size(), ny = ch.y.size();
    const std::size_t slice = static_cast<std::size_t>(nx) * ny;
    Rng rng(seed);
    constexpr int kVertices = 3;

    std::vector<Coupling> out;
    out.reserve(k);
    for (int c = 0; c < k; ++c) {
        Coupling q(static_cast<std::size_t>(nt) * slice, 0.0);
        for (int t = 0; t < nt; ++t) {
            std::vector<double> rows(nx), cols(ny);
            for (int x = 0; x < nx; ++x) rows[x] = ch.px(t, x);
            for (int y = 0; y < ny; ++y) cols[y] = ch.py(t, y);
            double wsum = 0.0;
            std::vector<double> w(kVertices);
            for (double& v : w) {
                v = rng.exponential();
                wsum += v;
            }
            std::vector<double> cost(slice);
            for (int v = 0; v < kVertices; ++v) {
                for (double& cst : cost) cst = rng.normal();
                const auto vert = transportation_lp(cost, rows, cols);
                for (std::size_t i = 0; i < slice; ++i) q[t * slice + i] += (w[v] / wsum) * vert[i];
            }
        }
        out.push_back(std::move(q));
    }
    return out;
}

CodeErrors exact_error_probability(const BroadcastCode& code, const BroadcastChannel& ch,
                                   const Coupling& coupling, Execution exec) {
    check_valid(code, ch);
    const int nt = ch.t.size(), nx = ch.x.size(), ny = ch.y.size();
    if (coupling.size() != static_cast<std::size_t>(nt) * nx * ny)
        throw std::invalid_argument("coupling shape mismatch");
    const std::int64_t cells =
        ipow(nt, code.n) * ipow(nx, code.n) * ipow(ny, code.n);
    if (cells > 10'000'000) throw std::invalid_argument("size guard exceeded");
    const std::int64_t nxp = ipow(nx, code.n);
    const std::int64_t nyp = ipow(ny, code.n);
    const std::int64_t pairs = static_cast<std::int64_t>(code.m1) * code.m2;
    if (pairs * nxp * nyp * code.n > 200'000'000)
        throw std::invalid_argument("size guard exceeded");

    // receiver-wise views of the coupling
    std::vector<double> qx(static_cast<std::size_t>(nt) * nx, 0.0);
    std::vector<double> qy(static_cast<std::size_t>(nt) * ny, 0.0);
    for (int t = 0; t < nt; ++t)
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                const double v = coupling[(static_cast<std::size_t>(t) * nx + x) * ny + y];
                qx[static_cast<std::size_t>(t) * nx + x] += v;
                qy[static_cast<std::size_t>(t) * ny + y] += v;
            }

    const auto xd = digit_table(static_cast<int>(nxp), nx, code.n);
    const auto yd = digit_table(static_cast<int>(nyp), ny, code.n);

    std::vector<double> succ_joint(pairs), succ_rx1(pairs), succ_rx2(pairs);
    const bool par = exec == Execution::OpenMP;
#pragma omp parallel for schedule(static) if (par)
    for (std::int64_t pair = 0; pair < pairs; ++pair) {
        const int i1 = static_cast<int>(pair / code.m2);
        const int i2 = static_cast<int>(pair % code.m2);
        const int* tseq = code.encoder.data() + pair * code.n;

        double sj = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::int64_t xs = 0; xs < nxp; ++xs) {
            if (code.decoder1[xs] != i1) continue;
            const int* xdig = xd.data() + xs * code.n;
            double px_seq = 1.0;
            for (int i = 0; i < code.n; ++i)
                px_seq *= qx[static_cast<std::size_t>(tseq[i]) * nx + xdig[i]];
            s1 += px_seq;
            for (std::int64_t ys = 0; ys < nyp; ++ys) {
                if (code.decoder2[ys] != i2) continue;
                const int* ydig = yd.data() + ys * code.n;
                double prod = 1.0;
                for (int i = 0; i < code.n; ++i)
                    prod *= coupling[(static_cast<std::size_t>(tseq[i]) * nx + xdig[i]) * ny + ydig[i]];
                sj += prod;
            }
        }
        for (std::int64_t ys = 0; ys < nyp; ++ys) {
            if (code.decoder2[ys] != i2) continue;
            const int* ydig = yd.data() + ys * code.n;
            double py_seq = 1.0;
            for (int i = 0; i < code.n; ++i)
                py_seq *= qy[static_cast<std::size_t>(tseq[i]) * ny + ydig[i]];
            s2 += py_seq;
        }
        succ_joint[pair] = sj;
        succ_rx1[pair] = s1;
        succ_rx2[pair] = s2;
    }

    // ordered reduction keeps results identical across thread counts
    double sj = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::int64_t pair = 0; pair < pairs; ++pair) {
        sj += succ_joint[pair];
        s1 += succ_rx1[pair];
        s2 += succ_rx2[pair];
    }
    const double inv = 1.0 / static_cast<double>(pairs);
    CodeErrors e;
    e.joint = 1.0 - sj * inv;
    e.rx1 = 1.0 - s1 * inv;
    e.rx2 = 1.0 - s2 * inv;
    return e;
}

ErrorReport coupling_invariance_check(const BroadcastCode& code, const BroadcastChannel& ch,
                                      int k, std::uint64_t seed, Execution exec) {
    if (k < 0) throw std::invalid_argument("coupling count must be non-negative");
    std::vector<Coupling> couplings;
    couplings.push_back(ch.pxy_given_t ? *ch.pxy_given_t : product_coupling(ch));
    for (auto& c : sample_couplings(ch, k, seed)) couplings.push_back(std::move(c));

    ErrorReport rep;
    double lo_j = 1.0, hi_j = 0.0, lo_1 = 1.0, hi_1 = 0.0, lo_2 = 1.0, hi_2 = 0.0;
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        const CodeErrors e = exact_error_probability(code, ch, couplings[i], exec);
        if (i == 0) rep.base = e;
        rep.per_coupling.emplace_back(static_cast<int>(i), e);
        lo_j = std::min(lo_j, e.joint);
        hi_j = std::max(hi_j, e.joint);
        lo_1 = std::min(lo_1, e.rx1);
        hi_1 = std::max(hi_1, e.rx1);
        lo_2 = std::min(lo_2, e.rx2);
        hi_2 = std::max(hi_2, e.rx2);
    }
    rep.spread_joint = hi_j - lo_j;
    rep.spread_rx1 = hi_1 - lo_1;
    rep.spread_rx2 = hi_2 - lo_2;
    return rep;
}

DecoderComparison cooperative_decoder_comparison(const BroadcastChannel& ch, int m1, int m2,
                                                 const std::vector<double>& p_t,
                                                 const SatoOptions& opts) {
    check_valid(ch);
    const int nt = ch.t.size(), nx = ch.x.size(), ny = ch.y.size();
    if (nt > 4 || nx > 4 || ny > 4) throw std::invalid_argument("size guard exceeded");
    if (m1 < 1 || m2 < 1 || m1 > 4 || m2 > 4) throw std::invalid_argument("size guard exceeded");
    const int pairs = m1 * m2;
    const std::int64_t encoders = ipow(nt, pairs);
    const std::int64_t dec1s = ipow(m1, nx);
    const std::int64_t dec2s = ipow(m2, ny);
    if (encoders > 1'000'000 || encoders * dec1s * dec2s * nx * ny > 500'000'000)
        throw std::invalid_argument("size guard exceeded");

    const Coupling q = ch.pxy_given_t ? *ch.pxy_given_t : product_coupling(ch);
    const auto enc_digits = digit_table(static_cast<int>(encoders), nt, pairs);
    const auto d1_digits = digit_table(static_cast<int>(dec1s), m1, nx);
    const auto d2_digits = digit_table(static_cast<int>(dec2s), m2, ny);

    std::vector<double> best_sep(encoders, 0.0), best_jnt(encoders, 0.0);
    const bool par = opts.exec == Execution::OpenMP;
#pragma omp parallel for schedule(dynamic) if (par)
    for (std::int64_t e = 0; e < encoders; ++e) {
        const int* f = enc_digits.data() + e * pairs;  // pair -> t symbol

        double bj = 0.0;
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y) {
                double mx = 0.0;
                for (int pr = 0; pr < pairs; ++pr)
                    mx = std::max(mx, q[(static_cast<std::size_t>(f[pr]) * nx + x) * ny + y]);
                bj += mx;
            }
        best_jnt[e] = bj / pairs;

        double bs = 0.0;
        for (std::int64_t g1 = 0; g1 < dec1s; ++g1) {
            const int* d1 = d1_digits.data() + g1 * nx;
            for (std::int64_t g2 = 0; g2 < dec2s; ++g2) {
                const int* d2 = d2_digits.data() + g2 * ny;
                double s = 0.0;
                for (int x = 0; x < nx; ++x)
                    for (int y = 0; y < ny; ++y) {
                        const int pr = d1[x] * m2 + d2[y];
                        s += q[(static_cast<std::size_t>(f[pr]) * nx + x) * ny + y];
                    }
                bs = std::max(bs, s);
            }
        }
        best_sep[e] = bs / pairs;
    }

    DecoderComparison cmp;
    for (std::int64_t e = 0; e < encoders; ++e) {
        cmp.best_separate = std::max(cmp.best_separate, best_sep[e]);
        cmp.best_joint = std::max(cmp.best_joint, best_jnt[e]);
    }
    cmp.gap = cmp.best_joint - cmp.best_separate;
    if (ch.pxy_given_t) cmp.coop_gain = cooperative_gain(ch, p_t, opts).coop_gain;
    return cmp;
}

}  // namespace bcpid
