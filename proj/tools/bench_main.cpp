// Times the OpenMP kernels against their serial reference implementations
// and checks that both paths return identical results.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "bcpid/bc.hpp"
#include "bcpid/broja.hpp"
#include "bcpid/rng.hpp"

namespace {

using bcpid::Execution;

double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double best_of(F&& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, seconds(t0, t1));
    }
    return best;
}

bcpid::JointPMF random_binary_joint(int nt, bcpid::Rng& rng) {
    std::vector<std::string> tl;
    for (int i = 0; i < nt; ++i) tl.push_back(std::to_string(i));
    std::vector<double> p(static_cast<std::size_t>(nt) * 4);
    double s = 0.0;
    for (double& v : p) {
        v = rng.exponential();
        s += v;
    }
    for (double& v : p) v /= s;
    return bcpid::JointPMF(bcpid::Alphabet(tl), bcpid::Alphabet({"0", "1"}),
                           bcpid::Alphabet({"0", "1"}), std::move(p));
}

bcpid::BroadcastChannel random_channel(int nt, int nx, int ny, bcpid::Rng& rng) {
    auto labels = [](int n) {
        std::vector<std::string> l;
        for (int i = 0; i < n; ++i) l.push_back(std::to_string(i));
        return bcpid::Alphabet(l);
    };
    bcpid::BroadcastChannel ch{labels(nt), labels(nx), labels(ny), {}, {}, std::nullopt};
    auto rows = [&](int cols) {
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
    ch.px_given_t = rows(nx);
    ch.py_given_t = rows(ny);
    return ch;
}

bcpid::BroadcastCode random_code(const bcpid::BroadcastChannel& ch, int n, int m1, int m2,
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

void report(const char* name, double serial, double parallel, bool equal) {
    std::printf("%-28s serial %8.3f ms   openmp %8.3f ms   speedup %5.2fx   %s\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel,
                equal ? "results identical" : "RESULTS DIFFER");
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", bcpid::hardware_threads());
    bool all_equal = true;

    {
        bcpid::Rng rng(42);
        const auto p = random_binary_joint(3, rng);
        double v_serial = 0.0, v_par = 0.0;
        const double ts = best_of([&] { v_serial = brute_force_min_mi(p, 301, Execution::Serial); }, 3);
        const double tp = best_of([&] { v_par = brute_force_min_mi(p, 301, Execution::OpenMP); }, 3);
        report("grid oracle |T|=3, n=301", ts, tp, v_serial == v_par);
        all_equal = all_equal && v_serial == v_par;
    }

    {
        bcpid::Rng rng(7);
        const auto ch = random_channel(3, 3, 3, rng);
        const auto code = random_code(ch, 2, 3, 3, rng);
        const auto coupling = bcpid::product_coupling(ch);
        bcpid::CodeErrors e_serial, e_par;
        const double ts =
            best_of([&] { e_serial = exact_error_probability(code, ch, coupling, Execution::Serial); }, 5);
        const double tp =
            best_of([&] { e_par = exact_error_probability(code, ch, coupling, Execution::OpenMP); }, 5);
        const bool eq = e_serial.joint == e_par.joint && e_serial.rx1 == e_par.rx1 &&
                        e_serial.rx2 == e_par.rx2;
        report("code error n=2, 3x3x3", ts, tp, eq);
        all_equal = all_equal && eq;
    }

    {
        bcpid::Rng rng(11);
        const auto ch = random_channel(3, 2, 2, rng);
        bcpid::SatoOptions opts;
        opts.ascent_iters = 50;
        opts.polish_iters = 20;
        bcpid::SatoReport r_serial, r_par;
        opts.exec = Execution::Serial;
        const double ts = best_of([&] { r_serial = sato_sum_capacity(ch, opts); }, 1);
        opts.exec = Execution::OpenMP;
        const double tp = best_of([&] { r_par = sato_sum_capacity(ch, opts); }, 1);
        const bool eq = r_serial.c_sato == r_par.c_sato;
        report("capacity grid check |T|=3", ts, tp, eq);
        all_equal = all_equal && eq;
    }

    return all_equal ? 0 : 1;
}
