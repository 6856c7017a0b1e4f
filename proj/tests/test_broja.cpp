#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bcpid/broja.hpp"
#include "bcpid/fastmath.hpp"
#include "helpers.hpp"

using namespace bcpid;
using testutil::digits_alphabet;

namespace {

JointPMF xor_joint() {
    std::vector<double> p(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) p[((x ^ y) * 2 + x) * 2 + y] = 0.25;
    return JointPMF(digits_alphabet(2), digits_alphabet(2), digits_alphabet(2), std::move(p));
}

JointPMF copy_joint() {
    std::vector<double> p(8, 0.0);
    p[0] = 0.5;
    p[7] = 0.5;
    return JointPMF(digits_alphabet(2), digits_alphabet(2), digits_alphabet(2), std::move(p));
}

JointPMF componentwise_joint() {
    // X=(x1,x2), Y=(y1,y2), T=(x1, y1, x2^y2)
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
    return JointPMF(digits_alphabet(8), digits_alphabet(4), digits_alphabet(4), std::move(p));
}

}  // namespace

TEST_CASE("fast_log2 accuracy") {
    Rng rng(5);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double v = std::pow(10.0, -12.0 * rng.uniform());
        worst = std::max(worst, std::abs(fast_log2(v) - std::log2(v)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("transportation LP worked examples") {
    const std::vector<double> half{0.5, 0.5};

    const auto a = transportation_lp({0, 1, 1, 0}, half, half);
    CHECK(a[0] == doctest::Approx(0.5));
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 0.0);
    CHECK(a[3] == doctest::Approx(0.5));

    const auto b = transportation_lp({1, 0, 0, 1}, half, half);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == doctest::Approx(0.5));
    CHECK(b[2] == doctest::Approx(0.5));
    CHECK(b[3] == 0.0);

    // all-zero cost keeps the northwest-corner vertex
    const auto c = transportation_lp({0, 0, 0, 0}, half, half);
    CHECK(c[0] == doctest::Approx(0.5));
    CHECK(c[3] == doctest::Approx(0.5));

    CHECK_THROWS_AS(transportation_lp({0, 0}, {0.7}, {0.5, 0.1}), std::invalid_argument);
}

TEST_CASE("transportation LP on random instances") {
    Rng rng(41);
    for (int rep = 0; rep < 30; ++rep) {
        const int m = 2 + rng.uniform_int(4), n = 2 + rng.uniform_int(4);
        std::vector<double> rows(m), cols(n), cost(static_cast<std::size_t>(m) * n);
        double s = 0.0;
        for (double& v : rows) {
            v = rng.exponential();
            s += v;
        }
        for (double& v : rows) v /= s;
        s = 0.0;
        for (double& v : cols) {
            v = rng.exponential();
            s += v;
        }
        for (double& v : cols) v /= s;
        if (rep % 5 == 0) {  // degenerate marginals with zero mass
            rows[0] = 0.0;
            s = 0.0;
            for (double v : rows) s += v;
            for (double& v : rows) v /= s;
        }
        for (double& v : cost) v = rng.normal();

        const auto sol = transportation_lp(cost, rows, cols);
        const auto again = transportation_lp(cost, rows, cols);
        CHECK(sol == again);  // deterministic

        // exact marginals
        for (int i = 0; i < m; ++i) {
            double rs = 0.0;
            for (int j = 0; j < n; ++j) rs += sol[static_cast<std::size_t>(i) * n + j];
            CHECK(std::abs(rs - rows[i]) <= 1e-12);
        }
        for (int j = 0; j < n; ++j) {
            double cs = 0.0;
            for (int i = 0; i < m; ++i) cs += sol[static_cast<std::size_t>(i) * n + j];
            CHECK(std::abs(cs - cols[j]) <= 1e-12);
        }
        // vertex: at most m+n-1 nonzeros
        int nz = 0;
        for (double v : sol)
            if (v > 0.0) ++nz;
        CHECK(nz <= m + n - 1);

        // no random feasible point does better
        double obj = 0.0;
        for (std::size_t i = 0; i < sol.size(); ++i) obj += sol[i] * cost[i];
        for (int probe = 0; probe < 50; ++probe) {
            std::vector<double> pcost(cost.size());
            for (double& v : pcost) v = rng.normal();
            const auto other = transportation_lp(pcost, rows, cols);
            double o = 0.0;
            for (std::size_t i = 0; i < other.size(); ++i) o += other[i] * cost[i];
            CHECK(o >= obj - 1e-10);
        }
    }
}

TEST_CASE("objective gradient at the XOR product coupling is flat") {
    const auto c = product_coupling(xor_joint());
    for (double g : objective_gradient(c)) CHECK(std::abs(g) <= 1e-12);
}

TEST_CASE("objective gradient matches central finite differences") {
    Rng rng(47);
    for (int rep = 0; rep < 20; ++rep) {
        const auto p = testutil::random_joint(2 + rep % 2, 2 + rep % 2, 2, rng);
        const auto q = testutil::random_interior_coupling(p, rng);
        const auto g = objective_gradient(q);
        auto d = testutil::random_feasible_direction(q, rng);

        double analytic = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) analytic += g[i] * d[i];
        if (std::abs(analytic) < 1e-4) continue;  // too flat for a relative check
        const double fd = testutil::fd_directional(q, d, 1e-6);
        CHECK(std::abs(analytic - fd) / std::abs(fd) <= 1e-5);
    }
}

TEST_CASE("golden decompositions") {
    SolverOptions opts;

    const auto rc = decompose(copy_joint(), opts);
    CHECK(rc.redundancy.bits == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rc.unique_x.bits == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rc.unique_y.bits == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rc.synergy.bits == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rc.converged);
    CHECK(rc.fw_gap <= 1e-9);  // singleton polytope certifies immediately

    const auto rx = decompose(xor_joint(), opts);
    CHECK(rx.synergy.bits == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rx.redundancy.bits == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rx.min_mi.bits == doctest::Approx(0.0).epsilon(1e-9));

    const auto rw = decompose(componentwise_joint(), opts);
    CHECK(rw.total.bits == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(rw.min_mi.bits == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(rw.unique_x.bits == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rw.unique_y.bits == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rw.synergy.bits == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rw.redundancy.bits == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("solver iterates stay feasible and descend monotonically") {
    Rng rng(53);
    SolverOptions opts;
    opts.collect_trace = true;
    for (int rep = 0; rep < 10; ++rep) {
        const auto p = testutil::random_joint(3, 3, 3, rng, rep % 3 == 0 ? 0.25 : 0.0);
        const auto sol = min_mutual_information(p, opts);
        CHECK(sol.q_star.max_marginal_residual() <= 1e-10);
        CHECK(sol.fw_gap >= -1e-12);
        for (std::size_t i = 1; i < sol.trace.size(); ++i)
            CHECK(sol.trace[i] <= sol.trace[i - 1] + 1e-12);
        if (sol.converged) CHECK(sol.fw_gap <= opts.gap_tol);
    }
}

TEST_CASE("grid oracle worked examples") {
    CHECK(brute_force_min_mi(xor_joint(), 101) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(brute_force_min_mi(copy_joint(), 11) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(brute_force_min_mi(componentwise_joint(), 11), std::invalid_argument);
}

TEST_CASE("grid oracle serial and OpenMP paths are identical") {
    Rng rng(59);
    for (int rep = 0; rep < 5; ++rep) {
        const auto p = testutil::random_joint(2 + rep % 2, 2, 2, rng);
        const double a = brute_force_min_mi(p, 151, Execution::Serial);
        const double b = brute_force_min_mi(p, 151, Execution::OpenMP);
        CHECK(a == b);
    }
}

TEST_CASE("solver matches the grid oracle on binary instances") {
    Rng rng(61);
    SolverOptions opts;
    for (int rep = 0; rep < 10; ++rep) {
        const auto p = testutil::random_joint(2 + rep % 2, 2, 2, rng);
        const auto sol = min_mutual_information(p, opts);
        const double oracle = brute_force_min_mi(p, 401);
        CHECK(std::abs(sol.value.bits - oracle) <= 1e-4);
        // certificate: the solver value is never below the truth
        CHECK(sol.value.bits >= oracle - sol.fw_gap - 1e-6);
    }
}

TEST_CASE("components are non-negative and identities hold on random instances") {
    Rng rng(67);
    SolverOptions opts;
    for (int rep = 0; rep < 25; ++rep) {
        const auto p = testutil::random_joint(2 + rep % 3, 2 + (rep / 3) % 3, 2 + rep % 2, rng,
                                              rep % 4 == 0 ? 0.3 : 0.0);
        const auto r = decompose(p, opts);
        CHECK(r.synergy.bits >= 0.0);
        CHECK(r.unique_x.bits >= 0.0);
        CHECK(r.unique_y.bits >= 0.0);
        CHECK(r.redundancy.bits >= 0.0);
        const double resid = r.total.bits - (r.synergy.bits + r.unique_x.bits + r.unique_y.bits +
                                             r.redundancy.bits);
        CHECK(std::abs(resid) <= 1e-7);
        const double itx = mutual_information(p, {Axis::T}, {Axis::X}).bits;
        const double ity = mutual_information(p, {Axis::T}, {Axis::Y}).bits;
        CHECK(std::abs(itx - (r.redundancy.bits + r.unique_x.bits)) <= 1e-7);
        CHECK(std::abs(ity - (r.redundancy.bits + r.unique_y.bits)) <= 1e-7);
    }
}

TEST_CASE("swapping X and Y swaps the unique components") {
    Rng rng(71);
    SolverOptions opts;
    for (int rep = 0; rep < 5; ++rep) {
        const auto p = testutil::random_joint(3, 3, 2, rng);
        std::vector<double> sw(p.data().size());
        for (int t = 0; t < 3; ++t)
            for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 2; ++y)
                    sw[(static_cast<std::size_t>(t) * 2 + y) * 3 + x] = p.at(t, x, y);
        const JointPMF ps(p.alphabet(Axis::T), p.alphabet(Axis::Y), p.alphabet(Axis::X),
                          std::move(sw));
        const auto r = decompose(p, opts);
        const auto rs = decompose(ps, opts);
        CHECK(std::abs(r.unique_x.bits - rs.unique_y.bits) <= 1e-7);
        CHECK(std::abs(r.unique_y.bits - rs.unique_x.bits) <= 1e-7);
        CHECK(std::abs(r.redundancy.bits - rs.redundancy.bits) <= 1e-7);
        CHECK(std::abs(r.synergy.bits - rs.synergy.bits) <= 1e-7);
    }
}

TEST_CASE("minimum depends only on the pair marginals") {
    Rng rng(73);
    SolverOptions opts;
    for (int rep = 0; rep < 5; ++rep) {
        const auto p = testutil::random_joint(3, 2, 3, rng);
        // same pair marginals, different coupling: the per-t product
        const auto c = product_coupling(p);
        const JointPMF p2(p.alphabet(Axis::T), p.alphabet(Axis::X), p.alphabet(Axis::Y), c.q);
        const double a = min_mutual_information(p, opts).value.bits;
        const double b = min_mutual_information(p2, opts).value.bits;
        CHECK(std::abs(a - b) <= 1e-7);
    }
}

TEST_CASE("quasi-face optimum: cells at extreme exponent scales") {
    // the minimizer of this instance places cells around 2^-1000; the
    // alternating-scaling stage must still certify it
    Rng rng(20128);
    const auto p = testutil::random_joint(4, 2, 4, rng, 0.25);
    const auto sol = min_mutual_information(p, {});
    CHECK(sol.converged);
    CHECK(sol.fw_gap <= 1e-9);
    CHECK(sol.value.bits == doctest::Approx(0.760101814685).epsilon(1e-7));
    CHECK(sol.q_star.max_marginal_residual() <= 1e-10);
}

TEST_CASE("solver option validation") {
    Rng rng(79);
    const auto p = testutil::random_joint(2, 2, 2, rng);
    SolverOptions bad;
    bad.gap_tol = 0.0;
    CHECK_THROWS_AS((void)min_mutual_information(p, bad), std::invalid_argument);
    bad.gap_tol = 1e-9;
    bad.max_iters = 0;
    CHECK_THROWS_AS((void)min_mutual_information(p, bad), std::invalid_argument);
}
