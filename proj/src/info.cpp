#include "bcpid/info.hpp"

#include <cmath>
#include <stdexcept>

namespace bcpid {

namespace {

double clamp_info(double bits, const char* what) {
    if (bits < 0.0) {
        if (bits < -1e-9) throw std::domain_error(std::string(what) + " negative beyond tolerance");
        return 0.0;
    }
    return bits;
}

}  // namespace

InfoValue entropy(std::span<const double> prob) {
    double h = 0.0;
    for (double v : prob)
        if (v > 0.0) h -= v * std::log2(v);
    return InfoValue{clamp_info(h, "entropy")};
}

InfoValue mutual_information(const JointPMF& p, const std::vector<Axis>& ga,
                             const std::vector<Axis>& gb) {
    if (ga.empty() || gb.empty())
        throw std::invalid_argument("mutual_information: empty axis group");
    bool used[3] = {false, false, false};
    for (Axis a : ga) used[static_cast<int>(a)] = true;
    for (Axis b : gb) {
        if (used[static_cast<int>(b)])
            throw std::invalid_argument("mutual_information: axis groups must be disjoint");
    }

    // canonical group order keeps mutual_information(p,A,B) == (p,B,A) exact:
    // both calls run the same accumulation
    const std::vector<Axis>& group_a = ga.front() <= gb.front() ? ga : gb;
    const std::vector<Axis>& group_b = ga.front() <= gb.front() ? gb : ga;

    const int sizes[3] = {p.nt(), p.nx(), p.ny()};
    auto group_size = [&](const std::vector<Axis>& g) {
        int s = 1;
        for (Axis a : g) s *= sizes[static_cast<int>(a)];
        return s;
    };
    const int na = group_size(group_a);
    const int nb = group_size(group_b);

    auto group_index = [&](const std::vector<Axis>& g, const int idx[3]) {
        int out = 0;
        for (Axis a : g) out = out * sizes[static_cast<int>(a)] + idx[static_cast<int>(a)];
        return out;
    };

    std::vector<double> joint(static_cast<std::size_t>(na) * nb, 0.0);
    std::vector<double> ma(na, 0.0), mb(nb, 0.0);
    for (int t = 0; t < p.nt(); ++t)
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y) {
                const int idx[3] = {t, x, y};
                const double v = p.at(t, x, y);
                if (v == 0.0) continue;
                const int ia = group_index(group_a, idx);
                const int ib = group_index(group_b, idx);
                joint[static_cast<std::size_t>(ia) * nb + ib] += v;
                ma[ia] += v;
                mb[ib] += v;
            }

    double mi = 0.0;
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib) {
            const double j = joint[static_cast<std::size_t>(ia) * nb + ib];
            if (j > 0.0) mi += j * std::log2(j / (ma[ia] * mb[ib]));
        }
    return InfoValue{clamp_info(mi, "mutual information")};
}

}  // namespace bcpid
