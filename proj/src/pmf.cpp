#include "bcpid/pmf.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace bcpid {

const char* axis_name(Axis a) {
    switch (a) {
        case Axis::T: return "T";
        case Axis::X: return "X";
        case Axis::Y: return "Y";
    }
    return "?";
}

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("alphabet must be non-empty");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second)
            throw std::invalid_argument("alphabet labels must be distinct: '" + l + "'");
    }
}

std::optional<int> Alphabet::index(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (labels_[i] == label) return i;
    return std::nullopt;
}

JointPMF::JointPMF(Alphabet t, Alphabet x, Alphabet y, std::vector<double> prob)
    : t_(std::move(t)), x_(std::move(x)), y_(std::move(y)), prob_(std::move(prob)) {
    const std::size_t want = static_cast<std::size_t>(nt()) * nx() * ny();
    if (prob_.size() != want) {
        std::ostringstream os;
        os << "shape mismatch: table has " << prob_.size() << " entries, alphabets imply " << want;
        throw std::invalid_argument(os.str());
    }
}

const Alphabet& JointPMF::alphabet(Axis a) const {
    switch (a) {
        case Axis::T: return t_;
        case Axis::X: return x_;
        default: return y_;
    }
}

std::string ValidationReport::to_string() const {
    std::string s;
    for (const auto& v : violations) {
        if (!s.empty()) s += "; ";
        s += v;
    }
    return s.empty() ? "ok" : s;
}

ValidationReport validate(const Alphabet& t, const Alphabet& x, const Alphabet& y,
                          const std::vector<double>& prob) {
    ValidationReport rep;
    const std::size_t want = static_cast<std::size_t>(t.size()) * x.size() * y.size();
    if (prob.size() != want) {
        std::ostringstream os;
        os << "shape mismatch: " << prob.size() << " entries for " << t.size() << "x" << x.size()
           << "x" << y.size();
        rep.violations.push_back(os.str());
        return rep;
    }
    double sum = 0.0;
    for (int ti = 0; ti < t.size(); ++ti)
        for (int xi = 0; xi < x.size(); ++xi)
            for (int yi = 0; yi < y.size(); ++yi) {
                const double v = prob[(static_cast<std::size_t>(ti) * x.size() + xi) * y.size() + yi];
                if (!std::isfinite(v)) {
                    std::ostringstream os;
                    os << "non-finite entry at (" << t.label(ti) << "," << x.label(xi) << ","
                       << y.label(yi) << ")";
                    rep.violations.push_back(os.str());
                } else if (v < 0.0) {
                    std::ostringstream os;
                    os << "negative entry at (" << t.label(ti) << "," << x.label(xi) << ","
                       << y.label(yi) << "): " << v;
                    rep.violations.push_back(os.str());
                } else {
                    sum += v;
                }
            }
    if (std::abs(sum - 1.0) > kMassTol) {
        std::ostringstream os;
        if (sum < 1.0)
            os << "mass deficit " << 1.0 - sum;
        else
            os << "mass surplus " << sum - 1.0;
        rep.violations.push_back(os.str());
    }
    return rep;
}

ValidationReport validate(const JointPMF& p) {
    return validate(p.alphabet(Axis::T), p.alphabet(Axis::X), p.alphabet(Axis::Y), p.data());
}

PairMarginal marginalize(const JointPMF& p, Axis keep_a, Axis keep_b) {
    if (keep_a == keep_b) throw std::invalid_argument("marginalize: axes must differ");
    const Alphabet& a = p.alphabet(keep_a);
    const Alphabet& b = p.alphabet(keep_b);
    std::vector<double> out(static_cast<std::size_t>(a.size()) * b.size(), 0.0);
    for (int t = 0; t < p.nt(); ++t)
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y) {
                const int idx[3] = {t, x, y};
                const int ia = idx[static_cast<int>(keep_a)];
                const int ib = idx[static_cast<int>(keep_b)];
                out[static_cast<std::size_t>(ia) * b.size() + ib] += p.at(t, x, y);
            }
    return PairMarginal{a, b, std::move(out)};
}

std::vector<double> marginalize(const JointPMF& p, Axis keep) {
    const Alphabet& a = p.alphabet(keep);
    std::vector<double> out(a.size(), 0.0);
    for (int t = 0; t < p.nt(); ++t)
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y) {
                const int idx[3] = {t, x, y};
                out[idx[static_cast<int>(keep)]] += p.at(t, x, y);
            }
    return out;
}

std::vector<double> CouplingFamily::pt() const {
    std::vector<double> out(nt(), 0.0);
    for (int t = 0; t < nt(); ++t)
        for (int x = 0; x < nx(); ++x) out[t] += tx.at(t, x);
    return out;
}

double CouplingFamily::max_marginal_residual() const {
    double worst = 0.0;
    for (int t = 0; t < nt(); ++t) {
        for (int x = 0; x < nx(); ++x) {
            double s = 0.0;
            for (int y = 0; y < ny(); ++y) s += at(t, x, y);
            worst = std::max(worst, std::abs(s - tx.at(t, x)));
        }
        for (int y = 0; y < ny(); ++y) {
            double s = 0.0;
            for (int x = 0; x < nx(); ++x) s += at(t, x, y);
            worst = std::max(worst, std::abs(s - ty.at(t, y)));
        }
    }
    return worst;
}

bool CouplingFamily::feasible(double tol) const {
    for (double v : q)
        if (v < -tol || !std::isfinite(v)) return false;
    return max_marginal_residual() <= tol;
}

CouplingFamily product_coupling(const JointPMF& p) {
    CouplingFamily c{marginalize(p, Axis::T, Axis::X), marginalize(p, Axis::T, Axis::Y),
                     std::vector<double>(p.data().size(), 0.0)};
    const auto pt = c.pt();
    for (int t = 0; t < p.nt(); ++t) {
        if (pt[t] <= 0.0) continue;
        for (int x = 0; x < p.nx(); ++x)
            for (int y = 0; y < p.ny(); ++y)
                c.at(t, x, y) = c.tx.at(t, x) * c.ty.at(t, y) / pt[t];
    }
    return c;
}

CouplingFamily coupling_from_table(const JointPMF& p, std::vector<double> q) {
    if (q.size() != p.data().size())
        throw std::invalid_argument("coupling table shape does not match the distribution");
    CouplingFamily c{marginalize(p, Axis::T, Axis::X), marginalize(p, Axis::T, Axis::Y),
                     std::move(q)};
    if (!c.feasible())
        throw std::invalid_argument("coupling table violates the base pair marginals");
    return c;
}

}  // namespace bcpid
