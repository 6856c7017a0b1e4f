#pragma once
// Dense probability tables over small finite alphabets (T, X, Y) and the
// pair-marginal-preserving coupling family built from them.

#include <optional>
#include <string>
#include <vector>

namespace bcpid {

// Absolute tolerance for probability comparisons unless stated otherwise.
inline constexpr double kProbTol = 1e-10;
// Total-mass tolerance for normalized tables.
inline constexpr double kMassTol = 1e-12;

enum class Axis { T = 0, X = 1, Y = 2 };

const char* axis_name(Axis a);

class Alphabet {
  public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> labels);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<int> index(const std::string& label) const;

    bool operator==(const Alphabet&) const = default;

  private:
    std::vector<std::string> labels_;
};

// Joint distribution of (T, X, Y) as a dense 3-axis table, t-major layout.
class JointPMF {
  public:
    JointPMF(Alphabet t, Alphabet x, Alphabet y, std::vector<double> prob);

    int nt() const { return t_.size(); }
    int nx() const { return x_.size(); }
    int ny() const { return y_.size(); }
    const Alphabet& alphabet(Axis a) const;

    double at(int t, int x, int y) const { return prob_[(t * nx() + x) * ny() + y]; }
    double& at(int t, int x, int y) { return prob_[(t * nx() + x) * ny() + y]; }
    const std::vector<double>& data() const { return prob_; }
    std::vector<double>& data() { return prob_; }

  private:
    Alphabet t_, x_, y_;
    std::vector<double> prob_;
};

struct PairMarginal {
    Alphabet a, b;
    std::vector<double> prob;  // a-major, size |a|*|b|

    double at(int i, int j) const { return prob[i * b.size() + j]; }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

// Structural and stochastic checks; never throws, reports everything it finds.
ValidationReport validate(const Alphabet& t, const Alphabet& x, const Alphabet& y,
                          const std::vector<double>& prob);
ValidationReport validate(const JointPMF& p);

PairMarginal marginalize(const JointPMF& p, Axis keep_a, Axis keep_b);
std::vector<double> marginalize(const JointPMF& p, Axis keep);

// A point of the coupling polytope: a 3-axis table whose (T,X) and (T,Y)
// marginals match the stored base pair marginals.
struct CouplingFamily {
    PairMarginal tx, ty;
    std::vector<double> q;  // t-major, |T|*|X|*|Y|

    int nt() const { return tx.a.size(); }
    int nx() const { return tx.b.size(); }
    int ny() const { return ty.b.size(); }
    double at(int t, int x, int y) const { return q[(t * nx() + x) * ny() + y]; }
    double& at(int t, int x, int y) { return q[(t * nx() + x) * ny() + y]; }

    std::vector<double> pt() const;          // P_T from the base marginals
    double max_marginal_residual() const;    // worst |row/col sum - base| over all slices
    bool feasible(double tol = kProbTol) const;
};

// Per-t product of the conditional marginals; strictly positive on the
// product of conditional supports, zero on slices with P(t) = 0.
CouplingFamily product_coupling(const JointPMF& p);

// Wraps an explicit table as a coupling for the same base marginals as `p`.
CouplingFamily coupling_from_table(const JointPMF& p, std::vector<double> q);

}  // namespace bcpid
