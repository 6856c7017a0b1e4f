#pragma once
// Entropy and mutual information in bits for dense finite tables.

#include <span>
#include <vector>

#include "bcpid/pmf.hpp"

namespace bcpid {

inline constexpr double kLn2 = 0.69314718055994530942;

// Information quantity in bits. Values from valid tables are clamped to zero
// when they round slightly negative (within 1e-9); anything more negative is
// treated as a hard error by the producing operation.
struct InfoValue {
    double bits = 0.0;
    double nats() const { return bits * kLn2; }
};

InfoValue entropy(std::span<const double> prob);

// I(A;B) between two disjoint axis groups of a joint table; axes outside
// the groups are summed out first.
InfoValue mutual_information(const JointPMF& p, const std::vector<Axis>& group_a,
                             const std::vector<Axis>& group_b);

}  // namespace bcpid
