#pragma once
// Exact small-blocklength broadcast-code evaluation: error enumeration under
// an explicit coupling, coupling sampling over the conditional marginal
// polytope, and exhaustive decoder-class comparison.

#include <cstdint>
#include <utility>

#include "bcpid/sato.hpp"

namespace bcpid {

// Explicit (n, M1, M2) code. Messages are 0-based internally; sequence
// indices are big-endian in the symbol index.
struct BroadcastCode {
    int n = 1;
    int m1 = 1;
    int m2 = 1;
    std::vector<int> encoder;   // (m1*m2) * n, pair-major, entries are T indices
    std::vector<int> decoder1;  // |X|^n -> 0..m1-1
    std::vector<int> decoder2;  // |Y|^n -> 0..m2-1
};

void check_valid(const BroadcastCode& code, const BroadcastChannel& ch);

// Per-t conditional coupling of (X, Y), |T| x |X| x |Y| t-major.
using Coupling = std::vector<double>;

Coupling product_coupling(const BroadcastChannel& ch);
// Convex mixtures of transportation-LP vertices drawn with random costs.
std::vector<Coupling> sample_couplings(const BroadcastChannel& ch, int k, std::uint64_t seed);

struct CodeErrors {
    double joint = 0.0;  // Pr{(M1^, M2^) != (M1, M2)}
    double rx1 = 0.0;    // Pr{M1^ != M1}; depends on the coupling only through P_{X|T}
    double rx2 = 0.0;
};

// Exact enumeration over uniform message pairs and channel output sequences.
// Guarded to |T|^n * |X|^n * |Y|^n <= 1e7.
CodeErrors exact_error_probability(const BroadcastCode& code, const BroadcastChannel& ch,
                                   const Coupling& coupling, Execution exec = Execution::OpenMP);

struct ErrorReport {
    CodeErrors base;  // channel's own coupling when present, else the product
    std::vector<std::pair<int, CodeErrors>> per_coupling;  // id 0 = base, 1..k sampled
    double spread_rx1 = 0.0;
    double spread_rx2 = 0.0;
    double spread_joint = 0.0;  // reported; not invariant for general codes

    bool invariant(double tol = 1e-12) const { return spread_rx1 <= tol && spread_rx2 <= tol; }
};

ErrorReport coupling_invariance_check(const BroadcastCode& code, const BroadcastChannel& ch,
                                      int k, std::uint64_t seed,
                                      Execution exec = Execution::OpenMP);

struct DecoderComparison {
    double best_separate = 0.0;  // success probability, best over encoders and decoder pairs
    double best_joint = 0.0;     // best over encoders and joint decoders on (X,Y)
    double gap = 0.0;
    std::optional<double> coop_gain;  // context at the given p_t when the channel has a coupling
};

// Single-shot (n = 1) exhaustive search over all encoders of the given
// message-set sizes and all decoders of each class; alphabets <= 4.
DecoderComparison cooperative_decoder_comparison(const BroadcastChannel& ch, int m1, int m2,
                                                 const std::vector<double>& p_t,
                                                 const SatoOptions& opts = {});

}  // namespace bcpid
