#pragma once
// JSON file formats (distributions, covariances, channels, codes) and
// report serialization. All formats are UTF-8 JSON.

#include <stdexcept>
#include <string>

#include "bcpid/bc.hpp"
#include "bcpid/gaussian.hpp"

namespace bcpid::io {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// {"alphabets": {"T": [...], "X": [...], "Y": [...]},
//  "probs": [{"t": ..., "x": ..., "y": ..., "p": ...}, ...]}
// Omitted cells are zero. Runs validate() and throws ParseError on violations.
JointPMF load_distribution(const std::string& path);

// {"dims": {"T": d, "X": d, "Y": d}, "cov": [[...], ...]} (row-major rows)
GaussianJoint load_gaussian(const std::string& path);

// {"alphabets": ..., "px_given_t": [[...]], "py_given_t": [[...]],
//  "pxy_given_t": [[[...]]] (optional)}
BroadcastChannel load_channel(const std::string& path);

// {"n": ..., "m1": ..., "m2": ..., "encoder": {"1,1": ["t0", ...], ...},
//  "decoder1": {"x0,x1": 1, ...}, "decoder2": {...}}  (messages 1-based)
BroadcastCode load_code(const std::string& path, const BroadcastChannel& ch);

// Either a bare JSON array of weights or {"p_t": [...]}, in T-label order.
std::vector<double> load_pt(const std::string& path, int nt);

// unit_scale = 1 for bits, ln 2 for nats; applies to information values only.
std::string pid_report_json(const PIDResult& r, double unit_scale);
std::string gaussian_report_json(const GaussianPIDResult& r, double unit_scale);
std::string sato_report_json(const SatoReport& r, double unit_scale);
std::string error_report_json(const ErrorReport& r);

void write_file(const std::string& path, const std::string& contents);

}  // namespace bcpid::io
