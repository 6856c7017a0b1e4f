#include "bcpid/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bcpid::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Alphabet read_alphabet(const json& j, const std::string& path, const char* axis) {
    if (!j.contains("alphabets") || !j["alphabets"].contains(axis))
        throw ParseError(path + ": missing alphabets." + axis);
    try {
        return Alphabet(j["alphabets"][axis].get<std::vector<std::string>>());
    } catch (const std::exception& e) {
        throw ParseError(path + ": alphabets." + std::string(axis) + ": " + e.what());
    }
}

std::vector<double> read_matrix(const json& j, const std::string& path, const char* key,
                                int rows, int cols) {
    if (!j.contains(key)) throw ParseError(path + ": missing " + key);
    const auto& m = j[key];
    if (!m.is_array() || static_cast<int>(m.size()) != rows)
        throw ParseError(path + ": " + key + " must have one row per T symbol");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        const auto& row = m[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            std::ostringstream os;
            os << path << ": " << key << " row " << r << " must have " << cols << " entries";
            throw ParseError(os.str());
        }
        for (const auto& v : row) out.push_back(v.get<double>());
    }
    return out;
}

int message_count_guard(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ParseError(path + ": missing integer " + key);
    const int v = j[key].get<int>();
    if (v < 1) throw ParseError(path + ": " + key + " must be positive");
    return v;
}

double scaled(double bits, double unit_scale) { return bits * unit_scale; }

}  // namespace

JointPMF load_distribution(const std::string& path) {
    const json j = parse_file(path);
    const Alphabet t = read_alphabet(j, path, "T");
    const Alphabet x = read_alphabet(j, path, "X");
    const Alphabet y = read_alphabet(j, path, "Y");

    std::vector<double> prob(static_cast<std::size_t>(t.size()) * x.size() * y.size(), 0.0);
    std::vector<char> seen(prob.size(), 0);
    if (!j.contains("probs") || !j["probs"].is_array())
        throw ParseError(path + ": missing probs array");
    int rec = 0;
    for (const auto& entry : j["probs"]) {
        auto label_index = [&](const char* field, const Alphabet& a) {
            if (!entry.contains(field)) {
                std::ostringstream os;
                os << path << ": probs[" << rec << "]: missing \"" << field << "\"";
                throw ParseError(os.str());
            }
            const std::string label = entry[field].get<std::string>();
            const auto idx = a.index(label);
            if (!idx) {
                std::ostringstream os;
                os << path << ": probs[" << rec << "]: unknown label '" << label << "' for axis "
                   << field;
                throw ParseError(os.str());
            }
            return *idx;
        };
        const int ti = label_index("t", t);
        const int xi = label_index("x", x);
        const int yi = label_index("y", y);
        if (!entry.contains("p")) {
            std::ostringstream os;
            os << path << ": probs[" << rec << "]: missing \"p\"";
            throw ParseError(os.str());
        }
        const std::size_t idx = (static_cast<std::size_t>(ti) * x.size() + xi) * y.size() + yi;
        if (seen[idx]) {
            std::ostringstream os;
            os << path << ": probs[" << rec << "]: duplicate cell (" << t.label(ti) << ","
               << x.label(xi) << "," << y.label(yi) << ")";
            throw ParseError(os.str());
        }
        seen[idx] = 1;
        prob[idx] = entry["p"].get<double>();
        ++rec;
    }

    const auto report = validate(t, x, y, prob);
    if (!report.ok()) throw ParseError(path + ": " + report.to_string());
    return JointPMF(t, x, y, std::move(prob));
}

GaussianJoint load_gaussian(const std::string& path) {
    const json j = parse_file(path);
    if (!j.contains("dims")) throw ParseError(path + ": missing dims");
    GaussianJoint g;
    try {
        g.dt = j["dims"].at("T").get<int>();
        g.dx = j["dims"].at("X").get<int>();
        g.dy = j["dims"].at("Y").get<int>();
    } catch (const json::exception& e) {
        throw ParseError(path + ": dims: " + e.what());
    }
    if (g.dt < 1 || g.dx < 1 || g.dy < 1) throw ParseError(path + ": dims must be positive");
    const int d = g.dim();
    if (!j.contains("cov")) throw ParseError(path + ": missing cov");
    const auto& cov = j["cov"];
    g.cov.resize(d, d);
    if (cov.is_array() && !cov.empty() && cov[0].is_array()) {
        if (static_cast<int>(cov.size()) != d) throw ParseError(path + ": cov must be " + std::to_string(d) + " rows");
        for (int r = 0; r < d; ++r) {
            if (static_cast<int>(cov[r].size()) != d)
                throw ParseError(path + ": cov row " + std::to_string(r) + " has wrong length");
            for (int c = 0; c < d; ++c) g.cov(r, c) = cov[r][c].get<double>();
        }
    } else if (cov.is_array() && static_cast<int>(cov.size()) == d * d) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) g.cov(r, c) = cov[r * d + c].get<double>();
    } else {
        throw ParseError(path + ": cov must be a row-major matrix");
    }
    try {
        check_valid(g);
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return g;
}

BroadcastChannel load_channel(const std::string& path) {
    const json j = parse_file(path);
    BroadcastChannel ch;
    ch.t = read_alphabet(j, path, "T");
    ch.x = read_alphabet(j, path, "X");
    ch.y = read_alphabet(j, path, "Y");
    ch.px_given_t = read_matrix(j, path, "px_given_t", ch.t.size(), ch.x.size());
    ch.py_given_t = read_matrix(j, path, "py_given_t", ch.t.size(), ch.y.size());
    if (j.contains("pxy_given_t")) {
        const auto& m = j["pxy_given_t"];
        if (!m.is_array() || static_cast<int>(m.size()) != ch.t.size())
            throw ParseError(path + ": pxy_given_t must have one slice per T symbol");
        std::vector<double> joint;
        joint.reserve(static_cast<std::size_t>(ch.t.size()) * ch.x.size() * ch.y.size());
        for (int t = 0; t < ch.t.size(); ++t) {
            const auto& slice = m[t];
            if (!slice.is_array() || static_cast<int>(slice.size()) != ch.x.size())
                throw ParseError(path + ": pxy_given_t slice " + std::to_string(t) + " shape mismatch");
            for (int x = 0; x < ch.x.size(); ++x) {
                const auto& row = slice[x];
                if (!row.is_array() || static_cast<int>(row.size()) != ch.y.size())
                    throw ParseError(path + ": pxy_given_t slice " + std::to_string(t) + " shape mismatch");
                for (const auto& v : row) joint.push_back(v.get<double>());
            }
        }
        ch.pxy_given_t = std::move(joint);
    }
    try {
        check_valid(ch);
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return ch;
}

BroadcastCode load_code(const std::string& path, const BroadcastChannel& ch) {
    const json j = parse_file(path);
    BroadcastCode code;
    code.n = message_count_guard(j, path, "n");
    code.m1 = message_count_guard(j, path, "m1");
    code.m2 = message_count_guard(j, path, "m2");

    auto seq_count = [&](int base) {
        std::int64_t r = 1;
        for (int i = 0; i < code.n; ++i) r *= base;
        return r;
    };

    if (!j.contains("encoder") || !j["encoder"].is_object())
        throw ParseError(path + ": missing encoder object");
    code.encoder.assign(static_cast<std::size_t>(code.m1) * code.m2 * code.n, -1);
    for (int i1 = 1; i1 <= code.m1; ++i1)
        for (int i2 = 1; i2 <= code.m2; ++i2) {
            const std::string key = std::to_string(i1) + "," + std::to_string(i2);
            if (!j["encoder"].contains(key))
                throw ParseError(path + ": encoder: missing message pair \"" + key + "\"");
            const auto& seq = j["encoder"][key];
            if (!seq.is_array() || static_cast<int>(seq.size()) != code.n)
                throw ParseError(path + ": encoder[\"" + key + "\"] must list " +
                                 std::to_string(code.n) + " symbols");
            for (int i = 0; i < code.n; ++i) {
                const std::string label = seq[i].get<std::string>();
                const auto idx = ch.t.index(label);
                if (!idx)
                    throw ParseError(path + ": encoder[\"" + key + "\"]: unknown T label '" + label + "'");
                code.encoder[(static_cast<std::size_t>(i1 - 1) * code.m2 + (i2 - 1)) * code.n + i] = *idx;
            }
        }

    auto read_decoder = [&](const char* key, const Alphabet& a, int messages) {
        if (!j.contains(key) || !j[key].is_object())
            throw ParseError(path + ": missing " + std::string(key) + " object");
        const std::int64_t count = seq_count(a.size());
        std::vector<int> table(count, -1);
        for (std::int64_t s = 0; s < count; ++s) {
            std::string label;
            std::int64_t r = s;
            std::vector<int> digits(code.n);
            for (int i = code.n - 1; i >= 0; --i) {
                digits[i] = static_cast<int>(r % a.size());
                r /= a.size();
            }
            for (int i = 0; i < code.n; ++i) {
                if (i) label += ",";
                label += a.label(digits[i]);
            }
            if (!j[key].contains(label))
                throw ParseError(path + ": " + key + ": missing sequence \"" + label + "\"");
            const int msg = j[key][label].get<int>();
            if (msg < 1 || msg > messages)
                throw ParseError(path + ": " + key + "[\"" + label + "\"]: message out of range");
            table[s] = msg - 1;
        }
        return table;
    };
    code.decoder1 = read_decoder("decoder1", ch.x, code.m1);
    code.decoder2 = read_decoder("decoder2", ch.y, code.m2);

    try {
        check_valid(code, ch);
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return code;
}

std::vector<double> load_pt(const std::string& path, int nt) {
    const json j = parse_file(path);
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("p_t")) throw ParseError(path + ": missing p_t");
        arr = &j["p_t"];
    }
    if (!arr->is_array() || static_cast<int>(arr->size()) != nt)
        throw ParseError(path + ": p_t must list " + std::to_string(nt) + " weights");
    std::vector<double> p;
    for (const auto& v : *arr) p.push_back(v.get<double>());
    return p;
}

std::string pid_report_json(const PIDResult& r, double unit_scale) {
    ordered_json j;
    j["total"] = scaled(r.total.bits, unit_scale);
    j["min_mi"] = scaled(r.min_mi.bits, unit_scale);
    j["synergy"] = scaled(r.synergy.bits, unit_scale);
    j["unique_x"] = scaled(r.unique_x.bits, unit_scale);
    j["unique_y"] = scaled(r.unique_y.bits, unit_scale);
    j["redundancy"] = scaled(r.redundancy.bits, unit_scale);
    j["fw_gap"] = scaled(r.fw_gap, unit_scale);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    return j.dump(2) + "\n";
}

std::string gaussian_report_json(const GaussianPIDResult& r, double unit_scale) {
    ordered_json j = ordered_json::parse(pid_report_json(r.pid, unit_scale));
    j["boundary"] = r.boundary;
    j["grad_map_norm"] = scaled(r.grad_map_norm, unit_scale);
    j["regularized"] = r.regularized;
    return j.dump(2) + "\n";
}

std::string sato_report_json(const SatoReport& r, double unit_scale) {
    ordered_json j;
    j["r_pt"] = scaled(r.r_pt, unit_scale);
    if (r.coop_rate) j["coop_rate"] = scaled(*r.coop_rate, unit_scale);
    if (r.coop_gain) j["coop_gain"] = scaled(*r.coop_gain, unit_scale);
    if (r.c_sato) j["c_sato"] = scaled(*r.c_sato, unit_scale);
    if (r.p_t_star) j["p_t_star"] = *r.p_t_star;
    j["converged"] = r.converged;
    return j.dump(2) + "\n";
}

std::string error_report_json(const ErrorReport& r) {
    ordered_json j;
    j["p_err"] = r.base.joint;
    j["p_err_rx1"] = r.base.rx1;
    j["p_err_rx2"] = r.base.rx2;
    ordered_json list = ordered_json::array();
    for (const auto& [id, e] : r.per_coupling) {
        ordered_json item;
        item["id"] = id;
        item["p_err"] = e.joint;
        item["p_err_rx1"] = e.rx1;
        item["p_err_rx2"] = e.rx2;
        list.push_back(std::move(item));
    }
    j["per_coupling"] = std::move(list);
    j["spread_rx1"] = r.spread_rx1;
    j["spread_rx2"] = r.spread_rx2;
    j["spread_joint"] = r.spread_joint;
    j["invariant"] = r.invariant();
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << contents;
}

}  // namespace bcpid::io
