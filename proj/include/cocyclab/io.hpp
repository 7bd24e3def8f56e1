#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/irreducibility.hpp"
#include "cocyclab/lyapunov.hpp"
#include "cocyclab/reduction.hpp"
#include "cocyclab/stats.hpp"

namespace cocyclab {

using Json = nlohmann::ordered_json;

// JSON has no infinities; extended reals travel as the string "-inf".
inline Json extended_to_json(double x) {
    if (is_neg_inf(x)) return Json("-inf");
    return Json(x);
}

inline double extended_from_json(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "-inf") return kNegInf;
        throw std::invalid_argument("expected a number or \"-inf\", got \"" +
                                    j.get<std::string>() + "\"");
    }
    return j.get<double>();
}

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ParseError(what);
}

inline Matrix matrix_from_json(const Json& rows, int want_rows, int want_cols,
                               const std::string& where) {
    require(rows.is_array(), where + " must be an array of rows");
    require(static_cast<int>(rows.size()) == want_rows,
            where + " has " + std::to_string(rows.size()) +
                " rows, expected " + std::to_string(want_rows));
    Matrix m(want_rows, want_cols);
    for (int i = 0; i < want_rows; ++i) {
        const Json& row = rows[i];
        require(row.is_array(), where + " row " + std::to_string(i) +
                                    " must be an array");
        require(static_cast<int>(row.size()) == want_cols,
                where + " row " + std::to_string(i) + " has " +
                    std::to_string(row.size()) + " entries, expected " +
                    std::to_string(want_cols));
        for (int j = 0; j < want_cols; ++j) {
            require(row[j].is_number(), where + " entry (" +
                                            std::to_string(i) + "," +
                                            std::to_string(j) +
                                            ") is not a number");
            m(i, j) = row[j].get<double>();
        }
    }
    return m;
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

// Schema: {"dim": d, "symbols": m, "probs": [...], "matrices": [[[...]]]}
inline Cocycle cocycle_from_json(const Json& j) {
    detail::require(j.is_object(), "cocycle must be a JSON object");
    for (const char* key : {"dim", "symbols", "probs", "matrices"})
        detail::require(j.contains(key),
                        std::string("missing key \"") + key + "\"");
    detail::require(j["dim"].is_number_integer() && j["dim"].get<int>() >= 1,
                    "\"dim\" must be a positive integer");
    detail::require(j["symbols"].is_number_integer() &&
                        j["symbols"].get<int>() >= 1,
                    "\"symbols\" must be a positive integer");
    const int d = j["dim"].get<int>();
    const int m = j["symbols"].get<int>();
    detail::require(j["probs"].is_array(), "\"probs\" must be an array");
    detail::require(static_cast<int>(j["probs"].size()) == m,
                    "\"probs\" has " + std::to_string(j["probs"].size()) +
                        " entries, expected " + std::to_string(m));
    Cocycle c;
    for (int i = 0; i < m; ++i) {
        detail::require(j["probs"][i].is_number(),
                        "probs[" + std::to_string(i) + "] is not a number");
        c.probs.push_back(j["probs"][i].get<double>());
    }
    detail::require(j["matrices"].is_array(), "\"matrices\" must be an array");
    detail::require(static_cast<int>(j["matrices"].size()) == m,
                    "\"matrices\" has " + std::to_string(j["matrices"].size()) +
                        " entries, expected " + std::to_string(m));
    for (int i = 0; i < m; ++i)
        c.matrices.push_back(detail::matrix_from_json(
            j["matrices"][i], d, d, "matrices[" + std::to_string(i) + "]"));
    return c;
}

inline Json cocycle_to_json(const Cocycle& c) {
    Json j;
    j["dim"] = c.dim();
    j["symbols"] = c.symbols();
    j["probs"] = c.probs;
    Json mats = Json::array();
    for (const Matrix& m : c.matrices) mats.push_back(detail::matrix_to_json(m));
    j["matrices"] = std::move(mats);
    return j;
}

// Schema: {"k": ..., "probs": [...], "bases": [...], "transitions": [[...]]}
inline Json reduced_to_json(const ReducedCocycle& r) {
    Json j;
    j["k"] = r.k;
    j["probs"] = r.probs;
    Json bases = Json::array();
    for (const Matrix& b : r.bases) bases.push_back(detail::matrix_to_json(b));
    j["bases"] = std::move(bases);
    Json trans = Json::array();
    for (const auto& row : r.transitions) {
        Json jrow = Json::array();
        for (const Matrix& t : row) jrow.push_back(detail::matrix_to_json(t));
        trans.push_back(std::move(jrow));
    }
    j["transitions"] = std::move(trans);
    return j;
}

inline ReducedCocycle reduced_from_json(const Json& j) {
    detail::require(j.is_object(), "reduced cocycle must be a JSON object");
    for (const char* key : {"k", "probs", "bases", "transitions"})
        detail::require(j.contains(key),
                        std::string("missing key \"") + key + "\"");
    ReducedCocycle r;
    detail::require(j["k"].is_number_integer() && j["k"].get<int>() >= 1,
                    "\"k\" must be a positive integer");
    r.k = j["k"].get<int>();
    detail::require(j["probs"].is_array() && !j["probs"].empty(),
                    "\"probs\" must be a nonempty array");
    for (const Json& p : j["probs"]) r.probs.push_back(p.get<double>());
    const int m = static_cast<int>(r.probs.size());
    detail::require(j["bases"].is_array() &&
                        static_cast<int>(j["bases"].size()) == m,
                    "\"bases\" must list one basis per symbol");
    detail::require(j["bases"][0].is_array() && !j["bases"][0].empty(),
                    "bases[0] must be a matrix");
    const int d = static_cast<int>(j["bases"][0].size());
    for (int i = 0; i < m; ++i)
        r.bases.push_back(detail::matrix_from_json(
            j["bases"][i], d, r.k, "bases[" + std::to_string(i) + "]"));
    detail::require(j["transitions"].is_array() &&
                        static_cast<int>(j["transitions"].size()) == m,
                    "\"transitions\" must be an m x m family");
    r.transitions.resize(m);
    for (int i = 0; i < m; ++i) {
        detail::require(j["transitions"][i].is_array() &&
                            static_cast<int>(j["transitions"][i].size()) == m,
                        "transitions[" + std::to_string(i) +
                            "] must list m matrices");
        for (int jj = 0; jj < m; ++jj)
            r.transitions[i].push_back(detail::matrix_from_json(
                j["transitions"][i][jj], r.k, r.k,
                "transitions[" + std::to_string(i) + "][" +
                    std::to_string(jj) + "]"));
    }
    return r;
}

inline Json estimate_to_json(const LyapunovEstimate& est) {
    Json j;
    Json vals = Json::array();
    for (double v : est.values) vals.push_back(extended_to_json(v));
    j["values"] = std::move(vals);
    j["stderr"] = est.stderrs;
    j["n"] = est.n;
    j["samples"] = est.samples;
    j["zero_product_fraction"] = est.zero_product_fraction;
    return j;
}

inline Json verdict_to_json(const IrreducibilityVerdict& v) {
    Json j;
    j["power"] = v.power;
    j["status"] = to_string(v.status);
    j["span_dim"] = v.span_dim;
    if (v.witness) {
        Json w;
        w["power"] = v.witness->power;
        w["residual"] = v.witness->residual;
        Json bases = Json::array();
        for (const Matrix& b : v.witness->bases)
            bases.push_back(detail::matrix_to_json(b));
        w["bases"] = std::move(bases);
        j["witness"] = std::move(w);
    }
    return j;
}

inline Json fit_to_json(const LdtFit& f) {
    Json j;
    j["C_hat"] = f.c_big;
    j["c_hat"] = f.c_rate;
    j["eps0"] = f.eps0;
    j["residual"] = f.residual;
    j["r2"] = f.r2;
    j["usable"] = f.usable;
    if (!f.reason.empty()) j["reason"] = f.reason;
    return j;
}

inline Json holder_to_json(const HolderFit& f) {
    Json j;
    j["alpha_hat"] = f.alpha_hat;
    j["constant"] = f.constant;
    j["delta_min"] = f.delta_min;
    j["delta_max"] = f.delta_max;
    j["r2"] = f.r2;
    j["usable"] = f.usable;
    if (!f.reason.empty()) j["reason"] = f.reason;
    return j;
}

// 17 significant digits, '.' decimal point regardless of locale.
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// CSV with '#'-prefixed config header lines, then `n,epsilon,p_hat,stderr,samples`.
inline std::string tail_curve_csv(const TailCurve& curve,
                                  const std::vector<std::string>& config_lines) {
    std::ostringstream os;
    for (const std::string& line : config_lines) os << "# " << line << "\n";
    os << "n,epsilon,p_hat,stderr,samples\n";
    for (const TailRow& row : curve) {
        os << row.n << ',' << format_double(row.epsilon) << ','
           << format_double(row.p_hat) << ',' << format_double(row.se) << ','
           << row.samples << "\n";
    }
    return os.str();
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline Cocycle load_cocycle(const std::string& path) {
    try {
        return cocycle_from_json(load_json_file(path));
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " [" + path + "]");
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace cocyclab
