// Copyright 2026 The dslp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON problem and family files, CSV branch output.

#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

#include "dslp/bc_space.hpp"
#include "dslp/core.hpp"
#include "dslp/perturbation.hpp"
#include "dslp/spectrum.hpp"
#include "json.hpp"

namespace dslp::io {

using json = nlohmann::ordered_json;

/// A failure tied to a location in the input document (a JSON pointer).
class InputError : public Error {
   public:
    InputError(ErrorCode code, std::string path, const std::string& what)
        : Error(code, path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

   private:
    std::string path_;
};

// ---------------------------------------------------------------------------
// Scalars

inline cplx parse_complex(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InputError(ErrorCode::Parse, path, "expected a number or an [re, im] pair");
}

inline json complex_json(cplx v) {
    if (v.imag() == 0.0) return v.real();
    return json::array({v.real(), v.imag()});
}

inline double parse_real(const json& j, const std::string& path) {
    if (!j.is_number()) throw InputError(ErrorCode::Parse, path, "expected a number");
    return j.get<double>();
}

inline Mat2 parse_mat2(const json& j, const std::string& path, bool real_only = false) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 || j[1].size() != 2)
        throw InputError(ErrorCode::Parse, path, "expected a 2x2 array");
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            const std::string p = path + "/" + std::to_string(i) + "/" + std::to_string(k);
            m(i, k) = real_only ? cplx(parse_real(j[i][k], p)) : parse_complex(j[i][k], p);
        }
    return m;
}

inline json mat2_json(const Mat2& m, bool real_only = false) {
    json out = json::array();
    for (int i = 0; i < 2; ++i) {
        json row = json::array();
        for (int k = 0; k < 2; ++k) row.push_back(real_only ? json(m(i, k).real()) : complex_json(m(i, k)));
        out.push_back(row);
    }
    return out;
}

inline std::vector<cplx> parse_complex_array(const json& j, const std::string& path, std::size_t expected) {
    if (!j.is_array()) throw InputError(ErrorCode::Parse, path, "expected an array");
    if (j.size() != expected)
        throw InputError(ErrorCode::Parse, path,
                         "expected " + std::to_string(expected) + " entries, found " + std::to_string(j.size()));
    std::vector<cplx> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_complex(j[i], path + "/" + std::to_string(i)));
    return v;
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw InputError(ErrorCode::Parse, path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw InputError(ErrorCode::Parse, path + "/" + key, "missing field");
    return *it;
}

// ---------------------------------------------------------------------------
// Problem files

struct BcSpec {
    enum class Kind { matrix, separated, coupled };
    Kind kind = Kind::matrix;
    BoundaryCondition matrix{};
    SeparatedParams separated{};
    CoupledParams coupled{};

    BoundaryCondition to_bc() const {
        switch (kind) {
            case Kind::matrix: return matrix;
            case Kind::separated: return canonical_bc(separated);
            case Kind::coupled: return canonical_bc(coupled);
        }
        return matrix;
    }
};

struct ProblemFile {
    SLEquation eq;
    BcSpec bc;

    Problem problem() const { return {eq, bc.to_bc()}; }
};

inline std::optional<EquationClass> class_from_string(const std::string& s) {
    for (auto c : {EquationClass::complex, EquationClass::real, EquationClass::real_positive_weight})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

inline BcSpec parse_bc(const json& j, const std::string& path) {
    BcSpec spec;
    const json& kind = require(j, "kind", path);
    if (!kind.is_string()) throw InputError(ErrorCode::Parse, path + "/kind", "expected a string");
    const std::string k = kind.get<std::string>();
    try {
        if (k == "matrix") {
            spec.kind = BcSpec::Kind::matrix;
            spec.matrix.A = parse_mat2(require(j, "A", path), path + "/A");
            spec.matrix.B = parse_mat2(require(j, "B", path), path + "/B");
            if (bc_rank(spec.matrix) != 2) throw InputError(ErrorCode::NotRank2, path, "(A|B) must have rank 2");
        } else if (k == "separated") {
            spec.kind = BcSpec::Kind::separated;
            spec.separated.alpha = parse_real(require(j, "alpha", path), path + "/alpha");
            spec.separated.beta = parse_real(require(j, "beta", path), path + "/beta");
            (void)canonical_bc(spec.separated);
        } else if (k == "coupled") {
            spec.kind = BcSpec::Kind::coupled;
            spec.coupled.gamma = parse_real(require(j, "gamma", path), path + "/gamma");
            spec.coupled.K = parse_mat2(require(j, "K", path), path + "/K", true);
            (void)canonical_bc(spec.coupled);
        } else {
            throw InputError(ErrorCode::Parse, path + "/kind", "unknown kind '" + k + "'");
        }
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(e.code(), path, e.what());
    }
    return spec;
}

inline json bc_json(const BcSpec& spec) {
    json j;
    switch (spec.kind) {
        case BcSpec::Kind::matrix:
            j["kind"] = "matrix";
            j["A"] = mat2_json(spec.matrix.A);
            j["B"] = mat2_json(spec.matrix.B);
            break;
        case BcSpec::Kind::separated:
            j["kind"] = "separated";
            j["alpha"] = spec.separated.alpha;
            j["beta"] = spec.separated.beta;
            break;
        case BcSpec::Kind::coupled:
            j["kind"] = "coupled";
            j["gamma"] = spec.coupled.gamma;
            j["K"] = mat2_json(spec.coupled.K, true);
            break;
    }
    return j;
}

/// Parses and validates; violations of the coefficient constraints are reported with
/// the position of the offending entry.
inline ProblemFile parse_problem(const json& j) {
    const json& nj = require(j, "N", "");
    if (!nj.is_number_integer() || nj.get<long long>() < 2) throw InputError(ErrorCode::Parse, "/N", "expected an integer >= 2");
    const auto N = static_cast<std::size_t>(nj.get<long long>());
    auto f = parse_complex_array(require(j, "f", ""), "/f", N + 1);
    auto q = parse_complex_array(require(j, "q", ""), "/q", N);
    auto w = parse_complex_array(require(j, "w", ""), "/w", N);
    std::optional<EquationClass> cls;
    if (const auto it = j.find("class"); it != j.end()) {
        if (!it->is_string() || !class_from_string(it->get<std::string>()))
            throw InputError(ErrorCode::Parse, "/class", "expected one of complex, real, real_positive_weight");
        cls = class_from_string(it->get<std::string>());
    }
    SLEquation eq(std::move(f), std::move(q), std::move(w), cls);
    const auto viol = validate_equation(eq);
    if (!viol.empty()) {
        const auto& v = viol.front();
        throw InputError(ErrorCode::InvalidEquation, "/" + v.field + "/" + std::to_string(v.field == "f" ? v.index : v.index - 1),
                         v.describe());
    }
    return {eq, parse_bc(require(j, "bc", ""), "/bc")};
}

/// Parses JSON text; syntax errors report the line and column.
inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::string what = e.what();
        if (const auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
        throw InputError(ErrorCode::Parse, "", what);
    }
}

inline ProblemFile parse_problem_text(const std::string& text) { return parse_problem(parse_json_text(text)); }

inline json problem_json(const ProblemFile& pf) {
    json j;
    j["N"] = pf.eq.N();
    json f = json::array(), q = json::array(), w = json::array();
    for (auto v : pf.eq.f_values()) f.push_back(complex_json(v));
    for (auto v : pf.eq.q_values()) q.push_back(complex_json(v));
    for (auto v : pf.eq.w_values()) w.push_back(complex_json(v));
    j["f"] = f;
    j["q"] = q;
    j["w"] = w;
    j["class"] = to_string(pf.eq.eq_class());
    j["bc"] = bc_json(pf.bc);
    return j;
}

/// Canonical text: two-space indentation and a trailing newline.
inline std::string serialize_problem(const ProblemFile& pf) { return problem_json(pf).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Family files

struct FamilyFile {
    ProblemFile problem;
    ProblemFamily family;
    cplx start_lambda;
};

inline std::pair<FamilyTarget, int> parse_target(const std::string& s, int N, const std::string& path) {
    static const std::regex indexed(R"((eq_inv_f|eq_f|eq_q|eq_w)\((\d+)\))");
    std::smatch m;
    if (std::regex_match(s, m, indexed)) {
        const std::string name = m[1];
        const int n = std::stoi(m[2]);
        const bool f_like = name == "eq_inv_f" || name == "eq_f";
        const int lo = f_like ? 0 : 1;
        if (n < lo || n > N) throw InputError(ErrorCode::Parse, path, "coefficient index out of range");
        if (name == "eq_inv_f") return {FamilyTarget::eq_inv_f, n};
        if (name == "eq_f") return {FamilyTarget::eq_f, n};
        if (name == "eq_q") return {FamilyTarget::eq_q, n};
        return {FamilyTarget::eq_w, n};
    }
    if (s == "bc_chart_coord") return {FamilyTarget::bc_chart_coord, 0};
    if (s == "separated_alpha") return {FamilyTarget::separated_alpha, 0};
    if (s == "separated_beta") return {FamilyTarget::separated_beta, 0};
    if (s == "coupled_gamma") return {FamilyTarget::coupled_gamma, 0};
    if (s == "eq_tangent") return {FamilyTarget::eq_tangent, 0};
    throw InputError(ErrorCode::Parse, path, "unknown target '" + s + "'");
}

inline std::vector<double> parse_real_array(const json& j, const std::string& path, std::size_t expected) {
    if (!j.is_array() || j.size() != expected)
        throw InputError(ErrorCode::Parse, path, "expected an array of " + std::to_string(expected) + " numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_real(j[i], path + "/" + std::to_string(i)));
    return v;
}

inline BCTangent parse_bc_tangent(const json& j, const std::string& path) {
    BCTangent t;
    if (const auto it = j.find("chart"); it != j.end()) {
        if (!it->is_string() || !chart_from_string(it->get<std::string>()))
            throw InputError(ErrorCode::Parse, path + "/chart", "unknown chart");
        t.chart = chart_from_string(it->get<std::string>());
    }
    t.H = j.contains("H") ? parse_mat2(j["H"], path + "/H") : Mat2::zero();
    t.L = j.contains("L") ? parse_mat2(j["L"], path + "/L") : Mat2::zero();
    return t;
}

inline EquationTangent parse_eq_tangent(const json& j, const std::string& path, int N) {
    EquationTangent t = EquationTangent::zero(N);
    if (j.contains("h")) t.h = parse_real_array(j["h"], path + "/h", N + 1);
    if (j.contains("k")) t.k = parse_real_array(j["k"], path + "/k", N);
    if (j.contains("l")) t.l = parse_real_array(j["l"], path + "/l", N);
    return t;
}

inline FamilyFile parse_family(const json& j) {
    ProblemFile pf = parse_problem(j);
    const json& fj = require(j, "family", "");
    const json& tj = require(fj, "target", "/family");
    if (!tj.is_string()) throw InputError(ErrorCode::Parse, "/family/target", "expected a string");
    const auto [target, index] = parse_target(tj.get<std::string>(), pf.eq.N(), "/family/target");
    ProblemFamily fam{pf.eq, pf.bc.to_bc()};
    fam.target = target;
    fam.index = index;
    const json& rj = require(fj, "range", "/family");
    if (!rj.is_array() || rj.size() != 2) throw InputError(ErrorCode::Parse, "/family/range", "expected [lo, hi]");
    fam.lo = parse_real(rj[0], "/family/range/0");
    fam.hi = parse_real(rj[1], "/family/range/1");
    const json& sj = require(fj, "steps", "/family");
    if (!sj.is_number_integer() || sj.get<long long>() < 2)
        throw InputError(ErrorCode::Parse, "/family/steps", "expected an integer >= 2");
    fam.steps = static_cast<int>(sj.get<long long>());
    const json dir = fj.contains("direction") ? fj["direction"] : json::object();
    if (target == FamilyTarget::bc_chart_coord) {
        fam.bc_direction = parse_bc_tangent(dir, "/family/direction");
    } else if (target == FamilyTarget::eq_tangent) {
        fam.eq_direction = parse_eq_tangent(dir, "/family/direction", pf.eq.N());
    }
    try {
        if (target == FamilyTarget::separated_alpha || target == FamilyTarget::separated_beta)
            (void)separated_params(fam.base_bc);
        if (target == FamilyTarget::coupled_gamma) (void)coupled_params(fam.base_bc);
    } catch (const Error& e) {
        throw InputError(e.code(), "/family/target", "target does not fit the boundary condition: " + std::string(e.what()));
    }
    return {pf, fam, parse_complex(require(j, "start_lambda", ""), "/start_lambda")};
}

inline FamilyFile parse_family_text(const std::string& text) { return parse_family(parse_json_text(text)); }

// ---------------------------------------------------------------------------
// Output

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* to_string(BranchStatus s) {
    switch (s) {
        case BranchStatus::complete: return "complete";
        case BranchStatus::match_ambiguity: return "MatchAmbiguity";
        case BranchStatus::invalid_grid_point: return "InvalidGridPoint";
    }
    return "";
}

inline void write_branch_csv(std::ostream& os, const std::vector<Branch>& branches) {
    struct Row {
        double param;
        int id;
        const BranchSample* s;
    };
    std::vector<Row> rows;
    for (const auto& b : branches)
        for (const auto& s : b.samples) rows.push_back({s.param, b.id, &s});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.param != b.param) return a.param < b.param;
        return a.id < b.id;
    });
    os << "param,branch_id,lambda_re,lambda_im,analytic_mult,geometric_mult\n";
    for (const auto& r : rows) {
        os << fmt17(r.param) << ',' << r.id << ',' << fmt17(r.s->lambda.real()) << ',' << fmt17(r.s->lambda.imag()) << ','
           << r.s->analytic_mult << ',' << r.s->geometric_mult << '\n';
    }
    for (const auto& b : branches)
        if (b.status != BranchStatus::complete)
            os << "# branch " << b.id << ' ' << to_string(b.status) << ": " << b.diagnostic << '\n';
}

inline json spectrum_json(const SpectrumReport& rep) {
    json j;
    j["kind"] = rep.kind == SpectrumKind::finite ? "finite" : "whole_plane";
    j["degree"] = rep.char_poly.degree;
    json ev = json::array();
    for (const auto& e : rep.eigenvalues) {
        json x;
        x["value"] = complex_json(e.value);
        x["analytic_mult"] = e.analytic_mult;
        x["geometric_mult"] = e.geometric_mult;
        x["certified"] = e.certified;
        ev.push_back(x);
    }
    j["eigenvalues"] = ev;
    json cp = json::array();
    for (auto v : rep.char_poly.via_cofactor.coeffs()) cp.push_back(complex_json(v));
    j["char_poly"] = cp;
    j["complete"] = rep.complete;
    if (!rep.diagnostic.empty()) j["diagnostic"] = rep.diagnostic;
    return j;
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumReport& rep) {
    os << "lambda_re,lambda_im,analytic_mult,geometric_mult\n";
    for (const auto& e : rep.eigenvalues)
        os << fmt17(e.value.real()) << ',' << fmt17(e.value.imag()) << ',' << e.analytic_mult << ',' << e.geometric_mult
           << '\n';
}

}  // namespace dslp::io
