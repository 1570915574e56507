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

// dslp command-line front end.
//
// Exit codes: 0 ok, 1 internal or filesystem error, 2 validation error, 3 oracle
// mismatch, 4 branch ambiguity.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dslp/dslp.hpp"

namespace {

using dslp::cplx;
using dslp::io::json;

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kValidation = 2;
constexpr int kOracleMismatch = 3;
constexpr int kAmbiguity = 4;

constexpr double kOracleTol = 1e-7;
constexpr double kFigureTol = 1e-9;

struct Globals {
    double tol = 1e-10;
    std::string format = "json";
};

dslp::Tolerances tolerances(const Globals& g) { return dslp::Tolerances{}.scaled(g.tol / 1e-10); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

int report(const dslp::Error& e) {
    std::cerr << "error[" << dslp::to_string(e.code()) << "]: " << e.what() << '\n';
    switch (e.code()) {
        case dslp::ErrorCode::MatchAmbiguity: return kAmbiguity;
        case dslp::ErrorCode::FormulaMismatch:
        case dslp::ErrorCode::RootFindFailure: return kInternal;
        default: return kValidation;
    }
}

cplx parse_lambda(const std::string& s) {
    const auto comma = s.find(',');
    try {
        std::size_t used = 0;
        const double re = std::stod(s.substr(0, comma), &used);
        if (used != s.substr(0, comma).size()) throw std::invalid_argument(s);
        double im = 0.0;
        if (comma != std::string::npos) {
            const std::string rest = s.substr(comma + 1);
            im = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument(s);
        }
        return {re, im};
    } catch (const std::exception&) {
        throw dslp::io::InputError(dslp::ErrorCode::Parse, "--lambda", "expected <re> or <re>,<im>");
    }
}

// ---------------------------------------------------------------------------

struct OracleDiff {
    double coeff = 0.0;
    double root = 0.0;
    bool mult_match = true;
};

OracleDiff compare_with_oracle(const dslp::SpectrumReport& rep, const dslp::SpectrumReport& orc) {
    OracleDiff d;
    if (rep.kind != orc.kind || rep.char_poly.degree != orc.char_poly.degree) {
        d.coeff = d.root = std::numeric_limits<double>::infinity();
        d.mult_match = false;
        return d;
    }
    if (rep.kind == dslp::SpectrumKind::whole_plane) return d;
    const auto a = dslp::unit_leading(rep.char_poly.via_cofactor, rep.char_poly.degree);
    const auto b = dslp::unit_leading(orc.char_poly.via_cofactor, orc.char_poly.degree);
    const double amax = std::max(1.0, a.max_abs());
    for (int k = 0; k <= rep.char_poly.degree; ++k) d.coeff = std::max(d.coeff, std::abs(a[k] - b[k]) / amax);
    // Multiset distance: every eigenvalue (with multiplicity) is matched to its nearest counterpart.
    std::vector<cplx> xs, ys;
    for (const auto& e : rep.eigenvalues) xs.insert(xs.end(), e.analytic_mult, e.value);
    for (const auto& e : orc.eigenvalues) ys.insert(ys.end(), e.analytic_mult, e.value);
    if (xs.size() != ys.size()) {
        d.root = std::numeric_limits<double>::infinity();
        d.mult_match = false;
        return d;
    }
    std::vector<bool> used(ys.size(), false);
    for (auto x : xs) {
        std::size_t best = ys.size();
        for (std::size_t j = 0; j < ys.size(); ++j)
            if (!used[j] && (best == ys.size() || std::abs(ys[j] - x) < std::abs(ys[best] - x))) best = j;
        used[best] = true;
        d.root = std::max(d.root, std::abs(ys[best] - x) / std::max(1.0, std::abs(x)));
    }
    if (rep.eigenvalues.size() != orc.eigenvalues.size()) d.mult_match = false;
    return d;
}

json oracle_json(const OracleDiff& d) {
    json j;
    j["max_coeff_discrepancy"] = d.coeff;
    j["max_root_discrepancy"] = d.root;
    j["multiplicities_match"] = d.mult_match;
    j["tolerance"] = kOracleTol;
    j["pass"] = d.coeff <= kOracleTol && d.root <= kOracleTol && d.mult_match;
    return j;
}

int cmd_eigs(const Globals& g, const std::string& file, bool oracle) {
    const auto tol = tolerances(g);
    const auto pf = dslp::io::parse_problem_text(read_file(file));
    const auto p = pf.problem();
    const auto rep = dslp::eigenvalues(p.eq, p.bc, tol);
    int code = rep.complete ? kOk : kInternal;
    json oj;
    if (oracle) {
        const auto d = compare_with_oracle(rep, dslp::pencil_oracle(p.eq, p.bc, tol));
        oj = oracle_json(d);
        if (!oj["pass"].get<bool>()) code = kOracleMismatch;
    }
    if (g.format == "csv") {
        dslp::io::write_spectrum_csv(std::cout, rep);
        if (oracle) std::cerr << oj.dump() << '\n';
    } else {
        json j = dslp::io::spectrum_json(rep);
        if (oracle) j["oracle"] = oj;
        std::cout << j.dump(2) << '\n';
    }
    if (!rep.complete) std::cerr << "error[RootFindFailure]: " << rep.diagnostic << '\n';
    return code;
}

int cmd_oracle_compare(const Globals& g, const std::string& file) {
    const auto tol = tolerances(g);
    const auto p = dslp::io::parse_problem_text(read_file(file)).problem();
    const auto rep = dslp::eigenvalues(p.eq, p.bc, tol);
    const auto orc = dslp::pencil_oracle(p.eq, p.bc, tol);
    const auto d = compare_with_oracle(rep, orc);
    json j = oracle_json(d);
    j["transfer"] = dslp::io::spectrum_json(rep);
    j["pencil"] = dslp::io::spectrum_json(orc);
    std::cout << j.dump(2) << '\n';
    return j["pass"].get<bool>() ? kOk : kOracleMismatch;
}

int cmd_classify(const Globals& g, const std::string& file) {
    const auto tol = tolerances(g);
    const auto pf = dslp::io::parse_problem_text(read_file(file));
    const auto bc = pf.bc.to_bc();
    json j;
    const auto cls = dslp::classify(bc, tol);
    j["class"] = cls == dslp::BCClass::degenerated ? "degenerated" : cls == dslp::BCClass::separated ? "separated" : "coupled";
    j["self_adjoint"] = dslp::is_self_adjoint(bc, tol);
    j["self_adjoint_problem"] = dslp::is_self_adjoint_problem(pf.eq, bc, tol);
    const auto pt = dslp::normalize_to_chart(bc, tol);
    json chart;
    chart["id"] = dslp::to_string(pt.chart);
    json coords = json::array();
    for (auto c : pt.coords) coords.push_back(dslp::io::complex_json(c));
    chart["coords"] = coords;
    j["chart"] = chart;
    if (dslp::is_self_adjoint(bc, tol)) {
        const auto sp = dslp::normalize_to_self_adjoint_chart(bc, tol);
        json o;
        o["id"] = dslp::to_string(sp.chart);
        json oc = json::array();
        for (auto c : sp.coords) oc.push_back(dslp::io::complex_json(c));
        o["coords"] = oc;
        j["self_adjoint_chart"] = o;
        if (cls == dslp::BCClass::separated) {
            const auto sep = dslp::separated_params(bc, tol);
            j["separated"] = {{"alpha", sep.alpha}, {"beta", sep.beta}};
        } else if (cls == dslp::BCClass::coupled) {
            const auto cp = dslp::coupled_params(bc, tol);
            j["coupled"] = {{"gamma", cp.gamma}, {"K", dslp::io::mat2_json(cp.K, true)}};
        }
    }
    if (pf.eq.eq_class() == dslp::EquationClass::real_positive_weight && dslp::is_self_adjoint(bc, tol)) {
        const auto c = dslp::self_adjoint_count(pf.eq, bc, tol);
        j["self_adjoint_count"] = {{"r", c.r}, {"kappa", dslp::io::complex_json(c.kappa)}, {"expected_total", c.expected_total}};
    }
    std::cout << j.dump(2) << '\n';
    return kOk;
}

// Tangent payloads:
//   {"kind": "bc", "chart": "O14", "H": [[..]], "L": [[..]]}
//   {"kind": "bc_any", "H": [[..]], "L": [[..]]}
//   {"kind": "separated"}
//   {"kind": "equation", "h": [..], "k": [..], "l": [..]}
int cmd_derivative(const Globals& g, const std::string& file, const std::string& lambda_text,
                   const std::string& tangent_text) {
    const auto tol = tolerances(g);
    const auto pf = dslp::io::parse_problem_text(read_file(file));
    const auto p = pf.problem();
    const cplx lambda = parse_lambda(lambda_text);
    const json t = dslp::io::parse_json_text(tangent_text);
    const json& kj = dslp::io::require(t, "kind", "--tangent");
    const std::string kind = kj.is_string() ? kj.get<std::string>() : "";
    json out;
    out["lambda"] = dslp::io::complex_json(lambda);
    if (kind == "bc") {
        const auto tan = dslp::io::parse_bc_tangent(t, "--tangent");
        if (tan.chart && dslp::is_self_adjoint_chart(*tan.chart))
            out["value"] = dslp::self_adjoint_bc_derivative(p.eq, p.bc, lambda, tan, tol);
        else
            out["value"] = dslp::io::complex_json(dslp::bc_derivative(p.eq, p.bc, lambda, tan, tol));
    } else if (kind == "bc_any") {
        const auto tan = dslp::io::parse_bc_tangent(t, "--tangent");
        out["value"] = dslp::io::complex_json(dslp::bc_derivative_any_representative(p.eq, p.bc, lambda, tan.H, tan.L, tol));
    } else if (kind == "separated") {
        const auto d = dslp::separated_derivatives(p.eq, p.bc, lambda, tol);
        out["d_alpha"] = d.d_alpha;
        out["d_beta"] = d.d_beta;
    } else if (kind == "equation") {
        const auto d = dslp::io::parse_eq_tangent(t, "--tangent", p.eq.N());
        out["value"] = dslp::equation_derivative(p.eq, p.bc, lambda, d, tol);
    } else {
        throw dslp::io::InputError(dslp::ErrorCode::Parse, "--tangent/kind",
                                   "expected one of bc, bc_any, separated, equation");
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
}

int cmd_branch(const Globals& g, const std::string& file, const std::string& out_path) {
    const auto tol = tolerances(g);
    const auto ff = dslp::io::parse_family_text(read_file(file));
    const auto branches = dslp::branch_trace(ff.family, ff.start_lambda, tol);
    std::ostringstream csv;
    dslp::io::write_branch_csv(csv, branches);
    write_file(out_path, csv.str());
    int code = kOk;
    for (const auto& b : branches) {
        if (b.status == dslp::BranchStatus::match_ambiguity) {
            std::cerr << "error[MatchAmbiguity]: branch " << b.id << ": " << b.diagnostic << '\n';
            code = kAmbiguity;
        } else if (b.status == dslp::BranchStatus::invalid_grid_point) {
            std::cerr << "error[InvalidGridPoint]: branch " << b.id << ": " << b.diagnostic << '\n';
            if (code == kOk) code = kValidation;
        }
    }
    return code;
}

int cmd_examples(const Globals& g, const std::string& out_dir) {
    const auto tol = tolerances(g);
    std::filesystem::create_directories(out_dir);
    int code = kOk;
    for (const auto& fig : dslp::fixtures::figure_set()) {
        std::vector<dslp::Branch> all;
        json ref;
        ref["figure"] = fig.name;
        ref["caption"] = fig.caption;
        json rows = json::array();
        double max_err = 0.0;
        bool complete = true;
        for (const auto& tr : fig.traces) {
            const auto p0 = tr.family.at(tr.family.lo);
            const auto rep = dslp::eigenvalues(p0.eq, p0.bc, tol);
            const cplx start = rep.eigenvalues.at(tr.start_rank).value;
            auto branches = dslp::branch_trace(tr.family, start, tol);
            for (auto& b : branches) {
                b.id = tr.branch_id;
                if (b.status != dslp::BranchStatus::complete) complete = false;
                for (const auto& s : b.samples) {
                    const double r = tr.reference(s.param);
                    const double err = std::abs(s.lambda - r);
                    max_err = std::max(max_err, err);
                    rows.push_back({{"param", s.param}, {"branch_id", b.id}, {"reference", r}});
                }
                all.push_back(std::move(b));
            }
        }
        std::stable_sort(rows.begin(), rows.end(), [](const json& a, const json& b) {
            if (a["param"].get<double>() != b["param"].get<double>())
                return a["param"].get<double>() < b["param"].get<double>();
            return a["branch_id"].get<int>() < b["branch_id"].get<int>();
        });
        ref["tolerance"] = kFigureTol;
        ref["rows"] = rows;
        std::ostringstream csv;
        dslp::io::write_branch_csv(csv, all);
        const std::filesystem::path dir(out_dir);
        write_file(dir / (fig.name + ".csv"), csv.str());
        write_file(dir / (fig.name + ".reference.json"), ref.dump(2) + "\n");
        const bool pass = complete && max_err <= kFigureTol;
        std::cout << (pass ? "PASS " : "FAIL ") << fig.name << " max_abs_err=" << dslp::io::fmt17(max_err) << '\n';
        if (!pass) code = complete ? kOracleMismatch : kAmbiguity;
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Sturm-Liouville spectra, eigenvalue branches and derivatives"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--tol", g.tol, "Base tolerance; every default tolerance is scaled by tol/1e-10")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    std::string file, out, lambda, tangent, out_dir;
    bool oracle = false;

    auto* eigs = app.add_subcommand("eigs", "Eigenvalues with analytic and geometric multiplicities");
    eigs->add_option("file", file, "Problem file")->required();
    eigs->add_flag("--oracle", oracle, "Cross-check against the linear pencil determinant");

    auto* branch = app.add_subcommand("branch", "Trace eigenvalue branches over a family");
    branch->add_option("file", file, "Family file")->required();
    branch->add_option("--out", out, "CSV output path")->required();

    auto* classify = app.add_subcommand("classify", "Classify the boundary condition");
    classify->add_option("file", file, "Problem file")->required();

    auto* derivative = app.add_subcommand("derivative", "Eigenvalue derivative along a tangent");
    derivative->add_option("file", file, "Problem file")->required();
    derivative->add_option("--lambda", lambda, "Eigenvalue as <re> or <re>,<im>")->required();
    derivative->add_option("--tangent", tangent, "Tangent as inline JSON")->required();

    auto* examples = app.add_subcommand("examples", "Regenerate the figure data");
    examples->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* oracle_cmd = app.add_subcommand("oracle-compare", "Compare transfer and pencil spectra");
    oracle_cmd->add_option("file", file, "Problem file")->required();

    for (auto* sub : {eigs, branch, classify, derivative, examples, oracle_cmd}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*eigs) return cmd_eigs(g, file, oracle);
        if (*branch) return cmd_branch(g, file, out);
        if (*classify) return cmd_classify(g, file);
        if (*derivative) return cmd_derivative(g, file, lambda, tangent);
        if (*examples) return cmd_examples(g, out_dir);
        if (*oracle_cmd) return cmd_oracle_compare(g, file);
    } catch (const dslp::Error& e) {
        return report(e);
    } catch (const std::exception& e) {
        std::cerr << "error[Internal]: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}
