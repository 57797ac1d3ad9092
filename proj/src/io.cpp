#include "sls2/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sls2/errors.hpp"

using nlohmann::json;

namespace sls2 {

namespace {

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    return j.get<double>();
}

long integer_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
    return j.get<long>();
}

bool boolean_at(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError(path, "expected a boolean");
    return j.get<bool>();
}

cplx complex_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError(path, "expected a [re, im] pair");
    return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

Mat2 matrix_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError(path, "expected two rows");
    Mat2 a;
    for (int r = 0; r < 2; ++r) {
        const json& row = j[std::size_t(r)];
        const std::string rpath = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.size() != 2)
            throw ParseError(rpath, "expected two [re, im] entries");
        const cplx left = complex_at(row[0], rpath + "[0]");
        const cplx right = complex_at(row[1], rpath + "[1]");
        if (r == 0) {
            a.m00 = left;
            a.m01 = right;
        } else {
            a.m10 = left;
            a.m11 = right;
        }
    }
    return a;
}

void apply_options(const json& j, InputDocument& doc) {
    if (!j.is_object()) throw ParseError("options", "expected an object");
    const int member_count = doc.set.size();
    for (const auto& [key, value] : j.items()) {
        const std::string path = "options." + key;
        if (key == "tol") {
            const double t = number_at(value, path);
            if (!(t > 0)) throw ParseError(path, "must be positive");
            doc.set.tol.rel = t;
        } else if (key == "qmax") {
            const long q = integer_at(value, path);
            if (q < 1) throw ParseError(path, "must be at least 1");
            doc.options.escape.q_max = int(q);
        } else if (key == "depth") {
            const long d = integer_at(value, path);
            if (d < 1) throw ParseError(path, "must be at least 1");
            doc.options.enum_opts.depth = int(d);
        } else if (key == "band") {
            const double b = number_at(value, path);
            if (!(b > 0)) throw ParseError(path, "must be positive");
            doc.options.band = b;
        } else if (key == "structural_band") {
            const double b = number_at(value, path);
            if (!(b > 0)) throw ParseError(path, "must be positive");
            doc.options.structural_band = b;
        } else if (key == "budget") {
            const long b = integer_at(value, path);
            if (b < 1) throw ParseError(path, "must be at least 1");
            doc.options.enum_opts.budget = std::size_t(b);
        } else if (key == "kappa_resolution") {
            const double r = number_at(value, path);
            if (!(r > 0)) throw ParseError(path, "must be positive");
            doc.options.kappa.resolution = r;
        } else if (key == "search_cap") {
            const long c = integer_at(value, path);
            if (c < 1) throw ParseError(path, "must be at least 1");
            doc.options.escape.search_cap = c;
        } else if (key == "root_tol") {
            const double t = number_at(value, path);
            if (!(t > 0)) throw ParseError(path, "must be positive");
            doc.options.escape.root_tol = t;
        } else if (key == "assert_unit_jsr") {
            doc.options.assert_unit_jsr = boolean_at(value, path);
        } else if (key == "force_root") {
            if (!value.is_array()) throw ParseError(path, "expected an array");
            for (std::size_t k = 0; k < value.size(); ++k) {
                const json& item = value[k];
                const std::string ipath = path + "[" + std::to_string(k) + "]";
                if (!item.is_object() || !item.contains("index") || !item.contains("order"))
                    throw ParseError(ipath, "expected {\"index\": i, \"order\": q}");
                const long idx = integer_at(item["index"], ipath + ".index");
                const long ord = integer_at(item["order"], ipath + ".order");
                if (idx < 0 || idx >= member_count)
                    throw ParseError(ipath + ".index", "member index out of range");
                if (ord < 1) throw ParseError(ipath + ".order", "must be at least 1");
                doc.options.escape.forced_root[int(idx)] = int(ord);
            }
        } else if (key == "force_irrational") {
            if (!value.is_array()) throw ParseError(path, "expected an array");
            for (std::size_t k = 0; k < value.size(); ++k) {
                const std::string ipath = path + "[" + std::to_string(k) + "]";
                const long idx = integer_at(value[k], ipath);
                if (idx < 0 || idx >= member_count)
                    throw ParseError(ipath, "member index out of range");
                doc.options.escape.forced_irrational.insert(int(idx));
            }
        } else {
            throw ParseError(path, "unknown option");
        }
    }
}

json complex_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

std::string case_tag_name(CaseTag tag) {
    switch (tag) {
    case CaseTag::Jordan: return "jordan";
    case CaseTag::BothRoots: return "both_roots";
    case CaseTag::NeitherRoot: return "neither_root";
    case CaseTag::Mixed: return "mixed";
    }
    return "jordan";
}

json sequence_to_json(const SwitchingSequence& seq) {
    json j;
    switch (seq.kind()) {
    case SwitchingSequence::Kind::Constant:
        j["kind"] = "constant";
        j["index"] = seq.at(1);
        break;
    case SwitchingSequence::Kind::Periodic:
        j["kind"] = "periodic";
        j["word"] = seq.period_word();
        break;
    case SwitchingSequence::Kind::Greedy: {
        j["kind"] = "greedy";
        json log = json::array();
        for (const auto& [m, n] : seq.engine()->step_log())
            log.push_back(json::array({m, n}));
        j["step_log"] = log;
        break;
    }
    }
    return j;
}

} // namespace

InputDocument parse_input(const std::string& text, const std::string& path_label) {
    json raw;
    try {
        raw = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path_label, e.what());
    }
    if (!raw.is_object()) throw ParseError(path_label, "expected a top-level object");
    if (!raw.contains("matrices")) throw ParseError(path_label, "missing \"matrices\"");

    InputDocument doc;
    doc.raw = raw;

    const json& mats = raw["matrices"];
    if (!mats.is_array() || mats.empty())
        throw ParseError("matrices", "expected a non-empty array");
    for (std::size_t k = 0; k < mats.size(); ++k)
        doc.set.members.push_back(matrix_at(mats[k], "matrices[" + std::to_string(k) + "]"));

    for (const auto& [key, value] : raw.items()) {
        if (key == "matrices") continue;
        if (key == "options") {
            apply_options(value, doc);
            continue;
        }
        throw ParseError(key, "unknown top-level key");
    }
    return doc;
}

InputDocument load_input(std::istream& in, const std::string& path_label) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_input(buf.str(), path_label);
}

InputDocument load_input_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    return load_input(in, path);
}

json to_json(const Vec2& v) { return json::array({complex_json(v.x0), complex_json(v.x1)}); }

json to_json(const Mat2& a) {
    return json::array({json::array({complex_json(a.m00), complex_json(a.m01)}),
                        json::array({complex_json(a.m10), complex_json(a.m11)})});
}

json verdict_to_json(const Verdict& v) {
    json j;
    j["regime"] = to_string(v.regime);

    json jsr;
    jsr["lower"] = v.jsr.lower;
    jsr["upper"] = v.jsr.upper;
    jsr["depth"] = v.jsr.depth;
    jsr["exact"] = v.jsr.exact;
    jsr["witness_word"] = v.jsr.witness_word;
    j["jsr"] = jsr;

    json st;
    st["common_eigenvector"] =
        v.structure.common_eigenvector ? to_json(*v.structure.common_eigenvector) : json(nullptr);
    st["unit_det_indices"] = v.structure.unit_det_indices;
    st["unit_det_simdiag"] = v.structure.unit_det_simdiag;
    st["jordan_member"] =
        v.structure.jordan_member ? json(*v.structure.jordan_member) : json(nullptr);
    st["nondiag_pair"] = v.structure.nondiag_pair
                             ? json::array({v.structure.nondiag_pair->first,
                                            v.structure.nondiag_pair->second})
                             : json(nullptr);
    json angles = json::array();
    for (const auto& a : v.structure.eigen_angles) angles.push_back(json::array({a[0], a[1]}));
    st["eigen_angles"] = angles;
    st["det_modulus"] = v.structure.det_modulus;
    j["structure"] = st;

    j["structural_rho"] = v.structural_rho ? json(*v.structural_rho) : json(nullptr);

    if (v.kappa) {
        json k;
        k["kappa_lower"] = v.kappa->kappa_lower;
        k["kappa_grid"] = v.kappa->kappa_grid;
        k["bound"] = v.kappa->bound;
        k["grid_resolution"] = v.kappa->grid_resolution;
        k["lipschitz"] = v.kappa->lipschitz;
        k["argmin_u"] = to_json(v.kappa->argmin_u);
        k["argmin_v"] = to_json(v.kappa->argmin_v);
        j["kappa"] = k;
    }

    if (v.bdd) {
        json b;
        b["lambda"] = v.bdd->lambda;
        b["max_offdiag"] = v.bdd->bound_m;
        b["bound"] = v.bdd->bound;
        b["basis_note"] = v.bdd->basis_note;
        j["bdd"] = b;
    }
    if (v.bdd_basis) j["bdd_basis"] = to_json(*v.bdd_basis);

    if (v.witness) {
        json w;
        w["case"] = case_tag_name(v.witness->case_tag);
        w["pair_indices"] =
            json::array({v.witness->pair_indices.first, v.witness->pair_indices.second});
        w["v0"] = to_json(v.witness->v0);
        w["sequence"] = sequence_to_json(v.witness->sequence);
        w["description"] = v.witness->description;
        if (v.witness->predicted_period_product) {
            w["predicted_period_product"] = to_json(*v.witness->predicted_period_product);
            w["period_residual"] = v.witness->period_residual;
        }
        if (v.witness->normalization) {
            const NormalizedPair& np = *v.witness->normalization;
            json n;
            n["phi"] = np.phi;
            n["psi"] = np.psi;
            n["phase_first"] = complex_json(np.phase_first);
            n["phase_second"] = complex_json(np.phase_second);
            n["to_original"] = to_json(np.to_original);
            n["conditioning"] = np.conditioning;
            n["reproduction_residual"] = np.reproduction_residual;
            w["normalization"] = n;
        }
        j["witness"] = w;
    }

    if (v.ceiling) j["ceiling"] = json{{"slope", v.ceiling->slope}};

    j["margins"] = v.margins;
    return j;
}

json classify_report(const InputDocument& input, const Verdict& verdict) {
    json j;
    j["schema_version"] = 1;
    j["input"] = input.raw;
    j["verdict"] = verdict_to_json(verdict);
    return j;
}

void write_rates_csv(std::ostream& os, const RateSequence& rates, double rho_hat) {
    os << std::setprecision(17);
    os << "# rho_hat=" << rho_hat << "\n";
    os << "n,b_n,b_n_over_rho_n,b_n_over_n_rho_n\n";
    double rho_pow = 1.0;
    for (int n = 1; n <= rates.depth; ++n) {
        rho_pow *= rho_hat;
        const double bn = rates.values[std::size_t(n - 1)];
        os << n << "," << bn << "," << bn / rho_pow << "," << bn / (double(n) * rho_pow) << "\n";
    }
}

void write_escape_csv(std::ostream& os, const Trajectory& traj) {
    os << std::setprecision(17);
    os << "# checkpoints=";
    for (std::size_t k = 0; k < traj.checkpoints.size(); ++k) {
        if (k) os << " ";
        os << traj.checkpoints[k];
    }
    os << "\n";
    os << "n,norm,norm_over_n\n";
    for (std::size_t n = 1; n < traj.norms.size(); ++n)
        os << n << "," << traj.norms[n] << "," << traj.norms[n] / double(n) << "\n";
}

} // namespace sls2
