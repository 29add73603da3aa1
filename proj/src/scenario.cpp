#include "mofkit/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mofkit {

using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

namespace {

Matrix parse_matrix(const ojson& arr, int dim, const std::string& where) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != dim * dim)
        throw DimensionMismatch(where + ": expected " + std::to_string(dim * dim) +
                                " row-major entries");
    Matrix m(dim, dim);
    for (int t = 0; t < dim * dim; ++t) {
        const ojson& e = arr[t];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ParseError(where + ": entries must be [re, im] pairs");
        m(t / dim, t % dim) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    return m;
}

ojson matrix_to_json(const Matrix& m) {
    ojson arr = ojson::array();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            arr.push_back(ojson::array({m(r, c).real(), m(r, c).imag()}));
    return arr;
}

std::vector<int> parse_blocks(const ojson& arr, const std::string& where) {
    std::vector<int> blocks;
    for (const auto& b : arr) {
        if (!b.is_number_integer() || b.get<int>() < 1)
            throw ParseError(where + ": block sizes must be positive integers");
        blocks.push_back(b.get<int>());
    }
    return blocks;
}

TensorSignature parse_signature(const ojson& v, const std::string& where) {
    if (!v.is_array() || v.empty())
        throw ParseError(where + ": expected a block list or a list of factors");
    if (v[0].is_array()) {
        std::vector<AlgebraSignature> factors;
        for (const auto& f : v) {
            if (!f.is_array()) throw ParseError(where + ": mixed factor encoding");
            factors.emplace_back(parse_blocks(f, where));
        }
        return TensorSignature(std::move(factors));
    }
    return TensorSignature(AlgebraSignature(parse_blocks(v, where)));
}

AlgebraElement parse_element(const ojson& arr, const TensorSignature& sig,
                             const ToleranceConfig& tol, const std::string& where) {
    Matrix m = parse_matrix(arr, sig.dim(), where);
    try {
        return AlgebraElement(sig, std::move(m), tol);
    } catch (const StructureViolation& e) {
        throw StructureViolation(where + ": " + e.what());
    }
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
        throw SchemaVersionMismatch("missing schema_version");
    if (j["schema_version"].get<int>() != 1)
        throw SchemaVersionMismatch("unsupported schema_version " +
                                    j["schema_version"].dump());

    ToleranceConfig tol;
    if (j.contains("tolerances")) {
        const ojson& t = j["tolerances"];
        if (!t.is_object()) throw ParseError("tolerances must be an object");
        if (t.contains("tau_psd")) tol.tau_psd = t["tau_psd"].get<double>();
        if (t.contains("tau_inv")) tol.tau_inv = t["tau_inv"].get<double>();
        if (t.contains("tau_eq")) tol.tau_eq = t["tau_eq"].get<double>();
        if (t.contains("tau_struct")) tol.tau_struct = t["tau_struct"].get<double>();
    }

    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty())
        throw ParseError("points must be a non-empty array");
    std::vector<std::string> points;
    for (const auto& p : j["points"]) {
        if (!p.is_string()) throw ParseError("point ids must be strings");
        points.push_back(p.get<std::string>());
    }
    const int n = static_cast<int>(points.size());
    const auto index_of = [&](const std::string& id, const std::string& where) {
        for (int i = 0; i < n; ++i)
            if (points[i] == id) return i;
        throw StructureViolation(where + ": unknown point id " + id);
    };

    if (!j.contains("algebras") || !j["algebras"].is_object())
        throw ParseError("algebras must be an object keyed by point id");
    std::vector<TensorSignature> bundle;
    for (const auto& id : points) {
        if (!j["algebras"].contains(id))
            throw StructureViolation("missing algebra for point " + id);
        bundle.push_back(parse_signature(j["algebras"][id], "algebra of " + id));
    }

    if (!j.contains("D") || !j["D"].is_array())
        throw ParseError("D must be an array of pair entries");
    std::vector<std::optional<AlgebraElement>> d_upper(n * (n + 1) / 2);
    for (const auto& entry : j["D"]) {
        if (!entry.is_object() || !entry.contains("pair") || !entry.contains("matrix") ||
            !entry["pair"].is_array() || entry["pair"].size() != 2)
            throw ParseError("each D entry needs a pair and a matrix");
        const std::string a = entry["pair"][0].get<std::string>();
        const std::string b = entry["pair"][1].get<std::string>();
        const std::string where = "D(" + a + ", " + b + ")";
        const int i = index_of(a, where), k = index_of(b, where);
        if (i > k)
            throw StructureViolation(where + ": D is given for index-ordered pairs only");
        auto& slot = d_upper[MofSpace::upper_index(i, k, n)];
        if (slot) throw StructureViolation(where + ": duplicate entry");
        slot = parse_element(entry["matrix"],
                             TensorSignature::tensor(bundle[i], bundle[k]), tol, where);
    }
    std::vector<AlgebraElement> d;
    for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k) {
            auto& slot = d_upper[MofSpace::upper_index(i, k, n)];
            if (!slot)
                throw StructureViolation("missing D entry for pair (" + points[i] + ", " +
                                         points[k] + ")");
            d.push_back(std::move(*slot));
        }

    if (!j.contains("states") || !j["states"].is_object())
        throw ParseError("states must be an object keyed by point id");
    std::vector<State> states;
    for (int i = 0; i < n; ++i) {
        if (!j["states"].contains(points[i]))
            throw StructureViolation("missing state for point " + points[i]);
        const std::string where = "state of " + points[i];
        Matrix rho = parse_matrix(j["states"][points[i]], bundle[i].dim(), where);
        try {
            states.emplace_back(bundle[i], std::move(rho), tol);
        } catch (const Error& e) {
            throw StructureViolation(where + ": " + e.what());
        }
    }

    std::optional<int> base;
    if (j.contains("base_point")) {
        if (!j["base_point"].is_string()) throw ParseError("base_point must be a point id");
        base = index_of(j["base_point"].get<std::string>(), "base_point");
    }

    Scenario out;
    out.mof = std::make_shared<const MofSpace>(points, std::move(bundle), std::move(d),
                                               std::move(states), base, tol);

    if (j.contains("fields")) {
        if (!j["fields"].is_object()) throw ParseError("fields must be an object");
        for (const auto& [name, table] : j["fields"].items()) {
            if (!table.is_object())
                throw ParseError("field " + name + " must map point ids to matrices");
            std::vector<AlgebraElement> vals;
            for (int i = 0; i < n; ++i) {
                if (!table.contains(points[i]))
                    throw StructureViolation("field " + name + " misses point " + points[i]);
                vals.push_back(parse_element(table[points[i]], out.mof->fiber(i), tol,
                                             "field " + name + " at " + points[i]));
            }
            out.fields.emplace_back(name, OperatorField(out.mof, std::move(vals)));
        }
    }

    if (j.contains("covers")) {
        if (!j["covers"].is_array()) throw ParseError("covers must be an array");
        for (const auto& c : j["covers"]) {
            if (!c.is_object() || !c.contains("centers") || !c.contains("radius"))
                throw ParseError("each cover needs centers and a radius");
            CoverSpec spec;
            spec.radius = c["radius"].get<double>();
            for (const auto& id : c["centers"])
                spec.centers.push_back(index_of(id.get<std::string>(), "cover center"));
            out.covers.push_back(std::move(spec));
        }
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ParseError("seed must be an integer");
        out.seed = j["seed"].get<std::uint64_t>();
    }
    return out;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

std::string scenario_to_text(const MofSpace& m,
                             const std::vector<std::pair<std::string, OperatorField>>& fields,
                             const std::vector<CoverSpec>& covers,
                             std::optional<std::uint64_t> seed) {
    ojson j;
    j["schema_version"] = 1;
    j["points"] = m.point_ids();
    if (m.base_point()) j["base_point"] = m.point_ids()[*m.base_point()];

    ojson algebras = ojson::object();
    for (int i = 0; i < m.size(); ++i) {
        const TensorSignature& sig = m.fiber(i);
        if (sig.factor_count() == 1) {
            algebras[m.point_ids()[i]] = sig.factor(0).blocks();
        } else {
            ojson factors = ojson::array();
            for (int f = 0; f < sig.factor_count(); ++f)
                factors.push_back(sig.factor(f).blocks());
            algebras[m.point_ids()[i]] = std::move(factors);
        }
    }
    j["algebras"] = std::move(algebras);

    ojson dlist = ojson::array();
    for (int i = 0; i < m.size(); ++i)
        for (int k = i; k < m.size(); ++k) {
            ojson entry;
            entry["pair"] = ojson::array({m.point_ids()[i], m.point_ids()[k]});
            entry["matrix"] = matrix_to_json(m.d_stored(i, k).matrix());
            dlist.push_back(std::move(entry));
        }
    j["D"] = std::move(dlist);

    ojson states = ojson::object();
    for (int i = 0; i < m.size(); ++i)
        states[m.point_ids()[i]] = matrix_to_json(m.metric_state(i).density());
    j["states"] = std::move(states);

    if (!fields.empty()) {
        ojson fj = ojson::object();
        for (const auto& [name, f] : fields) {
            ojson table = ojson::object();
            for (int i = 0; i < m.size(); ++i)
                table[m.point_ids()[i]] = matrix_to_json(f.at(i).matrix());
            fj[name] = std::move(table);
        }
        j["fields"] = std::move(fj);
    }

    if (!covers.empty()) {
        ojson cj = ojson::array();
        for (const auto& c : covers) {
            ojson entry;
            ojson centers = ojson::array();
            for (int i : c.centers) centers.push_back(m.point_ids()[i]);
            entry["centers"] = std::move(centers);
            entry["radius"] = c.radius;
            cj.push_back(std::move(entry));
        }
        j["covers"] = std::move(cj);
    }

    j["tolerances"] = {{"tau_psd", m.tol().tau_psd},
                       {"tau_inv", m.tol().tau_inv},
                       {"tau_eq", m.tol().tau_eq},
                       {"tau_struct", m.tol().tau_struct}};
    if (seed) j["seed"] = *seed;
    return j.dump(2) + "\n";
}

std::string input_digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace mofkit
