#include "mofkit/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mofkit/continuous_field.hpp"
#include "mofkit/prob_metric.hpp"
#include "mofkit/random.hpp"
#include "mofkit/scenario.hpp"

namespace mofkit::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct GlobalOpts {
    std::string scenario_path;
    std::string report = "text";
    double tol = 0.0; // tau_eq override when positive
    int jobs = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int classify(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const SchemaVersionMismatch*>(&e) ||
        dynamic_cast<const DimensionMismatch*>(&e) ||
        dynamic_cast<const StructureViolation*>(&e) ||
        dynamic_cast<const BundleMismatch*>(&e) || dynamic_cast<const InvalidPartition*>(&e) ||
        dynamic_cast<const PartitionInvalid*>(&e) || dynamic_cast<const TooFewPoints*>(&e) ||
        dynamic_cast<const NoBasePoint*>(&e))
        return 1;
    return 2;
}

Scenario load(const GlobalOpts& g, std::string& digest) {
    if (g.scenario_path.empty()) throw ParseError("--scenario is required");
    const std::string bytes = read_file(g.scenario_path);
    digest = input_digest(bytes);
    Scenario s = parse_scenario(bytes);
    if (g.seed_set) s.seed = g.seed;
    if (g.tol <= 0.0) return s;

    // rebuild the space and its fields under the overridden tolerance
    ToleranceConfig t = s.mof->tol();
    t.tau_eq = g.tol;
    const MofSpace& m = *s.mof;
    std::vector<TensorSignature> bundle;
    std::vector<AlgebraElement> d;
    std::vector<State> states;
    for (int i = 0; i < m.size(); ++i) {
        bundle.push_back(m.fiber(i));
        states.push_back(m.metric_state(i));
        for (int j = i; j < m.size(); ++j) d.push_back(m.d_stored(i, j));
    }
    Scenario out;
    out.mof = std::make_shared<const MofSpace>(m.point_ids(), std::move(bundle), std::move(d),
                                               std::move(states), m.base_point(), t);
    for (const auto& [name, f] : s.fields) {
        std::vector<AlgebraElement> vals;
        for (int x = 0; x < m.size(); ++x) vals.push_back(f.at(x));
        out.fields.emplace_back(name, OperatorField(out.mof, std::move(vals)));
    }
    out.covers = s.covers;
    out.seed = s.seed;
    return out;
}

void put_check(ojson& dst, std::vector<std::string>& lines, const std::string& label,
               const AxiomCheck& c, const std::vector<std::string>& ids) {
    ojson j;
    j["pass"] = c.pass;
    j["violation"] = c.violation;
    ojson where = ojson::array();
    for (int t : c.where)
        if (t >= 0 && t < static_cast<int>(ids.size())) where.push_back(ids[t]);
    j["where"] = std::move(where);
    j["detail"] = c.detail;
    dst[label] = std::move(j);
    lines.push_back(label + (c.pass ? ": PASS" : ": FAIL") + " (violation " +
                    fmt(c.violation) + ")");
}

int emit(const GlobalOpts& g, const std::string& command, const std::string& digest,
         const ojson& results, const std::vector<std::string>& lines, bool ok) {
    std::string text;
    if (g.report == "json") {
        ojson env;
        env["tool"] = "mofkit";
        env["version"] = kVersion;
        env["command"] = command;
        env["input_digest"] = digest;
        env["results"] = results;
        env["pass"] = ok;
        text = env.dump(2) + "\n";
    } else {
        std::ostringstream os;
        for (const auto& l : lines) os << l << "\n";
        os << "overall: " << (ok ? "PASS" : "FAIL") << "\n";
        text = os.str();
    }
    if (!g.out.empty())
        write_file(g.out, text);
    else
        std::cout << text;
    return ok ? 0 : 2;
}

ojson lip_json(const LipReport& r, const std::vector<std::string>& ids) {
    ojson j;
    j["seminorm"] = r.seminorm;
    j["sup_norm"] = r.sup_norm;
    j["lip"] = r.lip;
    j["lip_prime"] = r.lip_prime;
    j["commutes"] = r.commutes;
    j["worst_commutator"] = r.worst_commutator;
    if (r.arg_x >= 0) j["argmax"] = ojson::array({ids[r.arg_x], ids[r.arg_y]});
    return j;
}

bool verify_gate(const MofPtr& m, int jobs, ojson& results, std::vector<std::string>& lines) {
    const AxiomReport rep = verify_mof(*m, jobs);
    ojson ax = ojson::object();
    put_check(ax, lines, "diagonal_state_zero", rep.diagonal_state_zero, m->point_ids());
    put_check(ax, lines, "offdiagonal_positive", rep.offdiagonal_positive, m->point_ids());
    put_check(ax, lines, "flip_symmetry", rep.flip_symmetry, m->point_ids());
    put_check(ax, lines, "tensor_triangle", rep.tensor_triangle, m->point_ids());
    results["axioms"] = std::move(ax);
    return rep.pass();
}

int cmd_validate(const GlobalOpts& g) {
    std::string digest;
    const Scenario s = load(g, digest);
    const MofSpace& m = *s.mof;
    ojson results;
    std::vector<std::string> lines;
    bool ok = verify_gate(s.mof, g.jobs, results, lines);

    bool metrics_ok = true;
    try {
        const MetricTable dmu = induced_metric_states(m);
        const MetricTable dnorm = induced_metric_norm(m);
        double excess = 0.0;
        for (int i = 0; i < m.size(); ++i)
            for (int j = 0; j < m.size(); ++j)
                excess = std::max(excess, (dmu(i, j) - dnorm(i, j)) / (1.0 + dnorm(i, j)));
        const bool order_ok = excess <= 1e-10;
        metrics_ok = order_ok;
        results["induced_metrics"] = {{"state_metric_below_norm_metric", order_ok},
                                      {"worst_excess", excess}};
        lines.push_back(std::string("induced metric order") + (order_ok ? ": PASS" : ": FAIL") +
                        " (excess " + fmt(excess) + ")");
    } catch (const MetricAxiomViolation& e) {
        metrics_ok = false;
        results["induced_metrics"] = {{"error", e.what()}};
        lines.push_back(std::string("induced metrics: FAIL (") + e.what() + ")");
    }
    ok = ok && metrics_ok;

    if (ok) {
        const PmReport pm = verify_pm(prob_metric(m), m.tol());
        ojson pj = ojson::object();
        put_check(pj, lines, "diagonal_delta_zero", pm.diagonal_delta_zero, m.point_ids());
        put_check(pj, lines, "offdiagonal_spread", pm.offdiagonal_spread, m.point_ids());
        put_check(pj, lines, "swap_symmetry", pm.swap_symmetry, m.point_ids());
        put_check(pj, lines, "sup_triangle", pm.sup_triangle, m.point_ids());
        results["prob_metric"] = std::move(pj);
        ok = pm.pass();
    } else {
        results["prob_metric"] = "skipped: mof axioms failed";
        lines.push_back("prob metric axioms: SKIPPED (mof axioms failed)");
    }
    return emit(g, "validate", digest, results, lines, ok);
}

int cmd_lipnorm(const GlobalOpts& g) {
    std::string digest;
    const Scenario s = load(g, digest);
    if (s.fields.empty()) throw ParseError("scenario has no fields to measure");
    ojson results;
    std::vector<std::string> lines;
    if (!verify_gate(s.mof, g.jobs, results, lines))
        return emit(g, "lipnorm", digest, results, lines, false);

    const PairCache cache(s.mof);
    ojson fj = ojson::object();
    for (const auto& [name, f] : s.fields) {
        Membership mem = membership(f);
        ojson j = lip_json(mem.report, s.mof->point_ids());
        j["in_l"] = mem.in_l;
        j["in_lip"] = mem.in_lip;
        if (mem.in_l0) j["in_l0"] = *mem.in_l0;
        if (mem.in_lip0) j["in_lip0"] = *mem.in_lip0;
        fj[name] = std::move(j);
        lines.push_back("field " + name + ": seminorm " + fmt(mem.report.seminorm) +
                        ", sup " + fmt(mem.report.sup_norm) + ", lip " + fmt(mem.report.lip) +
                        ", commutes " + (mem.report.commutes ? "yes" : "no"));
    }
    results["fields"] = std::move(fj);
    return emit(g, "lipnorm", digest, results, lines, true);
}

int cmd_probmetric(const GlobalOpts& g) {
    std::string digest;
    const Scenario s = load(g, digest);
    const MofSpace& m = *s.mof;
    ojson results;
    std::vector<std::string> lines;
    if (!verify_gate(s.mof, g.jobs, results, lines))
        return emit(g, "probmetric", digest, results, lines, false);

    const ProbMetric pm = prob_metric(m);
    ojson measures = ojson::array();
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) {
            ojson entry;
            entry["pair"] = ojson::array({m.point_ids()[i], m.point_ids()[j]});
            ojson atoms = ojson::array();
            for (const auto& a : pm.at(i, j).atoms())
                atoms.push_back(ojson::array({a.value, a.weight}));
            entry["atoms"] = std::move(atoms);
            measures.push_back(std::move(entry));
        }
    results["measures"] = std::move(measures);

    const PmReport rep = verify_pm(pm, m.tol());
    ojson pj = ojson::object();
    put_check(pj, lines, "diagonal_delta_zero", rep.diagonal_delta_zero, m.point_ids());
    put_check(pj, lines, "offdiagonal_spread", rep.offdiagonal_spread, m.point_ids());
    put_check(pj, lines, "swap_symmetry", rep.swap_symmetry, m.point_ids());
    put_check(pj, lines, "sup_triangle", rep.sup_triangle, m.point_ids());
    results["axioms"] = std::move(pj);

    const MetricTable dmu = induced_metric_states(m);
    double mean_gap = 0.0;
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j)
            mean_gap = std::max(mean_gap, std::abs(pm.at(i, j).mean() - dmu(i, j)) /
                                              (1.0 + dmu(i, j)));
    const bool mean_ok = mean_gap <= m.tol().tau_eq;
    results["mean_equals_state_metric"] = {{"pass", mean_ok}, {"worst_gap", mean_gap}};
    lines.push_back(std::string("first moment vs state metric") +
                    (mean_ok ? ": PASS" : ": FAIL") + " (gap " + fmt(mean_gap) + ")");

    return emit(g, "probmetric", digest, results, lines, rep.pass() && mean_ok);
}

int cmd_deleeuw(const GlobalOpts& g) {
    std::string digest;
    const Scenario s = load(g, digest);
    if (s.fields.empty()) throw ParseError("scenario has no fields to map");
    const MofSpace& m = *s.mof;
    ojson results;
    std::vector<std::string> lines;
    if (!verify_gate(s.mof, g.jobs, results, lines))
        return emit(g, "deleeuw", digest, results, lines, false);

    const PairCache cache(s.mof);
    std::vector<AlgebraElement> inv;
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) {
            if (i == j) continue;
            inv.push_back(psd_power(m.d(i, j), -1.0, m.tol()));
        }
    const BiField witness(s.mof, std::move(inv));

    bool ok = true;
    ojson fj = ojson::object();
    for (const auto& [name, f] : s.fields) {
        const LipReport rep = lip_seminorm(f, cache);
        const BiField phi = de_leeuw(f, cache);
        const double gap = std::abs(phi.sup_norm() - rep.seminorm);
        const bool iso_ok = gap <= 1e-10 * (1.0 + rep.seminorm);
        ojson j;
        j["seminorm"] = rep.seminorm;
        j["phi_sup_norm"] = phi.sup_norm();
        j["isometry_gap"] = gap;
        j["isometry_ok"] = iso_ok;
        ok = ok && iso_ok;
        std::string inner = "skipped (field does not commute with D)";
        if (rep.commutes) {
            const BiField rhs = bimodule_act(f, witness, Side::left) -
                                bimodule_act(f, witness, Side::right);
            const double res = (phi - rhs).sup_norm();
            const bool inner_ok = res <= m.tol().tau_eq * (1.0 + rep.sup_norm);
            j["inner_residual"] = res;
            j["inner_ok"] = inner_ok;
            ok = ok && inner_ok;
            inner = "inner residual " + fmt(res);
        } else {
            j["inner_residual"] = nullptr;
        }
        fj[name] = std::move(j);
        lines.push_back("field " + name + ": isometry gap " + fmt(gap) + ", " + inner);
    }
    results["fields"] = std::move(fj);

    ojson deriv = ojson::array();
    double worst = 0.0;
    for (const auto& [fn, f] : s.fields) {
        if (!lip_seminorm(f, cache).commutes) continue;
        for (const auto& [gn, h] : s.fields) {
            if (!lip_seminorm(h, cache).commutes) continue;
            const double res = derivation_residual(f, h, cache);
            const double scale = 1.0 + f.sup_norm() * h.sup_norm();
            deriv.push_back({{"pair", ojson::array({fn, gn})}, {"residual", res}});
            worst = std::max(worst, res / scale);
        }
    }
    const bool deriv_ok = worst <= m.tol().tau_eq;
    ok = ok && deriv_ok;
    results["derivation"] = std::move(deriv);
    results["derivation_worst_relative"] = worst;
    lines.push_back(std::string("derivation identity") + (deriv_ok ? ": PASS" : ": FAIL") +
                    " (worst " + fmt(worst) + ")");
    return emit(g, "deleeuw", digest, results, lines, ok);
}

int cmd_dixmier(const GlobalOpts& g, double eps) {
    std::string digest;
    const Scenario s = load(g, digest);
    const MofSpace& m = *s.mof;
    ojson results;
    std::vector<std::string> lines;
    if (!verify_gate(s.mof, g.jobs, results, lines))
        return emit(g, "dixmier", digest, results, lines, false);

    std::vector<OperatorField> gens;
    for (const auto& [name, f] : s.fields) gens.push_back(f);
    if (gens.empty()) {
        std::vector<AlgebraElement> vals;
        for (int x = 0; x < m.size(); ++x) vals.push_back(AlgebraElement::unit(m.fiber(x)));
        gens.emplace_back(s.mof, std::move(vals));
    }

    FieldAlgebraProbe probe =
        s.covers.empty()
            ? dixmier_probe(s.mof, gens, eps)
            : dixmier_probe(s.mof, gens, eps, gens,
                            ball_cover(s.mof, s.covers[0].centers, s.covers[0].radius));

    bool ok = probe.pass();
    results["eps"] = probe.eps;
    results["words_checked"] = probe.words_checked;
    results["unit_member"] = probe.unit_member;
    results["norm_continuity"] = probe.norm_continuity;
    results["worst_continuity_excess"] = probe.worst_continuity_excess;
    results["local_to_global"] = probe.local_to_global;
    ojson pj = ojson::array();
    for (const auto& po : probe.probes)
        pj.push_back({{"approximable", po.approximable},
                      {"member", po.member},
                      {"consistent", po.consistent},
                      {"local_defect", po.local_defect},
                      {"glue_defect", po.glue_defect}});
    results["probes"] = std::move(pj);
    lines.push_back(std::string("unit membership") + (probe.unit_member ? ": PASS" : ": FAIL"));
    lines.push_back(std::string("norm continuity over ") + std::to_string(probe.words_checked) +
                    " words" + (probe.norm_continuity ? ": PASS" : ": FAIL"));
    lines.push_back(std::string("local approximation") +
                    (probe.local_to_global ? ": PASS" : ": FAIL"));

    ojson cert;
    try {
        const NontrivialityCertificate c = nontriviality_certificate(s.mof);
        cert["witness_point"] = m.point_ids()[c.witness.point];
        cert["member"] = c.member;
        cert["scalar_distance"] = c.distance;
        ok = ok && c.member;
        lines.push_back("non-scalar member: witness at " + m.point_ids()[c.witness.point] +
                        ", scalar distance " + fmt(c.distance));
    } catch (const AllScalar&) {
        cert["outcome"] = "scalar instance, every member is scalar valued";
        lines.push_back("non-scalar member: not applicable (scalar instance)");
    } catch (const NotCentral&) {
        cert["outcome"] = "not central, witness search not applicable";
        lines.push_back("non-scalar member: not applicable (non-central instance)");
    }
    results["nontriviality"] = std::move(cert);
    return emit(g, "dixmier", digest, results, lines, ok);
}

int cmd_example(const GlobalOpts& g, const std::string& kind, int n, int mesh) {
    const std::uint64_t seed = g.seed_set ? g.seed : 0;
    Rng rng(seed);
    MofPtr mof;
    if (kind == "quotient") {
        if (n < 0) {
            Eigen::MatrixXd rho(3, 3);
            rho << 0, 1, 2, 1, 0, 1, 2, 1, 0;
            mof = std::make_shared<const MofSpace>(
                build_quotient_example(MetricTable(rho), {{0, 1}, {2}}));
        } else {
            if (n < 1) throw ParseError("--n must be at least 1");
            const MetricTable rho(random_metric(n, rng));
            std::vector<std::vector<int>> classes;
            for (int t = 0; t < n; t += 2) {
                classes.push_back(t + 1 < n ? std::vector<int>{t, t + 1}
                                            : std::vector<int>{t});
            }
            mof = std::make_shared<const MofSpace>(build_quotient_example(rho, classes));
        }
    } else if (kind == "staircase") {
        if (n < 0) n = 3;
        if (n < 1 || mesh < 1) throw ParseError("staircase needs --n >= 1 and --mesh >= 1");
        mof = std::make_shared<const MofSpace>(build_staircase_example(n, mesh));
    } else if (kind == "scalar") {
        if (n < 0) n = 4;
        if (n < 1) throw ParseError("--n must be at least 1");
        const MetricTable d(random_metric(n, rng));
        const std::vector<std::vector<int>> shapes = {{1}, {2}, {1, 1}};
        std::vector<std::string> ids;
        std::vector<TensorSignature> bundle;
        std::vector<State> states;
        for (int i = 0; i < n; ++i) {
            ids.push_back("p" + std::to_string(i));
            bundle.emplace_back(AlgebraSignature(shapes[i % shapes.size()]));
            states.push_back(State::maximally_mixed(bundle.back()));
        }
        mof = std::make_shared<const MofSpace>(scalar_mof(ids, bundle, d, states));
    } else {
        throw ParseError("unknown example kind " + kind);
    }

    std::vector<std::pair<std::string, OperatorField>> fields;
    fields.emplace_back("probe0", random_diagonal_field(mof, rng));
    std::vector<CoverSpec> covers;
    const double diam = induced_metric_norm(*mof).values().maxCoeff();
    if (diam > 0.0) {
        CoverSpec spec;
        for (int x = 0; x < mof->size(); ++x) spec.centers.push_back(x);
        spec.radius = diam / 2.0;
        covers.push_back(std::move(spec));
    }
    const std::string text = scenario_to_text(*mof, fields, covers, seed);
    if (!g.out.empty())
        write_file(g.out, text);
    else
        std::cout << text;
    return 0;
}

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"metric operator field toolkit"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--scenario", g.scenario_path, "scenario file to analyze");
    app.add_option("--report", g.report, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--tol", g.tol, "override the comparison tolerance tau_eq");
    app.add_option("--jobs", g.jobs, "worker threads for the axiom sweep")
        ->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", g.seed, "seed for generated data");
    app.add_option("--out", g.out, "write the report or generated scenario here");

    auto* validate = app.add_subcommand("validate", "verify mof and derived metric axioms");
    auto* lipnorm = app.add_subcommand("lipnorm", "Lipschitz reports for the named fields");
    auto* probmetric = app.add_subcommand("probmetric", "spectral measure table and axioms");
    auto* deleeuw = app.add_subcommand("deleeuw", "derivation and inner-witness residuals");
    double eps = 1e-6;
    auto* dixmier = app.add_subcommand("dixmier", "continuous-field probe");
    dixmier->add_option("--eps", eps, "closure tolerance for local approximation");
    int n = -1, mesh = 2;
    auto* example = app.add_subcommand("example", "write a generated scenario");
    std::string kind;
    example->add_option("kind", kind, "quotient, staircase or scalar")
        ->required()
        ->check(CLI::IsMember({"quotient", "staircase", "scalar"}));
    example->add_option("--n", n, "size parameter");
    example->add_option("--mesh", mesh, "points per class segment (staircase)");
    for (auto* sub : {validate, lipnorm, probmetric, deleeuw, dixmier, example})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (validate->parsed()) return cmd_validate(g);
        if (lipnorm->parsed()) return cmd_lipnorm(g);
        if (probmetric->parsed()) return cmd_probmetric(g);
        if (deleeuw->parsed()) return cmd_deleeuw(g);
        if (dixmier->parsed()) return cmd_dixmier(g, eps);
        if (example->parsed()) return cmd_example(g, kind, n, mesh);
    } catch (const Error& e) {
        std::cerr << "mofkit: " << e.what() << "\n";
        return classify(e);
    } catch (const std::exception& e) {
        std::cerr << "mofkit: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace mofkit::cli
