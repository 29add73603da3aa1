#include "doctest.h"

#include <cstdio>

#include "json.hpp"
#include "mofkit/scenario.hpp"

#include "helpers.hpp"

using namespace mofkit;
using ojson = nlohmann::ordered_json;

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).norm() == 0.0;
}

bool same_signature(const TensorSignature& a, const TensorSignature& b) {
    if (a.factor_count() != b.factor_count()) return false;
    for (int f = 0; f < a.factor_count(); ++f)
        if (a.factor(f).blocks() != b.factor(f).blocks()) return false;
    return true;
}

void check_same_space(const MofSpace& a, const MofSpace& b) {
    REQUIRE(a.size() == b.size());
    CHECK(a.point_ids() == b.point_ids());
    CHECK(a.base_point() == b.base_point());
    for (int i = 0; i < a.size(); ++i) {
        CHECK(same_signature(a.fiber(i), b.fiber(i)));
        CHECK(same_matrix(a.metric_state(i).density(), b.metric_state(i).density()));
        for (int k = i; k < a.size(); ++k)
            CHECK(same_matrix(a.d_stored(i, k).matrix(), b.d_stored(i, k).matrix()));
    }
    CHECK(a.tol().tau_psd == b.tol().tau_psd);
    CHECK(a.tol().tau_inv == b.tol().tau_inv);
    CHECK(a.tol().tau_eq == b.tol().tau_eq);
    CHECK(a.tol().tau_struct == b.tol().tau_struct);
}

// 2-point scalar space whose serialized matrices are tiny, handy for
// mutation tests
MofPtr tiny() {
    Eigen::MatrixXd two(2, 2);
    two << 0, 1,
           1, 0;
    TensorSignature c1 = TensorSignature(AlgebraSignature({1}));
    return std::make_shared<const MofSpace>(
        scalar_mof({"a", "b"}, {c1, c1}, MetricTable(two),
                   {State::point_mass(c1, 0), State::point_mass(c1, 0)}));
}

} // namespace

TEST_CASE("round trip keeps every matrix bit for bit") {
    MofPtr base = testutil::two_class_line_m2();
    MofSpace pointed = pointed_extension(*base, TensorSignature(AlgebraSignature({1})));
    MofPtr m = std::make_shared<const MofSpace>(std::move(pointed));

    Rng rng(91);
    std::vector<std::pair<std::string, OperatorField>> fields = {
        {"g", random_commuting_field(m, rng)},
        {"h", random_commuting_field(m, rng)},
    };
    std::vector<CoverSpec> covers = {{{0, 1, 2}, 1.25}, {{2}, 10.0}};

    const std::string text = scenario_to_text(*m, fields, covers, 42);
    Scenario s = parse_scenario(text);

    check_same_space(*m, *s.mof);
    CHECK(s.mof->base_point().has_value());
    CHECK(s.mof->point_ids().back() == "inf");

    REQUIRE(s.fields.size() == 2);
    CHECK(s.fields[0].first == "g");
    CHECK(s.fields[1].first == "h");
    for (int t = 0; t < 2; ++t)
        for (int x = 0; x < m->size(); ++x)
            CHECK(same_matrix(fields[t].second.at(x).matrix(), s.fields[t].second.at(x).matrix()));

    REQUIRE(s.covers.size() == 2);
    CHECK(s.covers[0].centers == std::vector<int>{0, 1, 2});
    CHECK(s.covers[0].radius == 1.25);
    CHECK(s.covers[1].centers == std::vector<int>{2});
    REQUIRE(s.seed.has_value());
    CHECK(*s.seed == 42);

    // reserializing the parsed scenario reproduces the exact document
    CHECK(scenario_to_text(*s.mof, s.fields, s.covers, s.seed) == text);
    CHECK(scenario_to_text(*m, fields, covers, 42) == text);
}

TEST_CASE("irrational distances survive the text form") {
    MofSpace stairs = build_staircase_example(2, 3);
    Scenario s = parse_scenario(scenario_to_text(stairs));
    check_same_space(stairs, *s.mof);
    CHECK(!s.seed.has_value());
    CHECK(s.fields.empty());
    CHECK(s.covers.empty());
}

TEST_CASE("tensor product fibers serialize as factor lists") {
    MofPtr e2 = testutil::two_class_line();
    MofSpace prod = product_mof(*e2, *e2);
    REQUIRE(prod.fiber(0).factor_count() == 2);

    const std::string text = scenario_to_text(prod);
    ojson j = ojson::parse(text);
    const std::string id0 = prod.point_ids()[0];
    REQUIRE(j["algebras"][id0].is_array());
    CHECK(j["algebras"][id0][0].is_array()); // per-factor block lists

    Scenario s = parse_scenario(text);
    check_same_space(prod, *s.mof);
    CHECK(verify_mof(*s.mof).pass());
}

TEST_CASE("files round trip through disk") {
    const std::string path = "scenario_roundtrip_tmp.json";
    MofPtr m = tiny();
    const std::string text = scenario_to_text(*m);
    write_file(path, text);
    CHECK(read_file(path) == text);
    Scenario s = load_scenario(path);
    check_same_space(*m, *s.mof);
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_file("no_such_file_anywhere.json"), ParseError);
}

TEST_CASE("parse failures point at the defect") {
    MofPtr m = tiny();
    const std::string text = scenario_to_text(*m);

    CHECK_THROWS_AS(parse_scenario("definitely not json {"), ParseError);
    CHECK_THROWS_AS(parse_scenario("[1, 2, 3]"), ParseError);

    ojson base = ojson::parse(text);

    {
        ojson j = base;
        j.erase("schema_version");
        CHECK_THROWS_AS(parse_scenario(j.dump()), SchemaVersionMismatch);
        j["schema_version"] = 2;
        CHECK_THROWS_AS(parse_scenario(j.dump()), SchemaVersionMismatch);
    }
    {
        ojson j = base;
        j["states"].erase("a");
        CHECK_THROWS_AS(parse_scenario(j.dump()), StructureViolation);
    }
    {
        ojson j = base; // (a, b) slot gets a 2x2 matrix where a 1x1 is due
        j["D"][1]["matrix"] = ojson::array({ojson::array({1.0, 0.0}), ojson::array({0.0, 0.0}),
                                            ojson::array({0.0, 0.0}), ojson::array({1.0, 0.0})});
        try {
            parse_scenario(j.dump());
            FAIL("expected DimensionMismatch");
        } catch (const DimensionMismatch& e) {
            CHECK(std::string(e.what()).find("D(a, b)") != std::string::npos);
        }
    }
    {
        ojson j = base;
        j["D"][1]["pair"] = ojson::array({"b", "a"}); // only index-ordered pairs
        CHECK_THROWS_AS(parse_scenario(j.dump()), StructureViolation);
    }
    {
        ojson j = base;
        j["D"].push_back(j["D"][1]); // duplicate (a, b)
        CHECK_THROWS_AS(parse_scenario(j.dump()), StructureViolation);
    }
    {
        ojson j = base;
        j["D"].erase(1); // missing (a, b)
        CHECK_THROWS_AS(parse_scenario(j.dump()), StructureViolation);
    }
    {
        ojson j = base;
        j["D"][1]["pair"] = ojson::array({"a", "zzz"});
        CHECK_THROWS_AS(parse_scenario(j.dump()), StructureViolation);
    }
    {
        ojson j = base;
        j["algebras"]["a"] = ojson::array({0});
        CHECK_THROWS_AS(parse_scenario(j.dump()), ParseError);
    }
    {
        ojson j = base; // not a density matrix: trace 2
        j["states"]["a"] = ojson::array({ojson::array({2.0, 0.0})});
        CHECK_THROWS_AS(parse_scenario(j.dump()), StructureViolation);
    }
    {
        ojson j = base;
        j["seed"] = "not a number";
        CHECK_THROWS_AS(parse_scenario(j.dump()), ParseError);
    }
    {
        ojson j = base;
        j["base_point"] = "zzz";
        CHECK_THROWS_AS(parse_scenario(j.dump()), StructureViolation);
    }
}

TEST_CASE("digest is a stable fingerprint") {
    CHECK(input_digest("") == "cbf29ce484222325");
    CHECK(input_digest("a") == "af63dc4c8601ec8c");
    CHECK(input_digest("mofkit").size() == 16);
    CHECK(input_digest("mofkit") == input_digest("mofkit"));
    CHECK(input_digest("a") != input_digest("b"));
}
