#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hrcm/model_io.hpp"
#include "hrcm/table_io.hpp"

using namespace hrcm;

namespace {

/** Round-trip through text and confirm the reparse is byte-identical. */
void check_roundtrip(const AdjacencyModel &m) {
    const std::string text = serialize_model(m);
    const AdjacencyModel back = parse_model(text);
    CHECK(serialize_model(back) == text);
    CHECK(back.d == m.d);
    CHECK(back.marks.size() == m.marks.size());
    // Behavioral equality on a probe grid.
    for (double r : {0.1, 0.7, 1.9})
        for (std::size_t i = 0; i < m.marks.size(); i += m.marks.size() / 2 + 1)
            CHECK(back.phi_scaled(r, i, i) ==
                  doctest::Approx(m.phi_scaled(r, i, i)).epsilon(1e-15));
}

} // namespace

TEST_CASE("round-trip: Boolean model with finite marks") {
    AdjacencyModel m;
    m.d = 4;
    m.marks = MarkSpace::finite({{0.5, 0.25}, {1.0, 0.5}, {2.0, 0.25}});
    m.base = BaseKind::BooleanDisc;
    m.scaling = ScalingFunction::volume_linear(4, 1000.0);
    m.validate();
    check_roundtrip(m);
}

TEST_CASE("round-trip: every profile and kernel pair") {
    for (ProfileKind pk : {ProfileKind::Indicator, ProfileKind::ExpDecay,
                           ProfileKind::PowerTail, ProfileKind::Table})
        for (KernelKind kk : {KernelKind::Product, KernelKind::Strong,
                              KernelKind::Sum, KernelKind::Weak,
                              KernelKind::PrefAttach, KernelKind::Constant}) {
            AdjacencyModel m;
            m.d = 3;
            m.marks = MarkSpace::unit_interval(8);
            m.base = BaseKind::WeightDependent;
            m.profile.kind = pk;
            m.profile.cut = 1.5;
            m.profile.rate = 2.25;
            m.profile.exponent = 3.5;
            m.profile.scale = 0.75;
            m.profile.table = {{0.0, 1.0}, {0.5, 0.25}, {1.0, 0.0}};
            m.kernel.kind = kk;
            m.kernel.zeta = 1.0 / 3.0;  // not exactly representable
            m.kernel.value = 0.7;
            m.scaling = ScalingFunction::identity(3);
            m.validate();
            check_roundtrip(m);
        }
}

TEST_CASE("round-trip: graded grid, radial table, ladder scaling") {
    AdjacencyModel g;
    g.d = 3;
    g.marks = MarkSpace::unit_interval_graded(6, 4);
    g.base = BaseKind::WeightDependent;
    g.profile.kind = ProfileKind::Indicator;
    g.profile.cut = 1.0;
    g.kernel.kind = KernelKind::Product;
    g.kernel.zeta = 0.2;
    g.scaling = ScalingFunction::identity(3);
    g.validate();
    check_roundtrip(g);

    AdjacencyModel t;
    t.d = 2;
    t.marks = MarkSpace::finite({{1.0, 1.0}});
    t.base = BaseKind::RadialTable;
    t.tables = {{{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.0}}};
    t.scaling = ScalingFunction::length_linear(2, 5.0);
    t.validate();
    check_roundtrip(t);

    AdjacencyModel ladder;
    ladder.d = 3;
    ladder.marks = MarkSpace::finite({{1.0, 1.0}});
    ladder.base = BaseKind::DyadicAnnuli;
    ladder.scaling = ScalingFunction::many_annuli(3, 4.0, 0.5);
    ladder.validate();
    check_roundtrip(ladder);

    AdjacencyModel ann = ladder;
    ann.base = BaseKind::BooleanDisc;
    ann.marks = MarkSpace::finite({{0.25, 1.0}});
    ann.scaling = ScalingFunction::annulus(3, 4.0);
    ann.validate();
    check_roundtrip(ann);
}

TEST_CASE("parser: comments, spacing, and error paths") {
    const std::string ok =
        "# a comment\n"
        "dimension = 3   # trailing comment\n"
        "\n"
        "marks.kind=finite\n"
        "marks.finite = 1:1\n"
        "base.kind = boolean\n"
        "scaling.kind = identity\n";
    const AdjacencyModel m = parse_model(ok);
    CHECK(m.d == 3);
    CHECK(m.marks.values[0] == 1.0);

    CHECK_THROWS(parse_model("dimension = 3\nnonsense line\n"));
    CHECK_THROWS(parse_model("dimension = three\n"));
    CHECK_THROWS(parse_model("dimension = 3\n"));  // missing keys
    CHECK_THROWS(parse_model(
        "dimension = 3\nmarks.kind = finite\nmarks.finite = 1:1\n"
        "base.kind = boolean\nscaling.kind = mystery\n"));
    CHECK_THROWS(parse_model(
        "dimension = 3\nmarks.kind = finite\nmarks.finite = 1;1\n"
        "base.kind = boolean\nscaling.kind = identity\n"));
    CHECK_THROWS(load_model("/nonexistent/path/model.txt"));
}

TEST_CASE("double formatting survives a binary round-trip") {
    for (double v : {1.0 / 3.0, M_PI, 1e-300, 6.02214076e23, -0.1,
                     4503599627370497.0}) {
        const double back = std::stod(format_double(v));
        CHECK(back == v);
    }
}

TEST_CASE("digest: known vectors and stability") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
    AdjacencyModel m;
    m.d = 3;
    m.marks = MarkSpace::finite({{1.0, 1.0}});
    m.base = BaseKind::BooleanDisc;
    m.scaling = ScalingFunction::identity(3);
    CHECK(fnv1a_hex(serialize_model(m)) == fnv1a_hex(serialize_model(m)));
}

TEST_CASE("CSV escaping and table layout") {
    Table t;
    t.header = {"name", "value"};
    t.add_row({"plain", "1"});
    t.add_row({"with,comma", "quote\"inside"});
    const std::string csv = t.to_csv();
    CHECK(csv.find("name,value\r\n") != std::string::npos);
    CHECK(csv.find("\"with,comma\"") != std::string::npos);
    CHECK(csv.find("\"quote\"\"inside\"") != std::string::npos);
}

TEST_CASE("JSON output escapes and nests correctly") {
    Table t;
    t.header = {"k"};
    t.add_row({"a\"b\\c"});
    const std::string js = t.to_json();
    CHECK(js.find("\"a\\\"b\\\\c\"") != std::string::npos);
    RunManifest man;
    man.subcommand = "norms";
    man.model_digest = "deadbeef";
    man.parameters = "L=10";
    man.seed = 7;
    const std::string out = render_output(t, man, "json");
    CHECK(out.find("\"manifest\"") != std::string::npos);
    CHECK(out.find("\"table\"") != std::string::npos);
    CHECK(out.find("deadbeef") != std::string::npos);
}

TEST_CASE("manifest digest is sensitive to every field") {
    RunManifest a;
    a.subcommand = "qd";
    a.model_digest = "x";
    a.parameters = "grid=1,2";
    a.seed = 1;
    RunManifest b = a;
    CHECK(a.digest() == b.digest());
    b.seed = 2;
    CHECK(a.digest() != b.digest());
    b = a;
    b.parameters = "grid=1,3";
    CHECK(a.digest() != b.digest());
    // CSV rendering carries the manifest as comment lines.
    Table t;
    t.header = {"c"};
    t.add_row({"1"});
    const std::string csv = render_output(t, a, "csv");
    CHECK(csv.find("# subcommand: qd") != std::string::npos);
    CHECK(csv.find("# seed: 1") != std::string::npos);
}
