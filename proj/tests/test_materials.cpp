#include <doctest.h>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "filmforge/errors.hpp"
#include "filmforge/materials.hpp"

using namespace filmforge;

namespace {

MaterialTable parse(const std::string& text, const std::string& name = "m") {
    std::istringstream in(text);
    return load_material_table(in, name);
}

}  // namespace

TEST_SUITE("materials") {

TEST_CASE("nanometer file parses and keeps exact sample values") {
    auto t = parse(
        "wavelength_nm,n,k\n"
        "400,2,0\n"
        "600,3,1\n");
    REQUIRE(t.samples().size() == 2);
    CHECK(t.min_wavelength_nm() == 400.0);
    CHECK(t.max_wavelength_nm() == 600.0);
    CHECK(t.index_at(400.0) == std::complex<double>(2.0, 0.0));
    CHECK(t.index_at(600.0) == std::complex<double>(3.0, -1.0));
}

TEST_CASE("micrometer file converts wavelengths to nanometers") {
    auto t = parse(
        "wavelength_um,n,k\n"
        "0.5,1.5,0\n"
        "1.5,1.4,0.2\n");
    CHECK(t.min_wavelength_nm() == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(t.max_wavelength_nm() == doctest::Approx(1500.0).epsilon(1e-12));
}

TEST_CASE("comments and blank lines are skipped") {
    auto t = parse(
        "# optical constants\n"
        "wavelength_nm,n,k\n"
        "\n"
        "400,2,0\n"
        "# interior comment\n"
        "600,3,1\n"
        "\n");
    CHECK(t.samples().size() == 2);
}

TEST_CASE("unsorted rows are reordered to ascending wavelength") {
    auto t = parse(
        "wavelength_nm,n,k\n"
        "600,3,1\n"
        "400,2,0\n");
    CHECK(t.samples().front().wavelength_nm == 400.0);
    CHECK(t.samples().back().wavelength_nm == 600.0);
}

TEST_CASE("bad header is a ParseError carrying the line number") {
    CHECK_THROWS_AS(parse("lambda,n,k\n400,2,0\n600,3,1\n"), ParseError);
    try {
        parse("lambda,n,k\n400,2,0\n600,3,1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("wrong field count and non-numeric fields are ParseErrors") {
    CHECK_THROWS_AS(parse("wavelength_nm,n,k\n400,2\n600,3,1\n"), ParseError);
    CHECK_THROWS_AS(parse("wavelength_nm,n,k\n400,2,0,9\n600,3,1\n"), ParseError);
    CHECK_THROWS_AS(parse("wavelength_nm,n,k\n400,two,0\n600,3,1\n"), ParseError);
    try {
        parse("wavelength_nm,n,k\n400,2,0\n600,3,oops\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("validation rejects negative n, duplicates, and short tables") {
    CHECK_THROWS_AS(parse("wavelength_nm,n,k\n400,-2,0\n600,3,1\n"), ValidationError);
    CHECK_THROWS_AS(parse("wavelength_nm,n,k\n400,2,-0.5\n600,3,1\n"), ValidationError);
    CHECK_THROWS_AS(parse("wavelength_nm,n,k\n400,2,0\n400,3,1\n"), ValidationError);
    CHECK_THROWS_AS(parse("wavelength_nm,n,k\n400,2,0\n"), ValidationError);
}

TEST_CASE("interpolation is linear in n and k and exact at samples") {
    auto t = parse(
        "wavelength_nm,n,k\n"
        "400,2,0\n"
        "600,3,1\n");
    auto mid = t.index_at(500.0);
    CHECK(mid.real() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(mid.imag() == doctest::Approx(-0.5).epsilon(1e-15));
    auto q = t.index_at(450.0);
    CHECK(q.real() == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(q.imag() == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("queries outside the tabulated range throw OutOfRangeError") {
    auto t = parse(
        "wavelength_nm,n,k\n"
        "400,2,0\n"
        "600,3,1\n");
    CHECK_THROWS_AS((void)t.index_at(399.999), OutOfRangeError);
    CHECK_THROWS_AS((void)t.index_at(600.001), OutOfRangeError);
    try {
        (void)t.index_at(300.0);
        FAIL("expected OutOfRangeError");
    } catch (const OutOfRangeError& e) {
        // The message must let a user identify which material is short.
        CHECK(std::string(e.what()).find("m") != std::string::npos);
        CHECK(std::string(e.what()).find("400") != std::string::npos);
    }
}

TEST_CASE("coverage_check reports per-material gaps") {
    auto narrow = make_constant_material("narrow", 1.5, 0.0, 450.0, 700.0);
    auto wide = make_constant_material("wide", 2.0, 0.1, 300.0, 1500.0);

    auto gaps = coverage_check({wide, narrow}, 400.0, 800.0);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0].material == "narrow");
    CHECK(gaps[0].missing_lo_nm == doctest::Approx(400.0));
    CHECK(gaps[0].missing_hi_nm == doctest::Approx(450.0));
    CHECK(gaps[1].material == "narrow");
    CHECK(gaps[1].missing_lo_nm == doctest::Approx(700.0));
    CHECK(gaps[1].missing_hi_nm == doctest::Approx(800.0));

    CHECK(coverage_check({wide, narrow}, 450.0, 700.0).empty());
    CHECK_THROWS_AS(coverage_check({}, 400.0, 800.0), ValidationError);
    CHECK_THROWS_AS(coverage_check({wide}, 800.0, 400.0), ValidationError);
}

TEST_CASE("save then load round-trips every sample bit-exactly") {
    auto t = parse(
        "wavelength_nm,n,k\n"
        "400,2.123456789012345,0.000123456789\n"
        "512.3,1.0000000001,0\n"
        "600,3,1.999999999999999\n");
    std::ostringstream out;
    save_material_table(t, out);
    std::istringstream back(out.str());
    auto t2 = load_material_table(back, t.name());
    REQUIRE(t2.samples().size() == t.samples().size());
    for (size_t i = 0; i < t.samples().size(); ++i) {
        CHECK(t2.samples()[i].wavelength_nm == t.samples()[i].wavelength_nm);
        CHECK(t2.samples()[i].n == t.samples()[i].n);
        CHECK(t2.samples()[i].k == t.samples()[i].k);
    }
}

TEST_CASE("make_constant_material spans the requested range with fixed index") {
    auto m = make_constant_material("unit", 1.38, 0.25, 300.0, 900.0);
    CHECK(m->covers(300.0, 900.0));
    CHECK(!m->covers(299.0, 900.0));
    CHECK(m->index_at(300.0) == std::complex<double>(1.38, -0.25));
    CHECK(m->index_at(617.0) == std::complex<double>(1.38, -0.25));
    CHECK(m->index_at(900.0) == std::complex<double>(1.38, -0.25));
}

TEST_CASE("bundled material tables load and cover the design bands") {
    const std::string dir = FILMFORGE_BUNDLED_MATERIALS_DIR;
    const std::vector<std::string> names = {"SiO2", "MgF2", "ZnS", "Cu",
                                            "Ti",   "Al",   "Cr",  "glass"};
    for (const auto& name : names) {
        CAPTURE(name);
        auto path = dir + "/" + name + ".csv";
        REQUIRE(std::filesystem::exists(path));
        auto t = load_material_table_file(path, name);
        CHECK(t.covers(300.0, 1500.0));
        // Spot physical sanity: refractive index is positive over the band.
        CHECK(t.index_at(550.0).real() > 0.0);
    }
}

}  // TEST_SUITE
