#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "nlc/io.hpp"

using namespace nlc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "nlc_test_io" / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Io, DoubleRoundTrip) {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()})
        EXPECT_EQ(parse_double(format_double(v)), v);
    EXPECT_THROW(parse_double("1.0x"), io_error);
    EXPECT_THROW(parse_double(""), io_error);
}

TEST(Io, CsvLayout) {
    const auto dir = scratch("csv");
    write_csv(dir / "sub" / "d.csv", "a,b", {{1.0, 0.5}, {2.0, -0.25}});
    std::ifstream in(dir / "sub" / "d.csv");
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    EXPECT_EQ(l1, "a,b");
    EXPECT_EQ(l2, "1,0.5");
    EXPECT_EQ(l3, "2,-0.25");
}

TEST(Io, DiagnosticsHeaderColumns) {
    std::string h = diagnostics_header();
    EXPECT_EQ(std::count(h.begin(), h.end(), ','), 16);
    EXPECT_EQ(h.substr(0, 7), "t,mass,");
}

TEST(Io, SnapshotRoundTrip) {
    const auto dir = scratch("snap");
    const Grid g = make_grid(3, {1.0, 2.0, 1.0}, {8, 9, 10});
    DirectorField d(g);
    for (std::size_t i = 0; i < g.cells(); ++i) set_director(d, i, {0.1 * i, -1.0 / (i + 1), 1e-17 * i});
    write_snapshot(dir / "d.txt", d, 0.125);
    const auto s = read_snapshot(dir / "d.txt");
    EXPECT_EQ(s.dim, 3);
    EXPECT_EQ(s.count, (std::array<int, 3>{8, 9, 10}));
    EXPECT_EQ(s.components, 3);
    EXPECT_EQ(s.t, 0.125);
    EXPECT_EQ(field_from_snapshot<FieldKind::director>(s, g).data(), d.data());
    EXPECT_THROW(field_from_snapshot<FieldKind::scalar>(s, g), io_error);
    EXPECT_THROW(field_from_snapshot<FieldKind::director>(s, make_grid(3, {1.0, 2.0, 1.0}, {8, 9, 11})), io_error);
}

TEST(Io, MalformedSnapshots) {
    const auto dir = scratch("bad");
    fs::create_directories(dir);
    std::ofstream(dir / "short.txt") << "2 2 2 1 0\n1\n2\n3\n";
    std::ofstream(dir / "head.txt") << "5 2 2 1 0\n";
    EXPECT_THROW(read_snapshot(dir / "short.txt"), io_error);
    EXPECT_THROW(read_snapshot(dir / "head.txt"), io_error);
    EXPECT_THROW(read_snapshot(dir / "missing.txt"), io_error);
}
