#include <catch_amalgamated.hpp>

#include "swarmap/io.hpp"

#include <random>

using namespace swarmap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "swarmap_test_io" / name;
    fs::create_directories(p.parent_path());
    return p;
}

}  // namespace

TEST_CASE("grid csv round trip") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(12);
    for (double& x : v) x = u(rng);
    const fs::path p = scratch("grid.csv");
    write_grid_csv(p, 3, 4, v);
    const CsvGrid g = read_grid_csv(p);
    CHECK(g.rows == 3);
    CHECK(g.cols == 4);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(g.values[i] - v[i]) <= 1e-9);
    CHECK_THROWS_AS(write_grid_csv(p, 3, 3, v), dimension_error);

    std::ofstream(scratch("ragged.csv")) << "1,2\n3\n";
    CHECK_THROWS_AS(read_grid_csv(scratch("ragged.csv")), config_error);
}

TEST_CASE("barcode round trip") {
    Barcode b;
    b.intervals = {{0, 0.1, std::numeric_limits<double>::infinity()}, {0, 0.2, 0.3}, {1, 0.25, 1.0}};
    write_barcode(scratch("barcode.txt"), b);
    const Barcode r = read_barcode(scratch("barcode.txt"));
    CHECK(r.intervals == b.intervals);
}

TEST_CASE("pgm round trip keeps orientation") {
    BinaryMap m{3, 2, {true, false, false, false, true, true}};
    write_pgm(scratch("map.pgm"), m);
    std::ifstream in(scratch("map.pgm"));
    std::string magic, first_row;
    std::getline(in, magic);
    std::getline(in, first_row);  // dimensions
    std::getline(in, first_row);  // maxval
    std::getline(in, first_row);
    CHECK(magic == "P2");
    CHECK(first_row == "255 255");  // top row is the last grid row
    const BinaryMap r = read_pgm(scratch("map.pgm"));
    CHECK(r.rows == 3);
    CHECK(r.cols == 2);
    CHECK(r.free == m.free);
}

TEST_CASE("tuples round trip bitwise") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<DataTuple> t(50);
    for (std::size_t k = 0; k < t.size(); ++k) {
        t[k].robot = k % 7;
        t[k].t = 0.1 * static_cast<double>(k);
        t[k].mu = {n(rng), n(rng)};
        const double a = std::abs(n(rng)) * 1e-4, c = std::abs(n(rng)) * 1e-4, b = 0.3 * std::sqrt(a * c);
        t[k].sigma << a, b, b, c;
    }
    write_tuples_csv(scratch("tuples.csv"), t);
    const auto r = read_tuples_csv(scratch("tuples.csv"));
    REQUIRE(r.size() == t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(r[k].robot == t[k].robot);
        CHECK(r[k].t == t[k].t);
        CHECK(r[k].mu == t[k].mu);
        CHECK(r[k].sigma == t[k].sigma);
    }
}

TEST_CASE("domain json round trip") {
    const DomainFile f = load_domain(std::string(SWARMAP_DATA_DIR) + "/domains/d3_three.json");
    const DomainFile g = parse_domain(domain_to_json(f));
    CHECK(g.rows == f.rows);
    CHECK(g.cols == f.cols);
    CHECK(g.domain.obstacles == f.domain.obstacles);
    REQUIRE(g.domain.transmitters.size() == f.domain.transmitters.size());
    for (std::size_t k = 0; k < f.domain.transmitters.size(); ++k) {
        CHECK(g.domain.transmitters[k].position == f.domain.transmitters[k].position);
        CHECK(g.domain.transmitters[k].power == f.domain.transmitters[k].power);
    }
    CHECK(pao(g.domain) == pao(f.domain));
}

TEST_CASE("malformed domains are config errors") {
    CHECK_THROWS_AS(parse_domain(Json::parse(R"({"obstacles": []})")), config_error);
    CHECK_THROWS_AS(parse_domain(Json::parse(R"({"bounds": [0, 0, 2], "transmitters": []})")), config_error);
    CHECK_THROWS_AS(parse_domain(Json::parse(R"({"bounds": [0, 0, 2, 2], "transmitters": [{"pos": [1]}]})")),
                    config_error);
    std::ofstream(scratch("bad.json")) << "{ not json";
    CHECK_THROWS_AS(load_domain(scratch("bad.json")), config_error);
    CHECK_THROWS_AS(load_domain(scratch("missing.json")), config_error);
}

TEST_CASE("key values round trip") {
    const KeyValues kv{{"mae", "0.0125"}, {"success", "true"}};
    write_key_values(scratch("report.txt"), kv);
    CHECK(read_key_values(scratch("report.txt")) == kv);
}
