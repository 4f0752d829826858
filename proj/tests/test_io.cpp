#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "graphs.hpp"
#include "spatialpu/covariates.hpp"
#include "spatialpu/csv.hpp"
#include "spatialpu/error.hpp"
#include "spatialpu/serialization.hpp"
#include "spatialpu/timestamp.hpp"

namespace spu {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spatialpu_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
  fs::path dir_;
};

TEST(Csv, QuotedFields) {
  std::istringstream in("a,b,c\r\n\"x,1\",\"he said \"\"hi\"\"\",\"multi\nline\"\n");
  const auto t = csv::parse(in);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "x,1");
  EXPECT_EQ(t.rows[0][1], "he said \"hi\"");
  EXPECT_EQ(t.rows[0][2], "multi\nline");
  EXPECT_EQ(t.column("c"), 2u);
  EXPECT_THROW(t.column("d"), InputError);
}

TEST(Csv, EscapeRoundTrip) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("q\""), "\"q\"\"\"");
  std::ostringstream out;
  csv::write_row(out, {"id", "a,b", "q\""});
  std::istringstream in(out.str());
  EXPECT_EQ(csv::parse(in).header, (std::vector<std::string>{"id", "a,b", "q\""}));
}

TEST(Csv, NumbersAndMissing) {
  EXPECT_EQ(csv::parse_double(csv::format_double(0.1), "x"), 0.1);
  EXPECT_EQ(csv::parse_double(csv::format_double(1.0 / 3.0), "x"), 1.0 / 3.0);
  EXPECT_THROW(csv::parse_double("1.5abc", "x"), InputError);
  EXPECT_EQ(csv::parse_int("-42", "x"), -42);
  EXPECT_TRUE(csv::is_missing(""));
  EXPECT_TRUE(csv::is_missing("na"));
  EXPECT_TRUE(csv::is_missing("NULL"));
  EXPECT_FALSE(csv::is_missing("0"));
}

TEST(Timestamp, IsoForms) {
  const auto t = parse_timestamp("2021-09-01T21:15:00Z");
  EXPECT_EQ(format_timestamp(t), "2021-09-01T21:15:00.000Z");
  EXPECT_EQ(parse_timestamp("2021-09-01 21:15:00"), t);
  EXPECT_EQ(parse_timestamp("2021-09-01T17:15:00-04:00"), t);
  EXPECT_EQ(parse_timestamp("2021-09-01T21:15:00.250Z").epoch_ms, t.epoch_ms + 250);
  EXPECT_EQ(parse_timestamp("1970-01-01T00:00:00Z").epoch_ms, 0);
}

TEST(Timestamp, OpenDataFormWithDefaultOffset) {
  const auto t = parse_timestamp("09/01/2021 09:15:00 PM", -240);
  EXPECT_EQ(format_timestamp(t), "2021-09-02T01:15:00.000Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("09/01/2021 12:05:00 AM")), "2021-09-01T00:05:00.000Z");
}

TEST(Timestamp, Offsets) {
  EXPECT_EQ(parse_utc_offset("Z"), 0);
  EXPECT_EQ(parse_utc_offset("-04:00"), -240);
  EXPECT_EQ(parse_utc_offset("+05:30"), 330);
  EXPECT_THROW(parse_timestamp("yesterday"), InputError);
  EXPECT_THROW(parse_timestamp("2021-02-30T00:00:00Z"), InputError);
}

TEST(Covariates, StandardizeWithSampleSd) {
  Eigen::MatrixXd raw(4, 2);
  raw << 1, 10, 2, 20, 3, 30, 4, 45;
  const auto t = standardize_covariates(raw, {"a", "b"}, {"b", "a"});
  EXPECT_EQ(t.feature_names, (std::vector<std::string>{"b", "a"}));
  EXPECT_NEAR(t.values.col(1).mean(), 0.0, 1e-12);
  EXPECT_NEAR(t.values.col(1).squaredNorm() / 3.0, 1.0, 1e-12);
  EXPECT_NEAR(t.values(0, 1), (1.0 - 2.5) / std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_TRUE(destandardize(t).isApprox(t.raw_values, 1e-12));
}

TEST(Covariates, ConstantColumnNamed) {
  Eigen::MatrixXd raw(3, 1);
  raw << 2, 2, 2;
  try {
    standardize_covariates(raw, {"flat"}, {"flat"});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.subject(), "flat");
  }
}

TEST_F(TempDir, CovariatesAlignAndExclude) {
  write("cov.csv",
        "node_id,population,median_age\n"
        "n2,300,40\nn0,100,30\nn1,200,NA\nn9,0,50\n");
  const auto raw = read_covariates_csv(path("cov.csv"));
  const auto ex = find_exclusions(raw, {"median_age"});
  EXPECT_EQ(ex.zero_population, std::vector<std::string>{"n9"});
  EXPECT_EQ(ex.missing_values, std::vector<std::string>{"n1"});
  const auto graph = testing::path_graph(3);
  const auto aligned = align_covariates(raw, graph, {"log(population)"});
  EXPECT_NEAR(aligned.features(0, 0), std::log(100.0), 1e-12);
  EXPECT_NEAR(aligned.features(2, 0), std::log(300.0), 1e-12);
  EXPECT_EQ(aligned.population[1], 200.0);
}

TEST_F(TempDir, GraphRoundTrip) {
  const auto g = testing::grid_graph(3, 4);
  io::write_graph(g, path("nodes.csv"), path("edges.csv"));
  const auto back = io::read_graph(path("nodes.csv"), path("edges.csv"));
  EXPECT_EQ(back.node_ids(), g.node_ids());
  ASSERT_EQ(back.edge_count(), g.edge_count());
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    EXPECT_EQ(back.edges()[k].u, g.edges()[k].u);
    EXPECT_EQ(back.edges()[k].v, g.edges()[k].v);
  }
  EXPECT_EQ(back.centroids()[5].x, g.centroids()[5].x);
}

TEST_F(TempDir, GeoJsonRoundTrip) {
  std::vector<NodeGeometry> shapes{{"7", {geom::Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}}}}};
  io::write_geojson_polygons(path("g.geojson"), shapes, "GEOID");
  const auto back = io::read_geojson_polygons(path("g.geojson"), "GEOID");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].id, "7");
  EXPECT_EQ(back[0].shape[0].outer.size(), 4u);
  write("int.geojson",
        R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{"GEOID":36061},)"
        R"("geometry":{"type":"Polygon","coordinates":[[[0,0],[2,0],[2,2],[0,2],[0,0]]]}}]})");
  EXPECT_EQ(io::read_geojson_polygons(path("int.geojson"), "GEOID")[0].id, "36061");
  write("pt.geojson",
        R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{"GEOID":"x"},)"
        R"("geometry":{"type":"Point","coordinates":[0,0]}}]})");
  EXPECT_THROW(io::read_geojson_polygons(path("pt.geojson"), "GEOID"), InputError);
}

TEST_F(TempDir, DatasetRequiresEveryNodeOnce) {
  const auto g = testing::path_graph(3);
  const std::vector<std::uint8_t> train{1, 0, 0}, test{0, 1, 1};
  io::write_dataset_csv(path("d.csv"), g, train, test);
  const auto back = io::read_dataset_csv(path("d.csv"), g);
  EXPECT_EQ(back.train, train);
  EXPECT_EQ(back.test, test);
  write("dup.csv", "node_id,train,test\nn0,1,0\nn0,1,0\nn1,0,0\nn2,0,0\n");
  EXPECT_THROW(io::read_dataset_csv(path("dup.csv"), g), InputError);
  write("short.csv", "node_id,train,test\nn0,1,0\nn1,0,0\n");
  EXPECT_THROW(io::read_dataset_csv(path("short.csv"), g), InputError);
}

TEST_F(TempDir, LatentBitsetRoundTrip) {
  ChainSamples chain;
  const std::size_t nodes = 70;
  chain.words_per_sample = 2;
  chain.retained = 2;
  chain.latent_bits = {0x5ULL, 0x20ULL, ~0ULL, 0x3FULL};
  io::write_latent_bitset(path("a.bin"), chain, nodes);
  const auto back = io::read_latent_bitset(path("a.bin"));
  EXPECT_EQ(back.nodes, nodes);
  EXPECT_EQ(back.samples, 2u);
  EXPECT_TRUE(back.positive(0, 0));
  EXPECT_FALSE(back.positive(0, 1));
  EXPECT_TRUE(back.positive(0, 69));
  EXPECT_TRUE(back.positive(1, 64 + 5));
  write("bad.bin", "NOPE");
  EXPECT_THROW(io::read_latent_bitset(path("bad.bin")), InputError);
}

TEST(Hash, Fnv1aKnownValues) {
  EXPECT_EQ(io::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace spu
