#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spatialpu/covariates.hpp"
#include "spatialpu/gibbs.hpp"
#include "spatialpu/spatial_graph.hpp"

namespace spu::io {

// ---- geometry --------------------------------------------------------------

// Polygon and MultiPolygon features of a GeoJSON FeatureCollection. The id is
// read from `id_property` (string or integer). Other geometry types are an
// InputError naming the feature.
std::vector<NodeGeometry> read_geojson_polygons(const std::string& path, const std::string& id_property);
void write_geojson_polygons(const std::string& path, const std::vector<NodeGeometry>& geometries,
                            const std::string& id_property);

struct PointFeature {
  std::string id;
  geom::Point at;
  std::vector<std::pair<std::string, double>> properties;
};
void write_geojson_points(const std::string& path, const std::vector<PointFeature>& features);

// ---- graph -----------------------------------------------------------------

// nodes: id,centroid_x,centroid_y,land_area; edges: src,dst,provenance.
void write_graph(const SpatialGraph& graph, const std::string& nodes_path, const std::string& edges_path);
SpatialGraph read_graph(const std::string& nodes_path, const std::string& edges_path);

void write_covariates_csv(const std::string& path, const RawCovariates& covariates, const std::string& id_column = "node_id");

// ---- reports ---------------------------------------------------------------

// node_id,train,test
void write_dataset_csv(const std::string& path, const SpatialGraph& graph, std::span<const std::uint8_t> train,
                       std::span<const std::uint8_t> test);
struct DatasetColumns {
  std::vector<std::uint8_t> train;
  std::vector<std::uint8_t> test;
};
// Aligns rows to graph order; every node must appear exactly once.
DatasetColumns read_dataset_csv(const std::string& path, const SpatialGraph& graph);

// ---- predictions -----------------------------------------------------------

void write_predictions_csv(const std::string& path, const std::vector<std::string>& ids,
                           std::span<const double> scores);
// Scores aligned to graph order.
std::vector<double> read_predictions_csv(const std::string& path, const SpatialGraph& graph);

// ---- samples ---------------------------------------------------------------

// iteration,<parameter names...>; one row per retained sample.
void write_chain_csv(const std::string& path, const ChainSamples& chain, const std::vector<std::string>& names);
struct ChainTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // one vector per name
};
ChainTable read_chain_csv(const std::string& path);

// Binary A-sample file: "SPUA", u32 version, u64 nodes, u64 samples,
// u64 words per sample, then the words, all little-endian.
void write_latent_bitset(const std::string& path, const ChainSamples& chain, std::size_t nodes);
struct LatentBits {
  std::size_t nodes = 0;
  std::size_t samples = 0;
  std::size_t words_per_sample = 0;
  std::vector<std::uint64_t> words;
  bool positive(std::size_t sample, std::size_t node) const {
    return (words[sample * words_per_sample + node / 64] >> (node % 64)) & 1ULL;
  }
};
LatentBits read_latent_bitset(const std::string& path);

// ---- files -----------------------------------------------------------------

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
// 64-bit FNV-1a of the file bytes as 16 hex digits.
std::string fnv1a_file(const std::string& path);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace spu::io
