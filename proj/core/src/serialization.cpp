#include "spatialpu/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spatialpu/csv.hpp"
#include "spatialpu/error.hpp"

namespace spu::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out | std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'", path);
  return out;
}

geom::Ring parse_ring(const json& coords, const std::string& id) {
  if (!coords.is_array()) throw InputError("malformed ring in feature '" + id + "'", id);
  geom::Ring ring;
  for (const auto& p : coords) {
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number()) {
      throw InputError("malformed coordinate in feature '" + id + "'", id);
    }
    ring.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  // GeoJSON rings repeat the first vertex at the end.
  if (ring.size() >= 2 && ring.front().x == ring.back().x && ring.front().y == ring.back().y) ring.pop_back();
  return ring;
}

geom::Polygon parse_polygon(const json& rings, const std::string& id) {
  if (!rings.is_array() || rings.empty()) throw InputError("polygon without rings in feature '" + id + "'", id);
  geom::Polygon poly;
  poly.outer = parse_ring(rings[0], id);
  for (std::size_t r = 1; r < rings.size(); ++r) poly.holes.push_back(parse_ring(rings[r], id));
  return poly;
}

json ring_json(const geom::Ring& ring) {
  json a = json::array();
  for (const auto& p : ring) a.push_back({p.x, p.y});
  if (!ring.empty()) a.push_back({ring.front().x, ring.front().y});
  return a;
}

}  // namespace

std::vector<NodeGeometry> read_geojson_polygons(const std::string& path, const std::string& id_property) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what(), path);
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features")) {
    throw InputError("'" + path + "' is not a GeoJSON FeatureCollection", path);
  }
  std::vector<NodeGeometry> out;
  std::size_t index = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = "feature " + std::to_string(index++);
    const auto props = f.value("properties", json::object());
    if (!props.is_object() || !props.contains(id_property)) {
      throw InputError(where + " lacks the id property '" + id_property + "'", where);
    }
    const auto& idv = props[id_property];
    std::string id;
    if (idv.is_string()) {
      id = idv.get<std::string>();
    } else if (idv.is_number_integer()) {
      id = std::to_string(idv.get<long long>());
    } else {
      throw InputError(where + " has a non-string id", where);
    }
    if (!f.contains("geometry") || !f["geometry"].is_object()) throw InputError("feature '" + id + "' has no geometry", id);
    const auto& g = f["geometry"];
    const std::string type = g.value("type", "");
    NodeGeometry node{id, {}};
    if (type == "Polygon") {
      node.shape.push_back(parse_polygon(g.at("coordinates"), id));
    } else if (type == "MultiPolygon") {
      for (const auto& p : g.at("coordinates")) node.shape.push_back(parse_polygon(p, id));
    } else {
      throw InputError("feature '" + id + "' has unsupported geometry type '" + type + "'", id);
    }
    out.push_back(std::move(node));
  }
  return out;
}

void write_geojson_polygons(const std::string& path, const std::vector<NodeGeometry>& geometries,
                            const std::string& id_property) {
  json features = json::array();
  for (const auto& g : geometries) {
    json coords = json::array();
    for (const auto& poly : g.shape) {
      json rings = json::array({ring_json(poly.outer)});
      for (const auto& h : poly.holes) rings.push_back(ring_json(h));
      coords.push_back(std::move(rings));
    }
    features.push_back({{"type", "Feature"},
                        {"properties", {{id_property, g.id}}},
                        {"geometry", {{"type", "MultiPolygon"}, {"coordinates", std::move(coords)}}}});
  }
  write_text(path, json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump() + "\n");
}

void write_geojson_points(const std::string& path, const std::vector<PointFeature>& features) {
  json out = json::array();
  for (const auto& f : features) {
    json props = {{"node_id", f.id}};
    for (const auto& [k, v] : f.properties) props[k] = v;
    out.push_back({{"type", "Feature"},
                   {"properties", std::move(props)},
                   {"geometry", {{"type", "Point"}, {"coordinates", {f.at.x, f.at.y}}}}});
  }
  write_text(path, json{{"type", "FeatureCollection"}, {"features", std::move(out)}}.dump() + "\n");
}

// ---- graph -----------------------------------------------------------------

void write_graph(const SpatialGraph& graph, const std::string& nodes_path, const std::string& edges_path) {
  auto nodes = open_out(nodes_path);
  csv::write_row(nodes, {"id", "centroid_x", "centroid_y", "land_area"});
  for (std::size_t i = 0; i < graph.size(); ++i) {
    csv::write_row(nodes, {graph.node_ids()[i], csv::format_double(graph.centroids()[i].x),
                           csv::format_double(graph.centroids()[i].y), csv::format_double(graph.land_area()[i])});
  }
  auto edges = open_out(edges_path);
  csv::write_row(edges, {"src", "dst", "provenance"});
  for (const auto& e : graph.edges()) {
    csv::write_row(edges, {graph.node_ids()[e.u], graph.node_ids()[e.v], std::string(to_string(e.provenance))});
  }
}

SpatialGraph read_graph(const std::string& nodes_path, const std::string& edges_path) {
  const auto nodes = csv::read_file(nodes_path);
  const std::size_t ic = nodes.column("id"), xc = nodes.column("centroid_x"), yc = nodes.column("centroid_y"),
                    ac = nodes.column("land_area");
  std::vector<std::string> ids;
  std::vector<geom::Point> centroids;
  std::vector<double> area;
  std::map<std::string, std::uint32_t, std::less<>> index;
  for (const auto& row : nodes.rows) {
    const std::string ctx = nodes_path + " node " + row[ic];
    index.emplace(row[ic], static_cast<std::uint32_t>(ids.size()));
    ids.push_back(row[ic]);
    centroids.push_back({csv::parse_double(row[xc], ctx), csv::parse_double(row[yc], ctx)});
    area.push_back(csv::parse_double(row[ac], ctx));
  }
  const auto edges = csv::read_file(edges_path);
  const std::size_t sc = edges.column("src"), dc = edges.column("dst");
  const auto pc = edges.find_column("provenance");
  std::vector<Edge> list;
  for (const auto& row : edges.rows) {
    const auto a = index.find(row[sc]);
    const auto b = index.find(row[dc]);
    if (a == index.end() || b == index.end()) {
      throw InputError("edge refers to an unknown node: " + row[sc] + " - " + row[dc], edges_path);
    }
    Edge e{std::min(a->second, b->second), std::max(a->second, b->second), EdgeProvenance::SharedBorder};
    if (pc) e.provenance = parse_edge_provenance(row[*pc]);
    list.push_back(e);
  }
  return SpatialGraph(std::move(ids), std::move(centroids), std::move(area), std::move(list));
}

void write_covariates_csv(const std::string& path, const RawCovariates& covariates, const std::string& id_column) {
  auto out = open_out(path);
  std::vector<std::string> header{id_column};
  header.insert(header.end(), covariates.columns.begin(), covariates.columns.end());
  csv::write_row(out, header);
  for (std::size_t r = 0; r < covariates.ids.size(); ++r) {
    std::vector<std::string> row{covariates.ids[r]};
    for (Eigen::Index c = 0; c < covariates.values.cols(); ++c) {
      const double v = covariates.values(static_cast<Eigen::Index>(r), c);
      row.push_back(std::isfinite(v) ? csv::format_double(v) : std::string("NA"));
    }
    csv::write_row(out, row);
  }
}

// ---- reports ---------------------------------------------------------------

void write_dataset_csv(const std::string& path, const SpatialGraph& graph, std::span<const std::uint8_t> train,
                       std::span<const std::uint8_t> test) {
  if (train.size() != graph.size() || test.size() != graph.size()) throw InputError("dataset does not match graph");
  auto out = open_out(path);
  csv::write_row(out, {"node_id", "train", "test"});
  for (std::size_t i = 0; i < graph.size(); ++i) {
    csv::write_row(out, {graph.node_ids()[i], train[i] ? "1" : "0", test[i] ? "1" : "0"});
  }
}

namespace {

std::uint8_t parse_flag(const std::string& s, const std::string& ctx) {
  if (s == "1") return 1;
  if (s == "0") return 0;
  throw InputError("expected 0 or 1 in " + ctx + ", got '" + s + "'", ctx);
}

}  // namespace

DatasetColumns read_dataset_csv(const std::string& path, const SpatialGraph& graph) {
  const auto table = csv::read_file(path);
  const std::size_t ic = table.column("node_id"), trc = table.column("train");
  const auto tec = table.find_column("test");
  DatasetColumns out{std::vector<std::uint8_t>(graph.size(), 0), std::vector<std::uint8_t>(graph.size(), 0)};
  std::vector<std::uint8_t> seen(graph.size(), 0);
  for (const auto& row : table.rows) {
    if (!graph.contains(row[ic])) throw InputError("dataset node '" + row[ic] + "' is not in the graph", row[ic]);
    const std::size_t i = graph.index_of(row[ic]);
    if (seen[i]++) throw InputError("dataset lists node '" + row[ic] + "' twice", row[ic]);
    out.train[i] = parse_flag(row[trc], path);
    if (tec) out.test[i] = parse_flag(row[*tec], path);
  }
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (!seen[i]) throw InputError("dataset has no row for node '" + graph.node_ids()[i] + "'", graph.node_ids()[i]);
  }
  return out;
}

// ---- predictions -----------------------------------------------------------

void write_predictions_csv(const std::string& path, const std::vector<std::string>& ids,
                           std::span<const double> scores) {
  if (ids.size() != scores.size()) throw InputError("prediction ids and scores are misaligned");
  auto out = open_out(path);
  csv::write_row(out, {"node_id", "score"});
  for (std::size_t i = 0; i < ids.size(); ++i) csv::write_row(out, {ids[i], csv::format_double(scores[i])});
}

std::vector<double> read_predictions_csv(const std::string& path, const SpatialGraph& graph) {
  const auto table = csv::read_file(path);
  const std::size_t ic = table.column("node_id"), sc = table.column("score");
  std::vector<double> out(graph.size(), std::nan(""));
  for (const auto& row : table.rows) {
    if (!graph.contains(row[ic])) throw InputError("prediction node '" + row[ic] + "' is not in the graph", row[ic]);
    out[graph.index_of(row[ic])] = csv::parse_double(row[sc], path);
  }
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (std::isnan(out[i])) throw InputError("no prediction for node '" + graph.node_ids()[i] + "'", path);
  }
  return out;
}

// ---- samples ---------------------------------------------------------------

void write_chain_csv(const std::string& path, const ChainSamples& chain, const std::vector<std::string>& names) {
  auto out = open_out(path);
  std::vector<std::string> header{"sample"};
  header.insert(header.end(), names.begin(), names.end());
  csv::write_row(out, header);
  for (std::size_t s = 0; s < chain.retained; ++s) {
    std::vector<std::string> row{std::to_string(s), csv::format_double(chain.theta0[s]),
                                 csv::format_double(chain.theta1[s])};
    for (double v : chain.reporting[s]) row.push_back(csv::format_double(v));
    if (row.size() != header.size()) throw InputError("chain columns do not match parameter names");
    csv::write_row(out, row);
  }
}

ChainTable read_chain_csv(const std::string& path) {
  const auto table = csv::read_file(path);
  ChainTable out;
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == "sample") continue;
    out.names.push_back(table.header[c]);
    cols.push_back(c);
  }
  out.columns.resize(cols.size());
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < cols.size(); ++k) out.columns[k].push_back(csv::parse_double(row[cols[k]], path));
  }
  return out;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw InputError("truncated bitset file '" + path + "'", path);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_latent_bitset(const std::string& path, const ChainSamples& chain, std::size_t nodes) {
  if (chain.latent_bits.size() != chain.retained * chain.words_per_sample) {
    throw InputError("chain has no stored latent samples");
  }
  auto out = open_out(path, true);
  out.write("SPUA", 4);
  const std::uint32_t version = 1;
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((version >> (8 * i)) & 0xFF));
  put_u64(out, nodes);
  put_u64(out, chain.retained);
  put_u64(out, chain.words_per_sample);
  for (auto w : chain.latent_bits) put_u64(out, w);
}

LatentBits read_latent_bitset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'", path);
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 4) != "SPUA") {
    throw InputError("'" + path + "' is not a latent bitset file", path);
  }
  LatentBits out;
  out.nodes = get_u64(in, path);
  out.samples = get_u64(in, path);
  out.words_per_sample = get_u64(in, path);
  if (out.words_per_sample != (out.nodes + 63) / 64) throw InputError("inconsistent bitset header", path);
  out.words.resize(out.samples * out.words_per_sample);
  for (auto& w : out.words) w = get_u64(in, path);
  return out;
}

// ---- files -----------------------------------------------------------------

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fnv1a_file(const std::string& path) { return fnv1a_hex(read_text(path)); }

}  // namespace spu::io
