/**
 *  Copyright (c) 2026 by Contributors
 * @file dataset_io.cpp
 */
#include "dgnn/dataset_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dgnn {
namespace {

namespace fs = std::filesystem;

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  check(out.good(), "cannot open for writing: " + p.string());
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  check(in.good(), "cannot open for reading: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void save_dataset(const DynamicGraph& graph, const fs::path& dir) {
  fs::create_directories(dir);

  nlohmann::json manifest{{"num_nodes", graph.num_nodes()},
                          {"feature_dim", graph.feature_dim()},
                          {"T", graph.length()},
                          {"format_version", 1}};
  write_file(dir / "manifest.json", manifest.dump() + "\n");

  const Snapshot& base = graph.snapshot(0);
  {
    std::string s;
    for (const Edge& e : base.edges()) {
      s += std::to_string(e.src) + "\t" + std::to_string(e.dst) + "\n";
    }
    write_file(dir / "snapshot_0.edges", s);
  }
  {
    std::string s;
    for (NodeId i = 0; i < base.num_nodes(); ++i) {
      for (NodeId j = 0; j < base.feature_dim(); ++j) {
        if (j) s += ",";
        s += fmt_value(base.feats()(i, j));
      }
      s += "\n";
    }
    write_file(dir / "snapshot_0.feats", s);
  }

  for (Timestep t = 1; t < graph.length(); ++t) {
    const DeltaGraph& d = graph.delta(t);
    std::string edges;
    for (const Edge& e : d.deletions) {
      edges += "D " + std::to_string(e.src) + " " + std::to_string(e.dst) + "\n";
    }
    for (const Edge& e : d.insertions) {
      edges += "I " + std::to_string(e.src) + " " + std::to_string(e.dst) + "\n";
    }
    write_file(dir / ("delta_" + std::to_string(t) + ".edges"), edges);

    std::string feats;
    for (size_t i = 0; i < d.changed_nodes.size(); ++i) {
      feats += std::to_string(d.changed_nodes[i]);
      for (NodeId j = 0; j < graph.feature_dim(); ++j) {
        feats += "," + fmt_value(d.changed_feats(static_cast<Eigen::Index>(i), j));
      }
      feats += "\n";
    }
    write_file(dir / ("delta_" + std::to_string(t) + ".feats"), feats);
  }
}

DynamicGraph load_dataset(const fs::path& dir) {
  auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  const NodeId num_nodes = manifest.at("num_nodes").get<NodeId>();
  const NodeId dim = manifest.at("feature_dim").get<NodeId>();
  const Timestep total = manifest.at("T").get<Timestep>();
  check(manifest.at("format_version").get<int>() == 1, "unsupported dataset format version");
  check(num_nodes > 0 && dim > 0 && total > 0, "malformed manifest");

  std::vector<Edge> edges;
  {
    std::istringstream in(read_file(dir / "snapshot_0.edges"));
    long long src, dst;
    while (in >> src >> dst) edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst)});
  }
  Matrix feats(num_nodes, dim);
  {
    std::istringstream in(read_file(dir / "snapshot_0.feats"));
    std::string line;
    for (NodeId i = 0; i < num_nodes; ++i) {
      check(static_cast<bool>(std::getline(in, line)), "snapshot_0.feats truncated");
      std::istringstream row(line);
      std::string cell;
      for (NodeId j = 0; j < dim; ++j) {
        check(static_cast<bool>(std::getline(row, cell, ',')), "snapshot_0.feats row truncated");
        feats(i, j) = std::stod(cell);
      }
    }
  }

  std::vector<Snapshot> snaps;
  snaps.emplace_back(0, num_nodes, std::move(edges), feats);

  for (Timestep t = 1; t < total; ++t) {
    DeltaGraph d;
    d.t = t;
    {
      std::istringstream in(read_file(dir / ("delta_" + std::to_string(t) + ".edges")));
      std::string kind;
      long long src, dst;
      while (in >> kind >> src >> dst) {
        Edge e{static_cast<NodeId>(src), static_cast<NodeId>(dst)};
        if (kind == "D") {
          d.deletions.push_back(e);
        } else if (kind == "I") {
          d.insertions.push_back(e);
        } else {
          fail("bad delta edge tag: " + kind);
        }
      }
    }
    {
      std::istringstream in(read_file(dir / ("delta_" + std::to_string(t) + ".feats")));
      std::string line;
      std::vector<std::vector<double>> rows;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        check(static_cast<bool>(std::getline(row, cell, ',')), "delta feats row truncated");
        d.changed_nodes.push_back(static_cast<NodeId>(std::stol(cell)));
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        check(static_cast<NodeId>(vals.size()) == dim, "delta feats row has wrong arity");
        rows.push_back(std::move(vals));
      }
      d.changed_feats.resize(static_cast<Eigen::Index>(rows.size()), dim);
      for (size_t i = 0; i < rows.size(); ++i) {
        for (NodeId j = 0; j < dim; ++j) d.changed_feats(static_cast<Eigen::Index>(i), j) = rows[i][j];
      }
    }
    snaps.push_back(apply_delta(snaps.back(), d));
  }
  return DynamicGraph(std::move(snaps));
}

}  // namespace dgnn
