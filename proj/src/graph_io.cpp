#include "eagle/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace eagle {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    lines.push_back(line.substr(first));
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("bad number '" + s + "' in " + context);
  }
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
}

}  // namespace

HetGraph load_graph(const std::filesystem::path& dir) {
  Schema schema;
  for (const auto& line : read_lines(dir / "schema.txt")) {
    std::stringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "node") {
      std::string name;
      ss >> name;
      if (name.empty()) throw DataError("schema.txt: node line missing name");
      schema.add_node_type(name);
    } else if (kind == "edge") {
      std::string name, src, dst;
      ss >> name >> src >> dst;
      if (dst.empty()) throw DataError("schema.txt: incomplete edge line");
      schema.add_edge_type(name, schema.node_type(src), schema.node_type(dst));
    } else {
      throw DataError("schema.txt: unknown declaration '" + kind + "'");
    }
  }

  const std::size_t T = schema.node_type_count();
  std::vector<std::vector<std::string>> names(T);
  std::vector<std::vector<std::vector<double>>> rows(T);
  std::vector<std::map<std::string, std::size_t>> index(T);
  for (const auto& line : read_lines(dir / "nodes.txt")) {
    const auto fields = split_csv(line);
    if (fields.size() < 2) throw DataError("nodes.txt: line too short: " + line);
    const NodeTypeId t = schema.node_type(fields[0]);
    std::vector<double> attrs;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      attrs.push_back(parse_double(fields[i], "nodes.txt"));
    }
    if (!rows[t].empty() && rows[t].back().size() != attrs.size()) {
      throw DataError("nodes.txt: inconsistent attribute dimension for type " +
                      fields[0]);
    }
    if (!index[t].emplace(fields[1], names[t].size()).second) {
      throw DataError("nodes.txt: duplicate node name " + fields[1]);
    }
    names[t].push_back(fields[1]);
    rows[t].push_back(std::move(attrs));
  }

  std::vector<std::size_t> counts(T);
  for (std::size_t t = 0; t < T; ++t) counts[t] = names[t].size();
  HetGraph graph(schema, counts);
  for (NodeTypeId t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < names[t].size(); ++i) {
      graph.set_node_name(t, i, names[t][i]);
    }
    if (!rows[t].empty()) {
      DenseMatrix attrs(rows[t].size(), rows[t][0].size());
      for (std::size_t i = 0; i < rows[t].size(); ++i) {
        for (std::size_t j = 0; j < rows[t][i].size(); ++j) {
          attrs(i, j) = rows[t][i][j];
        }
      }
      graph.set_attributes(t, std::move(attrs));
    }
  }

  for (const auto& line : read_lines(dir / "edges.txt")) {
    const auto fields = split_csv(line);
    if (fields.size() != 3) throw DataError("edges.txt: expected 3 fields: " + line);
    const EdgeTypeId e = graph.schema().edge_type(fields[0]);
    const NodeTypeId st = graph.schema().edge_src(e);
    const NodeTypeId dt = graph.schema().edge_dst(e);
    const auto src_it = index[st].find(fields[1]);
    const auto dst_it = index[dt].find(fields[2]);
    if (src_it == index[st].end() || dst_it == index[dt].end()) {
      throw DataError("edges.txt: unknown endpoint in: " + line);
    }
    graph.add_edge(e, src_it->second, dst_it->second);
  }
  graph.finalize();
  return graph;
}

void save_graph(const HetGraph& graph, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Schema& schema = graph.schema();

  std::string schema_text;
  for (NodeTypeId t = 0; t < schema.node_type_count(); ++t) {
    schema_text += "node " + schema.node_type_name(t) + "\n";
  }
  for (EdgeTypeId e = 0; e < schema.edge_type_count(); ++e) {
    schema_text += "edge " + schema.edge_type_name(e) + " " +
                   schema.node_type_name(schema.edge_src(e)) + " " +
                   schema.node_type_name(schema.edge_dst(e)) + "\n";
  }
  write_file(dir / "schema.txt", schema_text);

  std::string nodes_text;
  for (NodeTypeId t = 0; t < schema.node_type_count(); ++t) {
    const DenseMatrix& attrs = graph.attributes(t);
    for (std::size_t i = 0; i < graph.node_count(t); ++i) {
      nodes_text += schema.node_type_name(t) + "," + graph.node_name(t, i);
      if (attrs.rows() == graph.node_count(t)) {
        for (double v : attrs.row(i)) nodes_text += "," + format_double(v);
      }
      nodes_text += "\n";
    }
  }
  write_file(dir / "nodes.txt", nodes_text);

  std::string edges_text;
  for (EdgeTypeId e = 0; e < schema.edge_type_count(); ++e) {
    const NodeTypeId st = schema.edge_src(e);
    const NodeTypeId dt = schema.edge_dst(e);
    for (const auto& [u, v] : graph.edges(e)) {
      edges_text += schema.edge_type_name(e) + "," + graph.node_name(st, u) +
                    "," + graph.node_name(dt, v) + "\n";
    }
  }
  write_file(dir / "edges.txt", edges_text);
}

std::vector<int> load_labels(const std::filesystem::path& file) {
  std::vector<std::pair<std::size_t, int>> pairs;
  for (const auto& line : read_lines(file)) {
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw DataError("labels: expected index,label: " + line);
    pairs.emplace_back(std::stoul(fields[0]), std::stoi(fields[1]));
  }
  std::size_t max_index = 0;
  for (const auto& [i, _] : pairs) max_index = std::max(max_index, i);
  std::vector<int> labels(pairs.empty() ? 0 : max_index + 1, 0);
  for (const auto& [i, y] : pairs) labels[i] = y;
  return labels;
}

void save_labels(const std::vector<int>& labels,
                 const std::filesystem::path& file) {
  std::string text;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    text += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
  }
  write_file(file, text);
}

void save_injection_record(const InjectionRecord& record,
                           const std::filesystem::path& file) {
  nlohmann::json j;
  j["target_type"] = record.target_type;
  j["k"] = record.k;
  j["seed"] = record.seed;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : record.entries) {
    j["entries"].push_back({{"target", e.target},
                            {"source", e.source},
                            {"candidates", e.candidates}});
  }
  write_file(file, j.dump(2) + "\n");
}

InjectionRecord load_injection_record(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  nlohmann::json j;
  in >> j;
  InjectionRecord record;
  record.target_type = j.at("target_type").get<NodeTypeId>();
  record.k = j.at("k").get<std::size_t>();
  record.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("entries")) {
    record.entries.push_back(
        {e.at("target").get<std::size_t>(), e.at("source").get<std::size_t>(),
         e.at("candidates").get<std::vector<std::size_t>>()});
  }
  return record;
}

namespace {

void write_matrix(std::string& out, const DenseMatrix& m) {
  out += "matrix " + std::to_string(m.rows()) + " " +
         std::to_string(m.cols()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += " ";
      out += format_double(row[j]);
    }
    out += "\n";
  }
}

DenseMatrix read_matrix(std::istream& in) {
  std::string tag;
  std::size_t rows = 0, cols = 0;
  in >> tag >> rows >> cols;
  if (tag != "matrix") throw DataError("checkpoint: expected matrix block");
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) {
    if (!(in >> v)) throw DataError("checkpoint: truncated matrix");
  }
  return m;
}

const char* readout_name(ReadoutMode mode) {
  switch (mode) {
    case ReadoutMode::Average: return "avg";
    case ReadoutMode::Min: return "min";
    case ReadoutMode::Max: return "max";
  }
  return "avg";
}

ReadoutMode readout_from_name(const std::string& name) {
  if (name == "avg") return ReadoutMode::Average;
  if (name == "min") return ReadoutMode::Min;
  if (name == "max") return ReadoutMode::Max;
  throw DataError("checkpoint: unknown readout '" + name + "'");
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt,
                     const std::filesystem::path& file) {
  std::string out = "EAGLE-CKPT v1\n";
  out += "schema_hash " + std::to_string(ckpt.schema_hash) + "\n";
  out += "attr_dim " + std::to_string(ckpt.attr_dim) + "\n";
  const auto& hp = ckpt.params.hp;
  out += "alpha " + format_double(hp.alpha) + "\n";
  out += "beta " + format_double(hp.beta) + "\n";
  out += "gamma " + format_double(hp.gamma) + "\n";
  out += "embed_dim " + std::to_string(hp.embed_dim) + "\n";
  out += "hidden_dim " + std::to_string(hp.hidden_dim) + "\n";
  out += std::string("readout ") + readout_name(hp.readout) + "\n";
  out += "paths " + std::to_string(ckpt.params.paths.size()) + "\n";
  for (const auto& p : ckpt.params.paths) {
    write_matrix(out, p.encoder1.weight);
    write_matrix(out, p.encoder2.weight);
    write_matrix(out, p.attr_decoder.weight);
  }
  write_matrix(out, ckpt.params.disc_weight);
  write_file(file, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::string magic, version;
  in >> magic >> version;
  if (magic != "EAGLE-CKPT" || version != "v1") {
    throw DataError("not an EAGLE v1 checkpoint: " + file.string());
  }
  Checkpoint ckpt;
  std::string key, readout;
  std::size_t path_count = 0;
  in >> key >> ckpt.schema_hash;
  if (key != "schema_hash") throw DataError("checkpoint: bad header");
  in >> key >> ckpt.attr_dim;
  auto& hp = ckpt.params.hp;
  in >> key >> hp.alpha >> key >> hp.beta >> key >> hp.gamma;
  in >> key >> hp.embed_dim >> key >> hp.hidden_dim;
  in >> key >> readout;
  hp.readout = readout_from_name(readout);
  in >> key >> path_count;
  if (key != "paths") throw DataError("checkpoint: bad header");
  for (std::size_t p = 0; p < path_count; ++p) {
    EagleParams::PathParams pp;
    pp.encoder1 = {read_matrix(in), Activation::Relu};
    pp.encoder2 = {read_matrix(in), Activation::Linear};
    pp.attr_decoder = {read_matrix(in), Activation::Relu};
    ckpt.params.paths.push_back(std::move(pp));
  }
  ckpt.params.disc_weight = read_matrix(in);
  return ckpt;
}

}  // namespace eagle
