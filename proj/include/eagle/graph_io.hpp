#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eagle/hetgraph.hpp"
#include "eagle/injector.hpp"
#include "eagle/model.hpp"

namespace eagle {

// Plain-text graph container: schema.txt, nodes.txt, edges.txt in one
// directory. UTF-8, '#' comment lines ignored.
//   schema.txt  node <TypeName>
//               edge <EdgeName> <SrcType> <DstType>
//   nodes.txt   <TypeName>,<name>,<v1>,<v2>,...
//   edges.txt   <EdgeName>,<src name>,<dst name>
HetGraph load_graph(const std::filesystem::path& dir);
void save_graph(const HetGraph& graph, const std::filesystem::path& dir);

// Ground-truth labels, one `index,label` line per scored node.
std::vector<int> load_labels(const std::filesystem::path& file);
void save_labels(const std::vector<int>& labels,
                 const std::filesystem::path& file);

void save_injection_record(const InjectionRecord& record,
                           const std::filesystem::path& file);
InjectionRecord load_injection_record(const std::filesystem::path& file);

// Versioned checkpoint: every weight matrix plus hyperparameters and the
// schema hash of the graph it was trained on. Text with full double
// round-trip; save/load is bit-identical.
struct Checkpoint {
  EagleParams params;
  std::uint64_t schema_hash = 0;
  std::size_t attr_dim = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace eagle
