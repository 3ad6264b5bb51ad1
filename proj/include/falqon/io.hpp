#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "falqon/engine.hpp"
#include "falqon/graph.hpp"
#include "falqon/maxcut.hpp"

namespace falqon {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Graph file: {"version": 1, "n", "degree", "seed": "<decimal>", "edges": [[i, j], ...]}
std::string serialize_graph(const Graph& g);
Graph parse_graph(std::string_view text);

// Baseline file: {"graph_id", "max_cut", "ground_energy", "method", "witness": "0101..."}
// Witness character i is vertex i.
std::string serialize_baseline(const BaselineRecord& b);
BaselineRecord parse_baseline(std::string_view text);

// Schedule file: {"version": 1, "dt", "order": 1|2, "layers", "betas", "train_graph_id",
//                 "n_train", "safeguard_events"}
std::string serialize_schedule(const Schedule& s);
Schedule parse_schedule(std::string_view text);

}  // namespace falqon
