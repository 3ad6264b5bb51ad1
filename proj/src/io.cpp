#include "falqon/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "falqon/error.hpp"

namespace falqon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::malformed_input, std::string(what) + " at line " + std::to_string(line) + ", column " +
                                                std::to_string(col) + ": " + e.what());
  }
}

const json& field(const json& obj, const char* key, std::string_view what) {
  if (!obj.is_object()) throw Error(ErrorKind::malformed_input, std::string(what) + ": top level is not an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorKind::malformed_input, std::string(what) + ": missing \"" + key + "\"");
  return *it;
}

long long get_int(const json& obj, const char* key, std::string_view what) {
  const json& v = field(obj, key, what);
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::malformed_input, std::string(what) + ": \"" + key + "\" must be an integer");
  }
  return v.get<long long>();
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw Error(ErrorKind::malformed_input, where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorKind::malformed_input, where + " is not finite");
  return d;
}

std::string get_string(const json& obj, const char* key, std::string_view what) {
  const json& v = field(obj, key, what);
  if (!v.is_string()) {
    throw Error(ErrorKind::malformed_input, std::string(what) + ": \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

void check_version(const json& obj, std::string_view what) {
  if (get_int(obj, "version", what) != 1) {
    throw Error(ErrorKind::malformed_input, std::string(what) + ": unsupported version");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // keep JSON readers from treating integral values as integers
  if (std::isfinite(v) && s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io_error, "failed reading " + path.string());
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::io_error, "failed writing " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string serialize_graph(const Graph& g) {
  std::string out = "{\n";
  out += "  \"version\": 1,\n";
  out += "  \"n\": " + std::to_string(g.node_count()) + ",\n";
  out += "  \"degree\": " + std::to_string(g.degree()) + ",\n";
  out += "  \"seed\": " + json_string(std::to_string(g.seed())) + ",\n";
  out += "  \"edges\": [";
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const auto& [i, j] = g.edges()[k];
    out += (k ? ", [" : "[") + std::to_string(i) + ", " + std::to_string(j) + "]";
  }
  out += "]\n}\n";
  return out;
}

Graph parse_graph(std::string_view text) {
  constexpr std::string_view what = "graph file";
  const json doc = parse_json(text, what);
  check_version(doc, what);
  const long long n = get_int(doc, "n", what);
  const long long degree = get_int(doc, "degree", what);
  if (n < 1 || n > 62) throw Error(ErrorKind::malformed_input, "graph file: n out of range");
  if (degree < 0) throw Error(ErrorKind::malformed_input, "graph file: negative degree");

  const std::string seed_text = get_string(doc, "seed", what);
  std::uint64_t seed = 0;
  auto [ptr, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), seed);
  if (ec != std::errc{} || ptr != seed_text.data() + seed_text.size()) {
    throw Error(ErrorKind::malformed_input, "graph file: seed \"" + seed_text + "\" is not an unsigned integer");
  }

  const json& edges = field(doc, "edges", what);
  if (!edges.is_array()) throw Error(ErrorKind::malformed_input, "graph file: \"edges\" must be an array");
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const json& e = edges[k];
    const std::string where = "graph file: edges[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw Error(ErrorKind::malformed_input, where + " must be a pair of integers");
    }
    const long long i = e[0].get<long long>(), j = e[1].get<long long>();
    if (i == j) throw Error(ErrorKind::malformed_input, where + " is a self-loop on vertex " + std::to_string(i));
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw Error(ErrorKind::malformed_input, where + " has an endpoint outside [0, " + std::to_string(n) + ")");
    }
    if (i > j) throw Error(ErrorKind::malformed_input, where + " is not ordered i < j");
    if (!list.empty() && Edge(int(i), int(j)) <= list.back()) {
      throw Error(ErrorKind::malformed_input, where + " is out of order or duplicated");
    }
    list.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return Graph(static_cast<int>(n), std::move(list), seed, static_cast<int>(degree));
}

std::string serialize_baseline(const BaselineRecord& b) {
  std::string out = "{\n";
  out += "  \"graph_id\": " + json_string(b.graph_id) + ",\n";
  out += "  \"max_cut\": " + std::to_string(b.max_cut) + ",\n";
  out += "  \"ground_energy\": " + std::to_string(b.ground_energy) + ",\n";
  out += "  \"method\": " + json_string(to_string(b.method)) + ",\n";
  out += "  \"witness\": " + json_string(assignment_to_string(b.witness)) + "\n}\n";
  return out;
}

BaselineRecord parse_baseline(std::string_view text) {
  constexpr std::string_view what = "baseline file";
  const json doc = parse_json(text, what);
  BaselineRecord b;
  b.graph_id = get_string(doc, "graph_id", what);
  b.max_cut = static_cast<int>(get_int(doc, "max_cut", what));
  b.ground_energy = static_cast<int>(get_int(doc, "ground_energy", what));
  try {
    b.method = parse_baseline_method(get_string(doc, "method", what));
    b.witness = assignment_from_string(get_string(doc, "witness", what));
  } catch (const Error& e) {
    throw Error(ErrorKind::malformed_input, std::string(what) + ": " + e.what());
  }
  if (b.max_cut < 0 || b.ground_energy != -b.max_cut) {
    throw Error(ErrorKind::malformed_input, "baseline file: ground_energy must equal -max_cut");
  }
  return b;
}

std::string serialize_schedule(const Schedule& s) {
  std::string out = "{\n";
  out += "  \"version\": 1,\n";
  out += "  \"dt\": " + format_double(s.dt) + ",\n";
  out += "  \"order\": " + std::to_string(static_cast<int>(s.order)) + ",\n";
  out += "  \"layers\": " + std::to_string(s.layers()) + ",\n";
  out += "  \"betas\": [";
  for (std::size_t k = 0; k < s.betas.size(); ++k) out += (k ? ", " : "") + format_double(s.betas[k]);
  out += "],\n";
  out += "  \"train_graph_id\": " + json_string(s.train_graph_id) + ",\n";
  out += "  \"n_train\": " + std::to_string(s.n_train) + ",\n";
  out += "  \"safeguard_events\": " + std::to_string(s.safeguard_events) + "\n}\n";
  return out;
}

Schedule parse_schedule(std::string_view text) {
  constexpr std::string_view what = "schedule file";
  const json doc = parse_json(text, what);
  check_version(doc, what);
  Schedule s;
  s.dt = get_number(field(doc, "dt", what), "schedule file: \"dt\"");
  if (!(s.dt > 0)) throw Error(ErrorKind::malformed_input, "schedule file: \"dt\" must be positive");
  const long long order = get_int(doc, "order", what);
  if (order != 1 && order != 2) throw Error(ErrorKind::malformed_input, "schedule file: \"order\" must be 1 or 2");
  s.order = static_cast<FeedbackOrder>(order);
  const long long layers = get_int(doc, "layers", what);
  const json& betas = field(doc, "betas", what);
  if (!betas.is_array()) throw Error(ErrorKind::malformed_input, "schedule file: \"betas\" must be an array");
  for (std::size_t k = 0; k < betas.size(); ++k) {
    s.betas.push_back(get_number(betas[k], "schedule file: betas[" + std::to_string(k) + "]"));
  }
  if (layers != static_cast<long long>(s.betas.size())) {
    throw Error(ErrorKind::malformed_input, "schedule file: \"layers\" does not match the number of betas");
  }
  s.train_graph_id = get_string(doc, "train_graph_id", what);
  s.n_train = static_cast<int>(get_int(doc, "n_train", what));
  s.safeguard_events = static_cast<int>(get_int(doc, "safeguard_events", what));
  return s;
}

}  // namespace falqon
