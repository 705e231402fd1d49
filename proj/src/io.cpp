#include "mbv/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mbv/errors.hpp"

namespace mbv {

namespace {

using nlohmann::json;

std::string format_full(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed ") + what + ": " + e.what());
  }
}

int read_node_count(const json& doc, const char* what) {
  if (!doc.is_object() || !doc.contains("p") || !doc["p"].is_number_integer())
    throw ValidationError(std::string(what) + " needs an integer field \"p\"");
  const int p = doc["p"].get<int>();
  (void)subset_count(p);
  return p;
}

SubsetIndex read_set(const json& term, int p) {
  if (!term.contains("set") || !term["set"].is_array())
    throw ValidationError("every term needs a \"set\" array of node indices");
  std::vector<int> nodes;
  for (const auto& v : term["set"]) {
    if (!v.is_number_integer()) throw ValidationError("set entries must be integers");
    const int node = v.get<int>();
    if (node < 1 || node > p)
      throw ValidationError("set entry " + std::to_string(node) + " out of range for p=" +
                            std::to_string(p));
    nodes.push_back(node);
  }
  const SubsetIndex mask = make_subset(nodes);
  if (cardinality(mask) != static_cast<int>(nodes.size()))
    throw ValidationError("set entries must be distinct");
  return mask;
}

json term_record(SubsetIndex d, const char* key, double value) {
  json term;
  term["set"] = subset_nodes(d);
  term[key] = value;
  return term;
}

}  // namespace

std::string theta_model_json(const ThetaVector& th) {
  check_lattice(th.theta);
  json doc;
  doc["p"] = th.theta.p;
  json terms = json::array();
  for (SubsetIndex d = 0; d < th.theta.size(); ++d)
    if (th[d] != 0.0) terms.push_back(term_record(d, "theta", th[d]));
  doc["terms"] = std::move(terms);
  return doc.dump(2) + "\n";
}

ThetaVector theta_model_from_json(const std::string& text) {
  const json doc = parse_json(text, "model file");
  const int p = read_node_count(doc, "model file");
  ThetaVector th{LatticeVector(p)};
  bool has_empty = false;
  std::vector<bool> seen(subset_count(p), false);
  if (doc.contains("terms")) {
    if (!doc["terms"].is_array()) throw ValidationError("\"terms\" must be an array");
    for (const auto& term : doc["terms"]) {
      const SubsetIndex mask = read_set(term, p);
      if (!term.contains("theta") || !term["theta"].is_number())
        throw ValidationError("model terms need a numeric \"theta\"");
      if (seen[mask]) throw ValidationError("duplicate term for one subset");
      seen[mask] = true;
      th[mask] = term["theta"].get<double>();
      if (mask == 0) has_empty = true;
    }
  }
  check_lattice(th.theta);
  if (!has_empty) normalize(th);
  return th;
}

std::string prob_model_json(const ProbabilityVector& pi) {
  pi.validate();
  json doc;
  doc["p"] = pi.node_count();
  json terms = json::array();
  for (SubsetIndex d = 0; d < pi.probs.size(); ++d)
    terms.push_back(term_record(d, "prob", pi[d]));
  doc["terms"] = std::move(terms);
  return doc.dump(2) + "\n";
}

ProbabilityVector prob_model_from_json(const std::string& text) {
  const json doc = parse_json(text, "probability file");
  const int p = read_node_count(doc, "probability file");
  LatticeVector probs(p);
  std::vector<bool> seen(subset_count(p), false);
  if (!doc.contains("terms") || !doc["terms"].is_array())
    throw ValidationError("probability file needs a \"terms\" array");
  for (const auto& term : doc["terms"]) {
    const SubsetIndex mask = read_set(term, p);
    if (!term.contains("prob") || !term["prob"].is_number())
      throw ValidationError("probability terms need a numeric \"prob\"");
    if (seen[mask]) throw ValidationError("duplicate term for one subset");
    seen[mask] = true;
    probs[mask] = term["prob"].get<double>();
  }
  ProbabilityVector pi{std::move(probs)};
  pi.validate();
  return pi;
}

bool model_file_is_probability(const std::filesystem::path& file) {
  const json doc = parse_json(read_text_file(file), "model file");
  if (doc.contains("terms") && doc["terms"].is_array())
    for (const auto& term : doc["terms"])
      if (term.is_object() && term.contains("prob")) return true;
  return false;
}

std::string sample_csv(const SampleMatrix& data) {
  (void)subset_count(data.p);
  std::string out;
  for (int i = 1; i <= data.p; ++i) {
    out += "x" + std::to_string(i);
    out += (i == data.p) ? '\n' : ',';
  }
  for (int k = 0; k < data.n(); ++k) {
    for (int i = 1; i <= data.p; ++i) {
      out += data.value(k, i) ? '1' : '0';
      out += (i == data.p) ? '\n' : ',';
    }
  }
  return out;
}

SampleMatrix sample_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  SampleMatrix data;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (first) {
      first = false;
      if (line.find_first_of("xX") != std::string::npos) continue;  // header row
    }
    std::uint32_t mask = 0;
    int column = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      std::string field = line.substr(pos, comma - pos);
      field.erase(std::remove_if(field.begin(), field.end(),
                                 [](unsigned char c) { return std::isspace(c); }),
                  field.end());
      if (field == "1")
        mask |= std::uint32_t{1} << column;
      else if (field != "0")
        throw ValidationError("sample CSV entries must be 0 or 1, got \"" + field + "\"");
      ++column;
      if (comma == line.size()) break;
      pos = comma + 1;
    }
    if (data.p == 0) {
      if (column > kMaxNodes)
        throw ValidationError("sample CSV has more columns than the lattice cap");
      data.p = column;
    } else if (column != data.p) {
      throw ValidationError("sample CSV rows disagree on the column count");
    }
    data.rows.push_back(mask);
  }
  if (data.p == 0) throw ValidationError("sample CSV holds no observations");
  return data;
}

std::string export_graph(const GraphEstimate& g, GraphFormat format,
                         const std::vector<std::string>& labels) {
  if (!labels.empty() && static_cast<int>(labels.size()) != g.p)
    throw ValidationError("label list must name all " + std::to_string(g.p) + " nodes");
  if (format == GraphFormat::edge_csv) {
    std::string out = "i,j,weight\n";
    for (const auto& [pair, w] : g.edges)
      out += std::to_string(pair.first) + "," + std::to_string(pair.second) + "," +
             format_full(w) + "\n";
    return out;
  }
  std::string out = "graph G {\n";
  for (int i = 1; i <= g.p; ++i) {
    out += "  " + std::to_string(i);
    if (!labels.empty()) out += " [label=\"" + labels[static_cast<std::size_t>(i - 1)] + "\"]";
    out += ";\n";
  }
  for (const auto& [pair, w] : g.edges) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", w);
    out += "  " + std::to_string(pair.first) + " -- " + std::to_string(pair.second) +
           " [label=\"" + buf + "\"];\n";
  }
  out += "}\n";
  return out;
}

GraphEstimate parse_edge_csv(const std::string& text, int p) {
  (void)subset_count(p);
  GraphEstimate g(p);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "i,j,weight") continue;
    std::istringstream row(line);
    std::string i_s, j_s, w_s;
    if (!std::getline(row, i_s, ',') || !std::getline(row, j_s, ',') ||
        !std::getline(row, w_s))
      throw ValidationError("edge CSV rows need i,j,weight");
    try {
      const int i = std::stoi(i_s);
      const int j = std::stoi(j_s);
      const double w = std::stod(w_s);
      if (i >= j) throw ValidationError("edge CSV rows must have i < j");
      g.set_edge(i, j, w);
    } catch (const std::invalid_argument&) {
      throw ValidationError("edge CSV row is not numeric: " + line);
    } catch (const std::out_of_range&) {
      throw ValidationError("edge CSV row is out of range: " + line);
    }
  }
  return g;
}

void write_matrix_csv(const std::vector<std::vector<double>>& m,
                      const std::filesystem::path& file) {
  std::string out;
  for (const auto& row : m) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += format_full(row[c]);
      out += (c + 1 == row.size()) ? '\n' : ',';
    }
  }
  write_text_file(file, out);
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + file.string());
  out << text;
  if (!out) throw ValidationError("failed while writing " + file.string());
}

void write_theta_model(const ThetaVector& th, const std::filesystem::path& file) {
  write_text_file(file, theta_model_json(th));
}

ThetaVector read_theta_model(const std::filesystem::path& file) {
  return theta_model_from_json(read_text_file(file));
}

void write_prob_model(const ProbabilityVector& pi, const std::filesystem::path& file) {
  write_text_file(file, prob_model_json(pi));
}

ProbabilityVector read_prob_model(const std::filesystem::path& file) {
  return prob_model_from_json(read_text_file(file));
}

void write_sample_csv(const SampleMatrix& data, const std::filesystem::path& file) {
  write_text_file(file, sample_csv(data));
}

SampleMatrix read_sample_csv(const std::filesystem::path& file) {
  return sample_from_csv(read_text_file(file));
}

}  // namespace mbv
