#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mbv/model.hpp"
#include "mbv/sampler.hpp"

namespace mbv {

// Model files are JSON documents with a node count and a list of term
// records; omitted sets mean a zero entry. The empty set may be omitted from
// theta files, in which case it is recomputed by normalization on load.
std::string theta_model_json(const ThetaVector& th);
ThetaVector theta_model_from_json(const std::string& text);
void write_theta_model(const ThetaVector& th, const std::filesystem::path& file);
ThetaVector read_theta_model(const std::filesystem::path& file);

// Probability files list every outcome with a prob entry; entries must be
// positive and sum to one.
std::string prob_model_json(const ProbabilityVector& pi);
ProbabilityVector prob_model_from_json(const std::string& text);
void write_prob_model(const ProbabilityVector& pi, const std::filesystem::path& file);
ProbabilityVector read_prob_model(const std::filesystem::path& file);

// True when the file's records carry prob entries rather than theta entries.
bool model_file_is_probability(const std::filesystem::path& file);

// Sample CSV: one row per observation, p comma-separated 0/1 values. The
// writer emits an x1,...,xp header; the reader accepts files with or
// without it.
std::string sample_csv(const SampleMatrix& data);
SampleMatrix sample_from_csv(const std::string& text);
void write_sample_csv(const SampleMatrix& data, const std::filesystem::path& file);
SampleMatrix read_sample_csv(const std::filesystem::path& file);

enum class GraphFormat { dot, edge_csv };

// dot: undirected graph with weight labels, nodes named by index or by the
// supplied label list. edge_csv: header i,j,weight and one row per edge,
// i < j, full-precision weights.
std::string export_graph(const GraphEstimate& g, GraphFormat format,
                         const std::vector<std::string>& labels = {});
GraphEstimate parse_edge_csv(const std::string& text, int p);

void write_matrix_csv(const std::vector<std::vector<double>>& m, const std::filesystem::path& file);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace mbv
