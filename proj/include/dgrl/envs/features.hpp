#pragma once

// Movie feature matrices: cosine similarity, text ingestion, synthetic catalogs.

#include "dgrl/nn.hpp"

#include <cstdint>
#include <string>

namespace dgrl {

/// S_ij = <f_i, f_j> / (|f_i| |f_j|). Throws DataError on a zero row.
Mat build_similarity(const Mat& features);

/// Rows of non-negative numbers separated by commas, semicolons, tabs or spaces.
/// Blank lines and lines starting with '#' are skipped; duplicate rows are
/// dropped keeping the first. Throws FormatError on ragged, empty or malformed
/// input and DataError on an all-zero row.
Mat load_feature_matrix(const std::string& path);

/// Keeps the first occurrence of each distinct row.
Mat unique_rows(const Mat& features);

/// Sparse genre-like rows: 1 to 3 active columns with weights in [0.2, 1],
/// all rows distinct. Deterministic in `seed`.
Mat synth_feature_matrix(int rows, int cols, std::uint64_t seed);

/// Comma-separated rows, shortest round-trip formatting.
void save_feature_matrix(const std::string& path, const Mat& features);

}  // namespace dgrl
