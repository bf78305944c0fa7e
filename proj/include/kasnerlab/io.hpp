#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kasnerlab/field.hpp"

namespace kasnerlab {

// Field snapshot: a text header of `# key = value` lines (dim, active
// (1-based), points, scheme, valence, t) followed by one CSV row per grid
// point holding every component in storage order.
void write_snapshot(std::ostream& out, const Field& f, double t);
void write_snapshot(const std::filesystem::path& path, const Field& f, double t);
std::pair<Field, double> read_snapshot(std::istream& in);
std::pair<Field, double> read_snapshot(const std::filesystem::path& path);

// Writes solution slices as snapshot triples (g, K, n) plus an index file
// `slices.csv` with columns t,g,K,n (file names relative to the directory).
class SliceWriter {
 public:
  explicit SliceWriter(std::filesystem::path directory);
  void write(const SolutionState& s);
  const std::filesystem::path& index_path() const { return index_path_; }
  int count() const { return count_; }

 private:
  std::filesystem::path directory_;
  std::filesystem::path index_path_;
  std::ofstream index_;
  int count_ = 0;
};

// Reads slices listed in an index written by SliceWriter; ginv is recomputed.
std::vector<SolutionState> read_slices(const std::filesystem::path& index_path);

// KASNERLAB_OUTPUT_DIR overrides the configured directory when set and non-empty.
std::filesystem::path resolve_output_directory(const std::filesystem::path& configured);

}  // namespace kasnerlab
