#include "kasnerlab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "kasnerlab/diagnostics.hpp"

namespace kasnerlab {

namespace {

template <typename T>
std::string join(const std::vector<T>& v, int offset = 0) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i] + offset;
  return out.str();
}

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void write_snapshot(std::ostream& out, const Field& f, double t) {
  const GridSpec& g = f.grid();
  out << "# dim = " << g.dim << '\n';
  out << "# active = " << join(g.active, 1) << '\n';
  out << "# points = " << join(g.points) << '\n';
  out << "# scheme = " << to_string(g.scheme) << '\n';
  out << "# valence = " << f.valence().upper << ',' << f.valence().lower << '\n';
  out << "# symmetric = " << (f.symmetric() ? 1 : 0) << '\n';
  out << "# t = " << format_real(t) << '\n';
  for (int p = 0; p < f.num_points(); ++p) {
    for (int c = 0; c < f.num_components(); ++c) out << (c ? "," : "") << format_real(f(p, c));
    out << '\n';
  }
}

void write_snapshot(const std::filesystem::path& path, const Field& f, double t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_snapshot(out, f, t);
  if (!out) throw Error("failed writing " + path.string());
}

std::pair<Field, double> read_snapshot(std::istream& in) {
  GridSpec grid;
  Valence valence{};
  bool symmetric = false;
  double t = 0.0;
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "dim") {
        grid.dim = std::stoi(value);
      } else if (key == "active") {
        for (double v : split_numbers(value)) grid.active.push_back(static_cast<int>(v) - 1);
      } else if (key == "points") {
        for (double v : split_numbers(value)) grid.points.push_back(static_cast<int>(v));
      } else if (key == "scheme") {
        grid.scheme = parse_scheme(value);
      } else if (key == "valence") {
        const auto v = split_numbers(value);
        if (v.size() != 2) throw Error("snapshot valence must have two entries");
        valence = Valence{static_cast<int>(v[0]), static_cast<int>(v[1])};
      } else if (key == "symmetric") {
        symmetric = value == "1";
      } else if (key == "t") {
        t = std::stod(value);
      }
      continue;
    }
    rows.push_back(line);
  }
  grid.validate();
  Field f(grid, valence, symmetric);
  if (static_cast<int>(rows.size()) != f.num_points()) throw Error("snapshot row count does not match the grid");
  for (int p = 0; p < f.num_points(); ++p) {
    const auto v = split_numbers(rows[static_cast<std::size_t>(p)]);
    if (static_cast<int>(v.size()) != f.num_components()) throw Error("snapshot row has the wrong number of components");
    for (int c = 0; c < f.num_components(); ++c) f(p, c) = v[static_cast<std::size_t>(c)];
  }
  return {std::move(f), t};
}

std::pair<Field, double> read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_snapshot(in);
}

SliceWriter::SliceWriter(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
  index_path_ = directory_ / "slices.csv";
  index_.open(index_path_);
  if (!index_) throw Error("cannot open " + index_path_.string() + " for writing");
  index_ << "t,g,K,n\n";
}

void SliceWriter::write(const SolutionState& s) {
  char stem[32];
  std::snprintf(stem, sizeof stem, "slice_%05d", count_);
  const std::string g = std::string(stem) + "_g.csv";
  const std::string k = std::string(stem) + "_K.csv";
  const std::string n = std::string(stem) + "_n.csv";
  write_snapshot(directory_ / g, s.g, s.t);
  write_snapshot(directory_ / k, s.K, s.t);
  write_snapshot(directory_ / n, s.n, s.t);
  index_ << format_real(s.t) << ',' << g << ',' << k << ',' << n << '\n';
  index_.flush();
  ++count_;
}

std::vector<SolutionState> read_slices(const std::filesystem::path& index_path) {
  std::ifstream in(index_path);
  if (!in) throw Error("cannot open " + index_path.string());
  const auto dir = index_path.parent_path();
  std::string line;
  std::getline(in, line);
  std::vector<SolutionState> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream row(line);
    std::string t, g, k, n;
    std::getline(row, t, ',');
    std::getline(row, g, ',');
    std::getline(row, k, ',');
    std::getline(row, n, ',');
    SolutionState s;
    s.t = std::stod(t);
    s.g = read_snapshot(dir / trim(g)).first;
    s.K = read_snapshot(dir / trim(k)).first;
    s.n = read_snapshot(dir / trim(n)).first;
    s.ginv = invert_metric(s.g);
    out.push_back(std::move(s));
  }
  return out;
}

std::filesystem::path resolve_output_directory(const std::filesystem::path& configured) {
  const char* env = std::getenv("KASNERLAB_OUTPUT_DIR");
  if (env != nullptr && *env != '\0') return std::filesystem::path(env);
  return configured;
}

}  // namespace kasnerlab
