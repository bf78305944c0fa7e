#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kasnerlab/diagnostics.hpp"
#include "kasnerlab/errors.hpp"
#include "kasnerlab/evolution.hpp"
#include "kasnerlab/grid.hpp"
#include "kasnerlab/kasner.hpp"
#include "kasnerlab/vtd.hpp"

namespace kasnerlab {

// Config files are `[section]` headers followed by `key = value` lines; `#`
// and `;` start comments. Lists are comma separated. Direction and component
// indices are 1-based in files and 0-based in the loaded structures.

struct ConfigIssue {
  std::string path;  // section.key
  std::string message;
};

class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

enum class Command { exponents, simulate, kretschmann, geodesic, vtd_check };

std::string to_string(Command c);

struct ExponentSpec {
  enum class Family { construct, borderline36, explicit_list, kasner_circle };
  Family family = Family::construct;
  int dim = 38;
  double eps = 0.001;
  QuadraticRoot root = QuadraticRoot::plus;
  std::vector<double> values;
  double theta = 0.0;  // kasner_circle

  KasnerExponents build() const;
};

struct PerturbationSpec {
  enum class Target { none, g, kappa, n };
  Target target = Target::none;
  int i = 0;              // component indices (0-based); ignored for n
  int j = 0;
  std::vector<int> mode;  // wave numbers per active axis
  double amplitude = 0.0;

  // v = amplitude * sin(2 pi mode . x). For g, adds v to g_ij and g_ji and
  // recomputes ginv. For kappa, adds v sqrt(g_ii g_jj) to the lowered t K_ij
  // and t K_ji, so t K^i_i changes by v on diagonal metrics. For n, adds v.
  void apply(SolutionState& s) const;
};

struct OutputSpec {
  std::string directory = "out";
  std::string diagnostics = "diagnostics.csv";
  std::string summary = "summary.json";
  bool final_snapshot = false;
  int slice_every = 0;  // write every k-th record as a slice; 0 disables
};

struct KretschmannSpec {
  std::vector<double> t_list{1.0, 0.5, 0.25, 0.125};
};

struct GeodesicSpec {
  double t_start = 1.0;
  double t_min = 0.01;
  std::vector<double> position;  // empty: origin
  std::vector<double> velocity;  // (dt/dA, dx/dA); empty: vertical unit
  double sigma = 0.16;
  int random_starts = 0;
  std::uint64_t seed = 1;
  std::string run_index;  // slices.csv of a stored run instead of analytic Kasner
};

struct VtdSpec {
  enum class Shape { constant, eps_sine, circle_sine };
  Shape shape = Shape::eps_sine;
  double eps0 = 0.001;
  double eps_amplitude = 0.5;  // eps(x) = eps0 (1 + eps_amplitude sin 2 pi x)
  double theta0 = 0.55;           // q_1 ~ 0.9, away from the flat points
  double theta_amplitude = 0.05;  // theta(x) = theta0 + theta_amplitude sin 2 pi x
  std::vector<double> t_list;

  // The sine varies along the first active direction of `grid`.
  VtdProfile build(const GridSpec& grid, const ExponentSpec& exponents) const;
};

struct RunConfig {
  Command command = Command::exponents;
  ExponentSpec exponents;
  GridSpec grid;
  PerturbationSpec perturbation;
  IntegratorConfig integrator;
  std::optional<NormParams> norms;
  OutputSpec output;
  KretschmannSpec kretschmann;
  GeodesicSpec geodesic;
  VtdSpec vtd;
};

// Every problem is collected before throwing ConfigValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
// Non-throwing variant: the list is empty for a valid config.
std::vector<ConfigIssue> check_config(const std::string& text);

}  // namespace kasnerlab
