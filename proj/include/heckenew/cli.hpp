#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "heckenew/arith.hpp"
#include "heckenew/report.hpp"
#include "heckenew/space_cache.hpp"

namespace heckenew::cli {

enum class Format { json, csv, text };

Format parse_format(const std::string& s);
std::string format_name(Format f);

struct CliConfig {
  std::filesystem::path cache_dir;
  i64 level_cap = 200;       // weight 2
  i64 level_cap_high = 60;   // weight >= 4
  int weight_cap = 4;
  Format format = Format::json;
  bool star_plus = false;
  int jobs = 1;

  // Throws std::invalid_argument on a bad field.
  void validate() const;
  // Throws std::invalid_argument when (N, w) is outside the caps.
  void check_caps(i64 level, int weight) const;
};

std::filesystem::path default_cache_dir();

enum class ExitCode : int { ok = 0, failed = 1, invalid = 2 };

struct EmitParams {
  std::string op;
  std::optional<i64> p, q;
  std::optional<int> r, j;
};

// A unit of the default verification grid.
struct SuiteItem {
  i64 level;
  int weight;
  std::string what;  // theorem name, "lemmas", "section6" or "identities"
};

std::vector<SuiteItem> default_suite();

// Runs one grid item; throws newform::ShapeError on a shape mismatch.
std::vector<CheckReport> run_item(SpaceCache& cache, const SuiteItem& item, bool star_plus);
// Runs items on `jobs` workers; results keep the input order.
std::vector<std::vector<CheckReport>> run_items(SpaceCache& cache, const std::vector<SuiteItem>& items, bool star_plus, int jobs);

// Theorems `auto` expands to at this level.
std::vector<std::string> auto_theorems(i64 level);

int cmd_local(const CliConfig& cfg, i64 p, int n, const std::string& action, std::ostream& out, std::ostream& err);
int cmd_check(const CliConfig& cfg, i64 level, int weight, const std::string& theorem, std::ostream& out, std::ostream& err);
int cmd_check_suite(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_emit(const CliConfig& cfg, i64 level, int weight, const EmitParams& params, const std::string& output,
             std::ostream& out, std::ostream& err);
int cmd_cache(const CliConfig& cfg, const std::string& action, std::ostream& out, std::ostream& err);

// Serialized operator matrix; the exact bytes written by cmd_emit.
std::string emit_document(SpaceCache& cache, i64 level, int weight, const EmitParams& params, Format format);

}  // namespace heckenew::cli
