#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "heckenew/cli.hpp"

using namespace heckenew;

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of newform characterizations via modular symbols"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::CliConfig cfg;
  std::string cache_dir = cli::default_cache_dir().string();
  std::string format = "json";
  app.add_option("--cache-dir", cache_dir, "directory for cached symbol spaces")->envname("HECKENEW_CACHE_DIR");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv", "text"}))->envname("HECKENEW_FORMAT");
  app.add_option("--level-cap", cfg.level_cap, "largest level at weight 2")->check(CLI::PositiveNumber)->envname("HECKENEW_LEVEL_CAP");
  app.add_option("--level-cap-high", cfg.level_cap_high, "largest level at weight 4 and above")
      ->check(CLI::PositiveNumber)
      ->envname("HECKENEW_LEVEL_CAP_HIGH");
  app.add_option("--weight-cap", cfg.weight_cap, "largest weight")->check(CLI::Range(2, 1000))->envname("HECKENEW_WEIGHT_CAP");
  app.add_flag("--star-plus", cfg.star_plus, "restrict subspace checks to the +1 eigenspace of star")->envname("HECKENEW_STAR_PLUS");
  app.add_option("--jobs,-j", cfg.jobs, "worker threads")->check(CLI::PositiveNumber)->envname("HECKENEW_JOBS");

  i64 p = 0;
  int n = 1;
  std::string local_action;
  auto* local = app.add_subcommand("local", "certify the local Hecke algebra at (p, n)");
  local->add_option("--p", p, "prime")->required();
  local->add_option("--n", n, "exponent")->required();
  local->add_option("action", local_action, "verify, table or decompose")->required();

  i64 level = 0;
  int weight = 2;
  std::string theorem = "auto";
  bool suite = false;
  auto* check = app.add_subcommand("check", "run theorem, lemma or old-space checks at a level");
  auto* level_opt = check->add_option("--level,-N", level, "level N");
  check->add_option("--weight,-w", weight, "even weight");
  check->add_option("--theorem,-t", theorem, "auto, T1, T2, T2prime, T3, T5, lemmas, section6, identities");
  check->add_flag("--suite", suite, "run the default verification grid")->excludes(level_opt);

  cli::EmitParams emit_params;
  std::string output;
  i64 emit_p = 0, emit_q = 0;
  int emit_r = 0, emit_j = 0;
  auto* emit = app.add_subcommand("emit", "write an operator matrix on cuspidal symbols");
  emit->add_option("--level,-N", level, "level N")->required();
  emit->add_option("--weight,-w", weight, "even weight");
  emit->add_option("--op", emit_params.op, "W, Utilde, Qp, Qp_prime, Qpn, Qp2, Qp2_prime, L, S, S_prime, Rp_sq, Rchi_sq, T, star")
      ->required();
  auto* op_p = emit->add_option("--p", emit_p, "prime");
  auto* op_q = emit->add_option("--q", emit_q, "prime power or Hecke index");
  auto* op_r = emit->add_option("--r", emit_r, "S index r");
  auto* op_j = emit->add_option("--j", emit_j, "L index j");
  emit->add_option("--output,-o", output, "output file, '-' for standard output");

  std::string cache_action;
  auto* cache = app.add_subcommand("cache", "inspect or clear the space cache");
  cache->add_option("action", cache_action, "status or clear")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(cli::ExitCode::invalid);
  }

  cfg.cache_dir = cache_dir;
  cfg.format = cli::parse_format(format);

  if (local->parsed()) return cli::cmd_local(cfg, p, n, local_action, std::cout, std::cerr);
  if (check->parsed()) {
    if (suite) return cli::cmd_check_suite(cfg, std::cout, std::cerr);
    if (level_opt->count() == 0) {
      std::cerr << "error: check needs --level or --suite\n";
      return static_cast<int>(cli::ExitCode::invalid);
    }
    return cli::cmd_check(cfg, level, weight, theorem, std::cout, std::cerr);
  }
  if (emit->parsed()) {
    if (op_p->count()) emit_params.p = emit_p;
    if (op_q->count()) emit_params.q = emit_q;
    if (op_r->count()) emit_params.r = emit_r;
    if (op_j->count()) emit_params.j = emit_j;
    return cli::cmd_emit(cfg, level, weight, emit_params, output, std::cout, std::cerr);
  }
  return cli::cmd_cache(cfg, cache_action, std::cout, std::cerr);
}
