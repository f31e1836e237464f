#include "heckenew/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "heckenew/local_hecke.hpp"
#include "heckenew/newform_ops.hpp"

namespace heckenew::cli {

namespace fs = std::filesystem;
using newform::Theorem;

namespace {

constexpr const char* kCheckSchema = "heckenew.check/1";
constexpr const char* kLocalSchema = "heckenew.local/1";
constexpr const char* kEmitSchema = "heckenew.matrix/1";
constexpr const char* kCacheSchema = "heckenew.cache/1";

const std::vector<std::string> kCheckKinds = {"auto", "T1", "T2", "T2prime", "T3", "T5", "lemmas", "section6", "identities"};

std::optional<Theorem> theorem_from_name(const std::string& s) {
  if (s == "T1") return Theorem::T1;
  if (s == "T2") return Theorem::T2;
  if (s == "T2prime") return Theorem::T2prime;
  if (s == "T3") return Theorem::T3;
  if (s == "T5") return Theorem::T5;
  return std::nullopt;
}

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_reports(Format f, const ojson& header, const std::vector<CheckReport>& reports, std::ostream& out) {
  if (f == Format::json) {
    ojson doc = header;
    doc["pass"] = all_pass(reports);
    ojson rs = ojson::array();
    for (const auto& r : reports) rs.push_back(r.to_json());
    doc["reports"] = rs;
    out << doc.dump(2) << "\n";
    return;
  }
  if (f == Format::csv) {
    out << "id,N,w,pass,lhs_dim,rhs_dim\n";
    for (const auto& r : reports) {
      ojson j = r.to_json();
      out << r.id << "," << csv_cell(r.inputs.value("N", ojson())) << "," << csv_cell(r.inputs.value("w", ojson())) << ","
          << (r.pass ? "true" : "false") << "," << csv_cell(j["lhs_dim"]) << "," << csv_cell(j["rhs_dim"]) << "\n";
    }
    return;
  }
  for (const auto& r : reports) {
    ojson j = r.to_json();
    out << (r.pass ? "PASS " : "FAIL ") << r.id << " " << r.inputs.dump();
    if (r.lhs_dim) out << " lhs=" << *r.lhs_dim;
    if (r.rhs_dim) out << " rhs=" << *r.rhs_dim;
    out << "\n";
  }
  out << (all_pass(reports) ? "all checks passed" : "some checks FAILED") << " (" << reports.size() << ")\n";
}

int exit_for(bool pass) { return static_cast<int>(pass ? ExitCode::ok : ExitCode::failed); }
int invalid(std::ostream& err, const std::string& msg) {
  err << "error: " << msg << "\n";
  return static_cast<int>(ExitCode::invalid);
}

std::string matrix_csv(const linalg::QMatrix& m) {
  std::ostringstream s;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) s << (c ? "," : "") << linalg::to_string(m(r, c));
    s << "\n";
  }
  return s.str();
}

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  throw std::invalid_argument("unknown format '" + s + "' (json, csv, text)");
}

std::string format_name(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::text: return "text";
  }
  return "?";
}

void CliConfig::validate() const {
  if (level_cap < 1 || level_cap_high < 1 || weight_cap < 2) throw std::invalid_argument("caps must be positive");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

void CliConfig::check_caps(i64 level, int weight) const {
  if (level < 1) throw std::invalid_argument("level must be positive");
  if (weight < 2 || weight % 2 != 0) throw std::invalid_argument("weight must be even and at least 2");
  if (weight > weight_cap) throw std::invalid_argument("weight " + std::to_string(weight) + " exceeds the weight cap " + std::to_string(weight_cap));
  const i64 cap = weight == 2 ? level_cap : level_cap_high;
  if (level > cap) throw std::invalid_argument("level " + std::to_string(level) + " exceeds the level cap " + std::to_string(cap));
}

fs::path default_cache_dir() {
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return fs::path(x) / "heckenew";
  if (const char* h = std::getenv("HOME"); h && *h) return fs::path(h) / ".cache" / "heckenew";
  return fs::path(".heckenew_cache");
}

std::vector<SuiteItem> default_suite() {
  std::vector<SuiteItem> items;
  for (i64 n : {14, 15, 21, 22, 26, 30, 33, 34, 35, 38, 39, 42, 46, 51, 55, 57, 58, 62, 65, 66, 69, 70, 77, 78})
    items.push_back({n, 2, "T1"});
  for (i64 n : {14, 15, 21, 26}) items.push_back({n, 4, "T1"});
  for (i64 n : {20, 45, 50, 52, 75, 98, 63}) {
    items.push_back({n, 2, "T2"});
    items.push_back({n, 2, "T2prime"});
  }
  for (i64 n : {8, 16, 27, 24, 48, 54, 72, 80, 100}) items.push_back({n, 2, "T3"});
  for (i64 n : {16, 48, 80, 144}) items.push_back({n, 2, "T5"});
  for (i64 n : {22, 33, 20, 45, 50, 8, 16, 24, 48}) items.push_back({n, 2, "lemmas"});
  for (i64 n : {22, 26, 33, 34, 38, 46, 66}) items.push_back({n, 2, "section6"});
  std::set<std::pair<int, i64>> levels;
  for (const auto& it : items) levels.insert({it.weight, it.level});
  for (auto [w, n] : levels) items.push_back({n, w, "identities"});
  return items;
}

std::vector<std::string> auto_theorems(i64 level) {
  std::vector<std::string> out;
  if (newform::theorem_applies(Theorem::T1, level)) out.push_back("T1");
  if (newform::theorem_applies(Theorem::T2, level)) {
    out.push_back("T2");
    out.push_back("T2prime");
  }
  if (!newform::theorem_applies(Theorem::T1, level)) out.push_back("T3");
  if (newform::theorem_applies(Theorem::T5, level)) out.push_back("T5");
  return out;
}

std::vector<CheckReport> run_item(SpaceCache& cache, const SuiteItem& item, bool star_plus) {
  newform::CheckOptions opts;
  opts.star_plus = star_plus;
  if (auto t = theorem_from_name(item.what)) return {newform::check_theorem(cache, item.level, item.weight, *t, opts)};
  if (item.what == "lemmas") return newform::check_lemma_suite(cache, item.level, item.weight);
  if (item.what == "section6") return newform::check_section6(cache, item.level, item.weight, opts);
  if (item.what == "identities") return newform::check_operator_identities(cache, item.level, item.weight);
  if (item.what == "auto") {
    std::vector<CheckReport> out;
    for (const auto& name : auto_theorems(item.level)) {
      auto rs = run_item(cache, {item.level, item.weight, name}, star_plus);
      out.insert(out.end(), rs.begin(), rs.end());
    }
    return out;
  }
  throw std::invalid_argument("unknown check '" + item.what + "'");
}

std::vector<std::vector<CheckReport>> run_items(SpaceCache& cache, const std::vector<SuiteItem>& items, bool star_plus, int jobs) {
  std::vector<std::vector<CheckReport>> results(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        results[i] = run_item(cache, items[i], star_plus);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

int cmd_local(const CliConfig& cfg, i64 p, int n, const std::string& action, std::ostream& out, std::ostream& err) {
  local::LocalParams params{p, n};
  try {
    cfg.validate();
    params.validate();
  } catch (const std::exception& e) {
    return invalid(err, e.what());
  }
  ojson doc;
  doc["schema"] = kLocalSchema;
  doc["action"] = action;
  bool pass = false;

  if (action == "verify") {
    CheckReport r = local::verify_local_relations(params);
    if (cfg.format != Format::json) {
      if (cfg.format == Format::csv) out << "relation,params,p,n,pass\n";
      for (const auto& rel : r.details["relations"]) {
        std::string ps;
        for (const auto& [key, val] : rel["params"].items()) ps += (ps.empty() ? "" : ";") + key + "=" + val.dump();
        if (cfg.format == Format::csv)
          out << rel["relation"].get<std::string>() << "," << ps << "," << p << "," << n << "," << (rel["pass"].get<bool>() ? "true" : "false") << "\n";
        else
          out << (rel["pass"].get<bool>() ? "PASS " : "FAIL ") << rel["relation"].get<std::string>() << (ps.empty() ? "" : " [" + ps + "]") << "\n";
      }
      return exit_for(r.pass);
    }
    doc["pass"] = r.pass;
    doc["report"] = r.to_json();
    pass = r.pass;
  } else if (action == "table") {
    auto rows = local::eigenvector_table(params);
    auto expected = local::expected_eigenvector_table(params);
    pass = rows.size() == expected.size();
    for (std::size_t i = 0; pass && i < rows.size(); ++i)
      pass = rows[i].vector == expected[i].vector && rows[i].u0 == expected[i].u0 && rows[i].y == expected[i].y && rows[i].v == expected[i].v;
    ojson t = local::eigen_table_to_json(params, rows);
    if (cfg.format != Format::json) {
      std::string sep = cfg.format == Format::csv ? "," : "\t";
      out << "vector";
      for (const auto& c : t["columns"]) out << sep << c.get<std::string>();
      out << "\n";
      for (const auto& row : t["rows"]) {
        out << row["vector"].get<std::string>();
        for (const auto& v : row["eigenvalues"]) out << sep << v.dump();
        out << "\n";
      }
      return exit_for(pass);
    }
    doc["pass"] = pass;
    doc["table"] = t;
  } else if (action == "decompose") {
    auto d = local::induced_decomposition(params);
    pass = d.direct && d.total_dim == static_cast<std::size_t>(params.index());
    for (const auto& c : d.components) pass = pass && c.dim == c.expected_dim;
    ojson t = local::decomposition_to_json(params, d);
    if (cfg.format != Format::json) {
      std::string sep = cfg.format == Format::csv ? "," : "\t";
      out << "component" << sep << "dim" << sep << "expected_dim";
      for (int m = 0; m <= n; ++m) out << sep << "fixed_K0_p" << m;
      out << "\n";
      for (const auto& c : d.components) {
        out << c.name << sep << c.dim << sep << c.expected_dim;
        for (auto f : c.fixed_dims) out << sep << f;
        out << "\n";
      }
      return exit_for(pass);
    }
    doc["pass"] = pass;
    doc["decomposition"] = t;
  } else {
    return invalid(err, "unknown local action '" + action + "' (verify, table, decompose)");
  }
  out << doc.dump(2) << "\n";
  return exit_for(pass);
}

int cmd_check(const CliConfig& cfg, i64 level, int weight, const std::string& theorem, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    cfg.check_caps(level, weight);
  } catch (const std::exception& e) {
    return invalid(err, e.what());
  }
  if (std::find(kCheckKinds.begin(), kCheckKinds.end(), theorem) == kCheckKinds.end())
    return invalid(err, "unknown theorem '" + theorem + "'");
  if (auto t = theorem_from_name(theorem); t && !newform::theorem_applies(*t, level))
    return invalid(err, "level " + std::to_string(level) + " does not have the shape required by " + theorem);

  std::vector<CheckReport> reports;
  try {
    SpaceCache cache(cfg.cache_dir);
    std::vector<SuiteItem> items;
    if (theorem == "auto")
      for (const auto& name : auto_theorems(level)) items.push_back({level, weight, name});
    else
      items.push_back({level, weight, theorem});
    for (auto& rs : run_items(cache, items, cfg.star_plus, cfg.jobs)) reports.insert(reports.end(), rs.begin(), rs.end());
  } catch (const newform::ShapeError& e) {
    return invalid(err, e.what());
  } catch (const std::runtime_error& e) {
    return invalid(err, e.what());
  }
  ojson header;
  header["schema"] = kCheckSchema;
  header["level"] = level;
  header["weight"] = weight;
  header["theorem"] = theorem;
  header["star_plus"] = cfg.star_plus;
  write_reports(cfg.format, header, reports, out);
  return exit_for(all_pass(reports));
}

int cmd_check_suite(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<SuiteItem> items = default_suite();
  std::vector<CheckReport> reports;
  try {
    cfg.validate();
    for (const auto& it : items) cfg.check_caps(it.level, it.weight);
    SpaceCache cache(cfg.cache_dir);
    for (auto& rs : run_items(cache, items, cfg.star_plus, cfg.jobs)) reports.insert(reports.end(), rs.begin(), rs.end());
  } catch (const std::exception& e) {
    return invalid(err, e.what());
  }
  ojson header;
  header["schema"] = kCheckSchema;
  header["suite"] = "default";
  header["star_plus"] = cfg.star_plus;
  write_reports(cfg.format, header, reports, out);
  return exit_for(all_pass(reports));
}

std::string emit_document(SpaceCache& cache, i64 level, int weight, const EmitParams& ep, Format format) {
  auto space = cache.get(level, weight);
  auto need_p = [&] {
    if (!ep.p) throw std::invalid_argument("operator " + ep.op + " needs --p");
    return *ep.p;
  };
  auto need_q = [&] {
    if (!ep.q) throw std::invalid_argument("operator " + ep.op + " needs --q");
    return *ep.q;
  };
  auto need_r = [&] {
    if (!ep.r) throw std::invalid_argument("operator " + ep.op + " needs --r");
    return *ep.r;
  };
  using newform::QVariant;
  linalg::QMatrix m;
  const std::string& op = ep.op;
  if (op == "W") m = newform::build_W(*space, need_q()).matrix;
  else if (op == "Utilde") m = newform::build_Utilde(*space, need_p()).matrix;
  else if (op == "Qp") m = newform::build_Q(*space, need_p(), QVariant::Qp).matrix;
  else if (op == "Qp_prime") m = newform::build_Q(*space, need_p(), QVariant::Qp_prime).matrix;
  else if (op == "Qpn") m = newform::build_Q(*space, need_p(), QVariant::Qpn).matrix;
  else if (op == "Qp2") m = newform::build_Q(*space, need_p(), QVariant::Qp2).matrix;
  else if (op == "Qp2_prime") m = newform::build_Q(*space, need_p(), QVariant::Qp2_prime).matrix;
  else if (op == "L") {
    if (!ep.j) throw std::invalid_argument("operator L needs --j");
    m = newform::build_L(*space, need_p(), *ep.j).matrix;
  } else if (op == "S") m = newform::build_S(*space, need_p(), need_r(), false).matrix;
  else if (op == "S_prime") m = newform::build_S(*space, need_p(), need_r(), true).matrix;
  else if (op == "Rp_sq") m = newform::build_Rp_squared(*space, need_p()).matrix;
  else if (op == "Rchi_sq") m = newform::build_Rchi_squared(*space).matrix;
  else if (op == "T") m = newform::build_T(*space, need_q()).matrix;
  else if (op == "star") m = modsym::star_involution(*space);
  else throw std::invalid_argument("unknown operator '" + op + "'");

  if (format == Format::csv) return matrix_csv(m);
  if (format == Format::text) {
    std::ostringstream s;
    s << op << " on cuspidal symbols, level " << level << ", weight " << weight << ", dim " << m.rows() << "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) s << (c ? " " : "") << linalg::to_string(m(r, c));
      s << "\n";
    }
    return s.str();
  }
  ojson doc;
  doc["schema"] = kEmitSchema;
  doc["level"] = level;
  doc["weight"] = weight;
  doc["op"] = op;
  doc["dim"] = m.rows();
  ojson entries = ojson::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) entries.push_back(rational_to_json(m(r, c)));
  doc["entries"] = entries;
  return doc.dump() + "\n";
}

int cmd_emit(const CliConfig& cfg, i64 level, int weight, const EmitParams& params, const std::string& output,
             std::ostream& out, std::ostream& err) {
  std::string doc;
  try {
    cfg.validate();
    cfg.check_caps(level, weight);
    SpaceCache cache(cfg.cache_dir);
    doc = emit_document(cache, level, weight, params, cfg.format);
  } catch (const std::invalid_argument& e) {
    return invalid(err, e.what());
  } catch (const std::runtime_error& e) {
    return invalid(err, e.what());
  }
  if (output.empty() || output == "-") {
    out << doc;
    return 0;
  }
  std::ofstream f(output, std::ios::binary | std::ios::trunc);
  if (!f) return invalid(err, "cannot write " + output);
  f << doc;
  return f ? 0 : invalid(err, "write failed for " + output);
}

int cmd_cache(const CliConfig& cfg, const std::string& action, std::ostream& out, std::ostream& err) {
  if (action != "status" && action != "clear") return invalid(err, "unknown cache action '" + action + "' (status, clear)");
  try {
    SpaceCache cache(cfg.cache_dir);
    std::size_t removed = 0;
    if (action == "clear") removed = cache.clear_disk();
    auto entries = cache.disk_entries();
    if (cfg.format == Format::json) {
      ojson doc;
      doc["schema"] = kCacheSchema;
      doc["action"] = action;
      doc["directory"] = cfg.cache_dir.string();
      doc["format_version"] = modsym::ManinSpace::kFormatVersion;
      if (action == "clear") doc["removed"] = removed;
      ojson es = ojson::array();
      for (const auto& e : entries) es.push_back({{"level", e.level}, {"weight", e.weight}, {"version", e.version}, {"bytes", e.bytes}});
      doc["entries"] = es;
      out << doc.dump(2) << "\n";
    } else {
      std::string sep = cfg.format == Format::csv ? "," : "\t";
      if (action == "clear" && cfg.format == Format::text) out << "removed " << removed << " entries\n";
      out << "level" << sep << "weight" << sep << "version" << sep << "bytes\n";
      for (const auto& e : entries) out << e.level << sep << e.weight << sep << e.version << sep << e.bytes << "\n";
    }
  } catch (const std::exception& e) {
    return invalid(err, e.what());
  }
  return 0;
}

}  // namespace heckenew::cli
