#include "mici/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mici {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!token.empty()) out.push_back(std::exchange(token, {}));
    } else {
      token += ch;
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw UsageError(std::string(key), "'" + t + "' is not a valid number");
  }
  return value;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys{
      "rows",  "cols",      "channels-per-cell", "iterations",      "runs", "hosts",
      "allocator", "seed",  "alpha",             "beta",            "mu",   "gamma-max",
      "max-generations", "out", "compare",       "mobility",        "stay-probability",
      "gamma-mode"};
  return keys;
}

}  // namespace

void apply_setting(ExperimentSpec& spec, std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  const std::string v = trim(value);
  SimConfig& c = spec.base;
  if (key == "rows") {
    c.rows = parse_number<int>(key, v);
  } else if (key == "cols") {
    c.cols = parse_number<int>(key, v);
  } else if (key == "channels-per-cell") {
    c.channels_per_cell = parse_number<int>(key, v);
  } else if (key == "iterations") {
    c.iterations = parse_number<int>(key, v);
  } else if (key == "runs") {
    c.runs = parse_number<int>(key, v);
  } else if (key == "hosts") {
    spec.host_counts.clear();
    for (const auto& tok : split_list(v)) spec.host_counts.push_back(parse_number<int>(key, tok));
  } else if (key == "allocator") {
    spec.allocators.clear();
    for (const auto& tok : split_list(v)) {
      try {
        spec.allocators.push_back(parse_allocator(tok));
      } catch (const ConfigError& e) {
        throw UsageError(key, e.what());
      }
    }
  } else if (key == "seed") {
    c.rng_seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "alpha") {
    c.weights.alpha = parse_number<double>(key, v);
  } else if (key == "beta") {
    c.weights.beta = parse_number<double>(key, v);
  } else if (key == "mu") {
    c.weights.mu = parse_number<double>(key, v);
  } else if (key == "gamma-max") {
    c.weights.gamma_max = parse_number<double>(key, v);
  } else if (key == "max-generations") {
    c.vga.max_generations = parse_number<int>(key, v);
  } else if (key == "out") {
    if (v.empty()) throw UsageError(key, "output directory must not be empty");
    spec.output_dir = v;
  } else if (key == "compare") {
    if (v.empty()) {
      spec.compare_path.reset();
    } else {
      spec.compare_path = v;
    }
  } else if (key == "mobility") {
    if (v == "closed") {
      c.mobility.kind = MobilityKind::kClosedRegion;
    } else if (v == "neighbor-uniform") {
      c.mobility.kind = MobilityKind::kNeighborUniform;
    } else {
      throw UsageError(key, "expected closed|neighbor-uniform, got '" + v + "'");
    }
  } else if (key == "stay-probability") {
    if (v.empty() || v == "none") {
      c.mobility.stay_probability.reset();
    } else {
      c.mobility.stay_probability = parse_number<double>(key, v);
    }
  } else if (key == "gamma-mode") {
    if (v == "every") {
      c.vga.gamma_mode = GammaMode::kEveryEvaluation;
    } else if (v == "child") {
      c.vga.gamma_mode = GammaMode::kChildOnly;
    } else {
      throw UsageError(key, "expected every|child, got '" + v + "'");
    }
  } else {
    throw UsageError(key, "unknown setting");
  }
}

void apply_config_text(ExperimentSpec& spec, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(trim(t), "config line " + std::to_string(number) + " has no '='");
    }
    apply_setting(spec, t.substr(0, eq), t.substr(eq + 1));
  }
}

void validate(const ExperimentSpec& spec) {
  const SimConfig& c = spec.base;
  const auto positive = [](const char* key, int v) {
    if (v < 1) throw UsageError(key, "must be >= 1, got " + std::to_string(v));
  };
  positive("rows", c.rows);
  positive("cols", c.cols);
  positive("iterations", c.iterations);
  positive("runs", c.runs);
  positive("max-generations", c.vga.max_generations);
  if (c.channels_per_cell < 0) throw UsageError("channels-per-cell", "must be >= 0");

  if (spec.host_counts.empty()) throw UsageError("hosts", "at least one host count is required");
  std::set<int> seen_hosts;
  for (int h : spec.host_counts) {
    if (h < 0) throw UsageError("hosts", "must be >= 0, got " + std::to_string(h));
    if (h > c.max_supported_hosts()) {
      throw UsageError("hosts", std::to_string(h) + " exceeds the max supported host count " +
                                    std::to_string(c.max_supported_hosts()) + " (" +
                                    std::to_string(c.cell_count()) + " cells x " +
                                    std::to_string(c.channels_per_cell) + " channels)");
    }
    if (!seen_hosts.insert(h).second) {
      throw UsageError("hosts", "host count " + std::to_string(h) + " given twice");
    }
  }
  if (spec.allocators.empty()) throw UsageError("allocator", "at least one allocator is required");
  std::set<Allocator> seen_alloc;
  for (Allocator a : spec.allocators) {
    if (!seen_alloc.insert(a).second) {
      throw UsageError("allocator", std::string(to_string(a)) + " given twice");
    }
  }

  const Weights& w = c.weights;
  if (!(w.gamma_max >= 0.0)) throw UsageError("gamma-max", "must be >= 0");
  if (!(w.mu > w.gamma_max)) throw UsageError("mu", "must exceed gamma-max");
  if (!(w.beta > w.mu)) throw UsageError("beta", "must exceed mu");
  if (!(w.alpha > w.beta)) throw UsageError("alpha", "must exceed beta");
  if (c.mobility.stay_probability) {
    const double p = *c.mobility.stay_probability;
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("stay-probability", "must lie in [0, 1]");
  }
}

ExperimentSpec parse_config(std::span<const std::string> args) {
  CLI::App app{"Cellular channel-borrowing simulator: FCA vs greedy borrowing vs VGA", "mici"};
  app.set_help_flag("-h,--help", "Print this help and exit");

  std::map<std::string, std::vector<std::string>> given;
  std::string config_file;
  app.add_option("--config", config_file, "Flat key = value file; flags override it");
  for (const auto& key : known_keys()) {
    auto* opt = app.add_option("--" + key, given[key]);
    if (key == "hosts" || key == "allocator") {
      opt->take_all()->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    } else {
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    std::string key = "arguments";
    if (const auto* extras = dynamic_cast<const CLI::ExtrasError*>(&e)) {
      (void)extras;
      key = "unknown-flag";
    }
    throw UsageError(key, e.what());
  }

  ExperimentSpec spec;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw UsageError("config", "cannot read '" + config_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(spec, buf.str());
  }
  for (const auto& key : known_keys()) {
    const auto& values = given[key];
    if (app.count("--" + key) == 0 || values.empty()) continue;
    if (key == "hosts" || key == "allocator") {
      std::string joined;
      for (const auto& v : values) joined += v + ",";
      apply_setting(spec, key, joined);
    } else {
      apply_setting(spec, key, values.back());
    }
  }
  validate(spec);
  return spec;
}

std::string render_config(const ExperimentSpec& spec) {
  const SimConfig& c = spec.base;
  std::ostringstream out;
  out << "rows = " << c.rows << "\n";
  out << "cols = " << c.cols << "\n";
  out << "channels-per-cell = " << c.channels_per_cell << "\n";
  out << "iterations = " << c.iterations << "\n";
  out << "runs = " << c.runs << "\n";
  out << "hosts = ";
  for (std::size_t i = 0; i < spec.host_counts.size(); ++i) {
    out << (i ? ", " : "") << spec.host_counts[i];
  }
  out << "\nallocator = ";
  for (std::size_t i = 0; i < spec.allocators.size(); ++i) {
    out << (i ? ", " : "") << to_string(spec.allocators[i]);
  }
  out << "\nseed = " << c.rng_seed << "\n";
  out << "alpha = " << exact(c.weights.alpha) << "\n";
  out << "beta = " << exact(c.weights.beta) << "\n";
  out << "mu = " << exact(c.weights.mu) << "\n";
  out << "gamma-max = " << exact(c.weights.gamma_max) << "\n";
  out << "max-generations = " << c.vga.max_generations << "\n";
  out << "gamma-mode = " << (c.vga.gamma_mode == GammaMode::kChildOnly ? "child" : "every") << "\n";
  out << "mobility = "
      << (c.mobility.kind == MobilityKind::kClosedRegion ? "closed" : "neighbor-uniform") << "\n";
  out << "stay-probability = "
      << (c.mobility.stay_probability ? exact(*c.mobility.stay_probability) : std::string("none"))
      << "\n";
  out << "out = " << spec.output_dir.string() << "\n";
  if (spec.compare_path) out << "compare = " << spec.compare_path->string() << "\n";
  return out.str();
}

// --------------------------------------------------------------------------

const RunMetrics& ResultsTable::at(Allocator allocator, int hosts) const {
  for (const RunMetrics& m : cells) {
    if (m.allocator == allocator && m.hosts == hosts) return m;
  }
  throw LookupError("no results for " + std::string(to_string(allocator)) + " at " +
                    std::to_string(hosts) + " hosts");
}

std::vector<SummaryRow> ResultsTable::summary() const {
  std::vector<SummaryRow> rows;
  rows.reserve(cells.size());
  for (const RunMetrics& m : cells) {
    rows.push_back(SummaryRow{m.allocator, m.hosts, m.avg_blocked, m.avg_hot_cells, m.blocking_pct});
  }
  return rows;
}

ResultsTable run_sweep(const ExperimentSpec& spec) {
  validate(spec);
  ResultsTable table;
  table.host_counts = spec.host_counts;
  table.allocators = spec.allocators;
  for (Allocator a : spec.allocators) {
    for (int hosts : spec.host_counts) {
      SimConfig config = spec.base;
      config.allocator = a;
      config.hosts = hosts;
      table.cells.push_back(run_simulation(config));
    }
  }
  return table;
}

std::string series_file_name(Allocator allocator, int hosts) {
  return "series_" + std::string(to_string(allocator)) + "_" + std::to_string(hosts) + ".csv";
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "allocator,hosts,avg_blocked,avg_hot_cells,blocking_pct\n";
  for (const SummaryRow& r : rows) {
    out += std::string(to_string(r.allocator)) + "," + std::to_string(r.hosts) + "," +
           fixed6(r.avg_blocked) + "," + fixed6(r.avg_hot_cells) + "," + fixed6(r.blocking_pct) +
           "\n";
  }
  return out;
}

std::string series_csv(const RunMetrics& m) {
  std::string out = "iteration,blocked,hot_cells\n";
  for (std::size_t t = 0; t < m.mean_blocked.size(); ++t) {
    out += std::to_string(t + 1) + "," + fixed6(m.mean_blocked[t]) + "," +
           fixed6(m.mean_hot_cells[t]) + "\n";
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace

ResultsTable run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  ensure_writable(spec.output_dir);
  ResultsTable table = run_sweep(spec);
  for (const RunMetrics& m : table.cells) {
    write_file(spec.output_dir / series_file_name(m.allocator, m.hosts), series_csv(m));
  }
  write_file(spec.output_dir / "config.resolved", render_config(spec));
  const auto rows = table.summary();
  write_file(spec.output_dir / "summary.csv", summary_csv(rows));
  return table;
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  std::map<std::string, std::size_t> column;
  std::vector<SummaryRow> rows;

  const auto cells_of = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };

  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto cells = cells_of(line);
    if (column.empty()) {
      for (std::size_t i = 0; i < cells.size(); ++i) column[cells[i]] = i;
      for (const char* required : {"allocator", "hosts", "avg_blocked"}) {
        if (!column.contains(required)) {
          throw ParseError(number, std::string("header lacks column '") + required + "'");
        }
      }
      continue;
    }
    if (cells.size() != column.size()) {
      throw ParseError(number, "expected " + std::to_string(column.size()) + " fields, got " +
                                   std::to_string(cells.size()));
    }
    const auto field = [&](const char* name) -> const std::string& { return cells[column.at(name)]; };
    const auto number_of = [&](const char* name) {
      double v = 0.0;
      const std::string& s = field(name);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(number, std::string("bad ") + name + " value '" + s + "'");
      }
      return v;
    };

    SummaryRow row;
    try {
      row.allocator = parse_allocator(field("allocator"));
    } catch (const ConfigError& e) {
      throw ParseError(number, e.what());
    }
    const double hosts = number_of("hosts");
    if (hosts < 0 || hosts != static_cast<double>(static_cast<int>(hosts))) {
      throw ParseError(number, "hosts must be a non-negative integer");
    }
    row.hosts = static_cast<int>(hosts);
    row.avg_blocked = number_of("avg_blocked");
    if (column.contains("avg_hot_cells")) row.avg_hot_cells = number_of("avg_hot_cells");
    if (column.contains("blocking_pct")) row.blocking_pct = number_of("blocking_pct");
    rows.push_back(row);
  }
  if (column.empty()) throw ParseError(number == 0 ? 1 : number, "missing header");
  return rows;
}

std::vector<SummaryRow> published_reference() {
  const std::array<int, 6> hosts{200, 210, 220, 230, 240, 250};
  const std::array<double, 6> fca{8.7, 12.15, 17.85, 19.6, 24.6, 27.8};
  const std::array<double, 6> sb{0.45, 1.6, 4.0, 4.8, 9.55, 12.5};
  const std::array<double, 6> vga{0.0, 0.9, 3.25, 2.0, 5.3, 3.75};
  std::vector<SummaryRow> rows;
  const auto add = [&](Allocator a, const std::array<double, 6>& values) {
    for (std::size_t i = 0; i < hosts.size(); ++i) {
      rows.push_back(SummaryRow{a, hosts[i], values[i], 0.0, values[i] / hosts[i] * 100.0});
    }
  };
  add(Allocator::kFca, fca);
  add(Allocator::kSb, sb);
  add(Allocator::kVga, vga);
  return rows;
}

bool ComparisonReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string ComparisonReport::render() const {
  std::size_t check_w = 5;
  std::size_t subject_w = 7;
  for (const Verdict& v : verdicts) {
    check_w = std::max(check_w, v.check.size());
    subject_w = std::max(subject_w, v.subject.size());
  }
  const auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  std::string out = pad("check", check_w) + "  " + pad("subject", subject_w) + "  verdict  detail\n";
  for (const Verdict& v : verdicts) {
    out += pad(v.check, check_w) + "  " + pad(v.subject, subject_w) + "  " +
           (v.pass ? "PASS   " : "FAIL   ") + "  " + v.detail + "\n";
  }
  return out;
}

ComparisonReport compare_against_reference(std::span<const SummaryRow> summary,
                                           std::span<const SummaryRow> reference,
                                           const Tolerances& tol) {
  std::map<std::pair<Allocator, int>, double> value;
  std::set<int> hosts;
  for (const SummaryRow& r : summary) {
    value[{r.allocator, r.hosts}] = r.avg_blocked;
    hosts.insert(r.hosts);
  }
  const auto lookup = [&](Allocator a, int h) -> std::optional<double> {
    const auto it = value.find({a, h});
    if (it == value.end()) return std::nullopt;
    return it->second;
  };

  ComparisonReport report;
  for (int h : hosts) {
    const auto fca = lookup(Allocator::kFca, h);
    const auto sb = lookup(Allocator::kSb, h);
    const auto vga = lookup(Allocator::kVga, h);
    const std::string subject = "hosts=" + std::to_string(h);
    if (vga && sb) {
      report.verdicts.push_back(Verdict{"order vga<=sb", subject, *vga <= *sb,
                                        "vga " + fixed6(*vga) + " sb " + fixed6(*sb)});
    }
    if (sb && fca) {
      report.verdicts.push_back(Verdict{"order sb<=fca", subject, *sb <= *fca,
                                        "sb " + fixed6(*sb) + " fca " + fixed6(*fca)});
    }
    if (vga && fca && !sb) {
      report.verdicts.push_back(Verdict{"order vga<=fca", subject, *vga <= *fca,
                                        "vga " + fixed6(*vga) + " fca " + fixed6(*fca)});
    }
  }

  std::optional<std::pair<int, double>> previous;
  for (int h : hosts) {
    const auto fca = lookup(Allocator::kFca, h);
    if (!fca) continue;
    if (previous) {
      report.verdicts.push_back(Verdict{
          "fca nondecreasing", "hosts=" + std::to_string(previous->first) + "->" + std::to_string(h),
          *fca >= previous->second, fixed6(previous->second) + " -> " + fixed6(*fca)});
    }
    previous = {h, *fca};
  }

  for (const SummaryRow& ref : reference) {
    const auto v = lookup(ref.allocator, ref.hosts);
    if (!v) continue;
    const std::string subject =
        std::string(to_string(ref.allocator)) + "@" + std::to_string(ref.hosts);
    double lo = 0.0;
    double hi = 0.0;
    if (ref.allocator == Allocator::kVga) {
      lo = 0.0;
      hi = ref.avg_blocked + tol.vga_absolute;
    } else {
      lo = ref.avg_blocked * (1.0 - tol.relative);
      hi = ref.avg_blocked * (1.0 + tol.relative);
    }
    const bool ok = *v >= lo && *v <= hi;
    report.verdicts.push_back(Verdict{"band", subject, ok,
                                      fixed6(*v) + " in [" + fixed6(lo) + ", " + fixed6(hi) +
                                          "] ref " + fixed6(ref.avg_blocked)});
  }
  return report;
}

}  // namespace mici
