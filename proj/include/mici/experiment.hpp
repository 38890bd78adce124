#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mici/errors.hpp"
#include "mici/simcore.hpp"

namespace mici {

/// A sweep over host counts and allocators sharing one base configuration.
struct ExperimentSpec {
  std::vector<int> host_counts{200, 210, 220, 230, 240, 250};
  std::vector<Allocator> allocators{Allocator::kFca, Allocator::kSb, Allocator::kVga};
  SimConfig base;
  std::filesystem::path output_dir{"results"};
  std::optional<std::filesystem::path> compare_path;
};

/// Thrown by parse_config for --help; what() holds the usage text.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

/// Throws UsageError naming the offending key.
void validate(const ExperimentSpec& spec);

/// Resolves defaults, then an optional `--config <file>` (flat key = value),
/// then command-line flags. `args` excludes the program name.
ExperimentSpec parse_config(std::span<const std::string> args);

/// Applies flat `key = value` text on top of `spec`. Blank lines and lines
/// starting with '#' are ignored; unknown keys raise UsageError.
void apply_config_text(ExperimentSpec& spec, std::string_view text);

/// Applies one setting. Keys mirror the long flag names without "--".
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

/// The fully resolved spec as config-file text; feeding it back through
/// apply_config_text reproduces the spec.
std::string render_config(const ExperimentSpec& spec);

/// One line of summary.csv.
struct SummaryRow {
  Allocator allocator = Allocator::kFca;
  int hosts = 0;
  double avg_blocked = 0.0;
  double avg_hot_cells = 0.0;
  double blocking_pct = 0.0;
};

/// Results of one sweep, allocator-major in spec order.
struct ResultsTable {
  std::vector<int> host_counts;
  std::vector<Allocator> allocators;
  std::vector<RunMetrics> cells;

  const RunMetrics& at(Allocator allocator, int hosts) const;
  std::vector<SummaryRow> summary() const;
};

/// Runs every (allocator, host count) pair without touching the filesystem.
ResultsTable run_sweep(const ExperimentSpec& spec);

/// run_sweep plus the CSV tree under spec.output_dir:
///   summary.csv, series_<alloc>_<hosts>.csv, config.resolved.
/// The directory is checked for writability before any simulation starts
/// (IoError otherwise).
ResultsTable run_experiment(const ExperimentSpec& spec);

std::string summary_csv(std::span<const SummaryRow> rows);
std::string series_csv(const RunMetrics& metrics);
std::string series_file_name(Allocator allocator, int hosts);

/// Reads summary-shaped CSV. Columns allocator, hosts and avg_blocked are
/// required; avg_hot_cells and blocking_pct default to 0 when absent.
/// Throws ParseError with the 1-based line number.
std::vector<SummaryRow> parse_summary_csv(std::string_view text);

/// Average blocked hosts reported for FCA, SB and VGA at 200..250 hosts.
std::vector<SummaryRow> published_reference();

struct Tolerances {
  double relative = 0.40;       // FCA and SB: |value − ref| ≤ relative · ref
  double vga_absolute = 3.0;    // VGA: value ≤ ref + vga_absolute
};

struct Verdict {
  std::string check;
  std::string subject;
  bool pass = false;
  std::string detail;
};

struct ComparisonReport {
  std::vector<Verdict> verdicts;

  bool passed() const;
  std::string render() const;
};

/// Checks VGA ≤ SB ≤ FCA at every host count, FCA non-decreasing in host
/// count, and each value present in the reference against its tolerance band.
ComparisonReport compare_against_reference(std::span<const SummaryRow> summary,
                                           std::span<const SummaryRow> reference,
                                           const Tolerances& tolerances = {});

}  // namespace mici
