// Command-line driver: runs an allocator/host-count sweep, writes the CSV
// tree and optionally compares the summary against a reference table.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mici/experiment.hpp"

namespace {

constexpr int kExitCompareFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mici::IoError("cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  mici::ExperimentSpec spec;
  try {
    spec = mici::parse_config(args);
  } catch (const mici::HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const mici::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const auto table = mici::run_experiment(spec);
    const auto rows = table.summary();
    std::cout << mici::summary_csv(rows);

    if (spec.compare_path) {
      const auto reference = mici::parse_summary_csv(read_file(*spec.compare_path));
      const auto report = mici::compare_against_reference(rows, reference);
      const std::string rendered = report.render();
      std::cout << "\n" << rendered;
      std::ofstream(spec.output_dir / "verdicts.txt", std::ios::binary) << rendered;
      return report.passed() ? 0 : kExitCompareFailed;
    }
  } catch (const mici::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const mici::ParseError& e) {
    std::cerr << "reference parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mici::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
