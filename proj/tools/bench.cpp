// Benchmark harness.
//
//   bench hanoi --rings 20 --threads 1,2,4,8 --iters 10
//   bench jugs --targets 1,2,3,4,6,7,8,9,11,12,13,14 --iters 25
//   bench intersect --sets 2..16 --size 100 --case best --iters 25
//
// Common options: --format csv|table, --out PATH, --plot PATH.
// Exit status: 0 success, 1 correctness check failed, 2 bad configuration,
// 3 output could not be written.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lpar/bench.hpp"
#include "lpar/report.hpp"

namespace {

constexpr int kExitCorrectness = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "1,2,4", "2..16" or a mix such as "2..4,8".
template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + s + "' in list '" + text + "'");
    }
    if (used != s.size() || v < 0) throw ConfigError("bad number '" + s + "' in list '" + text + "'");
    return static_cast<T>(v);
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (auto dots = item.find(".."); dots != std::string::npos) {
      T lo = number(item.substr(0, dots));
      T hi = number(item.substr(dots + 2));
      if (hi < lo) throw ConfigError("empty range '" + item + "'");
      for (T v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(number(item));
    }
  }
  if (out.empty()) throw ConfigError("empty list '" + text + "'");
  return out;
}

void emit(const std::vector<lpar::bench::BenchResult>& rows, const std::string& format, const std::string& out,
          const std::string& plot) {
  std::ostringstream text;
  if (format == "csv")
    lpar::bench::write_csv(text, rows);
  else
    lpar::bench::write_table(text, rows);

  if (out.empty()) {
    std::cout << text.str() << std::flush;
  } else {
    std::ofstream f(out);
    f << text.str();
    if (!f.good()) throw std::ios_base::failure("cannot write " + out);
  }
  if (!plot.empty()) {
    std::ofstream f(plot);
    lpar::bench::write_plot_data(f, rows);
    if (!f.good()) throw std::ios_base::failure("cannot write " + plot);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmarks for threads, hubs and the parallel combinators"};
  app.require_subcommand(1);

  std::string format = "table";
  std::string out;
  std::string plot;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "table"}));
  app.add_option("--out", out, "Write the results to PATH instead of stdout");
  app.add_option("--plot", plot, "Also write gnuplot data blocks to PATH");

  int rings = 20;
  std::string thread_list = "1,2,4,8";
  std::size_t hanoi_iters = 10;
  auto* hanoi = app.add_subcommand("hanoi", "Towers of Hanoi, independent and-parallelism");
  hanoi->add_option("--rings", rings, "Number of rings")->check(CLI::Range(1, 40));
  hanoi->add_option("--threads", thread_list, "Thread counts, e.g. 1,2,4,8");
  hanoi->add_option("--iters", hanoi_iters, "Iterations per configuration")->check(CLI::PositiveNumber);

  std::string targets = "1,2,3,4,6,7,8,9,11,12,13,14";
  std::string capacities = "5,9";
  std::size_t jug_iters = 25;
  auto* jugs = app.add_subcommand("jugs", "Water jugs, competitive or-parallelism");
  jugs->add_option("--targets", targets, "Target amounts in liters");
  jugs->add_option("--capacities", capacities, "Jug capacities in liters");
  jugs->add_option("--iters", jug_iters, "Iterations per configuration")->check(CLI::PositiveNumber);

  std::string sets = "2..8";
  std::size_t size = 100;
  std::string which = "best";
  std::size_t set_iters = 25;
  auto* intersect = app.add_subcommand("intersect", "Set intersection, pipeline parallelism");
  intersect->add_option("--sets", sets, "Set counts, e.g. 2..16");
  intersect->add_option("--size", size, "Elements per set");
  intersect->add_option("--case", which, "best (equal sets) or worst (disjoint sets)")
      ->check(CLI::IsMember({"best", "worst"}));
  intersect->add_option("--iters", set_iters, "Iterations per configuration")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    lpar::Runtime rt(lpar::RuntimeConfig::from_env());
    std::vector<lpar::bench::BenchResult> rows;
    if (hanoi->parsed()) {
      rows = lpar::bench::bench_hanoi(rt, rings, parse_list<std::size_t>(thread_list), hanoi_iters);
    } else if (jugs->parsed()) {
      rows = lpar::bench::bench_jugs(rt, parse_list<int>(capacities), parse_list<int>(targets), jug_iters);
    } else if (intersect->parsed()) {
      const auto c = which == "best" ? lpar::bench::IntersectCase::best : lpar::bench::IntersectCase::worst;
      rows = lpar::bench::bench_intersection(rt, parse_list<std::size_t>(sets), size, c, set_iters);
    }
    emit(rows, format, out, plot);
  } catch (const lpar::bench::CorrectnessError& e) {
    std::cerr << "correctness check failed: " << e.what() << '\n';
    return kExitCorrectness;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
