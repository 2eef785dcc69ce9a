// Regenerates data/surrogate_events.csv: the first seed whose day-floored
// fPP path has exactly the requested count in (0, t].

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fpp/process.hpp"
#include "fpp/report.hpp"
#include "fpp/wildfire_data.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Surrogate wildfire log generator", "make_surrogate"};
  double lambda = 0.69;
  double beta = 0.8;
  double t = 200.0;
  std::int64_t count = 56;
  double horizon = 1420.0;
  std::string origin_text = "2019-06-08";
  std::uint64_t first_seed = 0;
  std::uint64_t max_tries = 1000000;
  std::string out = "data/surrogate_events.csv";
  app.add_option("--lambda", lambda)->capture_default_str();
  app.add_option("--beta", beta)->capture_default_str();
  app.add_option("--t", t)->capture_default_str();
  app.add_option("--count", count, "Required count in (0, t]")->capture_default_str();
  app.add_option("--horizon", horizon, "Days simulated after the origin")->capture_default_str();
  app.add_option("--origin", origin_text, "Origin date (ISO)")->capture_default_str();
  app.add_option("--first-seed", first_seed)->capture_default_str();
  app.add_option("--max-tries", max_tries)->capture_default_str();
  app.add_option("--out", out)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const auto origin = fpp::parse_iso_date(origin_text);
  if (!origin) {
    std::cerr << "bad --origin\n";
    return 2;
  }
  try {
    const fpp::FppParams params(lambda, beta);
    for (std::uint64_t seed = first_seed; seed < first_seed + max_tries; ++seed) {
      fpp::RngStream rng(seed, 0);
      const auto path = fpp::simulate_path(params, horizon, rng);
      std::vector<double> days{0.0};
      for (const double tau : path.times()) days.push_back(std::floor(tau));
      std::int64_t n = 0;
      for (const double d : days) n += (d > 0.0 && d <= t) ? 1 : 0;
      if (n != count) continue;

      std::vector<fpp::EventRecord> records;
      const std::chrono::sys_days start{*origin};
      for (const double d : days) {
        records.push_back({fpp::Date{start + std::chrono::days{static_cast<int>(d)}}, std::nullopt});
      }
      std::ostringstream csv;
      fpp::write_generic(csv, fpp::EventLog(std::move(records)));
      fpp::write_atomic(out, csv.str());
      std::cout << "seed " << seed << ": " << days.size() << " events, " << n << " in (0, " << t
                << "]\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "no seed matched within --max-tries\n";
  return 1;
}
