#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfrmab/errors.hpp"
#include "mfrmab/io.hpp"

using namespace mfrmab;

namespace {
std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::vector<RunRecord> two_runs() {
  ExperimentConfig c;
  c.num_arms = 3;
  c.episodes = 12;
  c.horizon = 10;
  c.record_snapshots = true;
  return {run_experiment(c, 1), run_experiment(c, 2)};
}
}  // namespace

TEST_CASE("csv headers are exact") {
  const auto recs = two_runs();
  std::ostringstream r, e, d;
  io::write_regret_csv(r, recs);
  io::write_exposure_csv(e, recs);
  io::write_diagnostics_csv(d, recs);
  CHECK(first_line(r.str()) == "config_hash,seed,episode,fr_t,fr_cum");
  CHECK(first_line(e.str()) == "config_hash,seed,arm,pulls,mu_star,pi_star");
  CHECK(first_line(d.str()) ==
        "config_hash,seed,episode,arm,d00,d01,d10,d11,eta1,eta2,omega1,omega2,contains_truth");
  CHECK(count_lines(r.str()) == 1 + 2 * 12);
  CHECK(count_lines(e.str()) == 1 + 2 * 3);
  CHECK(count_lines(d.str()) == 1 + 2 * 12 * 3);

  std::vector<SweepPoint> pts{{0.1, 1, 10, 3.5, 0.25}, {0.5, 5, 10, 2.0, 0.0}};
  std::ostringstream s;
  io::write_sweep_csv(s, "abc", pts);
  CHECK(s.str() == "config_hash,ratio,k,n,fr_final_mean,fr_final_std\nabc,0.1,1,10,3.5,0.25\nabc,0.5,5,10,2,0\n");

  std::ostringstream t;
  io::Table1Row row;
  row.config_hash = "h";
  row.n = 5;
  row.k = 1;
  row.seeds = 3;
  io::write_table1_csv(t, std::span<const io::Table1Row>(&row, 1));
  CHECK(first_line(t.str()) == io::kTable1Header);

  std::ostringstream k;
  const std::vector<TransitionKernel> ks{TransitionKernel::from_good_probs(0.1, 0.2, 0.3, 0.4)};
  io::write_kernel_csv(k, "h", 9, ks);
  CHECK(k.str() == "config_hash,seed,arm,s,a,p_to_good\nh,9,0,0,0,0.1\nh,9,0,0,1,0.2\nh,9,0,1,0,0.3\nh,9,0,1,1,0.4\n");
}

TEST_CASE("every data row carries the config hash and seed") {
  const auto recs = two_runs();
  std::ostringstream r;
  io::write_regret_csv(r, recs);
  std::istringstream in(r.str());
  std::string line;
  std::getline(in, line);
  int row = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind(recs[0].config_hash + ",", 0) == 0);
    const auto seed = row < 12 ? "1" : "2";
    CHECK(line.substr(17, 2) == std::string(seed) + ",");
    ++row;
  }
}

TEST_CASE("diagnostics csv requires snapshots") {
  ExperimentConfig c;
  c.episodes = 3;
  c.horizon = 5;
  const std::vector<RunRecord> recs{run_experiment(c, 1)};
  std::ostringstream d;
  CHECK_THROWS(io::write_diagnostics_csv(d, recs));
}

TEST_CASE("number formatting") {
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_number(std::nan("")) == "nan");
}

TEST_CASE("config parsing") {
  const auto c = io::parse_config(R"({"num_arms": 10, "budget": 3, "domain": "cpap", "seeds": [4, 5],
                                      "algorithm": "optimal", "cpap_noise_is_variance": true,
                                      "cpap_adherent": [0.2, 0.25, 0.8, 0.9], "instance_seed": 7})");
  CHECK(c.num_arms == 10);
  CHECK(c.budget == 3);
  CHECK(c.domain.variant == Domain::Cpap);
  CHECK(c.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(c.algorithm == Algorithm::Optimal);
  CHECK(c.domain.cpap.noise_is_variance);
  CHECK(c.domain.cpap.adherent.to_good(1, 1) == 0.9);
  CHECK(c.instance_seed == 7u);
  CHECK(c.horizon == ExperimentConfig{}.horizon);

  CHECK_THROWS_AS(io::parse_config("{\"num_arm\": 3}"), ConfigError);
  CHECK_THROWS_AS(io::parse_config("{\"num_arms\": \"three\"}"), ConfigError);
  CHECK_THROWS_AS(io::parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(io::parse_config("{num_arms: 3"), ConfigError);
  CHECK_THROWS_AS(io::parse_config("{\"domain\": \"mimic\"}"), ConfigError);
  CHECK_THROWS_AS(io::parse_config("{\"cpap_adherent\": [0.1, 0.2]}"), ConfigError);
  CHECK_THROWS_AS(io::load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config json round trip") {
  ExperimentConfig c;
  c.num_arms = 7;
  c.budget = 2;
  c.domain.variant = Domain::SyntheticAlternate;
  c.instance_seed = 3;
  c.carry_over_state = true;
  c.seeds = {9, 10};
  const auto back = io::parse_config(io::config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.seeds == c.seeds);
  ExperimentConfig p;
  io::apply_paper_scale(p);
  CHECK(p.episodes == 10000);
  CHECK(p.horizon == 200);
}

TEST_CASE("table1 summary") {
  const auto recs = two_runs();
  const auto row = io::summarize_diagnostics(recs, Domain::Synthetic);
  CHECK(row.seeds == 2);
  CHECK(row.n == 3);
  const double t0m = (recs[0].diagnostics.t0_candidate + recs[1].diagnostics.t0_candidate) / 2.0;
  CHECK(row.t0_mean == doctest::Approx(t0m));
  CHECK_THROWS(io::summarize_diagnostics(std::span<const RunRecord>(), Domain::Synthetic));
}

TEST_CASE("manifest is append only") {
  const auto dir = std::filesystem::temp_directory_path() / "mfrmab_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.jsonl";
  ExperimentConfig c;
  io::RunManifest m{config_hash(c), {1, 2}, io::code_version(), "mfrmab run", {"regret.csv"}, io::design_flags(c)};
  io::append_manifest(path, m);
  io::append_manifest(path, m);
  std::ifstream in(path);
  std::string a, b, extra;
  std::getline(in, a);
  std::getline(in, b);
  CHECK(a == b);
  CHECK(a.find(config_hash(c)) != std::string::npos);
  CHECK(a.find("\"cpap_noise_semantics\":\"std\"") != std::string::npos);
  CHECK_FALSE(std::getline(in, extra));
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary json names the per-seed diagnostics") {
  ExperimentConfig c;
  c.num_arms = 3;
  c.episodes = 12;
  c.horizon = 10;
  const auto recs = two_runs();
  const auto s = io::summary_json(c, recs);
  for (const char* key : {"fr_final_mean", "fr_final_std", "\"t0\"", "\"G\"", "\"eta\"", "\"omega\""})
    CHECK(s.find(key) != std::string::npos);
}
