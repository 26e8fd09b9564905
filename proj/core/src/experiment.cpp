#include "losguide/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace losguide {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, const ExperimentConfig& cfg, int trial_index) {
  std::uint64_t h = splitmix64(master);
  auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
  mix(static_cast<std::uint64_t>(std::llround(cfg.uav_speed * 1000.0)));
  mix(static_cast<std::uint64_t>(cfg.path) + 17);
  mix(static_cast<std::uint64_t>(std::llround(cfg.target_speed_value() / cfg.uav_speed * 1000.0)));
  mix(static_cast<std::uint64_t>(trial_index));
  return h;
}

AggregateRow aggregate(const ExperimentConfig& cfg, const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("aggregate needs at least one result");
  AggregateRow row;
  row.method = cfg.method;
  row.path = cfg.path;
  row.uav_speed = cfg.uav_speed;
  row.target_fraction = cfg.target_fraction;
  row.trials = static_cast<int>(results.size());
  double duration_sum = 0.0;
  for (const auto& r : results) {
    if (r.hit) {
      ++row.hits;
      duration_sum += r.duration;
    }
    if (r.failure_reason != FailureReason::Crash) ++row.completed;
  }
  row.hit_rate = static_cast<double>(row.hits) / row.trials;
  if (row.hits > 0) row.mean_duration = duration_sum / row.hits;
  row.completion_rate = static_cast<double>(row.completed) / row.trials;
  row.unstable = row.completion_rate < 0.95;
  return row;
}

std::vector<ExperimentConfig> build_matrix(const MatrixAxes& axes, const ExperimentConfig& base) {
  std::vector<ExperimentConfig> out;
  for (auto m : axes.methods) {
    for (auto p : axes.paths) {
      for (double f : axes.target_fractions) {
        for (double v : axes.uav_speeds) {
          ExperimentConfig c = base;
          c.method = m;
          c.path = p;
          c.target_fraction = f;
          c.target_speed.reset();
          c.uav_speed = v;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

MatrixResult run_matrix(const std::vector<ExperimentConfig>& configs, int parallelism) {
  MatrixResult r;
  r.configs = configs;
  r.trials.resize(configs.size());
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    configs[i].validate();
    r.trials[i].resize(static_cast<std::size_t>(configs[i].trials));
    for (int k = 0; k < configs[i].trials; ++k) jobs.emplace_back(i, k);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const auto [ci, k] = jobs[j];
      try {
        const ExperimentConfig& c = configs[ci];
        r.trials[ci][static_cast<std::size_t>(k)] = run_trial(c, trial_seed(c.seed, c, k));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const int n = std::max(1, parallelism);
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  for (std::size_t i = 0; i < configs.size(); ++i) r.rows.push_back(aggregate(configs[i], r.trials[i]));
  return r;
}

namespace {

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string trim_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <typename Cell>
void write_grid(const MatrixResult& r, GuidanceMethod method, PathKind path, std::ostream& os, Cell cell) {
  std::vector<double> speeds;
  std::vector<double> fractions;
  std::map<std::pair<long, long>, const AggregateRow*> index;
  auto key = [](double v) { return std::lround(v * 1000.0); };
  for (const auto& row : r.rows) {
    if (row.method != method || row.path != path) continue;
    if (std::find(speeds.begin(), speeds.end(), row.uav_speed) == speeds.end()) speeds.push_back(row.uav_speed);
    if (std::find(fractions.begin(), fractions.end(), row.target_fraction) == fractions.end())
      fractions.push_back(row.target_fraction);
    index[{key(row.target_fraction), key(row.uav_speed)}] = &row;
  }
  std::sort(speeds.begin(), speeds.end());
  std::sort(fractions.begin(), fractions.end());
  os << "target_fraction";
  for (double v : speeds) os << ',' << trim_number(v);
  os << '\n';
  for (double f : fractions) {
    os << trim_number(f);
    for (double v : speeds) {
      os << ',';
      const auto it = index.find({key(f), key(v)});
      if (it != index.end()) os << cell(*it->second);
    }
    os << '\n';
  }
}

}  // namespace

void write_trials_csv(const MatrixResult& r, std::ostream& os) {
  os << "method,path,uav_speed,target_fraction,trial,seed,hit,duration,failure_reason,min_miss_distance,"
        "closing_velocity_handoff,phi_dot_handoff,phi_dot_final\n";
  for (std::size_t i = 0; i < r.configs.size(); ++i) {
    const auto& c = r.configs[i];
    for (std::size_t k = 0; k < r.trials[i].size(); ++k) {
      const TrialResult& t = r.trials[i][k];
      os << to_string(c.method) << ',' << to_string(c.path) << ',' << trim_number(c.uav_speed) << ','
         << trim_number(c.target_fraction) << ',' << k << ',' << t.seed << ',' << (t.hit ? 1 : 0) << ','
         << fmt(t.duration, 4) << ',' << to_string(t.failure_reason) << ',' << fmt(t.min_miss_distance, 4) << ','
         << fmt(t.closing_velocity_handoff, 4) << ',' << fmt(t.phi_dot_handoff, 5) << ','
         << fmt(t.phi_dot_final, 5) << '\n';
    }
  }
}

void write_aggregate_csv(const MatrixResult& r, std::ostream& os) {
  os << "method,path,uav_speed,target_fraction,trials,hits,hit_rate,mean_duration,completion_rate,unstable\n";
  for (const auto& row : r.rows) {
    os << to_string(row.method) << ',' << to_string(row.path) << ',' << trim_number(row.uav_speed) << ','
       << trim_number(row.target_fraction) << ',' << row.trials << ',' << row.hits << ',' << fmt(row.hit_rate, 4)
       << ',' << (row.mean_duration ? fmt(*row.mean_duration, 4) : std::string()) << ','
       << fmt(row.completion_rate, 4) << ',' << (row.unstable ? 1 : 0) << '\n';
  }
}

void write_heatmap_csv(const MatrixResult& r, GuidanceMethod method, PathKind path, std::ostream& os) {
  write_grid(r, method, path, os, [](const AggregateRow& row) { return fmt(row.hit_rate, 4); });
}

void write_duration_csv(const MatrixResult& r, GuidanceMethod method, PathKind path, std::ostream& os) {
  write_grid(r, method, path, os, [](const AggregateRow& row) {
    return row.mean_duration ? fmt(*row.mean_duration, 4) : std::string();
  });
}

std::vector<std::string> write_matrix_outputs(const MatrixResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string p = (fs::path(dir) / name).string();
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p);
    written.push_back(p);
    return f;
  };
  {
    auto f = open("trials.csv");
    write_trials_csv(r, f);
  }
  {
    auto f = open("aggregate.csv");
    write_aggregate_csv(r, f);
  }
  std::vector<std::pair<GuidanceMethod, PathKind>> cells;
  for (const auto& row : r.rows) {
    const std::pair<GuidanceMethod, PathKind> mp{row.method, row.path};
    if (std::find(cells.begin(), cells.end(), mp) == cells.end()) cells.push_back(mp);
  }
  for (const auto& [m, p] : cells) {
    const std::string suffix = std::string(to_string(m)) + "_" + std::string(to_string(p)) + ".csv";
    {
      auto f = open("heatmap_" + suffix);
      write_heatmap_csv(r, m, p, f);
    }
    {
      auto f = open("duration_" + suffix);
      write_duration_csv(r, m, p, f);
    }
  }
  return written;
}

}  // namespace losguide
