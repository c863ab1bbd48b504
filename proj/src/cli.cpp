#include "mixgap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mixgap/errors.hpp"
#include "mixgap/io.hpp"
#include "mixgap/lower_bound_lab.hpp"
#include "mixgap/rng.hpp"

namespace mixgap::cli {

namespace {

using io::Json;
using io::number;

struct Options {
  std::string matrix;
  std::string traj;
  std::string out_path;
  std::string mu = "stationary";
  std::string family_kind;
  std::string p_list;
  int d = 0;
  std::int64_t m = 0;
  std::uint64_t seed = 1;
  int K = 0;
  double adaptive_eps = 0.0;
  double alpha = 0.0;
  double delta = 0.05;
  double xi = 0.25;
  int kmax = 0;
  int runs = 200;
  bool table = false;
  bool csv = false;
  bool reversible = false;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return kParse;
    case ErrorCode::NonErgodic:
      return kNonErgodic;
    case ErrorCode::NoConvergence:
    case ErrorCode::EigensolverFailure:
      return kSolver;
    default:
      return kPrecondition;
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      require(used == cell.size() || cell.find_first_not_of(" \t", used) == std::string::npos, ErrorCode::ParseError,
              "bad number '" + cell + "'");
    } catch (const std::logic_error&) {
      fail(ErrorCode::ParseError, "bad number '" + cell + "'");
    }
  }
  return values;
}

/// Splices keys of a JSON config object in as flags that were not given.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      require(i + 1 < args.size(), ErrorCode::ParseError, "--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!path) return out;

  std::ifstream in(*path);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open config " + *path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  require(cfg.is_object(), ErrorCode::ParseError, "config must be a JSON object");
  auto given = [&](const std::string& flag) {
    return std::any_of(out.begin(), out.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + v.dump();
      out.push_back(flag);
      out.push_back(joined);
    } else {
      out.push_back(flag);
      out.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return out;
}

void emit(const Json& j, const Options& o, std::ostream& out) {
  if (o.csv) {
    out << io::to_csv(j);
  } else if (o.table) {
    out << io::to_table(j);
  } else {
    out << j.dump(2) << '\n';
  }
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json bounds_json(const TmixBounds& b) { return Json{{"lower", number(b.lower)}, {"upper", number(b.upper)}}; }

int cmd_spectrum(const Options& o, std::ostream& out) {
  const TransitionMatrix m = io::read_matrix(o.matrix);
  const std::optional<int> kmax = o.kmax > 0 ? std::optional<int>(o.kmax) : std::nullopt;
  const SpectralSummary s = spectral_summary(m, kmax, o.xi);
  const StationaryDistribution pi = stationary_distribution(m);

  Json j{{"command", "spectrum"}, {"d", m.dim()}, {"pi", vector_json(pi.probs())}};
  const Json summary = io::to_json(s);
  for (const auto& [key, value] : summary.items()) j[key] = value;
  Json bounds;
  bounds["reversible"] = s.gamma_star ? bounds_json(tmix_bounds(s, s.pi_min, BoundMode::Reversible)) : Json(nullptr);
  bounds["pseudo"] = bounds_json(tmix_bounds(s, s.pi_min, BoundMode::Pseudo));
  bounds["dilated"] = bounds_json(tmix_bounds(s, s.pi_min, BoundMode::Dilated));
  j["tmix_bounds"] = std::move(bounds);
  emit(j, o, out);
  return kOk;
}

Vector resolve_mu(const std::string& spec, const TransitionMatrix& m) {
  if (spec == "stationary") return stationary_distribution(m).probs();
  if (spec == "uniform") return Vector::Constant(m.dim(), 1.0 / static_cast<double>(m.dim()));
  const std::vector<double> values = parse_list(spec);
  require(static_cast<Eigen::Index>(values.size()) == m.dim(), ErrorCode::InvalidDistribution,
          "--mu needs d comma-separated probabilities");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const TransitionMatrix m = io::read_matrix(o.matrix);
  require(o.m >= 1, ErrorCode::InvalidArgument, "--m must be >= 1");
  const Trajectory t = simulate(m, resolve_mu(o.mu, m), static_cast<std::size_t>(o.m), o.seed);
  if (o.out_path.empty()) {
    io::write_trajectory(t, out);
  } else {
    std::ofstream file(o.out_path);
    require(static_cast<bool>(file), ErrorCode::ParseError, "cannot write " + o.out_path);
    io::write_trajectory(t, file);
  }
  return kOk;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  // First pass: length, state range and skip-1 visit counts.
  std::int64_t length = 0;
  std::uint32_t max_state = 0;
  std::uint32_t last = 0;
  std::vector<std::int64_t> visits;
  io::for_each_state(o.traj, [&](std::uint32_t s) {
    if (s >= visits.size()) visits.resize(static_cast<std::size_t>(s) + 1, 0);
    ++visits[s];
    max_state = std::max(max_state, s);
    last = s;
    ++length;
  });
  require(length >= 2, ErrorCode::InvalidArgument, "trajectory needs at least two states");
  const int d = o.d > 0 ? o.d : static_cast<int>(max_state) + 1;
  require(max_state < static_cast<std::uint32_t>(d), ErrorCode::InvalidArgument, "state index exceeds --d");
  visits.resize(static_cast<std::size_t>(d), 0);
  --visits[last];
  const std::int64_t n_min = *std::min_element(visits.begin(), visits.end());

  int K = o.K > 0 ? o.K : 1;
  if (o.adaptive_eps > 0.0) K = adaptive_K(n_min, length, o.adaptive_eps);
  require(K <= length - 1, ErrorCode::SkipTooLarge, "K exceeds m - 1");
  const double alpha = o.alpha > 0.0 ? o.alpha : 1.0 / static_cast<double>(length - 1);

  SkipCountAccumulator acc(d, K);
  io::for_each_state(o.traj, [&](std::uint32_t s) { acc.push(s); });
  const std::vector<SkippedCounts> counts = acc.all_counts();

  const ConfidenceReport gap = pssg_interval(counts, alpha, o.delta);
  const ConfidenceReport pimin = pimin_interval(counts.front(), alpha, o.delta, K);

  Json j{{"command", "estimate"},
         {"m", length},
         {"d", d},
         {"K", K},
         {"K_mode", o.adaptive_eps > 0.0 ? "adaptive" : "fixed"},
         {"alpha", alpha},
         {"delta", o.delta},
         {"pimin_hat_unsmoothed", static_cast<double>(n_min) / static_cast<double>(length - 1)},
         {"pssg_dilated", io::to_json(gap)},
         {"pimin", io::to_json(pimin)}};
  if (o.adaptive_eps > 0.0) j["adaptive_eps"] = o.adaptive_eps;
  if (o.reversible) {
    const ReversibleReport rev = reversible_intervals(counts.front(), alpha, o.delta);
    j["asg_reversible"] = io::to_json(rev.asg);
    j["pimin_reversible"] = io::to_json(rev.pimin);
  }
  emit(j, o, out);
  return kOk;
}

int cmd_coverage(const Options& o, std::ostream& out) {
  const TransitionMatrix m = io::read_matrix(o.matrix);
  CoverageOptions c;
  c.m = o.m > 0 ? o.m : c.m;
  c.runs = o.runs;
  c.K = o.K > 0 ? o.K : c.K;
  c.alpha = o.alpha > 0.0 ? o.alpha : c.alpha;
  c.delta = o.delta;
  c.seed = o.seed;
  const CoverageResult r = coverage_experiment(m, c);
  Json j{{"command", "coverage"},
         {"m", c.m},
         {"runs", r.runs},
         {"K", c.K},
         {"alpha", c.alpha},
         {"delta", c.delta},
         {"seed", c.seed},
         {"true_pssg_dilated", number(r.true_pssg_dilated)},
         {"true_pimin", number(r.true_pimin)},
         {"coverage_pssg", r.coverage_pssg()},
         {"coverage_pimin", r.coverage_pimin()},
         {"finite_pssg_runs", r.finite_pssg},
         {"mean_half_width_pssg", number(r.mean_half_width_pssg)},
         {"mean_half_width_pimin", number(r.mean_half_width_pimin)},
         {"mean_point_pssg", number(r.mean_point_pssg)},
         {"mean_point_pimin", number(r.mean_point_pimin)}};
  emit(j, o, out);
  return kOk;
}

int cmd_family(const Options& o, std::ostream& out) {
  Matrix m;
  if (o.family_kind == "star") {
    Vector p;
    if (!o.p_list.empty()) {
      const std::vector<double> v = parse_list(o.p_list);
      p = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else {
      require(o.d >= 1, ErrorCode::InvalidArgument, "star family needs --d or --p");
      p = Vector::Constant(o.d, 1.0 / o.d);
    }
    m = lab::star_chain(o.alpha, p).matrix.entries();
  } else {
    m = lab::symmetric_family(o.alpha, o.d).matrix.entries();
  }
  const std::string body = o.csv ? io::matrix_to_csv(m) : io::matrix_to_json(m).dump(2) + "\n";
  if (o.out_path.empty()) {
    out << body;
  } else {
    std::ofstream file(o.out_path);
    require(static_cast<bool>(file), ErrorCode::ParseError, "cannot write " + o.out_path);
    file << body;
  }
  return kOk;
}

}  // namespace

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MIXGAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

CoverageResult coverage_experiment(const TransitionMatrix& m, const CoverageOptions& opts) {
  require(opts.m >= 2, ErrorCode::InvalidArgument, "coverage needs m >= 2");
  require(opts.runs >= 1, ErrorCode::InvalidArgument, "coverage needs runs >= 1");
  require(opts.K >= 1 && opts.K <= opts.m - 1, ErrorCode::SkipTooLarge, "K must lie in [1, m-1]");
  const StationaryDistribution pi = stationary_distribution(m);

  CoverageResult res;
  res.runs = opts.runs;
  res.true_pssg_dilated = dilated_pseudo_spectral_gap(m, pi).value;
  res.true_pimin = pi.pi_min();

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(opts.runs));
  SplitMix64 seeder(opts.seed);
  for (auto& s : seeds) s = seeder.next();

  struct RunOut {
    ConfidenceReport gap;
    ConfidenceReport pimin;
  };
  std::vector<RunOut> outs(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto worker = [&] {
    for (std::size_t r = next++; r < seeds.size(); r = next++) {
      try {
        const Trajectory t = simulate(m, pi.probs(), static_cast<std::size_t>(opts.m), seeds[r]);
        std::vector<SkippedCounts> counts;
        for (int k = 1; k <= opts.K; ++k) counts.push_back(skipped_counts(t, k));
        outs[r].gap = pssg_interval(counts, opts.alpha, opts.delta);
        outs[r].pimin = pimin_interval(counts.front(), opts.alpha, opts.delta, opts.K);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_workers = std::min<unsigned>(worker_count(opts.threads), static_cast<unsigned>(seeds.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (const RunOut& o : outs) {
    res.covered_pssg += o.gap.contains(res.true_pssg_dilated) ? 1 : 0;
    res.covered_pimin += o.pimin.contains(res.true_pimin) ? 1 : 0;
    res.finite_pssg += std::isfinite(o.gap.half_width) ? 1 : 0;
    res.mean_half_width_pssg += o.gap.half_width;
    res.mean_half_width_pimin += o.pimin.half_width;
    res.mean_point_pssg += o.gap.point;
    res.mean_point_pimin += o.pimin.point;
  }
  const double n = static_cast<double>(outs.size());
  res.mean_half_width_pssg /= n;
  res.mean_half_width_pimin /= n;
  res.mean_point_pssg /= n;
  res.mean_point_pimin /= n;
  return res;
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mixing-time estimation from a single Markov chain trajectory", "mixgap"};
  app.require_subcommand(1);
  app.add_flag("--table", o.table, "Render output as an aligned two-column table");
  app.add_flag("--csv", o.csv, "Render output as flattened CSV rows (matrix CSV for `family`)");

  auto* spectrum = app.add_subcommand("spectrum", "Exact spectral quantities of a known chain");
  spectrum->add_option("--matrix", o.matrix, "Matrix file (JSON or CSV)")->required();
  spectrum->add_option("--kmax", o.kmax, "Largest power scanned (default: automatic)")->check(CLI::NonNegativeNumber);
  spectrum->add_option("--xi", o.xi, "Mixing precision")->check(CLI::Range(0.0, 0.5));

  auto* sim = app.add_subcommand("simulate", "Sample a trajectory");
  sim->add_option("--matrix", o.matrix, "Matrix file (JSON or CSV)")->required();
  sim->add_option("--m", o.m, "Trajectory length")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", o.seed, "64-bit seed");
  sim->add_option("--mu", o.mu, "stationary | uniform | comma-separated probabilities");
  sim->add_option("--out", o.out_path, "Output file (default stdout)");

  auto* est = app.add_subcommand("estimate", "Point estimates and confidence intervals from a trajectory");
  est->add_option("--traj", o.traj, "Trajectory file, one state per line")->required();
  est->add_option("--d", o.d, "Number of states (default: largest state + 1)")->check(CLI::PositiveNumber);
  auto* k_opt = est->add_option("--K", o.K, "Largest skip rate")->check(CLI::PositiveNumber);
  est->add_option("--adaptive-eps", o.adaptive_eps, "Choose K = ceil(cbrt(Nmin/eps))")
      ->check(CLI::PositiveNumber)
      ->excludes(k_opt);
  est->add_option("--alpha", o.alpha, "Smoothing (default 1/(m-1))")->check(CLI::PositiveNumber);
  est->add_option("--delta", o.delta, "Confidence parameter")->check(CLI::Range(0.0, 1.0));
  est->add_flag("--reversible", o.reversible, "Also report the reversible-case intervals");

  auto* cov = app.add_subcommand("coverage", "Monte-Carlo coverage of the confidence intervals");
  cov->add_option("--matrix", o.matrix, "Matrix file (JSON or CSV)")->required();
  cov->add_option("--m", o.m, "Trajectory length")->check(CLI::PositiveNumber);
  cov->add_option("--runs", o.runs, "Number of trajectories")->check(CLI::PositiveNumber);
  cov->add_option("--K", o.K, "Largest skip rate (default 10)")->check(CLI::PositiveNumber);
  cov->add_option("--alpha", o.alpha, "Smoothing (default 1)")->check(CLI::PositiveNumber);
  cov->add_option("--delta", o.delta, "Confidence parameter")->check(CLI::Range(0.0, 1.0));
  cov->add_option("--seed", o.seed, "Master seed");

  auto* fam = app.add_subcommand("family", "Emit a lower-bound family instance as a matrix file");
  fam->add_option("kind", o.family_kind, "star | symmetric")->required()->check(CLI::IsMember({"star", "symmetric"}));
  fam->add_option("--alpha", o.alpha, "Family parameter")->required();
  fam->add_option("--d", o.d, "Number of spokes (star) or states (symmetric)");
  fam->add_option("--p", o.p_list, "Spoke distribution, comma-separated (star)");
  fam->add_option("--out", o.out_path, "Output file (default stdout)");

  for (auto* sub : {spectrum, sim, est, cov, fam}) sub->fallthrough();

  try {
    std::vector<std::string> args = expand_config(args_in);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
      app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kParse;
    }
    if (o.csv && o.table) fail(ErrorCode::InvalidArgument, "--csv and --table are exclusive");
    if (spectrum->parsed()) return cmd_spectrum(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (est->parsed()) return cmd_estimate(o, out);
    if (cov->parsed()) return cmd_coverage(o, out);
    return cmd_family(o, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPrecondition;
  }
}

}  // namespace mixgap::cli
