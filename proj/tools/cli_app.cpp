#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "softcell/channel.hpp"
#include "softcell/closedform.hpp"
#include "softcell/fading.hpp"
#include "softcell/format.hpp"
#include "softcell/logdet.hpp"
#include "softcell/lyapunov.hpp"
#include "softcell/markov.hpp"
#include "softcell/selftest.hpp"

namespace softcell::cli {

namespace {

using nlohmann::json;

// Seed resolution: explicit --seed wins, then the JACOBI_SEED environment
// variable, then 1.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& from_flag) {
  if (from_flag) return *from_flag;
  const char* env = std::getenv("JACOBI_SEED");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw std::runtime_error(std::string("JACOBI_SEED is not an unsigned integer: ") + env);
  }
  return static_cast<std::uint64_t>(value);
}

struct OutputOptions {
  std::string format = "csv";
  std::string path;  // empty = stdout
};

struct Table {
  std::vector<std::string> columns;
  std::vector<json> rows;
};

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (const char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string render_cell(const json& cell) {
  if (cell.is_string()) return csv_escape(cell.get<std::string>());
  if (cell.is_number_float()) return format_double(cell.get<double>());
  return cell.dump();
}

void write_table(const Table& table, const OutputOptions& out) {
  std::ofstream file;
  if (!out.path.empty()) {
    file.open(out.path);
    if (!file) throw std::runtime_error("cannot open output file: " + out.path);
  }
  std::ostream& os = out.path.empty() ? std::cout : file;

  if (out.format == "json") {
    json doc = json::array();
    for (const json& row : table.rows) doc.push_back(row);
    os << doc.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) os << ',';
    os << table.columns[i];
  }
  os << '\n';
  for (const json& row : table.rows) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i > 0) os << ',';
      os << render_cell(row.at(table.columns[i]));
    }
    os << '\n';
  }
}

void add_output_options(CLI::App* sub, OutputOptions* out) {
  sub->add_option("--format", out->format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("-o,--out", out->path, "Output file (default: stdout)");
}

FadingModel parse_model(const std::string& spec) {
  try {
    return FadingModel::parse(spec);
  } catch (const std::exception& err) {
    throw CLI::ValidationError("model", err.what());
  }
}

// Every subcommand that draws randomness shares this option block.
struct CommonOptions {
  std::string model_a = "rayleigh";
  std::string model_b = "rayleigh";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  void attach(CLI::App* sub, bool with_models = true) {
    if (with_models) {
      sub->add_option("--model-a", model_a,
                      "Gain law toward the receiver ahead (nonfading | rayleigh | phase-only | "
                      "scaled-rayleigh:<alpha> | maxk:<K>:<base> | empirical:<path>)")
          ->capture_default_str();
      sub->add_option("--model-b", model_b, "Gain law toward the receiver behind")
          ->capture_default_str();
    }
    sub->add_option("--seed", seed, "Random seed (default: JACOBI_SEED env var, else 1)");
    sub->add_option("--threads", threads,
                    "Worker threads, 0 = all cores (never changes the numbers)")
        ->capture_default_str();
  }
};

std::vector<double> resolve_powers(std::vector<double>& powers, std::vector<double>& snrs_db,
                                   double fallback) {
  if (!powers.empty()) return powers;
  if (!snrs_db.empty()) {
    std::vector<double> out;
    out.reserve(snrs_db.size());
    for (const double db : snrs_db) out.push_back(std::pow(10.0, db / 10.0));
    return out;
  }
  return {fallback};
}

int cmd_capacity(const CommonOptions& common, std::size_t cells, std::size_t users,
                 std::vector<double> powers, std::vector<double> snrs_db,
                 const std::string& protocol_name_in, std::uint64_t trials,
                 const OutputOptions& out) {
  const FadingModel a = parse_model(common.model_a);
  const FadingModel b = parse_model(common.model_b);
  const Protocol protocol = parse_protocol(protocol_name_in);
  const std::uint64_t seed = resolve_seed(common.seed);

  Table table;
  table.columns = {"M", "K", "P", "protocol", "trials", "mean_nats", "std_error", "seed"};
  for (const double p : resolve_powers(powers, snrs_db, 10.0)) {
    const CapacityEstimate est =
        capacity_mc(a, b, cells, users, p, protocol, trials, seed, common.threads);
    json row;
    row["M"] = est.cells;
    row["K"] = est.users;
    row["P"] = est.power;
    row["protocol"] = std::string(protocol_name(est.protocol));
    row["trials"] = est.trials;
    row["mean_nats"] = est.mean_nats;
    row["std_error"] = est.std_error;
    row["seed"] = est.seed;
    table.rows.push_back(std::move(row));
  }
  write_table(table, out);
  return 0;
}

void append_ladder_rows(Table& table, const OffsetBoundLadder& ladder) {
  const SnrCharacterization refs = rayleigh_wb_snr_characterization(ladder.users);
  for (const OffsetBound& e : ladder.entries) {
    json row;
    row["K"] = ladder.users;
    row["n"] = e.order;
    row["trials"] = ladder.trials;
    row["lower_Linf_bits"] = e.l_inf_lower_bits;
    row["lower_se"] = e.l_inf_lower_se_bits;
    row["upper_Linf_bits"] = e.l_inf_upper_bits;
    row["upper_se"] = e.l_inf_upper_se_bits;
    row["ref_narula"] = refs.l_inf_upper_bits;
    row["ref_sqrt_bound"] = refs.l_inf_lower_bits;
    row["ref_asymptotic"] = -1.0;
    table.rows.push_back(std::move(row));
  }
}

int cmd_bounds(const CommonOptions& common, std::size_t users, std::uint32_t order,
               std::uint64_t trials, bool uncoupled, const OutputOptions& out) {
  const FadingModel a = parse_model(common.model_a);
  const FadingModel b = parse_model(common.model_b);
  const OffsetBoundLadder ladder = offset_ladder(a, b, users, order, trials,
                                                 resolve_seed(common.seed), !uncoupled,
                                                 common.threads);
  Table table;
  table.columns = {"K",
                   "n",
                   "trials",
                   "lower_Linf_bits",
                   "lower_se",
                   "upper_Linf_bits",
                   "upper_se",
                   "ref_narula",
                   "ref_sqrt_bound",
                   "ref_asymptotic"};
  append_ladder_rows(table, ladder);
  write_table(table, out);
  return 0;
}

int cmd_figures(const CommonOptions& common, std::vector<std::size_t> users_list,
                std::uint32_t order, std::uint64_t trials, const OutputOptions& out) {
  const FadingModel a = parse_model(common.model_a);
  const FadingModel b = parse_model(common.model_b);
  const std::uint64_t seed = resolve_seed(common.seed);
  Table table;
  table.columns = {"K",
                   "n",
                   "trials",
                   "lower_Linf_bits",
                   "lower_se",
                   "upper_Linf_bits",
                   "upper_se",
                   "ref_narula",
                   "ref_sqrt_bound",
                   "ref_asymptotic"};
  for (const std::size_t users : users_list) {
    append_ladder_rows(table, offset_ladder(a, b, users, order, trials, seed, true,
                                            common.threads));
  }
  write_table(table, out);
  return 0;
}

int cmd_tdma_offset(const CommonOptions& common, std::uint64_t samples,
                    const OutputOptions& out) {
  const FadingModel a = parse_model(common.model_a);
  const FadingModel b = parse_model(common.model_b);
  const TdmaOffset offset =
      high_snr_offset_tdma(a, b, samples, resolve_seed(common.seed));
  Table table;
  table.columns = {"model_a", "model_b",  "samples",    "offset_nats",
                   "se_nats", "l_inf_bits", "l_inf_se_bits"};
  json row;
  row["model_a"] = a.spec();
  row["model_b"] = b.spec();
  row["samples"] = samples;
  row["offset_nats"] = offset.offset_nats;
  row["se_nats"] = offset.se_nats;
  row["l_inf_bits"] = offset.l_inf_bits;
  row["l_inf_se_bits"] = offset.l_inf_se_bits;
  table.rows.push_back(std::move(row));
  write_table(table, out);
  return 0;
}

int cmd_closed_form(std::size_t users, std::vector<double> powers, std::vector<double> snrs_db,
                    const OutputOptions& out) {
  Table table;
  table.columns = {"P", "K", "quantity", "value"};
  const std::complex<double> zero_mean{0.0, 0.0};
  auto push = [&table](double p, std::size_t k, const char* quantity, double value) {
    json row;
    row["P"] = p;
    row["K"] = k;
    row["quantity"] = quantity;
    row["value"] = value;
    table.rows.push_back(std::move(row));
  };
  std::vector<double> grid =
      powers.empty() && snrs_db.empty()
          ? std::vector<double>{0.1, 1.0, 10.0, 100.0}
          : resolve_powers(powers, snrs_db, 10.0);
  for (const double p : grid) {
    push(p, users, "rate_nonfading", rate_nonfading(p));
    push(p, users, "rate_tdma_rayleigh", rate_tdma_rayleigh(p));
    push(p, users, "rate_wb_upper", rate_wb_upper(p, users, zero_mean, 1.0));
  }
  // Power-independent extreme-SNR parameters are reported with P = 0.
  const SnrCharacterization snr = rayleigh_wb_snr_characterization(users);
  push(0.0, users, "s0", snr.s0);
  push(0.0, users, "ebno_min", snr.ebno_min);
  push(0.0, users, "s_inf", snr.s_inf);
  push(0.0, users, "linf_lower_bits", snr.l_inf_lower_bits);
  push(0.0, users, "linf_upper_bits", snr.l_inf_upper_bits);
  write_table(table, out);
  return 0;
}

int cmd_lyapunov(const CommonOptions& common, double lambda, std::uint64_t cells,
                 std::uint64_t reps, std::uint32_t windows, std::uint64_t trials,
                 const OutputOptions& out) {
  if (!(lambda < 0.0)) throw CLI::ValidationError("--lambda", "must be negative");
  const FadingModel a = parse_model(common.model_a);
  const FadingModel b = parse_model(common.model_b);
  const std::uint64_t seed = resolve_seed(common.seed);
  Table table;
  if (windows == 0) {
    const LyapunovEstimate est =
        lyapunov_estimate(a, b, lambda, cells, reps, seed, MatrixNorm::Spectral, common.threads);
    table.columns = {"lambda", "M", "reps", "gamma_hat", "se"};
    json row;
    row["lambda"] = est.lambda;
    row["M"] = est.cells;
    row["reps"] = est.reps;
    row["gamma_hat"] = est.gamma_hat;
    row["se"] = est.se;
    table.rows.push_back(std::move(row));
  } else {
    table.columns = {"lambda", "k", "trials", "upper_bound", "se"};
    for (std::uint32_t k = 1; k <= windows; ++k) {
      const UpperBoundEstimate est =
          lyapunov_upper_bound(a, b, lambda, k, trials, seed, common.threads);
      json row;
      row["lambda"] = est.lambda;
      row["k"] = est.window;
      row["trials"] = est.trials;
      row["upper_bound"] = est.bound;
      row["se"] = est.se;
      table.rows.push_back(std::move(row));
    }
  }
  write_table(table, out);
  return 0;
}

int cmd_selftest(const CommonOptions& common, int number) {
  const std::uint64_t seed = resolve_seed(common.seed);
  std::vector<selftest::CheckResult> results;
  if (number == 0) {
    results = selftest::run_all(seed, common.threads);
  } else {
    results.push_back(selftest::run_check(number, seed, common.threads));
  }
  int passed = 0;
  for (const selftest::CheckResult& r : results) {
    std::printf("criterion %02d %-24s %s (%.2f s)  %s\n", r.number, r.name.c_str(),
                r.passed ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    passed += r.passed ? 1 : 0;
  }
  std::printf("%d/%zu criteria passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Ergodic per-cell rates of the soft-handoff cellular uplink"};
  app.require_subcommand(1);

  // --- capacity ---
  CLI::App* capacity = app.add_subcommand(
      "capacity", "Monte Carlo per-cell rate (nats) of the joint-processing uplink");
  CommonOptions cap_common;
  std::size_t cap_cells = 1000;
  std::size_t cap_users = 1;
  std::vector<double> cap_powers;
  std::vector<double> cap_snrs;
  std::string cap_protocol = "wb";
  std::uint64_t cap_trials = 1000;
  OutputOptions cap_out;
  capacity->add_option("-M,--cells", cap_cells, "Number of cells")->capture_default_str();
  capacity->add_option("-K,--users", cap_users, "Users per group")->capture_default_str();
  CLI::Option* cap_p = capacity->add_option("-P,--power", cap_powers,
                                            "Total group power (repeatable; default 10)");
  capacity->add_option("--snr-db", cap_snrs, "Power in dB (repeatable)")->excludes(cap_p);
  capacity->add_option("--protocol", cap_protocol, "wb (simultaneous) or tdma (time sharing)")
      ->check(CLI::IsMember({"wb", "tdma"}))
      ->capture_default_str();
  capacity->add_option("--trials", cap_trials, "Monte Carlo trials")->capture_default_str();
  cap_common.attach(capacity);
  add_output_options(capacity, &cap_out);

  // --- bounds ---
  CLI::App* bounds = app.add_subcommand(
      "bounds", "High-SNR power-offset bound ladder from the pivot chain");
  CommonOptions bnd_common;
  std::size_t bnd_users = 2;
  std::uint32_t bnd_order = 8;
  std::uint64_t bnd_trials = 100000;
  bool bnd_uncoupled = false;
  OutputOptions bnd_out;
  bounds->add_option("-K,--users", bnd_users, "Users per group")->capture_default_str();
  bounds->add_option("-n,--order", bnd_order, "Highest chain order")->capture_default_str();
  bounds->add_option("--trials", bnd_trials, "Monte Carlo trials")->capture_default_str();
  bounds->add_flag("--uncoupled", bnd_uncoupled,
                   "Draw the two chain starts independently instead of coupled");
  bnd_common.attach(bounds);
  add_output_options(bounds, &bnd_out);

  // --- tdma-offset ---
  CLI::App* tdma = app.add_subcommand(
      "tdma-offset", "Analytic high-SNR offset of the time-sharing protocol");
  CommonOptions tdma_common;
  std::uint64_t tdma_samples = kDefaultMomentSamples;
  OutputOptions tdma_out;
  tdma->add_option("--samples", tdma_samples, "Monte Carlo budget for sampled log moments")
      ->capture_default_str();
  tdma_common.attach(tdma);
  add_output_options(tdma, &tdma_out);

  // --- closed-form ---
  CLI::App* closed = app.add_subcommand(
      "closed-form", "Closed-form rates and extreme-SNR parameters (Rayleigh/non-fading)");
  std::size_t cf_users = 1;
  std::vector<double> cf_powers;
  std::vector<double> cf_snrs;
  OutputOptions cf_out;
  closed->add_option("-K,--users", cf_users, "Users per group")->capture_default_str();
  CLI::Option* cf_p = closed->add_option("-P,--power", cf_powers,
                                         "Total group power (repeatable; default grid)");
  closed->add_option("--snr-db", cf_snrs, "Power in dB (repeatable)")->excludes(cf_p);
  add_output_options(closed, &cf_out);

  // --- lyapunov ---
  CLI::App* lyap = app.add_subcommand(
      "lyapunov", "Growth rate of the shifted determinant recurrence");
  CommonOptions lyap_common;
  double lyap_lambda = -0.1;
  std::uint64_t lyap_cells = 2000;
  std::uint64_t lyap_reps = 400;
  std::uint32_t lyap_windows = 0;
  std::uint64_t lyap_trials = 20000;
  OutputOptions lyap_out;
  lyap->add_option("--lambda", lyap_lambda, "Spectral shift (negative)")->capture_default_str();
  lyap->add_option("-M,--cells", lyap_cells, "Product length per replicate")
      ->capture_default_str();
  lyap->add_option("--reps", lyap_reps, "Replicates for the growth-rate estimate")
      ->capture_default_str();
  lyap->add_option("--windows", lyap_windows,
                   "Emit finite-window upper bounds for k = 1..N instead of the estimate");
  lyap->add_option("--trials", lyap_trials, "Trials per finite-window bound")
      ->capture_default_str();
  lyap_common.attach(lyap);
  add_output_options(lyap, &lyap_out);

  // --- figures ---
  CLI::App* figures = app.add_subcommand(
      "figures", "Bound-ladder tables across group sizes (plot-ready)");
  CommonOptions fig_common;
  std::vector<std::size_t> fig_users = {2, 4, 10, 50};
  std::uint32_t fig_order = 8;
  std::uint64_t fig_trials = 100000;
  OutputOptions fig_out;
  figures->add_option("-K,--users", fig_users, "Group sizes")->capture_default_str();
  figures->add_option("-n,--order", fig_order, "Highest chain order")->capture_default_str();
  figures->add_option("--trials", fig_trials, "Monte Carlo trials per group size")
      ->capture_default_str();
  fig_common.attach(figures);
  add_output_options(figures, &fig_out);

  // --- selftest ---
  CLI::App* self = app.add_subcommand(
      "selftest", "Run the numbered verification checks (exit 1 on any failure)");
  CommonOptions self_common;
  int self_check = 0;
  self->add_option("--check", self_check, "Single check number (default: all)")
      ->check(CLI::Range(1, selftest::kNumChecks));
  self_common.attach(self, /*with_models=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (capacity->parsed()) {
      return cmd_capacity(cap_common, cap_cells, cap_users, cap_powers, cap_snrs, cap_protocol,
                          cap_trials, cap_out);
    }
    if (bounds->parsed()) {
      return cmd_bounds(bnd_common, bnd_users, bnd_order, bnd_trials, bnd_uncoupled, bnd_out);
    }
    if (tdma->parsed()) return cmd_tdma_offset(tdma_common, tdma_samples, tdma_out);
    if (closed->parsed()) return cmd_closed_form(cf_users, cf_powers, cf_snrs, cf_out);
    if (lyap->parsed()) {
      return cmd_lyapunov(lyap_common, lyap_lambda, lyap_cells, lyap_reps, lyap_windows,
                          lyap_trials, lyap_out);
    }
    if (figures->parsed()) {
      return cmd_figures(fig_common, fig_users, fig_order, fig_trials, fig_out);
    }
    if (self->parsed()) return cmd_selftest(self_common, self_check);
  } catch (const CLI::ValidationError& err) {
    std::fprintf(stderr, "softcell: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "softcell: %s\n", err.what());
    return 2;
  }
  return 2;
}

}  // namespace softcell::cli
